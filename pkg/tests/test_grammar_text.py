"""Parsing, serialization and diffing of grammar text."""

import pytest
from hypothesis import given, strategies as st

from gopt.model import (
    Counts,
    DuplicateRuleNameError,
    Grammar,
    GrammarError,
    GrammarRule,
    LineEntry,
    UnterminatedRuleError,
    diff_grammars,
    parse_grammar,
    serialize_grammar,
    split_quoted,
)

from conftest import corpus_paths, fixture_text
from oracles import lcs_length, normalize_grammar_text


SMALL = """grammar demo.Demo with org.eclipse.xtext.common.Terminals
import "http://example.org/demo"

Thing returns Thing:
	{Thing}
	'thing' name=EString
;

EString returns ecore::EString:
	STRING | ID
;
"""


def test_header_ends_at_first_declaration():
    g = parse_grammar(SMALL)
    assert g.header == [
        "grammar demo.Demo with org.eclipse.xtext.common.Terminals",
        'import "http://example.org/demo"',
    ]
    assert [r.name for r in g.rules] == ["Thing"]
    assert [t.name for t in g.terminals] == ["EString"]


def test_declaration_is_first_line_of_rule():
    g = parse_grammar(SMALL)
    rule = g.rule("Thing")
    assert rule.lines[0].content == "Thing returns Thing:"
    assert rule.name == "Thing"
    assert rule.returns_type == "Thing"
    assert len(rule.lines) == 3


def test_body_lines_are_trimmed_and_blanks_dropped():
    text = "R returns R:\n   {R}\n\n\t  'r'   \n ;\n"
    g = parse_grammar(text)
    assert [e.content for e in g.rule("R").lines] == ["R returns R:", "{R}", "'r'"]


def test_attr_name_is_first_assignment_outside_quotes():
    assert LineEntry.of("('node' node=NodeId)?").attr_name == "node"
    assert LineEntry.of("(unordered?='unordered')?").attr_name == "unordered"
    assert LineEntry.of("attrs+=Attr").attr_name == "attrs"
    assert LineEntry.of("'a=b' real=X").attr_name == "real"
    assert LineEntry.of("'keyword only'").attr_name is None


def test_attr_name_ignores_equality_comparison():
    # == is not an assignment
    assert LineEntry.of("x==y").attr_name is None


def test_inline_terminator_after_body_text():
    g = parse_grammar("R:\n\t'r';\n")
    assert [e.content for e in g.rule("R").lines] == ["R:", "'r'"]


def test_inline_body_after_colon():
    g = parse_grammar("R: 'r'\n;\n")
    assert [e.content for e in g.rule("R").lines] == ["R:", "'r'"]


def test_unterminated_rule_reports_declaration_line():
    with pytest.raises(UnterminatedRuleError) as err:
        parse_grammar("R:\n\t'r'\n")
    assert "line 1" in str(err.value)


def test_duplicate_rule_name_rejected():
    with pytest.raises(DuplicateRuleNameError):
        parse_grammar("R:\n\t'r'\n;\nR:\n\t'x'\n;\n")


def test_stray_top_level_text_rejected():
    with pytest.raises(GrammarError):
        parse_grammar("R:\n\t'r'\n;\nnot a rule\n")


def test_comment_between_rules_folds_into_next_body():
    text = "A:\n\t'a'\n;\n// note\nB:\n\t'b'\n;\n"
    g = parse_grammar(text)
    assert [e.content for e in g.rule("B").lines] == ["B:", "// note", "'b'"]


def test_terminal_classification():
    text = (
        "terminal FANCY:\n\t'f'\n;\n"
        "INT2 returns ecore::EInt:\n\t'0'\n;\n"
        "ID3:\n\t'x'\n;\n"
        "Qualified returns other::Thing:\n\t'q'\n;\n"
    )
    g = parse_grammar(text)
    assert sorted(t.name for t in g.terminals) == ["FANCY", "ID3", "INT2"]
    # a non-ecore qualified return type stays a production rule
    assert [r.name for r in g.rules] == ["Qualified"]


def test_split_quoted_unbalanced_quote_is_plain_text():
    spans = split_quoted("a 'b")
    assert all(not quoted for quoted, _, _ in spans)


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_round_trip_matches_independent_normalizer(path):
    text = path.read_text(encoding="utf-8")
    assert serialize_grammar(parse_grammar(text)) == normalize_grammar_text(text)


def test_serialize_empty_grammar():
    assert serialize_grammar(Grammar()) == ""


def test_serialize_is_stable_after_reparse():
    text = fixture_text("dot_generated.xtext")
    once = serialize_grammar(parse_grammar(text))
    twice = serialize_grammar(parse_grammar(once))
    assert once == twice


# --- diffing ---------------------------------------------------------------


def _grammar(*rule_texts):
    rules = []
    for text in rule_texts:
        rules.append(GrammarRule([LineEntry.of(line) for line in text]))
    return Grammar(rules=rules)


def test_diff_identical_is_empty():
    a = parse_grammar(SMALL)
    b = parse_grammar(SMALL)
    assert diff_grammars(a, b).is_empty()


def test_diff_counts_added_and_deleted_rules():
    a = _grammar(["A:", "'a'"], ["B:", "'b'"])
    b = _grammar(["A:", "'a'"], ["C:", "'c'"])
    delta = diff_grammars(a, b)
    assert delta.only_in_a == ["B"]
    assert delta.only_in_b == ["C"]
    assert delta.rule_counts == Counts(modified=0, added=1, deleted=1)
    # whole rules never contribute line counts
    assert delta.line_counts == Counts()


def test_diff_pairs_replacements_as_modified():
    a = _grammar(["A:", "'x'", "'same'"])
    b = _grammar(["A:", "'y'", "'same'"])
    delta = diff_grammars(a, b)
    assert delta.rule_counts == Counts(modified=1, added=0, deleted=0)
    assert delta.line_counts == Counts(modified=1, added=0, deleted=0)


def test_diff_of_nodestmt_pipeline_shape():
    # seven-line generated rule against its four-line optimized form
    a = _grammar([
        "NodeStmt returns NodeStmt:",
        "{NodeStmt}",
        "'NodeStmt'",
        "'{'",
        "('node' node=NodeId)?",
        "('attrLists' '{' attrLists+=AttrList ( \",\" attrLists+=AttrList)* '}' )?",
        "'}'",
    ])
    b = _grammar([
        "NodeStmt returns NodeStmt:",
        "{NodeStmt}",
        "node=NodeId",
        "(attrLists+=AttrList)*",
    ])
    delta = diff_grammars(a, b)
    assert delta.rule_counts == Counts(modified=1, added=0, deleted=0)
    assert delta.line_counts == Counts(modified=2, added=0, deleted=3)


@given(
    st.lists(st.sampled_from(["'a'", "'b'", "x=Y", "(z=W)?"]), max_size=8),
    st.lists(st.sampled_from(["'a'", "'b'", "x=Y", "(z=W)?"]), max_size=8),
)
def test_lcs_agrees_with_reference(xs, ys):
    from gopt.model import _lcs_length

    assert _lcs_length(xs, ys) == lcs_length(xs, ys)


@given(st.lists(st.sampled_from(["'a'", "x=Y", "(z=W)?", "'{'"]), min_size=1, max_size=6))
def test_roundtrip_of_synthetic_rule_bodies(body):
    rule = GrammarRule([LineEntry.of("R:")] + [LineEntry.of(b) for b in body])
    g = Grammar(rules=[rule])
    text = serialize_grammar(g)
    again = parse_grammar(text)
    assert serialize_grammar(again) == text
