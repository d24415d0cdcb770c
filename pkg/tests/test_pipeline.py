"""Configuration parsing, the optimization driver, and change reports."""

import copy

import pytest

from conftest import fixture_text
from oracles import diff_counts
from gopt.engine import (
    BadArityError,
    ChangeReport,
    ConfigError,
    MalformedLineError,
    dry_run,
    optimize,
    parse_configuration,
)
from gopt.model import parse_grammar, serialize_grammar
from gopt.rules import APPLIED, SCOPE_NOT_FOUND, UnknownRuleKindError


def dot_grammar():
    return parse_grammar(fixture_text("dot_generated.xtext"))


# --- parsing ---------------------------------------------------------------


def test_parse_configuration_fields():
    cfg = parse_configuration(
        "renameKeyword rule=NodeStmt attr=node except=a,b args: one, two\n"
    )
    (app,) = cfg.applications
    assert app.kind == "renameKeyword"
    assert app.rule_name == "NodeStmt"
    assert app.attr_name == "node"
    assert app.exclusions == ("a", "b")
    assert app.args == ("one", "two")
    assert app.line_no == 1


def test_parse_configuration_star_rule_means_global():
    cfg = parse_configuration("removeBraces rule=*\n")
    assert cfg.applications[0].rule_name is None


def test_parse_configuration_skips_comments_and_blanks():
    cfg = parse_configuration("# header\n\nremoveBraces\n  # indented comment\n")
    assert len(cfg.applications) == 1
    assert cfg.applications[0].line_no == 3


def test_parse_configuration_normalizes_kind_spelling():
    cfg = parse_configuration("convert1tostartostar rule=NodeStmt\n")
    assert cfg.applications[0].kind == "convert1ToStarToStar"
    _, report = optimize(dot_grammar(), cfg)
    assert report.attempted == 1
    assert not report.diagnostics


def test_parse_configuration_quoted_args_keep_commas():
    cfg = parse_configuration("renameKeyword args: \"a,b\", c\n")
    assert cfg.applications[0].args == ("a,b", "c")


def test_unknown_kind_carries_line_number():
    with pytest.raises(UnknownRuleKindError) as err:
        parse_configuration("removeBraces\nnoSuchThing\n")
    assert "line 2" in str(err.value)


def test_bad_arity_is_rejected():
    with pytest.raises(BadArityError) as err:
        parse_configuration("renameKeyword args: onlyOne\n")
    assert "line 1" in str(err.value)


def test_extra_args_are_rejected():
    with pytest.raises(BadArityError):
        parse_configuration("removeBraces args: what\n")


def test_unknown_field_is_malformed():
    with pytest.raises(MalformedLineError) as err:
        parse_configuration("removeBraces scope=NodeStmt\n")
    assert "line 1" in str(err.value)


def test_duplicate_field_is_malformed():
    with pytest.raises(MalformedLineError):
        parse_configuration("removeBraces rule=A rule=B\n")


def test_empty_field_value_is_malformed():
    with pytest.raises(MalformedLineError):
        parse_configuration("removeBraces rule=\n")


def test_rule_requirement_is_enforced():
    with pytest.raises(MalformedLineError) as err:
        parse_configuration("renameRule args: New\n")
    assert "rule=" in str(err.value)


def test_attr_requirement_is_enforced():
    with pytest.raises(MalformedLineError) as err:
        parse_configuration("removeAttribute rule=A\n")
    assert "attr=" in str(err.value)


def test_line_index_must_be_an_integer():
    with pytest.raises(ConfigError):
        parse_configuration("addKeywordToLine rule=A args: kw, notanumber\n")


def test_symbol_position_must_be_known():
    with pytest.raises(ConfigError):
        parse_configuration("addSymbolToRule rule=A args: ;, middle\n")


# --- driver ----------------------------------------------------------------


def test_optimize_leaves_input_grammar_untouched():
    g = dot_grammar()
    snapshot = copy.deepcopy(g)
    cfg = parse_configuration(fixture_text("dot_pipeline.cfg"))
    result, _ = optimize(g, cfg)
    assert serialize_grammar(g) == serialize_grammar(snapshot)
    assert serialize_grammar(result) != serialize_grammar(g)


def test_report_counts_match_independent_diff():
    g = dot_grammar()
    cfg = parse_configuration(fixture_text("dot_pipeline.cfg"))
    result, report = optimize(g, cfg)
    expected = diff_counts(serialize_grammar(g), serialize_grammar(result))
    assert (
        report.rule_counts.modified,
        report.rule_counts.added,
        report.rule_counts.deleted,
    ) == expected["rules"]
    assert (
        report.line_counts.modified,
        report.line_counts.added,
        report.line_counts.deleted,
    ) == expected["lines"]


def test_report_only_records_problems_not_clean_applications():
    g = dot_grammar()
    cfg = parse_configuration(fixture_text("dot_pipeline.cfg"))
    _, report = optimize(g, cfg)
    assert report.attempted == 4
    assert report.diagnostics == []


def test_scope_not_found_shows_up_as_diagnostic():
    g = dot_grammar()
    cfg = parse_configuration("removeBraces rule=Ghost\nremoveKeyword rule=NodeStmt\n")
    _, report = optimize(g, cfg)
    assert len(report.diagnostics) == 1
    diag = report.diagnostics[0]
    assert diag.index == 0
    assert diag.status == SCOPE_NOT_FOUND
    assert diag.line_no == 1
    assert report.scope_failures() == [diag]


def test_applied_with_warning_is_still_a_diagnostic():
    g = parse_grammar("A:\n\tx=B\n;\n\nB:\n\t'b'\n;\n")
    _, report = optimize(g, parse_configuration("removeRule rule=B\n"))
    assert len(report.diagnostics) == 1
    assert report.diagnostics[0].status == APPLIED
    assert "dangling" in report.diagnostics[0].message
    assert report.scope_failures() == []


def test_dry_run_reports_like_optimize_but_changes_nothing():
    g = dot_grammar()
    cfg = parse_configuration(fixture_text("dot_pipeline.cfg"))
    before = serialize_grammar(g)
    dry = dry_run(g, cfg)
    _, real = optimize(g, cfg)
    assert serialize_grammar(g) == before
    assert dry.to_machine() == real.to_machine()


def test_deleted_rules_count_as_rules_not_lines():
    g = parse_grammar("A:\n\t'a'\n;\n\nB:\n\t'b'\n;\n")
    _, report = optimize(g, parse_configuration("removeRule rule=B\n"))
    assert report.rule_counts.deleted == 1
    assert report.rule_counts.added == 0
    assert report.line_counts.deleted == 0


def test_result_metrics_describe_the_output_grammar():
    from gopt.generator import grammar_metrics

    g = dot_grammar()
    cfg = parse_configuration(fixture_text("dot_pipeline.cfg"))
    result, report = optimize(g, cfg)
    assert report.result_metrics == grammar_metrics(result)
    assert report.result_metrics != grammar_metrics(g)


def test_optimize_is_deterministic():
    cfg = parse_configuration(fixture_text("dot_pipeline.cfg"))
    outputs = set()
    for _ in range(5):
        result, report = optimize(dot_grammar(), cfg)
        outputs.add((serialize_grammar(result), report.to_machine()))
    assert len(outputs) == 1


# --- rendering -------------------------------------------------------------


def sample_report():
    g = dot_grammar()
    cfg = parse_configuration(
        "removeBraces rule=NodeStmt\nremoveKeyword rule=Ghost\n"
    )
    _, report = optimize(g, cfg)
    return report


def test_machine_report_format():
    lines = sample_report().to_machine().splitlines()
    assert lines[0] == "report-version: 1"
    assert "applications: 2" in lines
    assert "diagnostics: 1" in lines
    assert any(
        line.startswith("diagnostic: index=1 line=2 status=scope-not-found")
        for line in lines
    )
    for prefix in (
        "rules-modified:",
        "rules-added:",
        "rules-deleted:",
        "lines-modified:",
        "lines-added:",
        "lines-deleted:",
        "result-lines:",
        "result-rules:",
        "result-calls:",
    ):
        assert any(line.startswith(prefix) for line in lines), prefix


def test_text_report_mentions_failures():
    text = sample_report().to_text(color=False)
    assert "scope-not-found" in text
    assert "Ghost" in text
    assert "\x1b[" not in text


def test_text_report_colors_failures_when_asked():
    text = sample_report().to_text(color=True)
    assert "\x1b[31m" in text
    assert text.count("\x1b[0m") >= 1


def test_report_is_a_plain_value():
    report = sample_report()
    assert isinstance(report, ChangeReport)
    assert report.attempted == 2
