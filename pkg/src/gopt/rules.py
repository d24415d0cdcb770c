"""Catalog of grammar rewrite operations.

Every operation is a small, regex-backed text rewrite over the line model,
parameterized by a scope: a named rule, a named attribute, or the whole
grammar.  Exclusion lists are read at the finest absent scope level: with no
rule named they exclude rules, with a rule named but no attribute they
exclude attributes.

Shared conventions, applied uniformly:

* A quoted token counts as a keyword when it is a single word, is not one of
  the structural symbols ``{ } ( ) [ ] , ;`` and is not the value of an
  assignment (``=``, ``+=`` or ``?=``), so boolean flags and enum literals
  are never stripped.
* A body line left empty, or reduced to group residue like ``()?``, is
  dropped from the rule.
* Declaration lines, Xtext action lines (``{Name}``) and the terminal
  section are never touched; renameRule is the single exception for
  declarations and actions.
* Missing targets do not raise.  Each operation reports an outcome with a
  status: ``applied``, ``scope-not-found`` (the named rule, attribute,
  import or line index does not exist) or ``no-op`` (scope fine, nothing
  matched).  Surprising but successful applications keep status ``applied``
  and say what was odd in the message.

New operation kinds can be registered at runtime through
:func:`register_rule`; the shipped presets use this for their synthetic
rewrites.
"""

import re
from dataclasses import dataclass
from typing import Callable

from .model import Grammar, GrammarRule, LineEntry, split_quoted

APPLIED = "applied"
SCOPE_NOT_FOUND = "scope-not-found"
NO_OP = "no-op"

SYMBOL_TOKENS = {"{", "}", "(", ")", "[", "]", ",", ";"}
_OPENERS = {"{", "(", "[", "<"}
_CLOSERS = {"}", ")", "]", ">"}


class UnknownRuleKindError(ValueError):
    """No operation registered under that name."""


@dataclass(frozen=True)
class Outcome:
    status: str
    message: str = ""


@dataclass(frozen=True)
class RuleApplication:
    """One configured application: which operation, where, with what."""

    kind: str
    rule_name: str | None = None
    attr_name: str | None = None
    exclusions: tuple[str, ...] = ()
    args: tuple[str, ...] = ()
    line_no: int | None = None


# --- registry -------------------------------------------------------------

@dataclass(frozen=True)
class RuleSpec:
    name: str
    apply: Callable[[Grammar, RuleApplication], Outcome]
    min_args: int = 0
    max_args: int = 0
    needs_rule: bool = False
    needs_attr: bool = False
    validate: Callable[[tuple[str, ...]], str | None] | None = None


_REGISTRY: dict[str, RuleSpec] = {}


def register_rule(spec: RuleSpec) -> None:
    key = spec.name.lower()
    if key in _REGISTRY and _REGISTRY[key].apply is not spec.apply:
        raise ValueError(f"rule kind {spec.name!r} is already registered")
    _REGISTRY[key] = spec


def rule_spec(kind: str) -> RuleSpec | None:
    return _REGISTRY.get(kind.lower())


def known_kinds() -> list[str]:
    return sorted(spec.name for spec in _REGISTRY.values())


def apply_application(grammar: Grammar, app: RuleApplication) -> Outcome:
    spec = rule_spec(app.kind)
    if spec is None:
        raise UnknownRuleKindError(f"unknown rule kind {app.kind!r}")
    return spec.apply(grammar, app)


# --- token and line helpers ----------------------------------------------

@dataclass(frozen=True)
class QuotedToken:
    start: int
    end: int
    inner: str
    quote: str


def quoted_tokens(text: str) -> list[QuotedToken]:
    return [
        QuotedToken(s, e, text[s + 1 : e - 1], text[s])
        for quoted, s, e in split_quoted(text)
        if quoted
    ]


def _is_assignment_value(text: str, tok: QuotedToken) -> bool:
    j = tok.start
    while j > 0 and text[j - 1] == " ":
        j -= 1
    return j > 0 and text[j - 1] == "="


def _is_keyword(text: str, tok: QuotedToken) -> bool:
    if not tok.inner or " " in tok.inner:
        return False
    if tok.inner in SYMBOL_TOKENS:
        return False
    return not _is_assignment_value(text, tok)


def _remove_spans(text: str, spans: list[tuple[int, int]]) -> str:
    """Cut spans out of text, eating adjacent spacing so no double gaps stay."""
    out = text
    for start, end in sorted(spans, reverse=True):
        j = end
        while j < len(out) and out[j] == " ":
            j += 1
        if j > end:
            out = out[:start] + out[j:]
        elif start > 0 and out[start - 1] == " ":
            out = out[: start - 1] + out[end:]
        else:
            out = out[:start] + out[end:]
    return out.strip()


def _replace_outside(text: str, pattern: re.Pattern, repl) -> str:
    parts = []
    for quoted, s, e in split_quoted(text):
        seg = text[s:e]
        parts.append(seg if quoted else pattern.sub(repl, seg))
    return "".join(parts)


def _emptied(text: str) -> bool:
    if "'" in text or '"' in text:
        return not text.strip()
    return not re.sub(r"[()?*\s]+", "", text)


def _is_action(content: str) -> bool:
    return content.startswith("{") and content.endswith("}") and "'" not in content


def _whole_group(text: str) -> tuple[str, str] | None:
    """If text is one parenthesized group plus an optional quantifier,
    return (inner, quantifier); else None."""
    t = text.strip()
    if len(t) < 2 or t[0] != "(":
        return None
    depth = 0
    for quoted, s, e in split_quoted(t):
        if quoted:
            continue
        for i in range(s, e):
            c = t[i]
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
                if depth == 0:
                    rest = t[i + 1 :].strip()
                    if rest in ("", "?", "*", "+"):
                        return t[1:i], rest
                    return None
    return None


# --- scope resolution -----------------------------------------------------

def _resolve_scope(
    grammar: Grammar, app: RuleApplication
) -> tuple[list[GrammarRule], set[str]] | None:
    """Rules in scope plus the attribute names to skip; None if a named rule
    is missing."""
    if app.rule_name is not None:
        rule = grammar.rule(app.rule_name)
        if rule is None:
            return None
        excluded_attrs = set(app.exclusions) if app.attr_name is None else set()
        return [rule], excluded_attrs
    if app.exclusions:
        skip = set(app.exclusions)
        return [r for r in grammar.rules if r.name not in skip], set()
    return list(grammar.rules), set()


def _target_indexes(
    rule: GrammarRule, app: RuleApplication, excluded_attrs: set[str]
) -> list[int]:
    indexes = []
    for i, entry in enumerate(rule.lines):
        if i == 0:
            continue
        if app.attr_name is not None:
            if entry.attr_name == app.attr_name:
                indexes.append(i)
        else:
            if entry.attr_name and entry.attr_name in excluded_attrs:
                continue
            indexes.append(i)
    return indexes


def _line_rewrite(
    grammar: Grammar,
    app: RuleApplication,
    fn: Callable[[str], str | None],
    nothing_msg: str,
) -> Outcome:
    """Shared driver: run fn over every line in scope, drop emptied lines."""
    scope = _resolve_scope(grammar, app)
    if scope is None:
        return Outcome(SCOPE_NOT_FOUND, f"rule {app.rule_name!r} not found")
    rules, excluded_attrs = scope

    attr_seen = False
    changed = 0
    for rule in rules:
        targets = set(_target_indexes(rule, app, excluded_attrs))
        if app.attr_name is not None and targets:
            attr_seen = True
        if not targets:
            continue
        new_lines: list[LineEntry] = []
        for i, entry in enumerate(rule.lines):
            if i not in targets or _is_action(entry.content):
                new_lines.append(entry)
                continue
            new = fn(entry.content)
            if new is None or _emptied(new):
                changed += 1
                continue
            if new != entry.content:
                changed += 1
                new_lines.append(LineEntry.of(new))
            else:
                new_lines.append(entry)
        rule.lines = new_lines

    if app.attr_name is not None and not attr_seen:
        return Outcome(SCOPE_NOT_FOUND, f"attribute {app.attr_name!r} not found in scope")
    if changed == 0:
        return Outcome(NO_OP, nothing_msg)
    return Outcome(APPLIED)


# --- keyword operations ---------------------------------------------------

def _apply_remove_keyword(grammar: Grammar, app: RuleApplication) -> Outcome:
    wanted = app.args[0] if app.args else None

    def fn(content: str) -> str:
        spans = [
            (t.start, t.end)
            for t in quoted_tokens(content)
            if _is_keyword(content, t) and (wanted is None or t.inner == wanted)
        ]
        return _remove_spans(content, spans) if spans else content

    msg = f"keyword {wanted!r} not found in scope" if wanted else "no keywords in scope"
    return _line_rewrite(grammar, app, fn, msg)


def _apply_rename_keyword(grammar: Grammar, app: RuleApplication) -> Outcome:
    old, new = app.args

    def fn(content: str) -> str:
        out = content
        for t in reversed(quoted_tokens(content)):
            if _is_keyword(content, t) and t.inner == old:
                out = out[: t.start] + t.quote + new + t.quote + out[t.end :]
        return out

    return _line_rewrite(grammar, app, fn, f"keyword {old!r} not found in scope")


def _apply_add_alternative_keyword(grammar: Grammar, app: RuleApplication) -> Outcome:
    existing, alternative = app.args

    def fn(content: str) -> str:
        out = content
        for t in reversed(quoted_tokens(content)):
            if _is_keyword(content, t) and t.inner == existing:
                q = t.quote
                replacement = f"({q}{existing}{q} | {q}{alternative}{q})"
                out = out[: t.start] + replacement + out[t.end :]
        return out

    outcome = _line_rewrite(grammar, app, fn, f"keyword {existing!r} not found in scope")
    if outcome.status == APPLIED and existing == alternative:
        return Outcome(APPLIED, f"alternative {alternative!r} equals the existing keyword")
    return outcome


def _apply_add_keyword_to_attr(grammar: Grammar, app: RuleApplication) -> Outcome:
    keyword = app.args[0]
    return _line_rewrite(grammar, app, lambda c: f"'{keyword}' {c}", "nothing to prefix")


def _insert_after_action(rule: GrammarRule, entry: LineEntry) -> None:
    at = 2 if len(rule.lines) > 1 and _is_action(rule.lines[1].content) else 1
    rule.lines.insert(at, entry)


def _apply_add_keyword_to_rule(grammar: Grammar, app: RuleApplication) -> Outcome:
    rule = grammar.rule(app.rule_name)
    if rule is None:
        return Outcome(SCOPE_NOT_FOUND, f"rule {app.rule_name!r} not found")
    _insert_after_action(rule, LineEntry.of(f"'{app.args[0]}'"))
    return Outcome(APPLIED)


def _apply_add_keyword_to_line(grammar: Grammar, app: RuleApplication) -> Outcome:
    rule = grammar.rule(app.rule_name)
    if rule is None:
        return Outcome(SCOPE_NOT_FOUND, f"rule {app.rule_name!r} not found")
    index = int(app.args[1])  # zero-based body line
    if index < 0 or index >= len(rule.lines) - 1:
        return Outcome(
            SCOPE_NOT_FOUND,
            f"line index {index} out of range for rule {rule.name!r} "
            f"({len(rule.lines) - 1} body lines)",
        )
    entry = rule.lines[index + 1]
    rule.lines[index + 1] = LineEntry.of(f"'{app.args[0]}' {entry.content}")
    return Outcome(APPLIED)


def _apply_add_symbol_to_rule(grammar: Grammar, app: RuleApplication) -> Outcome:
    rule = grammar.rule(app.rule_name)
    if rule is None:
        return Outcome(SCOPE_NOT_FOUND, f"rule {app.rule_name!r} not found")
    symbol, position = app.args
    entry = LineEntry.of(f"'{symbol}'")
    if position == "after-action":
        _insert_after_action(rule, entry)
    else:  # end-of-body
        rule.lines.append(entry)
    return Outcome(APPLIED)


# --- optionality ----------------------------------------------------------

_CLOSE_OPT = re.compile(r"\)\s*\?")


def _remove_optionality_line(content: str) -> str:
    was_optional_group = (_whole_group(content) or ("", None))[1] == "?"
    new = _replace_outside(content, _CLOSE_OPT, ")")
    if was_optional_group:
        group = _whole_group(new)
        if group is not None and group[1] == "":
            new = group[0].strip()
    return new


def _apply_remove_optionality(grammar: Grammar, app: RuleApplication) -> Outcome:
    return _line_rewrite(
        grammar, app, _remove_optionality_line, "nothing optional in scope"
    )


def _apply_add_optionality_to_attr(grammar: Grammar, app: RuleApplication) -> Outcome:
    already: list[str] = []

    def fn(content: str) -> str:
        group = _whole_group(content)
        if group is not None and group[1] == "?":
            already.append(content)
            return content
        return f"({content})?"

    outcome = _line_rewrite(grammar, app, fn, "attribute line is already optional")
    if outcome.status == NO_OP and already:
        return Outcome(NO_OP, f"attribute {app.attr_name!r} is already optional")
    return outcome


def _apply_add_optionality_to_keyword(grammar: Grammar, app: RuleApplication) -> Outcome:
    keyword = app.args[0]
    wrapped: list[str] = []

    def fn(content: str) -> str:
        out = content
        for t in reversed(quoted_tokens(content)):
            if not (_is_keyword(content, t) and t.inner == keyword):
                continue
            before = content[: t.start].rstrip()
            after = content[t.end :].lstrip()
            if before.endswith("(") and after.startswith(")?"):
                wrapped.append(content)
                continue
            out = out[: t.start] + f"({t.quote}{keyword}{t.quote})?" + out[t.end :]
        return out

    outcome = _line_rewrite(grammar, app, fn, f"keyword {keyword!r} not found in scope")
    if outcome.status == NO_OP and wrapped:
        return Outcome(NO_OP, f"keyword {keyword!r} is already optional")
    return outcome


# --- braces and symbols ---------------------------------------------------

def _apply_remove_braces(grammar: Grammar, app: RuleApplication) -> Outcome:
    def fn(content: str) -> str:
        spans = [
            (t.start, t.end) for t in quoted_tokens(content) if t.inner in ("{", "}")
        ]
        return _remove_spans(content, spans) if spans else content

    return _line_rewrite(grammar, app, fn, "no quoted braces in scope")


def _change_braces(opener: str, closer: str):
    def apply(grammar: Grammar, app: RuleApplication) -> Outcome:
        def fn(content: str) -> str:
            out = content
            for t in reversed(quoted_tokens(content)):
                if t.inner in _OPENERS and t.inner != opener:
                    out = out[: t.start] + t.quote + opener + t.quote + out[t.end :]
                elif t.inner in _CLOSERS and t.inner != closer:
                    out = out[: t.start] + t.quote + closer + t.quote + out[t.end :]
            return out

        return _line_rewrite(grammar, app, fn, "no quoted braces in scope")

    return apply


def _apply_remove_commas(grammar: Grammar, app: RuleApplication) -> Outcome:
    def fn(content: str) -> str:
        spans = [(t.start, t.end) for t in quoted_tokens(content) if t.inner == ","]
        return _remove_spans(content, spans) if spans else content

    return _line_rewrite(grammar, app, fn, "no quoted commas in scope")


# --- multiplicity ---------------------------------------------------------

_TYPE_PART = r"(?:[A-Za-z_][\w.]*|\[[^\]]+\])"
_ONE_TO_STAR = re.compile(
    rf"([A-Za-z_]\w*)\+=({_TYPE_PART})\s*\(\s*[\"'],[\"']\s*\1\+=\2\s*\)\s*\*"
)


def _apply_convert_one_to_star(grammar: Grammar, app: RuleApplication) -> Outcome:
    def fn(content: str) -> str:
        return _ONE_TO_STAR.sub(lambda m: f"({m.group(1)}+={m.group(2)})*", content)

    outcome = _line_rewrite(grammar, app, fn, "list pattern not found in scope")
    if outcome.status == NO_OP:
        return Outcome(NO_OP, "no line matches the keyword-separated list pattern")
    return outcome


# --- attribute operations -------------------------------------------------

def _apply_remove_attribute(grammar: Grammar, app: RuleApplication) -> Outcome:
    return _line_rewrite(grammar, app, lambda c: None, "attribute line not removable")


def _apply_add_square_brackets(grammar: Grammar, app: RuleApplication) -> Outcome:
    # Applying twice nests another bracket pair; that is the documented
    # behavior, not a defect.
    return _line_rewrite(grammar, app, lambda c: f"'[' {c} ']'", "nothing to wrap")


def _strip_leading_keyword(fragment: str, attr: str) -> str:
    tokens = quoted_tokens(fragment)
    if tokens and tokens[0].start == 0 and tokens[0].inner == attr:
        return fragment[tokens[0].end :].lstrip()
    return fragment


def _apply_reposition_attribute(grammar: Grammar, app: RuleApplication) -> Outcome:
    scope = _resolve_scope(grammar, app)
    if scope is None:
        return Outcome(SCOPE_NOT_FOUND, f"rule {app.rule_name!r} not found")
    rules, _ = scope

    attr = app.attr_name
    attr_seen = False
    moved = 0
    notes: list[str] = []
    for rule in rules:
        source = None
        keyword_line = None
        for i, entry in enumerate(rule.lines[1:], start=1):
            content = entry.content
            if keyword_line is None and (
                content == f"'{rule.name}'" or content.startswith(f"'{rule.name}' ")
            ):
                keyword_line = i
            if source is None and entry.attr_name == attr and not _is_action(content):
                source = i
        if source is None:
            continue
        attr_seen = True
        if keyword_line is None:
            notes.append(f"rule {rule.name!r} has no keyword line")
            continue
        if keyword_line == source:
            notes.append(f"{attr!r} already sits on the keyword line of {rule.name!r}")
            continue

        fragment = rule.lines[source].content
        group = _whole_group(fragment)
        if group is not None and group[1] in ("", "?"):
            fragment = group[0].strip()
        fragment = _strip_leading_keyword(fragment, attr)

        merged = LineEntry.of(rule.lines[keyword_line].content + " " + fragment)
        rule.lines[keyword_line] = merged
        del rule.lines[source]
        moved += 1

    if not attr_seen:
        return Outcome(SCOPE_NOT_FOUND, f"attribute {attr!r} not found in scope")
    if moved == 0:
        return Outcome(NO_OP, "; ".join(notes) or "nothing to move")
    return Outcome(APPLIED, "; ".join(notes))


# --- whole-rule operations ------------------------------------------------

def _dangling_references(grammar: Grammar, name: str) -> list[str]:
    pattern = re.compile(rf"\b{re.escape(name)}\b")
    found = []
    for rule in grammar.rules:
        for i, entry in enumerate(rule.lines[1:], start=1):
            if _is_action(entry.content):
                continue
            for quoted, s, e in split_quoted(entry.content):
                if not quoted and pattern.search(entry.content, s, e):
                    found.append(f"{rule.name} line {i}")
                    break
    return found


def _apply_remove_rule(grammar: Grammar, app: RuleApplication) -> Outcome:
    name = app.rule_name
    rule = grammar.rule(name)
    if rule is not None:
        grammar.rules.remove(rule)
    else:
        term = grammar.terminal(name)
        if term is None:
            return Outcome(SCOPE_NOT_FOUND, f"rule {name!r} not found")
        grammar.terminals.remove(term)
    dangling = _dangling_references(grammar, name)
    if dangling:
        return Outcome(APPLIED, f"dangling references to {name!r}: " + ", ".join(dangling))
    return Outcome(APPLIED)


def _apply_rename_rule(grammar: Grammar, app: RuleApplication) -> Outcome:
    old = app.rule_name
    new = app.args[0]
    target = grammar.rule(old)
    if target is None:
        return Outcome(SCOPE_NOT_FOUND, f"rule {old!r} not found")
    if old != new and (grammar.rule(new) or grammar.terminal(new)):
        return Outcome(NO_OP, f"name {new!r} is already in use")

    returns = target.returns_type
    target.set_declaration(new, new if returns == old else returns)

    word = re.compile(rf"\b{re.escape(old)}\b")
    for rule in grammar.rules:
        if rule is not target and rule.returns_type == old:
            rule.set_declaration(rule.name, new)
        for i, entry in enumerate(rule.lines[1:], start=1):
            content = entry.content
            if _is_action(content):
                if rule is target and content == f"{{{old}}}":
                    rule.lines[i] = LineEntry.of(f"{{{new}}}")
                continue
            updated = _replace_outside(content, word, new)
            if updated != content:
                rule.lines[i] = LineEntry.of(updated)
    return Outcome(APPLIED)


# --- imports --------------------------------------------------------------

_IMPORT_LINE = re.compile(r'^import\s+"([^"]+)"(?:\s+as\s+([A-Za-z_]\w*))?\s*$')


def _import_uris(grammar: Grammar) -> list[tuple[int, str]]:
    out = []
    for i, line in enumerate(grammar.header):
        m = _IMPORT_LINE.match(line)
        if m:
            out.append((i, m.group(1)))
    return out


def _apply_add_import(grammar: Grammar, app: RuleApplication) -> Outcome:
    uri = app.args[0]
    alias = app.args[1] if len(app.args) > 1 else None
    imports = _import_uris(grammar)
    if any(existing == uri for _, existing in imports):
        return Outcome(NO_OP, f"{uri!r} is already imported")
    line = f'import "{uri}"' + (f" as {alias}" if alias else "")
    if imports:
        grammar.header.insert(imports[-1][0] + 1, line)
    elif grammar.header:
        grammar.header.insert(1, line)
    else:
        grammar.header.append(line)
    return Outcome(APPLIED)


def _apply_remove_import(grammar: Grammar, app: RuleApplication) -> Outcome:
    uri = app.args[0]
    for i, existing in _import_uris(grammar):
        if existing == uri:
            del grammar.header[i]
            return Outcome(APPLIED)
    return Outcome(SCOPE_NOT_FOUND, f"import {uri!r} not found")


# --- registration ---------------------------------------------------------

def _validate_int_index(args: tuple[str, ...]) -> str | None:
    try:
        int(args[1])
    except ValueError:
        return f"line index must be an integer, got {args[1]!r}"
    return None


def _validate_position(args: tuple[str, ...]) -> str | None:
    if args[1] not in ("end-of-body", "after-action"):
        return f"position must be end-of-body or after-action, got {args[1]!r}"
    return None


def _register_builtins() -> None:
    specs = [
        RuleSpec("addKeywordToAttr", _apply_add_keyword_to_attr, 1, 1, needs_attr=True),
        RuleSpec("addKeywordToRule", _apply_add_keyword_to_rule, 1, 1, needs_rule=True),
        RuleSpec(
            "addKeywordToLine",
            _apply_add_keyword_to_line,
            2,
            2,
            needs_rule=True,
            validate=_validate_int_index,
        ),
        RuleSpec("renameKeyword", _apply_rename_keyword, 2, 2),
        RuleSpec("addAlternativeKeyword", _apply_add_alternative_keyword, 2, 2),
        RuleSpec("removeKeyword", _apply_remove_keyword, 0, 1),
        RuleSpec("removeRule", _apply_remove_rule, 0, 0, needs_rule=True),
        RuleSpec("removePrimitiveTypeRule", _apply_remove_rule, 0, 0, needs_rule=True),
        RuleSpec("renameRule", _apply_rename_rule, 1, 1, needs_rule=True),
        RuleSpec(
            "addSymbolToRule",
            _apply_add_symbol_to_rule,
            2,
            2,
            needs_rule=True,
            validate=_validate_position,
        ),
        RuleSpec("addOptionalityToAttr", _apply_add_optionality_to_attr, needs_attr=True),
        RuleSpec("addOptionalityToKeyword", _apply_add_optionality_to_keyword, 1, 1),
        RuleSpec("removeOptionality", _apply_remove_optionality),
        RuleSpec("addImport", _apply_add_import, 1, 2),
        RuleSpec("removeImport", _apply_remove_import, 1, 1),
        RuleSpec("changeBracesToParentheses", _change_braces("(", ")")),
        RuleSpec("changeBracesToSquare", _change_braces("[", "]")),
        RuleSpec("changeBracesToAngle", _change_braces("<", ">")),
        RuleSpec("removeBraces", _apply_remove_braces),
        RuleSpec("convert1ToStarToStar", _apply_convert_one_to_star),
        RuleSpec("removeAttribute", _apply_remove_attribute, needs_attr=True),
        RuleSpec("addSquareBracketsToAttr", _apply_add_square_brackets, needs_attr=True),
        RuleSpec("repositionAttribute", _apply_reposition_attribute, needs_attr=True),
        RuleSpec("removeCommas", _apply_remove_commas),
    ]
    for spec in specs:
        register_rule(spec)


_register_builtins()
