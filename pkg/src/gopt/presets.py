"""Named, parameterizable bundles of rewrite applications.

A preset file is a configuration template with a small amount of extra
syntax on top of the plain format:

* ``param NAME = default`` declares a parameter; leave the default off to
  make the parameter required at expansion time.
* ``param(NAME)`` anywhere in a line is replaced by the bound value.
* ``when-not NAME=literal <line>`` emits the line only when the parameter
  is bound to something else, which gives callers an opt-out switch.
* ``each NAME <line>`` emits the line once per comma-separated element of
  the bound value, with ``param(item)`` standing for the element.  An empty
  value emits nothing.

Importing this module also registers three extra operation kinds used by
the shipped python-style preset:

* ``addTerminalRule`` (name, token) appends a terminal rule; already
  present means no-op.
* ``changeBracesToSynthetic`` (begin, end) turns quoted curly braces into
  bare references to those terminals.
* ``addExpressionPlaceholder`` [begin, end] appends a BlockExpression stub
  rule meant to be overridden once a real expression language is wired in.
"""

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .engine import Configuration, parse_configuration
from .model import Grammar, LineEntry, GrammarRule, TerminalRule
from .rules import (
    APPLIED,
    NO_OP,
    Outcome,
    RuleApplication,
    RuleSpec,
    _line_rewrite,
    quoted_tokens,
    register_rule,
)


class PresetError(ValueError):
    """A preset that cannot be loaded or expanded."""


class UnboundParameterError(PresetError):
    """A required parameter without a binding, or a binding nobody declared."""


@dataclass(frozen=True)
class Parameter:
    name: str
    default: str | None = None  # None marks the parameter required

    @property
    def required(self) -> bool:
        return self.default is None


@dataclass(frozen=True)
class Preset:
    name: str
    parameters: tuple[Parameter, ...]
    template: tuple[str, ...]


_IDENT = re.compile(r"[A-Za-z_]\w*$")
_SUBST = re.compile(r"param\(([A-Za-z_]\w*)\)")


def parse_preset(name: str, text: str) -> Preset:
    parameters = []
    template = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("param "):
            rest = line[len("param ") :].strip()
            pname, eq, default = rest.partition("=")
            pname = pname.strip()
            if not _IDENT.match(pname):
                raise PresetError(f"bad parameter name {pname!r} in preset {name!r}")
            parameters.append(Parameter(pname, default.strip() if eq else None))
        else:
            template.append(line)
    return Preset(name, tuple(parameters), tuple(template))


def _data_dir():
    return resources.files(__package__) / "data"


def list_presets() -> list[str]:
    return sorted(
        entry.name[: -len(".gopt")]
        for entry in _data_dir().iterdir()
        if entry.name.endswith(".gopt")
    )


def load_preset(name: str) -> Preset:
    """Load a shipped preset by name, or any preset file by path."""
    builtin = _data_dir() / f"{name}.gopt"
    if builtin.is_file():
        return parse_preset(name, builtin.read_text())
    path = Path(name)
    if path.is_file():
        return parse_preset(path.stem, path.read_text())
    raise PresetError(f"no preset named {name!r} (shipped: {', '.join(list_presets())})")


def _substitute(line: str, values: dict[str, str], item: str | None = None) -> str:
    def repl(m: re.Match) -> str:
        key = m.group(1)
        if key == "item" and item is not None:
            return item
        if key in values:
            return values[key]
        raise UnboundParameterError(f"param({key}) is not bound")

    return _SUBST.sub(repl, line)


def expand_text(preset: Preset, bindings: dict[str, str] | None = None) -> str:
    bindings = dict(bindings or {})
    declared = {p.name for p in preset.parameters}
    unknown = sorted(set(bindings) - declared)
    if unknown:
        raise UnboundParameterError(
            f"preset {preset.name!r} declares no parameter {', '.join(unknown)}"
        )
    values = {}
    for p in preset.parameters:
        if p.name in bindings:
            values[p.name] = bindings[p.name]
        elif p.default is not None:
            values[p.name] = p.default
        else:
            raise UnboundParameterError(
                f"parameter {p.name!r} of preset {preset.name!r} must be bound"
            )

    out = []
    for line in preset.template:
        if line.startswith("when-not "):
            condition, _, body = line[len("when-not ") :].partition(" ")
            pname, eq, literal = condition.partition("=")
            if not eq or pname not in values:
                raise PresetError(f"bad when-not condition {condition!r}")
            if values[pname] == literal or not body.strip():
                continue
            out.append(_substitute(body.strip(), values))
        elif line.startswith("each "):
            pname, _, body = line[len("each ") :].partition(" ")
            if pname not in values:
                raise PresetError(f"each names unknown parameter {pname!r}")
            if not body.strip():
                continue
            for item in (x.strip() for x in values[pname].split(",")):
                if item:
                    out.append(_substitute(body.strip(), values, item=item))
        else:
            out.append(_substitute(line, values))
    return "\n".join(out) + "\n" if out else ""


def expand_preset(
    preset: Preset | str, bindings: dict[str, str] | None = None
) -> Configuration:
    if isinstance(preset, str):
        preset = load_preset(preset)
    return parse_configuration(expand_text(preset, bindings))


# --- extension operations used by the shipped presets ---------------------

def _apply_add_terminal_rule(grammar: Grammar, app: RuleApplication) -> Outcome:
    name, token = app.args
    if grammar.terminal(name) is not None or grammar.rule(name) is not None:
        return Outcome(NO_OP, f"{name!r} already exists")
    grammar.terminals.append(TerminalRule([f"terminal {name}:", f"'{token}'"]))
    return Outcome(APPLIED)


def _apply_braces_to_synthetic(grammar: Grammar, app: RuleApplication) -> Outcome:
    begin, end = app.args

    def fn(content: str) -> str:
        out = content
        for t in reversed(quoted_tokens(content)):
            if t.inner == "{":
                out = out[: t.start] + begin + out[t.end :]
            elif t.inner == "}":
                out = out[: t.start] + end + out[t.end :]
        return out

    return _line_rewrite(grammar, app, fn, "no quoted braces in scope")


_PLACEHOLDER_NAME = "BlockExpression"


def _apply_add_expression_placeholder(grammar: Grammar, app: RuleApplication) -> Outcome:
    if grammar.rule(_PLACEHOLDER_NAME) is not None:
        return Outcome(NO_OP, f"{_PLACEHOLDER_NAME!r} already exists")
    begin = app.args[0] if len(app.args) > 0 else "BEGIN"
    end = app.args[1] if len(app.args) > 1 else "END"
    lines = [
        f"{_PLACEHOLDER_NAME} returns {_PLACEHOLDER_NAME}:",
        "// Stub for the imported expression language; override this rule",
        "// with the real block form. The delimiters below mark the body.",
        f"{{{_PLACEHOLDER_NAME}}}",
        begin,
        end,
    ]
    grammar.rules.append(GrammarRule([LineEntry.of(line) for line in lines]))
    return Outcome(APPLIED)


def _register_preset_rules() -> None:
    for spec in (
        RuleSpec("addTerminalRule", _apply_add_terminal_rule, 2, 2),
        RuleSpec("changeBracesToSynthetic", _apply_braces_to_synthetic, 2, 2),
        RuleSpec("addExpressionPlaceholder", _apply_add_expression_placeholder, 0, 2),
    ):
        register_rule(spec)


_register_preset_rules()
