"""Configuration parsing and the optimization run itself.

A configuration is a plain text file, one application per line:

    <kind> [rule=<name>|rule=*] [attr=<name>] [except=a,b] [args: x, y]

``#`` starts a full-line comment, blank lines are skipped, kind names are
matched case-insensitively and ``rule=*`` is spelled-out whole-grammar
scope.  Arguments after ``args:`` are comma separated; quote an argument
(either style) when it contains a comma or leading/trailing spaces.

Parse errors carry the offending line number.  Apply-time problems never
abort the run: the engine records a diagnostic and moves on, which is what
makes replaying an old configuration on an evolved grammar useful, the
diagnostics are the work list.
"""

import copy
import re
from dataclasses import dataclass, field

from .generator import Metrics, grammar_metrics
from .model import Counts, Grammar, diff_grammars, split_quoted
from .rules import (
    APPLIED,
    SCOPE_NOT_FOUND,
    RuleApplication,
    UnknownRuleKindError,
    apply_application,
    rule_spec,
)

__all__ = [
    "BadArityError",
    "ChangeReport",
    "ConfigError",
    "Configuration",
    "Diagnostic",
    "MalformedLineError",
    "UnknownRuleKindError",
    "dry_run",
    "optimize",
    "parse_configuration",
]


class ConfigError(ValueError):
    """A configuration line that cannot be turned into an application."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class BadArityError(ConfigError):
    pass


class MalformedLineError(ConfigError):
    pass


@dataclass(frozen=True)
class Configuration:
    applications: tuple[RuleApplication, ...]


_ARGS_MARKER = re.compile(r"(?:^|\s)(args:)")


def _split_off_args(line: str) -> tuple[str, str | None]:
    for quoted, s, e in split_quoted(line):
        if quoted:
            continue
        m = _ARGS_MARKER.search(line, s, e)
        if m:
            return line[: m.start(1)], line[m.end(1) :]
    return line, None


def _split_args(tail: str) -> tuple[str, ...]:
    if not tail.strip():
        return ()
    cuts = [
        i
        for quoted, s, e in split_quoted(tail)
        if not quoted
        for i in range(s, e)
        if tail[i] == ","
    ]
    parts = []
    prev = 0
    for cut in cuts:
        parts.append(tail[prev:cut])
        prev = cut + 1
    parts.append(tail[prev:])
    out = []
    for part in parts:
        part = part.strip()
        if len(part) >= 2 and part[0] == part[-1] and part[0] in "\"'":
            part = part[1:-1]
        out.append(part)
    return tuple(out)


def _parse_line(line_no: int, line: str) -> RuleApplication:
    head, tail = _split_off_args(line)
    fields = head.split()
    if not fields:
        raise MalformedLineError(line_no, "missing rule kind before args:")
    kind = fields[0]

    rule_name: str | None = None
    attr_name: str | None = None
    exclusions: tuple[str, ...] = ()
    seen: set[str] = set()
    for item in fields[1:]:
        key, eq, value = item.partition("=")
        if not eq or key not in ("rule", "attr", "except"):
            raise MalformedLineError(line_no, f"unrecognized field {item!r}")
        if key in seen:
            raise MalformedLineError(line_no, f"duplicate {key}= field")
        seen.add(key)
        if not value:
            raise MalformedLineError(line_no, f"empty {key}= field")
        if key == "rule":
            rule_name = None if value == "*" else value
        elif key == "attr":
            attr_name = value
        else:
            exclusions = tuple(v for v in value.split(",") if v)

    args = _split_args(tail) if tail is not None else ()

    spec = rule_spec(kind)
    if spec is None:
        raise UnknownRuleKindError(f"line {line_no}: unknown rule kind {kind!r}")
    if not (spec.min_args <= len(args) <= spec.max_args):
        if spec.min_args == spec.max_args:
            expected = f"{spec.min_args}"
        else:
            expected = f"{spec.min_args} to {spec.max_args}"
        raise BadArityError(
            line_no, f"{spec.name} takes {expected} argument(s), got {len(args)}"
        )
    if spec.needs_rule and rule_name is None:
        raise MalformedLineError(line_no, f"{spec.name} requires rule=<name>")
    if spec.needs_attr and attr_name is None:
        raise MalformedLineError(line_no, f"{spec.name} requires attr=<name>")
    if spec.validate is not None:
        problem = spec.validate(args)
        if problem:
            raise MalformedLineError(line_no, problem)

    return RuleApplication(
        kind=spec.name,
        rule_name=rule_name,
        attr_name=attr_name,
        exclusions=exclusions,
        args=args,
        line_no=line_no,
    )


def parse_configuration(text: str) -> Configuration:
    applications = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        applications.append(_parse_line(line_no, line))
    return Configuration(tuple(applications))


# --- reports --------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    index: int
    status: str
    message: str
    line_no: int | None = None


_RED = "\x1b[31m"
_YELLOW = "\x1b[33m"
_RESET = "\x1b[0m"


@dataclass
class ChangeReport:
    attempted: int
    rule_counts: Counts
    line_counts: Counts
    result_metrics: Metrics
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def scope_failures(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.status == SCOPE_NOT_FOUND]

    def to_text(self, color: bool = False) -> str:
        rc, lc, m = self.rule_counts, self.line_counts, self.result_metrics
        lines = [
            f"applications attempted: {self.attempted}",
            f"rules: {rc.modified} modified, {rc.added} added, {rc.deleted} deleted",
            f"lines: {lc.modified} modified, {lc.added} added, {lc.deleted} deleted",
            f"result: {m.lines} lines, {m.rules} rules, {m.calls} calls",
            f"diagnostics: {len(self.diagnostics)}",
        ]
        for d in self.diagnostics:
            status = d.status
            if color:
                tint = _RED if status == SCOPE_NOT_FOUND else _YELLOW
                status = f"{tint}{status}{_RESET}"
            where = f" at config line {d.line_no}" if d.line_no is not None else ""
            lines.append(f"  [{d.index}] {status}{where}: {d.message}")
        return "\n".join(lines)

    def to_machine(self) -> str:
        rc, lc, m = self.rule_counts, self.line_counts, self.result_metrics
        lines = [
            "report-version: 1",
            f"applications: {self.attempted}",
            f"rules-modified: {rc.modified}",
            f"rules-added: {rc.added}",
            f"rules-deleted: {rc.deleted}",
            f"lines-modified: {lc.modified}",
            f"lines-added: {lc.added}",
            f"lines-deleted: {lc.deleted}",
            f"result-lines: {m.lines}",
            f"result-rules: {m.rules}",
            f"result-calls: {m.calls}",
            f"diagnostics: {len(self.diagnostics)}",
        ]
        for d in self.diagnostics:
            where = d.line_no if d.line_no is not None else 0
            lines.append(
                f"diagnostic: index={d.index} line={where} "
                f"status={d.status} message={d.message}"
            )
        return "\n".join(lines) + "\n"


def optimize(grammar: Grammar, config: Configuration) -> tuple[Grammar, ChangeReport]:
    """Apply every configured application in order; the input is untouched."""
    result = copy.deepcopy(grammar)
    diagnostics = []
    for index, application in enumerate(config.applications):
        outcome = apply_application(result, application)
        if outcome.status != APPLIED or outcome.message:
            diagnostics.append(
                Diagnostic(index, outcome.status, outcome.message, application.line_no)
            )
    delta = diff_grammars(grammar, result)
    report = ChangeReport(
        attempted=len(config.applications),
        rule_counts=delta.rule_counts,
        line_counts=delta.line_counts,
        result_metrics=grammar_metrics(result),
        diagnostics=diagnostics,
    )
    return result, report


def dry_run(grammar: Grammar, config: Configuration) -> ChangeReport:
    """Same as optimize but only the report comes back."""
    _, report = optimize(grammar, config)
    return report
