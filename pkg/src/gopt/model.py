"""Line-oriented model of Xtext-style grammar text.

The toolchain deliberately does not build a parse tree.  A grammar is held as
structured text: a header (grammar declaration, imports, generate statements),
a list of production rules, and a list of terminal/datatype rules.  Every
production rule is a list of lines, and the first line is the declaration
(`Name returns Type:`).  A line remembers at most one attribute name, the
first assignment found outside quoted regions, which is what scoped rewrites
key on.

Serialization is canonical: header lines at column zero, rule declarations at
column zero, body lines indented with one tab, the terminating `;` on its own
line, and one blank line between blocks.  Parsing accepts looser input (odd
indentation, blank lines inside bodies, `;` attached to the last body line,
an inline body after the declaration colon) and normalizes it into this form.
Comments are kept as opaque lines; a standalone comment line sitting between
two rules is folded into the start of the following rule's body.
"""

import re
from dataclasses import dataclass, field


class GrammarError(ValueError):
    """Malformed grammar text."""


class UnterminatedRuleError(GrammarError):
    """A rule body ran into end-of-file without a closing ';'."""


class DuplicateRuleNameError(GrammarError):
    """Two rules in one grammar share a name."""


# --- quote-aware text scanning -------------------------------------------

def split_quoted(text: str) -> list[tuple[bool, int, int]]:
    """Split text into (is_quoted, start, end) segments, in order.

    Quoted segments include their delimiters.  An unbalanced quote makes the
    rest of the line a plain segment; grammar keywords never span lines so
    this only happens on broken input.
    """
    segments = []
    i, start, n = 0, 0, len(text)
    while i < n:
        c = text[i]
        if c in "'\"":
            close = text.find(c, i + 1)
            if close == -1:
                break
            if start < i:
                segments.append((False, start, i))
            segments.append((True, i, close + 1))
            i = close + 1
            start = i
        else:
            i += 1
    if start < n:
        segments.append((False, start, n))
    return segments


_ASSIGNMENT = re.compile(r"([A-Za-z_]\w*)\s*(\+=|\?=|=(?!=))")


def first_assigned_attr(text: str) -> str | None:
    """Name of the first attribute assigned on the line, outside quotes."""
    for quoted, start, end in split_quoted(text):
        if quoted:
            continue
        m = _ASSIGNMENT.search(text, start, end)
        if m and m.end() <= end:
            return m.group(1)
    return None


# --- data types -----------------------------------------------------------

@dataclass(frozen=True)
class LineEntry:
    """One trimmed line of a rule, plus the attribute it assigns, if any."""

    content: str
    attr_name: str | None = None

    @classmethod
    def of(cls, text: str) -> "LineEntry":
        stripped = text.strip()
        return cls(stripped, first_assigned_attr(stripped))


_DECL_HEAD = re.compile(
    r"^(?P<kw>(?:terminal|enum)\s+)?(?P<name>[A-Za-z_]\w*)"
    r"(?:\s+returns\s+(?P<rt>[A-Za-z_][\w.:]*))?$"
)


def _declaration_parts(line: str) -> tuple[str, str, str | None, str] | None:
    """Split a declaration line into (keyword, name, returnsType, rest).

    `rest` is whatever followed the declaration colon on the same line.
    Returns None when the line is not a declaration.
    """
    if not line or line[0] in " \t":
        return None
    colon = _declaration_colon(line)
    if colon < 0:
        return None
    m = _DECL_HEAD.match(line[:colon].rstrip())
    if not m:
        return None
    keyword = (m.group("kw") or "").strip()
    return keyword, m.group("name"), m.group("rt"), line[colon + 1:]


def _declaration_colon(line: str) -> int:
    """Index of the declaration colon: first ':' outside quotes, skipping '::'."""
    for quoted, start, end in split_quoted(line):
        if quoted:
            continue
        j = start
        while j < end:
            j = line.find(":", j, end)
            if j == -1:
                break
            if j + 1 < len(line) and line[j + 1] == ":":
                j += 2
                continue
            if j > 0 and line[j - 1] == ":":
                j += 1
                continue
            return j
    return -1


@dataclass
class GrammarRule:
    """A production rule: declaration line first, body lines after it."""

    lines: list[LineEntry]

    @property
    def name(self) -> str:
        parts = _declaration_parts(self.lines[0].content)
        if parts is None:
            raise GrammarError(f"bad rule declaration: {self.lines[0].content!r}")
        return parts[1]

    @property
    def returns_type(self) -> str | None:
        parts = _declaration_parts(self.lines[0].content)
        return parts[2] if parts else None

    def body(self) -> list[LineEntry]:
        return self.lines[1:]

    def set_declaration(self, name: str, returns_type: str | None) -> None:
        parts = _declaration_parts(self.lines[0].content)
        keyword = parts[0] if parts else ""
        head = f"{keyword} {name}".strip()
        if returns_type:
            head += f" returns {returns_type}"
        self.lines[0] = LineEntry.of(head + ":")


@dataclass
class TerminalRule:
    """A terminal or datatype rule, kept as opaque lines (declaration first)."""

    lines: list[str]

    @property
    def name(self) -> str:
        parts = _declaration_parts(self.lines[0])
        if parts is None:
            raise GrammarError(f"bad terminal declaration: {self.lines[0]!r}")
        return parts[1]


@dataclass
class Grammar:
    header: list[str] = field(default_factory=list)
    rules: list[GrammarRule] = field(default_factory=list)
    terminals: list[TerminalRule] = field(default_factory=list)

    def rule(self, name: str) -> GrammarRule | None:
        for r in self.rules:
            if r.name == name:
                return r
        return None

    def terminal(self, name: str) -> TerminalRule | None:
        for t in self.terminals:
            if t.name == name:
                return t
        return None

    def rule_names(self) -> list[str]:
        return [r.name for r in self.rules]


# --- parsing --------------------------------------------------------------

def _strip_terminator(text: str) -> str | None:
    """Content before a trailing top-level ';', or None if the line has none."""
    t = text.rstrip()
    if not t.endswith(";"):
        return None
    last = len(t) - 1
    for quoted, start, end in split_quoted(t):
        if start <= last < end and quoted:
            return None
    return t[:-1].rstrip()


def _is_terminal_decl(keyword: str, name: str, returns_type: str | None) -> bool:
    if keyword == "terminal":
        return True
    if len(name) >= 2 and name.isupper():
        return True
    if returns_type and returns_type.startswith("ecore::"):
        return True
    return False


def parse_grammar(text: str) -> Grammar:
    """Parse Xtext-style grammar text into the line-oriented model."""
    lines = text.splitlines()
    n = len(lines)
    i = 0

    header: list[str] = []
    while i < n and _declaration_parts(lines[i]) is None:
        stripped = lines[i].strip()
        if stripped:
            header.append(stripped)
        i += 1

    rules: list[GrammarRule] = []
    terminals: list[TerminalRule] = []
    seen: set[str] = set()
    pending_comments: list[str] = []

    while i < n:
        raw = lines[i]
        stripped = raw.strip()
        if not stripped:
            i += 1
            continue
        parts = _declaration_parts(raw)
        if parts is None:
            if stripped.startswith("//"):
                pending_comments.append(stripped)
                i += 1
                continue
            raise GrammarError(f"unexpected top-level text at line {i + 1}: {stripped!r}")

        keyword, name, returns_type, rest = parts
        decl_line_no = i + 1
        i += 1
        head = raw[: _declaration_colon(raw) + 1].strip()

        body: list[str] = []
        terminated = False
        rest = rest.strip()
        if rest:
            core = _strip_terminator(rest)
            if core is None:
                body.append(rest)
            else:
                if core:
                    body.append(core)
                terminated = True
        while not terminated and i < n:
            line = lines[i].strip()
            i += 1
            if not line:
                continue
            core = _strip_terminator(line)
            if core is None:
                body.append(line)
            else:
                if core:
                    body.append(core)
                terminated = True
        if not terminated:
            raise UnterminatedRuleError(
                f"rule {name!r} (line {decl_line_no}) has no terminating ';'"
            )
        if name in seen:
            raise DuplicateRuleNameError(f"duplicate rule name {name!r}")
        seen.add(name)

        if _is_terminal_decl(keyword, name, returns_type):
            terminals.append(TerminalRule([head] + pending_comments + body))
        else:
            entries = [LineEntry.of(head)]
            entries += [LineEntry.of(c) for c in pending_comments]
            entries += [LineEntry.of(b) for b in body]
            rules.append(GrammarRule(entries))
        pending_comments = []

    return Grammar(header, rules, terminals)


# --- serialization --------------------------------------------------------

def serialize_grammar(grammar: Grammar) -> str:
    """Render the canonical text form."""
    blocks: list[str] = []
    if grammar.header:
        blocks.append("\n".join(grammar.header))
    for rule in grammar.rules:
        part = [rule.lines[0].content]
        part += ["\t" + entry.content for entry in rule.lines[1:]]
        part.append(";")
        blocks.append("\n".join(part))
    for term in grammar.terminals:
        part = [term.lines[0]]
        part += ["\t" + line for line in term.lines[1:]]
        part.append(";")
        blocks.append("\n".join(part))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


# --- diffing --------------------------------------------------------------

@dataclass(frozen=True)
class Counts:
    modified: int = 0
    added: int = 0
    deleted: int = 0

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(
            self.modified + other.modified,
            self.added + other.added,
            self.deleted + other.deleted,
        )


@dataclass(frozen=True)
class RuleDelta:
    name: str
    lines: Counts


@dataclass
class GrammarDiff:
    only_in_a: list[str]
    only_in_b: list[str]
    changed: list[RuleDelta]

    @property
    def rule_counts(self) -> Counts:
        return Counts(len(self.changed), len(self.only_in_b), len(self.only_in_a))

    @property
    def line_counts(self) -> Counts:
        total = Counts()
        for delta in self.changed:
            total = total + delta.lines
        return total

    def is_empty(self) -> bool:
        return not (self.only_in_a or self.only_in_b or self.changed)


def _lcs_length(xs: list[str], ys: list[str]) -> int:
    if not xs or not ys:
        return 0
    prev = [0] * (len(ys) + 1)
    for x in xs:
        cur = [0]
        for j, y in enumerate(ys, 1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def diff_grammars(a: Grammar, b: Grammar) -> GrammarDiff:
    """Compare two grammars rule-by-rule (matched by name), lines by LCS.

    Line counts pair up raw deletions and additions: the overlap counts as
    modified lines, the remainder as deleted or added.  Rules present on one
    side only contribute to rule counts, not line counts.
    """
    names_a = a.rule_names()
    names_b = b.rule_names()
    set_a, set_b = set(names_a), set(names_b)

    only_in_a = [name for name in names_a if name not in set_b]
    only_in_b = [name for name in names_b if name not in set_a]

    changed: list[RuleDelta] = []
    for name in names_a:
        if name not in set_b:
            continue
        lines_a = [entry.content for entry in a.rule(name).lines]
        lines_b = [entry.content for entry in b.rule(name).lines]
        common = _lcs_length(lines_a, lines_b)
        raw_deleted = len(lines_a) - common
        raw_added = len(lines_b) - common
        modified = min(raw_deleted, raw_added)
        counts = Counts(modified, raw_added - modified, raw_deleted - modified)
        if counts != Counts():
            changed.append(RuleDelta(name, counts))
    return GrammarDiff(only_in_a, only_in_b, changed)
