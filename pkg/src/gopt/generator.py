"""Default grammar generation from a metamodel, plus grammar metrics.

The generated shape mirrors what EMF-style grammar generation produces for a
containment-based metamodel: every concrete class becomes one production rule
with an action line, the class name as keyword, a quoted brace block, and one
body line per structural feature.  Abstract classes become alternatives rules
over their direct subclasses, enums become enum rules, and custom datatypes
become thin wrapper rules over EString.  The result is deliberately verbose;
making it pleasant is the optimizer's job, not the generator's.
"""

import re
from dataclasses import dataclass

from .metamodel import Classifier, Metamodel, collected_features
from .model import Grammar, GrammarRule, LineEntry, TerminalRule, serialize_grammar, split_quoted

ECORE_URI = "http://www.eclipse.org/emf/2002/Ecore"


class GenerationError(ValueError):
    """Metamodel cannot be turned into a grammar."""


class NoRootClassError(GenerationError):
    """No usable root class (none given and none derivable, or the named one
    is missing or abstract)."""


def _many(feature) -> bool:
    return feature.upper == -1 or feature.upper > 1


def _feature_line(feature) -> str:
    name = feature.name
    tname = feature.type_name
    optional = feature.lower == 0
    suffix = "?" if optional else ""

    if feature.kind == "attribute":
        if tname == "EBoolean" and not _many(feature):
            return f"({name}?='{name}')" + suffix
        if _many(feature):
            return _many_line(name, tname) + suffix
        return f"('{name}' {name}={tname})" + suffix

    # references: containment calls the target rule, plain references
    # cross-reference it by name
    target = tname if feature.containment else f"[{tname}|EString]"
    if _many(feature):
        return _many_line(name, target) + suffix
    return f"('{name}' {name}={target})" + suffix


def _many_line(name: str, target: str) -> str:
    return f"('{name}' '{{' {name}+={target} ( \",\" {name}+={target})* '}}' )"


def _class_rule(mm: Metamodel, cls: Classifier) -> GrammarRule:
    entries = [
        LineEntry.of(f"{cls.name} returns {cls.name}:"),
        LineEntry.of(f"{{{cls.name}}}"),
        LineEntry.of(f"'{cls.name}'"),
        LineEntry.of("'{'"),
    ]
    for feature in collected_features(mm, cls):
        entries.append(LineEntry.of(_feature_line(feature)))
    entries.append(LineEntry.of("'}'"))
    return GrammarRule(entries)


def _alternatives_rule(mm: Metamodel, cls: Classifier) -> GrammarRule | None:
    subs = [
        c.name
        for c in mm.classifiers
        if c.kind == "class" and cls.name in c.supertypes
    ]
    if not subs:
        return None
    return GrammarRule(
        [
            LineEntry.of(f"{cls.name} returns {cls.name}:"),
            LineEntry.of(" | ".join(subs)),
        ]
    )


def _enum_rule(cls: Classifier) -> GrammarRule:
    body = " | ".join(f"{lit}='{lit}'" for lit in cls.literals)
    entries = [LineEntry.of(f"enum {cls.name} returns {cls.name}:")]
    if body:
        entries.append(LineEntry.of(body))
    return GrammarRule(entries)


def _datatype_rule(cls: Classifier) -> GrammarRule:
    return GrammarRule(
        [
            LineEntry.of(f"{cls.name} returns {cls.name}:"),
            LineEntry.of("EString"),
        ]
    )


_NUMERIC_TERMINALS = {
    "EInt": "'-'? INT",
    "EFloat": "'-'? INT ('.' INT)?",
    "EDouble": "'-'? INT ('.' INT)?",
}


def generate_grammar(
    mm: Metamodel,
    root: str | None = None,
    language_name: str | None = None,
) -> Grammar:
    """Generate the default grammar for a metamodel.

    The root class's rule comes first (entry point), the rest follow in
    document order.  Without an explicit root, the first concrete class is
    the root.
    """
    concrete = [c for c in mm.classifiers if c.kind == "class" and not c.abstract]
    if not concrete:
        raise NoRootClassError(f"metamodel {mm.name!r} has no concrete class")
    if root is None:
        root_cls = concrete[0]
    else:
        root_cls = mm.classifier(root)
        if root_cls is None or root_cls.kind != "class" or root_cls.abstract:
            raise NoRootClassError(f"root class {root!r} is missing or not concrete")

    if language_name is None:
        language_name = f"{mm.name}.{mm.name.capitalize()}"

    header = [
        f"grammar {language_name} with org.eclipse.xtext.common.Terminals",
        f'import "{mm.ns_uri}"',
        f'import "{ECORE_URI}" as ecore',
    ]

    rules: list[GrammarRule] = []
    ordered = [root_cls] + [c for c in mm.classifiers if c is not root_cls]
    for cls in ordered:
        if cls.kind == "class":
            if cls.abstract:
                rule = _alternatives_rule(mm, cls)
                if rule is not None:
                    rules.append(rule)
            else:
                rules.append(_class_rule(mm, cls))
        elif cls.kind == "enum":
            rules.append(_enum_rule(cls))
        else:
            rules.append(_datatype_rule(cls))

    used_types = {f.type_name for c in mm.classifiers for f in c.features}
    terminals = [TerminalRule(["EString returns ecore::EString:", "STRING | ID"])]
    for builtin, body in _NUMERIC_TERMINALS.items():
        if builtin in used_types:
            terminals.append(TerminalRule([f"{builtin} returns ecore::{builtin}:", body]))

    return Grammar(header, rules, terminals)


# --- metrics --------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    lines: int
    rules: int
    calls: int


_WORD = re.compile(r"[A-Za-z_]\w*")


def grammar_metrics(grammar: Grammar) -> Metrics:
    """Size metrics: non-blank serialized lines, production rules, and
    references to known rule names inside rule bodies (cross-reference
    targets included, action lines and quoted keywords not)."""
    text = serialize_grammar(grammar)
    line_count = sum(1 for line in text.splitlines() if line.strip())
    known = {r.name for r in grammar.rules} | {t.name for t in grammar.terminals}

    calls = 0
    word = _WORD
    for rule in grammar.rules:
        for entry in rule.lines[1:]:
            content = entry.content
            if content.startswith("//"):
                continue
            if content.startswith("{") and content.endswith("}"):
                continue  # action line
            for quoted, start, end in split_quoted(content):
                if quoted:
                    continue
                for m in word.finditer(content, start, end):
                    if m.group() in known:
                        calls += 1
    return Metrics(line_count, len(grammar.rules), calls)
