"""Grammar generation and optimization for Xtext-style languages.

Generate a default grammar from an Ecore metamodel, rewrite it with an
ordered configuration of small rule applications, and replay that
configuration later against an evolved grammar, collecting diagnostics
instead of failing.
"""

from .engine import (
    BadArityError,
    ChangeReport,
    ConfigError,
    Configuration,
    Diagnostic,
    MalformedLineError,
    dry_run,
    optimize,
    parse_configuration,
)
from .generator import (
    GenerationError,
    Metrics,
    NoRootClassError,
    generate_grammar,
    grammar_metrics,
)
from .metamodel import (
    Change,
    Classifier,
    Feature,
    Metamodel,
    MetamodelError,
    collected_features,
    diff_metamodels,
    load_metamodel,
    mirrored,
)
from .model import (
    Counts,
    DuplicateRuleNameError,
    Grammar,
    GrammarDiff,
    GrammarError,
    GrammarRule,
    LineEntry,
    TerminalRule,
    UnterminatedRuleError,
    diff_grammars,
    parse_grammar,
    serialize_grammar,
)
from .presets import (
    Parameter,
    Preset,
    PresetError,
    UnboundParameterError,
    expand_preset,
    expand_text,
    list_presets,
    load_preset,
)
from .rules import (
    APPLIED,
    NO_OP,
    SCOPE_NOT_FOUND,
    Outcome,
    RuleApplication,
    RuleSpec,
    UnknownRuleKindError,
    apply_application,
    known_kinds,
    register_rule,
    rule_spec,
)

__version__ = "0.1.0"

__all__ = [
    "APPLIED",
    "BadArityError",
    "Change",
    "ChangeReport",
    "Classifier",
    "ConfigError",
    "Configuration",
    "Counts",
    "Diagnostic",
    "DuplicateRuleNameError",
    "Feature",
    "GenerationError",
    "Grammar",
    "GrammarDiff",
    "GrammarError",
    "GrammarRule",
    "LineEntry",
    "MalformedLineError",
    "Metamodel",
    "MetamodelError",
    "Metrics",
    "NO_OP",
    "NoRootClassError",
    "Outcome",
    "Parameter",
    "Preset",
    "PresetError",
    "RuleApplication",
    "RuleSpec",
    "SCOPE_NOT_FOUND",
    "TerminalRule",
    "UnboundParameterError",
    "UnknownRuleKindError",
    "UnterminatedRuleError",
    "apply_application",
    "collected_features",
    "diff_grammars",
    "diff_metamodels",
    "dry_run",
    "expand_preset",
    "expand_text",
    "generate_grammar",
    "grammar_metrics",
    "known_kinds",
    "list_presets",
    "load_metamodel",
    "load_preset",
    "mirrored",
    "optimize",
    "parse_configuration",
    "parse_grammar",
    "register_rule",
    "rule_spec",
    "serialize_grammar",
]
