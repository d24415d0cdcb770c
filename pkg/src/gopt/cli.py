"""Command line front end.

Exit codes: 0 on success, 1 for usage or input errors, 2 when an
optimization run finished but at least one application missed its scope
(the output grammar is still written in that case; the diagnostics say
what to fix).  Set GOPT_NO_COLOR to suppress ANSI colors.
"""

import argparse
import os
import sys
from pathlib import Path

from .engine import ConfigError, dry_run, optimize, parse_configuration
from .generator import GenerationError, generate_grammar, grammar_metrics
from .metamodel import MetamodelError, load_metamodel
from .model import GrammarError, diff_grammars, parse_grammar, serialize_grammar
from .presets import PresetError, expand_text, list_presets, load_preset
from .rules import UnknownRuleKindError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _use_color() -> bool:
    return sys.stdout.isatty() and not os.environ.get("GOPT_NO_COLOR")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_generate(args) -> int:
    metamodel = load_metamodel(_read(args.metamodel))
    grammar = generate_grammar(metamodel, root=args.root, language_name=args.name)
    _write(args.output, serialize_grammar(grammar))
    return 0


def _run_config(args, write_grammar: bool) -> int:
    grammar = parse_grammar(_read(args.grammar))
    config = parse_configuration(_read(args.config))
    if write_grammar:
        result, report = optimize(grammar, config)
        _write(args.output, serialize_grammar(result))
    else:
        report = dry_run(grammar, config)
    if args.report:
        Path(args.report).write_text(report.to_machine(), encoding="utf-8")
    print(report.to_text(color=_use_color()))
    return 2 if report.scope_failures() else 0


def _cmd_optimize(args) -> int:
    return _run_config(args, write_grammar=True)


def _cmd_dry_run(args) -> int:
    return _run_config(args, write_grammar=False)


def _cmd_diff(args) -> int:
    a = parse_grammar(_read(args.a))
    b = parse_grammar(_read(args.b))
    delta = diff_grammars(a, b)
    if delta.is_empty():
        print("grammars are identical")
        return 0
    rc, lc = delta.rule_counts, delta.line_counts
    print(f"rules: {rc.modified} modified, {rc.added} added, {rc.deleted} deleted")
    print(f"lines: {lc.modified} modified, {lc.added} added, {lc.deleted} deleted")
    if delta.only_in_b:
        print("added rules: " + ", ".join(delta.only_in_b))
    if delta.only_in_a:
        print("deleted rules: " + ", ".join(delta.only_in_a))
    if delta.changed:
        print("changed rules: " + ", ".join(d.name for d in delta.changed))
    return 0


def _cmd_metrics(args) -> int:
    m = grammar_metrics(parse_grammar(_read(args.grammar)))
    print(f"lines: {m.lines}")
    print(f"rules: {m.rules}")
    print(f"calls: {m.calls}")
    return 0


def _cmd_expand_preset(args) -> int:
    if args.list:
        for name in list_presets():
            print(name)
        return 0
    if not args.name:
        raise PresetError("pass --name <preset> or --list")
    bindings = {}
    for item in args.set or []:
        key, eq, value = item.partition("=")
        if not eq:
            raise PresetError(f"--set expects key=value, got {item!r}")
        bindings[key] = value
    _write(args.output, expand_text(load_preset(args.name), bindings))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="gopt", description="Grammar generation and optimization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="derive a default grammar from a metamodel")
    p.add_argument("--metamodel", required=True, help="path to the .ecore file")
    p.add_argument("--root", help="root class name (default: first concrete class)")
    p.add_argument("--name", help="language name for the grammar declaration")
    p.add_argument("-o", "--output", help="grammar file to write (default: stdout)")
    p.set_defaults(func=_cmd_generate)

    for name, func, text in (
        ("optimize", _cmd_optimize, "apply a configuration and write the result"),
        ("dry-run", _cmd_dry_run, "apply a configuration but only report"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("-g", "--grammar", required=True, help="input grammar file")
        p.add_argument("-c", "--config", required=True, help="configuration file")
        if name == "optimize":
            p.add_argument("-o", "--output", help="grammar file to write (default: stdout)")
        p.add_argument("--report", help="also write a machine readable report here")
        p.set_defaults(func=func)

    p = sub.add_parser("diff", help="compare two grammars rule by rule")
    p.add_argument("-a", required=True, help="left grammar file")
    p.add_argument("-b", required=True, help="right grammar file")
    p.set_defaults(func=_cmd_diff)

    p = sub.add_parser("metrics", help="line, rule and call counts of a grammar")
    p.add_argument("-g", "--grammar", required=True, help="grammar file")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("expand-preset", help="expand a preset into a configuration")
    p.add_argument("--name", help="preset name or path to a .gopt file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="bind a preset parameter (repeatable)")
    p.add_argument("--list", action="store_true", help="list shipped presets")
    p.add_argument("-o", "--output", help="configuration file to write (default: stdout)")
    p.set_defaults(func=_cmd_expand_preset)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GrammarError, MetamodelError, GenerationError, ConfigError,
            UnknownRuleKindError, PresetError) as exc:
        print(f"gopt: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"gopt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
