"""The gopt command line, driven through main() with temp files."""

import shutil
import subprocess

import pytest

from conftest import FIXTURES, fixture_text
from gopt.cli import main
from oracles import normalize_grammar_text


@pytest.fixture()
def dot_files(tmp_path):
    grammar = tmp_path / "dot.xtext"
    grammar.write_text(fixture_text("dot_generated.xtext"))
    config = tmp_path / "pipeline.cfg"
    config.write_text(fixture_text("dot_pipeline.cfg"))
    return grammar, config


def test_generate_to_stdout(capsys):
    rc = main(["generate", "--metamodel", str(FIXTURES / "dot.ecore")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "NodeStmt returns NodeStmt:" in out
    assert out.endswith("\n")


def test_generate_to_file(tmp_path):
    target = tmp_path / "out.xtext"
    rc = main([
        "generate", "--metamodel", str(FIXTURES / "dot.ecore"),
        "--name", "org.example.Dot", "-o", str(target),
    ])
    assert rc == 0
    assert "grammar org.example.Dot" in target.read_text()


def test_generate_with_missing_file_fails_cleanly(tmp_path, capsys):
    rc = main(["generate", "--metamodel", str(tmp_path / "nope.ecore")])
    assert rc == 1
    assert "gopt: error:" in capsys.readouterr().err


def test_generate_with_unknown_root_fails_cleanly(capsys):
    rc = main([
        "generate", "--metamodel", str(FIXTURES / "dot.ecore"), "--root", "Ghost",
    ])
    assert rc == 1
    assert "Ghost" in capsys.readouterr().err


def test_optimize_writes_grammar_and_report(dot_files, tmp_path, capsys):
    grammar, config = dot_files
    out_file = tmp_path / "result.xtext"
    report_file = tmp_path / "report.txt"
    rc = main([
        "optimize", "-g", str(grammar), "-c", str(config),
        "-o", str(out_file), "--report", str(report_file),
    ])
    assert rc == 0
    expected = normalize_grammar_text(fixture_text("dot_optimized.xtext"))
    assert out_file.read_text() == expected
    report = report_file.read_text()
    assert report.startswith("report-version: 1\n")
    assert "diagnostics: 0" in report
    assert "applications attempted: 4" in capsys.readouterr().out


def test_optimize_exit_code_2_on_scope_miss(dot_files, tmp_path, capsys):
    grammar, _ = dot_files
    config = tmp_path / "bad.cfg"
    config.write_text("removeBraces rule=Ghost\nremoveKeyword rule=NodeStmt\n")
    out_file = tmp_path / "result.xtext"
    rc = main(["optimize", "-g", str(grammar), "-c", str(config), "-o", str(out_file)])
    assert rc == 2
    # the grammar is still written, with the applicable parts applied
    assert "'node'" not in out_file.read_text()
    assert "scope-not-found" in capsys.readouterr().out


def test_optimize_without_color_when_env_set(dot_files, tmp_path, capsys, monkeypatch):
    grammar, _ = dot_files
    monkeypatch.setenv("GOPT_NO_COLOR", "1")
    config = tmp_path / "bad.cfg"
    config.write_text("removeBraces rule=Ghost\n")
    main(["optimize", "-g", str(grammar), "-c", str(config), "-o", str(tmp_path / "o")])
    assert "\x1b[" not in capsys.readouterr().out


def test_optimize_rejects_broken_config(dot_files, tmp_path, capsys):
    grammar, _ = dot_files
    config = tmp_path / "broken.cfg"
    config.write_text("removeBraces\nnotAThing rule=X\n")
    rc = main(["optimize", "-g", str(grammar), "-c", str(config)])
    assert rc == 1
    assert "line 2" in capsys.readouterr().err


def test_dry_run_reports_without_writing(dot_files, capsys):
    grammar, config = dot_files
    before = grammar.read_text()
    rc = main(["dry-run", "-g", str(grammar), "-c", str(config)])
    assert rc == 0
    assert grammar.read_text() == before
    out = capsys.readouterr().out
    assert "applications attempted: 4" in out


def test_dry_run_exit_code_2_on_scope_miss(dot_files, tmp_path):
    grammar, _ = dot_files
    config = tmp_path / "bad.cfg"
    config.write_text("removeAttribute rule=NodeStmt attr=ghost\n")
    assert main(["dry-run", "-g", str(grammar), "-c", str(config)]) == 2


def test_diff_identical(dot_files, capsys):
    grammar, _ = dot_files
    rc = main(["diff", "-a", str(grammar), "-b", str(grammar)])
    assert rc == 0
    assert capsys.readouterr().out == "grammars are identical\n"


def test_diff_changed(dot_files, tmp_path, capsys):
    grammar, config = dot_files
    changed = tmp_path / "after.xtext"
    main(["optimize", "-g", str(grammar), "-c", str(config), "-o", str(changed)])
    capsys.readouterr()
    rc = main(["diff", "-a", str(grammar), "-b", str(changed)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "lines: 2 modified, 0 added, 3 deleted" in out
    assert "changed rules: NodeStmt" in out


def test_metrics_output(dot_files, capsys):
    grammar, _ = dot_files
    rc = main(["metrics", "-g", str(grammar)])
    assert rc == 0
    assert capsys.readouterr().out == "lines: 36\nrules: 4\ncalls: 8\n"


def test_expand_preset_list(capsys):
    rc = main(["expand-preset", "--list"])
    assert rc == 0
    assert "python-style" in capsys.readouterr().out.splitlines()


def test_expand_preset_with_bindings(tmp_path):
    target = tmp_path / "expanded.cfg"
    rc = main([
        "expand-preset", "--name", "python-style",
        "--set", "identifier_attr=none", "--set", "drop_keywords=a,b",
        "-o", str(target),
    ])
    assert rc == 0
    text = target.read_text()
    assert "repositionAttribute" not in text
    assert text.count("removeKeyword") == 2


def test_expand_preset_unknown_name(capsys):
    rc = main(["expand-preset", "--name", "missing-preset"])
    assert rc == 1
    assert "gopt: error:" in capsys.readouterr().err


def test_expand_preset_bad_set_format(capsys):
    rc = main(["expand-preset", "--name", "python-style", "--set", "oops"])
    assert rc == 1
    assert "key=value" in capsys.readouterr().err


def test_usage_error_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["optimize", "-g", "only-grammar.xtext"])
    assert exc.value.code == 1


def test_unknown_subcommand_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_installed_script_smoke(tmp_path):
    exe = shutil.which("gopt")
    if exe is None:
        pytest.skip("gopt entry point not on PATH")
    proc = subprocess.run(
        [exe, "metrics", "-g", str(FIXTURES / "dot_generated.xtext")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "lines: 36\nrules: 4\ncalls: 8\n"
