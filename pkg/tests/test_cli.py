from __future__ import annotations

import json
import subprocess
import sys

import pytest

from helpers import FIXTURES
from xltransparency.cli import main
from xltransparency.config import AuditConfig
from xltransparency.report import batch_exit_code, run_audit, summary_line
from xltransparency.score import OPAQUE, ZERO, Score


def fx(name):
    return str(FIXTURES / f"{name}.xlsx")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- exit codes ---------------------------------------------------------------


def test_transparent_exits_zero(capsys):
    code, out, _ = run(capsys, "audit", fx("inputs"))
    assert code == 0
    assert "Model: TRANSPARENT (0 steps from transparency)" in out


def test_opaque_exits_one(capsys):
    code, out, _ = run(capsys, "audit", fx("literal"))
    assert code == 1
    assert "Model: OPAQUE" in out


def test_threshold_exits_two(capsys):
    assert run(capsys, "audit", fx("pmt_far"), "--fail-threshold", "-3")[0] == 2
    assert run(capsys, "audit", fx("pmt_far"), "--fail-threshold", "-4")[0] == 0


def test_load_failure_exits_three(capsys):
    code, out, _ = run(capsys, "audit", fx("malformed"))
    assert code == 3
    assert "malformed" in out.lower()


def test_usage_errors_exit_three(capsys):
    assert run(capsys, "audit")[0] == 3
    assert run(capsys, "audit", fx("inputs"), "--fail-threshold", "5")[0] == 3
    assert run(capsys, "audit", fx("inputs"), "--vicinity", "wide")[0] == 3


def test_batch_reports_each_file_and_worst_code(capsys):
    code, out, _ = run(capsys, "audit", fx("pmt_near"), fx("not_a_zip"), "--format", "structured", "--no-timing")
    doc = json.loads(out)
    assert code == 3 == doc["exit_code"]
    statuses = [f["status"] for f in doc["files"]]
    assert statuses == ["ok", "load-error"]
    assert doc["files"][1]["error"]["kind"]


def test_batch_exit_code_order():
    cfg = AuditConfig(fail_threshold=-1)
    reports = run_audit([fx("pmt_far"), fx("literal")], cfg)
    assert [r.exit_code() for r in reports] == [2, 1]
    assert batch_exit_code(reports) == 1
    assert batch_exit_code([]) == 0


# -- output ---------------------------------------------------------------------


def test_summary_lines():
    assert summary_line(ZERO) == "TRANSPARENT (0 steps from transparency)"
    assert summary_line(Score(-4)) == "-4 steps from transparency"
    assert summary_line(OPAQUE).startswith("OPAQUE")


def test_opaque_section_comes_first(capsys):
    _, out, _ = run(capsys, "audit", fx("errors"))
    opaque_at = out.index("Opaque cells (")
    assert opaque_at < out.index("Sheet Errors") < out.index("Findings:")


def test_text_and_structured_agree(capsys):
    _, text, _ = run(capsys, "audit", fx("vlookup_grid"))
    _, structured, _ = run(capsys, "audit", fx("vlookup_grid"), "--format", "structured")
    doc = json.loads(structured)["files"][0]
    assert doc["model"]["total"] == -2
    assert "Model: -2 steps from transparency" in text
    cell = next(c for c in doc["cells"] if c["cell"] == "Model!B1")
    assert sorted((i["rule"], i["steps"]) for i in cell["items"] if i["steps"] != 0) == [("help", 1), ("inspect", 1)]


def test_structured_output_is_byte_identical(capsys, tmp_path):
    files = [fx("scenarios"), fx("errors"), fx("hidden")]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "audit", *files, "--format", "structured", "--no-timing", "--out", str(first))
    run(capsys, "audit", *files, "--format", "structured", "--no-timing", "--out", str(second))
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text())["schema_version"] == "1.0"


def test_figures_and_csv_written(capsys, tmp_path):
    code, _, _ = run(capsys, "audit", fx("errors"), "--figures", str(tmp_path))
    assert code == 1
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "errors.cells.csv" in names and "errors.steps.png" in names
    assert {"errors.Errors.heatmap.png", "errors.Handled.heatmap.png"} <= set(names)
    header = (tmp_path / "errors.cells.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "file,cell,value_type,surface,source,total,classification,reasons"
    assert all((tmp_path / n).stat().st_size > 0 for n in names)


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "audit.cfg"
    cfg.write_text("vicinity = 80x20\n", encoding="utf-8")
    assert run(capsys, "audit", fx("pmt_far"), "--config", str(cfg), "--fail-threshold", "0")[0] == 0
    cfg.write_text("bogus = 1\n", encoding="utf-8")
    assert run(capsys, "audit", fx("pmt_far"), "--config", str(cfg))[0] == 3


# -- other subcommands ---------------------------------------------------------------


def test_chain_command(capsys):
    code, out, _ = run(capsys, "chain", fx("shared_precedent"), "Calc!B3")
    assert code == 0 and out.rstrip().endswith("-5")
    code, out, _ = run(capsys, "chain", fx("shared_precedent"), "Calc!B3", "--chain-mode", "per-path")
    assert out.rstrip().endswith("-6")
    assert run(capsys, "chain", fx("cycle"), "Loop!B1")[0] == 1


def test_ast_command(capsys):
    code, out, _ = run(capsys, "ast", "=VLOOKUP(A1,A3:B5,2,FALSE)")
    assert code == 0
    assert "FuncCall VLOOKUP" in out
    assert run(capsys, "ast", "=SUM(1")[0] == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "xltransparency", "audit", fx("inputs")], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and "TRANSPARENT" in proc.stdout
