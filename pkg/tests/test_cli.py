import json
import subprocess
import sys
from pathlib import Path

import pytest

from connsep.cli import main

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, json.loads(out.out) if out.out else None, out.err


def test_witness_examples(capsys):
    code, rep, _ = run(capsys, "witness", DATA / "ones_2x2.json")
    assert code == 0 and rep["result"]["color"] == 1 and rep["result"]["length"] == 2
    code, rep, _ = run(capsys, "witness", DATA / "checker_2x2.json", "--generalized")
    assert rep["result"]["color"] == 1
    assert rep["result"]["chain"]["cells"] == [[1, 1], [2, 2]]
    code, rep, err = run(capsys, "witness", DATA / "bad_color.json")
    assert code == 2 and rep["status"] == "error" and "connsep witness" in err


def test_witness_cover(capsys):
    code, rep, _ = run(capsys, "witness", DATA / "cover_columns.json")
    assert code == 0 and rep["result"]["kind"] == "lebesgue" and rep["result"]["color"] == 2


def test_verify_examples(capsys):
    code, rep, _ = run(capsys, "verify", "--n", 2, "--k", 2, "--mode", "plain")
    assert code == 0 and rep["result"]["total"] == 16 and rep["result"]["failures"] == 0
    code, rep, _ = run(capsys, "verify", "--n", 3, "--k", 2, "--mode", "generalized")
    assert rep["result"]["total"] == 6561 and rep["result"]["failures"] == 0
    code, rep, _ = run(capsys, "verify", "--n", 3, "--k", 3, "--trials", 10000, "--seed", 5)
    assert code == 0 and rep["result"]["total"] == 10000 and rep["inputs"]["seed"] == 5


def test_verify_guard_is_a_usage_error(capsys):
    code, rep, err = run(capsys, "verify", "--n", 3, "--k", 3)
    assert code == 2 and "--trials" in rep["error"]


def test_level_example(capsys):
    code, rep, _ = run(capsys, "level", DATA / "columns_3x3.json")
    assert code == 0
    assert [(e["axis"], e["kind"], e["level"]) for e in rep["result"]] == [
        (1, "separating", 0), (2, "connecting", 0)]


def test_analyze_examples(capsys):
    code, rep, _ = run(capsys, "analyze", DATA / "x1_vertex.json", "--dp", 0.25)
    assert code == 0
    axis1 = rep["result"]["certified"]["2"]["1"]
    assert ["0.5", "0.5"] in axis1["sep_in"]
    code, rep, _ = run(capsys, "analyze", DATA / "constant_vertex.json", "--dp", 0.1)
    for axis in ("1", "2"):
        assert rep["result"]["certified"]["2"][axis]["conn_in"] == [["0.3", "0.3"]]


def test_analyze_bad_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"type": "vertex", "n": 2, "k": 2, "values": [1, 2]}')
    assert run(capsys, "analyze", bad)[0] == 2
    bad.write_text("not json")
    assert run(capsys, "analyze", bad)[0] == 2
    assert run(capsys, "analyze", tmp_path / "missing.json")[0] == 2


def test_synthesize_examples(capsys, tmp_path):
    field = tmp_path / "g.json"
    code, rep, _ = run(capsys, "synthesize", DATA / "spec_empty_axis.json",
                       "--out", field, "--verify-k", "8,16", "--dp", 0.05)
    assert code == 0 and rep["result"]["round_trip"]["ok"]
    assert json.loads(field.read_text())["type"] == "expr"
    code, rep, _ = run(capsys, "analyze", field, "--kschedule", "8", "--dp", 0.1)
    assert code == 0
    code, rep, _ = run(capsys, "synthesize", DATA / "spec_condition2.json")
    assert code == 1 and rep["result"]["violation"]["condition"] == 2
    code, rep, _ = run(capsys, "synthesize", DATA / "spec_n1.json")
    assert code == 2


def test_oracle_check_examples(capsys):
    code, rep, _ = run(capsys, "oracle-check", "--n", 2, "--k", 2)
    assert code == 0 and rep["result"]["total"] == 16 and rep["result"]["mismatches"] == 0
    code, rep, _ = run(capsys, "oracle-check", "--n", 3, "--k", 2)
    assert rep["result"]["total"] == 256 and rep["result"]["mismatches"] == 0
    code, rep, _ = run(capsys, "oracle-check", "--n", 3, "--k", 3, "--trials", 1000, "--seed", 42)
    assert code == 0 and rep["result"]["mismatches"] == 0


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        main(["--out", str(path), "verify", "--n", "3", "--k", "3", "--trials", "200",
              "--seed", "9", "--mode", "generalized"])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_timing_flag(capsys):
    code, rep, _ = run(capsys, "--timing", "verify", "--n", "2", "--k", "2")
    assert "elapsed_s" in rep


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "connsep", "witness", str(DATA / "ones_2x2.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["color"] == 1
