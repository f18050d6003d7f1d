import json
import subprocess
import sys

import pytest

from oracles import table2
from twouninorm import fixtures
from twouninorm.cli import RunConfig, InputError, main

D = fixtures.DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_lattice(capsys):
    code, out, _ = run(capsys, "check-lattice", "-l", D / "L1.json", "--incomparable")
    assert code == 0 and "16 elements" in out
    assert "|I_a| = 3  x6 x7 x8" in out


def test_cycle_exit_code(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"elements": ["0", "a", "1"], "covers": [["0", "a"], ["a", "0"], ["a", "1"]], "bottom": "0", "top": "1"}))
    code, _, err = run(capsys, "check-lattice", "-l", p)
    assert code == 2 and "cycle" in err


def test_not_a_lattice_exit_code(capsys, tmp_path):
    p = tmp_path / "n.json"
    covers = [["0", "a"], ["0", "b"], ["a", "c"], ["a", "d"], ["b", "c"], ["b", "d"], ["c", "1"], ["d", "1"]]
    p.write_text(json.dumps({"elements": ["0", "a", "b", "c", "d", "1"], "covers": covers, "bottom": "0", "top": "1"}))
    code, _, err = run(capsys, "check-lattice", "-l", p)
    assert code == 2 and "no unique" in err


def test_pipeline_table1(capsys, tmp_path):
    code, _, _ = run(capsys, "pipeline", "-l", D / "L1.json", "-g", D / "f_table1.json", "-o", tmp_path, "--out", "csv", "--out", "json", "--out", "text")
    assert code == 0
    rows = [r.split(",") for r in (tmp_path / "table.csv").read_text().splitlines()]
    gold = table2()
    assert {(r[0], c): v for r in rows[1:] for c, v in zip(rows[0][1:], r[1:])} == gold
    axioms = json.loads((tmp_path / "axioms.json").read_text())
    assert axioms["passed"] and axioms["kind"] == "2-uninorm"
    assert "kind: 2-uninorm" in (tmp_path / "report.txt").read_text()


def test_pipeline_f1_override(capsys):
    code, out, _ = run(capsys, "pipeline", "-l", D / "L1.json", "-g", D / "f1.json", "--override")
    assert code == 4
    assert "associative      fail           (x3, x3, x4)" in out


def test_pipeline_condition_failure(capsys):
    code, out, _ = run(capsys, "pipeline", "-l", D / "L1.json", "-g", D / "f1.json")
    assert code == 3 and "result: FAIL" in out


def test_pipeline_f2_override_reports_monotone(capsys):
    code, out, _ = run(capsys, "pipeline", "-l", D / "L1.json", "-g", D / "f2.json", "--override")
    assert code == 4 and "monotone         fail           (e1, x3, x3)" in out


def test_check_generator(capsys):
    code, out, _ = run(capsys, "check-generator", "-l", D / "L1.json", "-g", D / "f4.json")
    assert code == 3 and "iv       fail" in out
    code, out, _ = run(capsys, "check-generator", "-l", D / "L1.json", "-g", D / "f_table1.json", "--out", "json")
    assert code == 0 and json.loads(out)["passed"]


def test_mode_mismatch_is_input_error(capsys):
    code, _, err = run(capsys, "check-generator", "-l", D / "L1.json", "-g", D / "f_table1.json", "--mode", "chain")
    assert code == 2 and "chain" in err


def test_construct_then_verify_round_trip(capsys, tmp_path):
    code, _, _ = run(capsys, "construct", "-l", D / "L1.json", "-g", D / "f_table1.json", "--out", "json", "-o", tmp_path / "c")
    assert code == 0
    code, out, _ = run(capsys, "verify", "-l", D / "L1.json", "--op", tmp_path / "c" / "table.json", "--out", "json")
    assert code == 0
    run(capsys, "pipeline", "-l", D / "L1.json", "-g", D / "f_table1.json", "-o", tmp_path / "p")
    assert json.loads(out) == json.loads((tmp_path / "p" / "axioms.json").read_text())


def test_verify_broken_table_and_anchor_override(capsys, tmp_path):
    run(capsys, "construct", "-l", D / "L1.json", "-g", D / "f5.json", "--override", "--out", "json", "-o", tmp_path)
    code, out, _ = run(capsys, "verify", "-l", D / "L1.json", "--op", tmp_path / "table.json")
    assert code == 4 and "monotone         fail" in out
    code, _, err = run(capsys, "verify", "-l", D / "L1.json", "--op", tmp_path / "missing.json")
    assert code == 2


def test_construct_builders(capsys):
    outs = []
    for builder in ("general", "alt-form"):
        code, out, _ = run(capsys, "construct", "-l", D / "L1.json", "-g", D / "f_table1.json", "--builder", builder)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    code, _, err = run(capsys, "construct", "-l", D / "L1.json", "-g", D / "f_table1.json", "--builder", "nullnorm")
    assert code == 2


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "-l", D / "L1.json", "-g", D / "f_uni_nullnorm.json")
    assert code == 0 and out.strip() == "uni-nullnorm"
    code, out, _ = run(capsys, "classify", "-l", D / "L1.json", "-g", D / "f1.json", "--override")
    assert code == 4


def test_search_guard_and_catalog(capsys, tmp_path):
    code, _, err = run(capsys, "search", "-l", D / "L1.json")
    assert code == 2 and "limit" in err
    chain3 = tmp_path / "c3.json"
    chain3.write_text(json.dumps({"elements": ["0", "m", "1"], "covers": [["0", "m"], ["m", "1"]], "bottom": "0", "top": "1"}))
    cat = tmp_path / "cat.csv"
    for _ in range(2):
        code, _, _ = run(capsys, "search", "-l", chain3, "--bound", "3", "--anchors", "0,m,1", "--catalog", cat)
        assert code == 0
    lines = cat.read_text().splitlines()
    assert lines.count(lines[0]) == 1 and len(lines) > 2
    code, _, _ = run(capsys, "search", "-l", chain3, "--node-limit", "3")
    assert code == 5


def test_pipeline_is_deterministic(capsys, tmp_path):
    for d in ("a", "b"):
        run(capsys, "pipeline", "-l", D / "L1.json", "-g", D / "f4.json", "--override", "-o", tmp_path / d, "--out", "text", "--out", "csv")
    for name in ("report.txt", "table.txt", "table.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_bad_arguments(capsys):
    assert main(["pipeline"]) == 2
    assert main(["search", "-l", str(D / "L1.json"), "--bound", "0"]) == 2
    capsys.readouterr()


def test_run_config_validation():
    with pytest.raises(InputError):
        RunConfig(command="search", formats=("xml",))
    with pytest.raises(InputError):
        RunConfig(command="search", denominators=(0,))


def test_workers_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("TWOUNINORM_WORKERS", "2")
    code, _, _ = run(capsys, "pipeline", "-l", D / "L1.json", "-g", D / "f_table1.json")
    assert code == 0


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "twouninorm.cli", "check-lattice", "-l", str(D / "L2.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "16 elements" in proc.stdout
