import json
import random
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from grseries.builders import build_GT
from grseries.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, InputError, dumps_table, main, table_from_json
from grseries.genfuncs import taubes_defaults
from grseries.samples import random_table

DATA = Path(__file__).parent / "data"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_golden_single_generic(capsys):
    code, out, _ = run(["build", "gt", "--input", DATA / "single_generic.json", "--order", 2], capsys)
    assert code == EXIT_OK
    assert out == (DATA / "single_generic_gt_order2.txt").read_text()
    assert "[1] 0 5\n" in out and "[1] 1 3\n" in out


def test_golden_mixed(capsys):
    argv = ["build", "gt", "--input", DATA / "mixed.json", "--order", 3, "--s-order", 1]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK
    assert out == (DATA / "mixed_gt_order3_s1.txt").read_text()
    code, rt_out, _ = run(["build", "rt", *argv[2:]], capsys)
    assert code == EXIT_OK
    assert rt_out == out


def test_empty_table(capsys):
    code, out, _ = run(["build", "gt", "--input", DATA / "empty.json"], capsys)
    assert code == EXIT_OK
    assert out == "1\n# expansion: class delta value\n"


def test_json_output(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(["build", "rt", "--input", DATA / "single_generic.json", "--order", 1,
                        "--format", "json", "--out", target], capsys)
    assert code == EXIT_OK and out == ""
    doc = json.loads(target.read_text())
    assert doc["kind"] == "rt" and doc["torder"] == 1 and doc["sorder"] == 1
    assert {"class": [1], "delta": 0, "value": 5} in doc["expansion"]


@pytest.mark.parametrize("name, fragment", [
    ("bad_kappa.json", "kappa"),
])
def test_invalid_input_exits_2(capsys, name, fragment):
    code, _, err = run(["build", "gt", "--input", DATA / name], capsys)
    assert code == EXIT_INPUT
    assert fragment in err


@pytest.mark.parametrize("table, fragment", [
    ({"generic": [{"class": [1], "counts": {"2": 1}}], "exceptional": [], "tori": []}, "d=2"),
    ({"generic": [], "exceptional": [], "tori": [{"class": [1], "sign": 1, "type": 0}]}, "toroidal"),
    ({"generic": [], "exceptional": [], "tori": [{"class": [1], "sign": 3, "type": 0}]}, "sign"),
    ({"generic": [{"class": [1, 2], "counts": {}}], "exceptional": [], "tori": []}, "length"),
    ({"generic": [], "exceptional": [], "tori": [{"class": [1], "sign": 1, "type": 2,
                                                  "signs": [-1, 1, 1]}]}, "disagrees"),
])
def test_semantic_errors(capsys, tmp_path, table, fragment):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"model": {"rank": 1, "form": [[2]], "kappa": [0], "grading": [1]},
                                "table": table}))
    code, _, err = run(["build", "gt", "--input", path], capsys)
    assert code == EXIT_INPUT
    assert fragment in err


def test_usage_errors(capsys, tmp_path):
    assert run(["build", "gt", "--input", tmp_path / "missing.json"], capsys)[0] == EXIT_INPUT
    assert run(["frobnicate"], capsys)[0] == EXIT_INPUT
    assert run(["build", "gt", "--input", DATA / "empty.json", "--order", -1], capsys)[0] == EXIT_INPUT
    assert run(["verify", "theorem"], capsys)[0] == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["build", "gt", "--input", bad], capsys)[0] == EXIT_INPUT


def test_canonical_json_round_trip():
    for seed in range(10):
        table = random_table(random.Random(seed), 2 + seed % 2)
        text = dumps_table(table)
        again = table_from_json(json.loads(text))
        assert dumps_table(again) == text
        gens = taubes_defaults(5)
        assert build_GT(again, gens, 5, 3) == build_GT(table, gens, 5, 3)


def test_schema_rejects_missing_fields():
    with pytest.raises(InputError):
        table_from_json({"model": {"rank": 1, "form": [[2]], "kappa": [0]}, "table": {}})


@pytest.mark.parametrize("argv", [
    ["verify", "lattice-census", "--max-m", "200"],
    ["verify", "genfunc", "--order", "32"],
    ["verify", "phi", "--order", "16"],
    ["verify", "theorem", "--input", str(DATA / "mixed.json"), "--order", "8"],
    ["verify", "theorem", "--seed", "4", "--trials", "3", "--order", "6", "--s-order", "4"],
])
def test_verify_commands_pass(capsys, argv):
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK, out
    assert "FAIL" not in out and out.endswith("all checks passed\n")


def test_verify_json_format(capsys):
    code, out, _ = run(["verify", "phi", "--order", "8", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["passed"] and len(doc["checks"]) == 8


def test_verify_reports_failure(capsys, monkeypatch):
    from grseries import cli
    monkeypatch.setitem(cli.VERIFIERS, "phi", lambda cfg: [cli._check_line("forced", False, "x")])
    code, out, _ = run(["verify", "phi"], capsys)
    assert code == EXIT_FAIL and "FAIL  forced" in out


def test_module_entry_point():
    result = subprocess.run([sys.executable, "-m", "grseries", "build", "gt", "--input",
                             str(DATA / "single_generic.json"), "--order", "1"],
                            capture_output=True, text=True)
    assert result.returncode == 0
    assert result.stdout.splitlines()[:3] == ["1", "3 * t[1]", "5 * t[1] * s^1"]


@pytest.mark.skipif(shutil.which("grseries") is None, reason="console script not installed")
def test_console_script_bad_kappa():
    result = subprocess.run(["grseries", "build", "gt", "--input", str(DATA / "bad_kappa.json")],
                            capture_output=True, text=True)
    assert result.returncode == 2
