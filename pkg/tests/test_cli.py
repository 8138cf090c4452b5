import json
import subprocess
import sys

import pytest

from picod.cli import main
from picod.code import LinearCode, serialize
from picod.instance import Instance


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--m", "9", "--s", "3")
    assert code == 0 and out.splitlines()[0] == "InfeasibleLinear case 3"


def test_bounds_text_and_json(capsys):
    code, out, _ = run(capsys, "bounds", "--m", "12", "--s", "3")
    assert code == 0
    assert "lower: 6" in out and "upper: 6" in out and "centralized-linear: 2" in out and "gap: 3" in out
    code, out, _ = run(capsys, "bounds", "--m", "12", "--s", "3", "--format", "json")
    doc = json.loads(out)
    assert doc["gap"]["fraction"] == "3" and doc["centralized"]["linear_optimal"]["decimal"] == 2.0


def test_fraction_and_decimal_side_by_side(capsys):
    _, out, _ = run(capsys, "classify", "--m", "10", "--s", "4")
    assert "lower: 15/4 (3.7500)" in out


@pytest.mark.parametrize("argv", [
    ["classify", "--m", "2", "--s", "2"],
    ["classify", "--m", "5"],
    ["frobnicate"],
    ["search", "--m", "8", "--s", "3", "--p", "4"],
    ["search", "--m", "8", "--s", "3", "--max-len", "99"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 64


def test_scheme_and_verify_pipeline(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, _, _ = run(capsys, "scheme", "--m", "8", "--s", "3", "--out", str(path))
    assert code == 0
    assert len(json.loads(path.read_text())["rows"]) == 4
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 0 and "feasible: true" in out


def test_scheme_odd(capsys, tmp_path):
    path = tmp_path / "c.json"
    assert run(capsys, "scheme", "--m", "11", "--s", "8", "--out", str(path))[0] == 0
    assert len(json.loads(path.read_text())["rows"]) == 4


def test_scheme_stdout(capsys):
    code, out, err = run(capsys, "scheme", "--m", "10", "--s", "3")
    assert code == 0 and len(json.loads(out)["rows"]) == 5 and "s3_even" in err


def test_scheme_exit_codes(capsys):
    assert run(capsys, "scheme", "--m", "11", "--s", "5")[0] == 3
    assert run(capsys, "scheme", "--m", "9", "--s", "3")[0] == 2
    code, _, err = run(capsys, "scheme", "--m", "10", "--s", "6", "--construction", "even_m")
    assert code == 4 and "u1: SecurityViolation" in err


def test_verify_failures(capsys, tmp_path):
    inst = Instance(8, 3)
    bad = LinearCode.from_supports(inst, [(1, 2), (3, 4), (5, 6), (7, 8), (1,)])
    path = tmp_path / "bad.json"
    path.write_text(serialize(bad))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 2 and "u3: SecurityViolation" in out
    path.write_text(serialize(LinearCode(inst, ())))
    code, out, _ = run(capsys, "verify", str(path), "--format", "json")
    assert code == 2
    assert {u["status"] for u in json.loads(out)["users"]} == {"UnsatisfiedSecure"}


@pytest.mark.parametrize("text", ["{", '{"m": 8, "s": 3, "p": 4, "rows": []}', "[]"])
def test_verify_malformed(capsys, tmp_path, text):
    path = tmp_path / "x.json"
    path.write_text(text)
    assert run(capsys, "verify", str(path))[0] == 64
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 64


def test_search_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--m", "7", "--s", "3")
    assert code == 2 and out.startswith("InfeasibleCertified\n")
    path = tmp_path / "opt.json"
    code, out, _ = run(capsys, "search", "--m", "12", "--s", "3", "--max-len", "6", "--out", str(path))
    assert code == 0 and "length: 6" in out
    assert len(json.loads(path.read_text())["rows"]) == 6
    code, out, _ = run(capsys, "search", "--m", "16", "--s", "4", "--max-len", "5")
    assert code == 2 and out.startswith("InfeasibleCertified-up-to-5")
    code, out, _ = run(capsys, "search", "--m", "12", "--s", "3", "--node-budget", "5", "--format", "json")
    assert code == 3 and json.loads(out)["status"] == "Unknown"


def test_search_env_budget(capsys, monkeypatch):
    monkeypatch.setenv("PICOD_NODE_BUDGET", "5")
    assert run(capsys, "search", "--m", "12", "--s", "3")[0] == 3
    monkeypatch.setenv("PICOD_NODE_BUDGET", "lots")
    assert run(capsys, "search", "--m", "12", "--s", "3")[0] == 64


def test_search_warm_start(capsys, tmp_path):
    path = tmp_path / "w.json"
    run(capsys, "scheme", "--m", "12", "--s", "3", "--out", str(path))
    code, out, _ = run(capsys, "search", "--m", "12", "--s", "3", "--warm-start", str(path))
    assert code == 0 and "length: 6" in out


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--m-max", "8")
    assert code == 0
    rows = {(r.split(",")[0], r.split(",")[1]): r for r in out.splitlines()[1:]}
    assert len(rows) == sum(m - 1 for m in range(2, 9))
    assert rows[("8", "4")].startswith("8,4,Divisible,2,2,1,")
    assert rows[("6", "2")].split(",")[2] == "InfeasibleLinear case 2"
    assert rows[("7", "4")].split(",")[4] == "open"
    again = run(capsys, "table", "--m-max", "8")[1]
    assert again == out


def test_table_markdown_and_search(capsys):
    code, out, _ = run(capsys, "table", "--m-max", "6", "--format", "md", "--with-search")
    assert code == 0 and out.startswith("| m | s |") and "searched" in out.splitlines()[0]
    assert run(capsys, "table", "--m-max", "12", "--with-search")[0] == 64


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "picod", "classify", "--m", "11", "--s", "9"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("InfeasibleLinear case 4")
    res = subprocess.run([sys.executable, "-m", "picod", "classify", "--m", "3", "--s", "3"],
                         capture_output=True, text=True)
    assert res.returncode == 64
