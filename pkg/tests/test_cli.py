import csv
import io
import json

import pytest

from wallach_flow.cli import main
from wallach_flow.serialize import dumps_csv, dumps_json, fmt, metadata


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_family_example(capsys):
    code, out, _ = run(capsys, "classify", "--family", "1", "-k", "14", "-l", "7", "-m", "4")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"]["outcome"] == "SomePreserved"
    assert len([r for r in rep["roots"] if r["i"] == 1]) == 4
    assert rep["meta"]["config"]["k"] == 14


def test_classify_equal_quarter(capsys):
    code, out, _ = run(capsys, "classify", "--a", "1/4,1/4,1/4")
    assert code == 0 and json.loads(out)["verdict"]["outcome"] == "AllPreserved"


@pytest.mark.parametrize("argv", [
    ("classify", "--a", "1/2,1/4,1/4"),
    ("classify", "--a", "1/4,1/4"),
    ("classify",),
    ("classify", "--a", "1/4,1/4,1/4", "--family", "9"),
    ("classify", "--family", "1", "-k", "3"),
    ("classify", "--family", "99"),
    ("verify", "--only", "nonexistent"),
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_decimal_input_warns(capsys):
    code, out, err = run(capsys, "classify", "--a", "0.2,0.2,0.2")
    assert code == 0 and "warning" in err
    assert json.loads(out)["exact"] is False


def test_simulate_deterministic(tmp_path, capsys):
    outs = []
    for workers in ("1", "2"):
        path = tmp_path / f"s{workers}.json"
        code, _, _ = run(capsys, "simulate", "--a", "5/26,2/13,3/26", "--n", "6", "--seed", "4",
                         "--horizon", "5", "--format", "json", "--out", str(path),
                         "--workers", workers)
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    data = json.loads(outs[0])
    assert data["meta"]["seed"] == 4 and data["meta"]["version"]
    assert len(data["trajectories"]) == 6


def test_simulate_stationary_seed(capsys):
    code, out, _ = run(capsys, "simulate", "--a", "1/4,1/4,1/4", "--x0", "1,1,1", "--format", "json")
    assert code == 0
    tr = json.loads(out)["trajectories"][0]
    assert len(tr["samples"]) == 1 and tr["events"] == [] and tr["stationary"]


def test_simulate_csv_directory(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "--a", "1/4,1/5,1/6", "--n", "3", "--horizon", "1",
                     "--out", str(tmp_path / "d"))
    assert code == 0
    files = sorted(p.name for p in (tmp_path / "d").iterdir())
    assert files == ["traj_0000.csv", "traj_0001.csv", "traj_0002.csv"]


def test_boundary_csv(capsys):
    code, out, _ = run(capsys, "boundary", "--a", "5/26,2/13,3/26", "--n", "7")
    assert code == 0
    body = [l for l in out.split("\r\n") if l and not l.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    assert rows[0] == ["t", "x1", "x2", "x3", "product", "alpha_deg"]
    assert len(rows) == 8


def test_portrait_json(capsys):
    code, out, _ = run(capsys, "portrait", "--a", "1/4,1/5,1/6", "--grid", "2", "--horizon", "1",
                       "--format", "json")
    assert code == 0 and len(json.loads(out)["trajectories"]) == 4


def test_tables(capsys):
    code, out, _ = run(capsys, "tables")
    assert code == 0
    data = json.loads(out)
    assert data["tables4_5"]["15"]["X_side"] == [[1, 2], [2, 1]]
    assert data["tables4_5"]["16"]["Y_side"] == [[16, 16]]
    assert round(data["table3"]["13"]["X"], 2) == 3.96
    assert all(g["ok"] for g in data["golden"])


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "theta-star,example5")
    assert code == 0
    assert "tol=" in out and "err=" in out


def test_verify_reports_failure_exit_1(capsys):
    # the published P13 third coordinate is not on the curve; see the ledger
    code, out, _ = run(capsys, "verify", "--only", "example1")
    assert code == 1
    fails = [l for l in out.splitlines() if l.startswith("FAIL")]
    assert len(fails) == 1 and "P13 x3" in fails[0]


def test_serialize_formats():
    from fractions import Fraction
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(0.1)) == 0.1
    assert fmt(Fraction(3, 7)) == "3/7" and fmt(True) == "true"
    meta = metadata("x", {"b": 1, "a": 2}, 7, {"rtol": 1e-9})
    text = dumps_csv(("a", "b"), [(1.5, Fraction(1, 3))], meta)
    assert text.startswith("# {") and text.endswith("a,b\r\n1.5,1/3\r\n")
    js = dumps_json({"z": float("inf"), "y": Fraction(1, 2)}, meta)
    d = json.loads(js)
    assert d["z"] == "inf" and d["y"] == "1/2" and d["meta"]["seed"] == 7
    assert dumps_json({"z": 1}, meta) == dumps_json({"z": 1}, meta)
