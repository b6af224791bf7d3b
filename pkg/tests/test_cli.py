import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

from qgeom.cli import main


def run(argv, capsys):
    rc = main(argv)
    out, err = capsys.readouterr()
    return rc, out, err


def run_json(argv, capsys):
    rc, out, _ = run(argv + ["--format", "json"], capsys)
    return rc, json.loads(out)


def test_statespace_d2(capsys):
    rc, obj = run_json(["statespace", "--d", "2"], capsys)
    assert rc == 0 and obj["schema"] == "qgeom/1"
    rows = {r["quantity"]: r for r in obj["quantities"]}
    assert rows["vol"]["value"] == pytest.approx(math.pi * math.sqrt(2) / 3, rel=1e-14)
    assert rows["vol"]["exact"] == "√2·π/3"


def test_statespace_d3_table(capsys):
    rc, out, _ = run(["statespace", "--d", "3"], capsys)
    assert rc == 0
    assert "√3·π³/2520" in out and "5040" in out
    assert "2·√3·π³/15" in out


def test_statespace_large_d(capsys):
    rc, obj = run_json(["statespace", "--d", "30"], capsys)
    assert rc == 0
    vol = {r["quantity"]: r for r in obj["quantities"]}["vol"]
    assert vol["log10"] < -300


def test_polytope(capsys):
    rc, obj = run_json(["polytope", "--d", "3"], capsys)
    assert rc == 0
    counts = [r["count"] for r in obj["face_counts"]]
    assert counts == [81, 324, 108, 486]
    rc, obj = run_json(["polytope", "--d", "2"], capsys)
    iv = {r["N"]: r for r in obj["intrinsic_volumes"]}
    assert iv[1]["exact"] == "6·arccos(1/3)"
    assert iv[1]["Vtilde"] == pytest.approx(6 * math.acos(1 / 3), rel=1e-13)


def test_compare_csv(capsys):
    rc, out, _ = run(["compare", "--d", "2", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rc == 0 and len(rows) == 4
    r3 = next(r for r in rows if r["N"] == "3")
    assert float(r3["ratio"]) == pytest.approx(1 / math.pi, rel=1e-13)
    assert all(r["flagged"] == "false" for r in rows)


def test_exclude(capsys):
    rc, obj = run_json(["exclude", "--d", "6"], capsys)
    assert rc == 0 and all(r["excluded"] for r in obj["rows"])
    rc, obj = run_json(["exclude", "--d", "5", "--k", "3"], capsys)
    assert [r["excluded"] for r in obj["rows"]] == [False]
    assert run(["exclude", "--d", "5", "--k", "4"], capsys)[0] == 2


def test_feasible(tmp_path, capsys):
    assert run(["feasible", "--kind", "sic", "--d", "2"], capsys)[0] == 0
    rc, obj = run_json(["feasible", "--kind", "ortho", "--d", "3", "--n", "4"], capsys)
    assert rc == 1 and obj["summary"]["all_ok"] is False
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"d": 2, "M": [[1, 0.5], [0.5, 1]]}))
    assert run(["feasible", str(p)], capsys)[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    rc, _, err = run(["feasible", str(bad)], capsys)
    assert rc == 2 and "error" in err
    assert run(["feasible"], capsys)[0] == 2


def test_usage_errors(capsys):
    assert run(["statespace", "--d", "1"], capsys)[0] == 2
    assert run(["statespace"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2
    assert run(["montecarlo", "--d", "2", "--samples", "0"], capsys)[0] == 2
    assert run(["montecarlo", "--d", "2", "--eps-points", "5"], capsys)[0] == 2


def test_json_byte_identical(capsys):
    a = run(["polytope", "--d", "4", "--format", "json"], capsys)[1]
    b = run(["polytope", "--d", "4", "--format", "json"], capsys)[1]
    assert a == b


def test_out_file(tmp_path, capsys):
    f = tmp_path / "o.csv"
    rc, out, _ = run(["compare", "--d", "3", "--format", "csv", "--out", str(f)], capsys)
    assert rc == 0 and out == ""
    assert f.read_text().startswith("N,")


@pytest.mark.parametrize("body", ["statespace", "polytope"])
def test_montecarlo_d2(body, capsys):
    rc, obj = run_json(["montecarlo", "--body", body, "--d", "2", "--samples", "200000", "--seed", "7"],
                       capsys)
    assert rc == 0
    assert obj["summary"]["all_within_3_sigma"] is True
    assert len(obj["estimates"]) == 12 and len(obj["steiner_fit"]) == 4


def test_montecarlo_seed_env(capsys, monkeypatch):
    argv = ["montecarlo", "--body", "ball", "--d", "2", "--samples", "20000", "--format", "json"]
    monkeypatch.setenv("QGEOM_SEED", "5")
    a = run(argv, capsys)[1]
    b = run(argv + ["--seed", "5"], capsys)[1]
    assert a == b and json.loads(a)["params"]["seed"] == 5
    monkeypatch.setenv("QGEOM_SEED", "x")
    assert run(argv, capsys)[0] == 2


def test_module_entry_point():
    env = dict(os.environ, QGEOM_PURE="1")
    r = subprocess.run([sys.executable, "-m", "qgeom", "compare", "--d", "2", "--format", "json"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0 and json.loads(r.stdout)["command"] == "compare"
    r = subprocess.run([sys.executable, "-c", "import qgeom.kernels as k; print(k.BACKEND)"],
                       capture_output=True, text=True, env=env)
    assert r.stdout.strip() == "python"
