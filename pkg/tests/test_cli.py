import json

import pytest

from extremescore.cli import run


def read_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_threshold(capsys):
    assert run(["threshold", "--dist", "m1", "--n", "10000", "--k", "10", "--delta", "0.1"]) == 0
    out = read_json(capsys)
    assert out["residual"] <= 1e-10
    assert abs(out["x"] - 3.0874) < 1e-3
    assert out["_meta"]["args"]["n"] == 10000


def test_exact(capsys):
    assert run(["exact", "--dist", "m1", "--n", "3"]) == 0
    out = read_json(capsys)
    assert out["P_U[2]"] == "3/4"


def test_dist(capsys):
    assert run(["dist", "--dist", "draw:1/2"]) == 0
    out = read_json(capsys)
    assert out["mean"] == "1/2" and out["variance"] == "1/8"


def test_pmf_and_bound(tmp_path):
    path = tmp_path / "pmf.csv"
    assert run(["pmf", "--m", "2", "--rational", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[1:] == ["support,value,mass", "0,0,1/4", "1,1,1/2", "2,2,1/4"]
    path = tmp_path / "bound.csv"
    assert run(["bound", "--n", "50,100", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[1] == "n,k,t,bound,bound_normalized" and len(lines) == 4


def test_sweep_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["sweep", "--n-grid", "10,20,40", "-R", "200", "--seed", "11"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().count("\n") == 5


def test_estimate_with_config(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dist": "draw:1/2", "n_grid": [12], "replications": 50, "seed": 2, "k": 2}))
    out = tmp_path / "est.csv"
    monkeypatch.setenv("EXTREMESCORE_WORKERS", "2")
    assert run(["estimate", "--config", str(cfg), "--out", str(out), "--timing"]) == 0
    meta, header, row = out.read_text().splitlines()
    meta = json.loads(meta[2:])
    assert meta["config"]["workers"] == 2 and meta["config"]["dist"] == "draw:1/2"
    assert row.split(",")[0] == "12" and row.split(",")[-1] != ""


def test_simulate(tmp_path):
    out = tmp_path / "v.csv"
    assert run(["simulate", "--n", "6", "--seed", "4", "--stream-id", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# n=6 q=1 seed=4 stream_id=1"
    assert sum(int(x) for x in lines[2:]) == 15


@pytest.mark.parametrize(
    "argv, code",
    [
        (["bogus"], 2),
        (["threshold", "--n", "10"], 2),
        (["threshold", "--n", "10", "--k", "20"], 2),
        (["dist", "--dist", "draw:2"], 2),
        (["estimate", "--n", "5", "-R", "0"], 2),
        (["estimate", "--config", "/nonexistent.json"], 2),
        (["exact", "--n", "9"], 3),
        (["pmf", "--m", "3000", "--rational"], 3),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert run(argv) == code
