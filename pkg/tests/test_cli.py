import csv
import json
import os
import subprocess
import sys

import pytest

from ncmech import cli
from ncmech import scenario as sc


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def bundled(name):
    with open(sc.bundled_path(name)) as fh:
        return json.load(fh)


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.delenv("NCMECH_SEED", raising=False)


def test_six_bundled_scenarios():
    assert sc.bundled_scenarios() == ["central_force_kepler", "free_fall", "free_particle_unphysical",
                                      "oscillator_underdamped", "quadratic_drag", "quadratic_drag_gravity"]
    for name in sc.bundled_scenarios():
        sc.load_config(sc.bundled_path(name))


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "osc"
    assert cli.main(["run", sc.bundled_path("oscillator_underdamped"), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["maxClosedFormDeviation"] <= 1e-8
    with open(out / "trajectory.csv") as fh:
        header = fh.readline().strip().split(",")
    assert header == ["t", "q1[0]", "v1[0]", "q2[0]", "v2[0]", "qplus[0]", "qminus[0]", "p1[0]", "p2[0]"]
    rows = read_csv(out / "ledger.csv")
    assert list(rows[0])[0] == "t"
    assert {"H", "E1", "E2", "res:E1", "res:E2", "res:fkk"} <= set(rows[0])
    assert "samples written" in capsys.readouterr().out


def test_trajectory_header_blocks_for_n_two():
    assert sc.trajectory_header(2) == [
        "t", "q1[0]", "q1[1]", "v1[0]", "v1[1]", "q2[0]", "q2[1]", "v2[0]", "v2[1]",
        "qplus[0]", "qplus[1]", "qminus[0]", "qminus[1]", "p1[0]", "p1[1]", "p2[0]", "p2[1]"]


def test_byte_identical_reruns(tmp_path):
    cfg = sc.bundled_path("quadratic_drag")
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", cfg, "--out", str(a)]) == 0
    assert cli.main(["run", cfg, "--out", str(b)]) == 0
    for f in ("trajectory.csv", "ledger.csv", "summary.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_free_particle_growth_summary(tmp_path):
    out = tmp_path / "fp"
    assert cli.main(["run", sc.bundled_path("free_particle_unphysical"), "--out", str(out)]) == 0
    fits = json.loads((out / "summary.json").read_text())["growthFits"]
    vminus = next(g for g in fits if g["series"] == "vminus")
    assert vminus["rate"] == pytest.approx(1.0, abs=0.01)


def test_ledger_columns_follow_charge_list(tmp_path):
    raw = bundled("oscillator_underdamped")
    raw["integrator"]["t_end"] = 2.0
    outs = []
    for trs in (["time", "so11"], ["time"]):
        raw["ledger"] = {"transformations": trs}
        out = tmp_path / "_".join(trs)
        assert cli.main(["run", write_json(tmp_path / "c.json", raw), "--out", str(out)]) == 0
        outs.append(list(read_csv(out / "ledger.csv")[0]))
    assert "so11" in outs[0] and "so11" not in outs[1]
    raw["params"]["c"] = 0.9
    out = tmp_path / "again"
    raw["ledger"] = {"transformations": ["time"]}
    assert cli.main(["run", write_json(tmp_path / "c.json", raw), "--out", str(out)]) == 0
    assert list(read_csv(out / "ledger.csv")[0]) == outs[1]


def test_symmetric_k_is_config_error(tmp_path, capsys):
    cfg = {"n": 1, "L": "v[0]^2/2", "K": "q1[0]*q2[0]", "initial": {"q1": 1.0, "q2": 0.5}}
    assert cli.main(["run", write_json(tmp_path / "k.json", cfg), "--out", str(tmp_path / "o")]) == 2
    assert "antisymmetr" in capsys.readouterr().err.lower()


def test_nonregular_is_integration_failure(tmp_path):
    cfg = {"n": 1, "L": "q[0]*v[0]", "K": "0", "initial": {"q1": 1.0, "q2": 0.5, "v1": 0.1, "v2": 0.2}}
    assert cli.main(["run", write_json(tmp_path / "l.json", cfg), "--out", str(tmp_path / "o")]) == 3


@pytest.mark.parametrize("cfg", [
    {"model": "damped_oscillator", "n": 1},
    {"model": "no_such_model"},
    {"model": "damped_oscillator", "params": {"c": "big"}},
    {"model": "damped_oscillator", "integrator": {"rel_tol": -1}},
    {"model": "damped_oscillator", "bogus": 1},
])
def test_bad_configs(tmp_path, cfg):
    assert cli.main(["run", write_json(tmp_path / "bad.json", cfg), "--out", str(tmp_path / "o")]) == 2


def test_missing_and_malformed_files(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert cli.main(["run", str(p)]) == 2


def test_seed_env_override(tmp_path, monkeypatch):
    raw = bundled("free_particle_unphysical")
    raw["initial"]["jitter"] = 1e-3
    raw["integrator"]["t_end"] = 1.0
    raw["growth"] = []
    cfg = write_json(tmp_path / "j.json", raw)

    def traj(tag, seed):
        if seed is None:
            monkeypatch.delenv("NCMECH_SEED", raising=False)
        else:
            monkeypatch.setenv("NCMECH_SEED", str(seed))
        assert cli.main(["run", cfg, "--out", str(tmp_path / tag)]) == 0
        return (tmp_path / tag / "trajectory.csv").read_bytes()

    base = traj("base", None)
    assert traj("s0", raw.get("seed", 0)) == base
    assert traj("s7", 7) == traj("s7b", 7)
    assert traj("s7c", 7) != base


def test_sweep_oscillator_regimes(tmp_path):
    grid = write_json(tmp_path / "g.json", {"c": [0.5, 1.0, 1.5, 2.0, 2.5]})
    raw = bundled("oscillator_underdamped")
    raw["growth"] = []
    cfg = write_json(tmp_path / "osc.json", raw)
    out = tmp_path / "sweep"
    assert cli.main(["sweep", cfg, "--grid", grid, "--out", str(out)]) == 0
    rows = read_csv(out / "sweep.csv")
    assert [r["regime"] for r in rows] == ["under", "under", "under", "critical", "over"]
    assert all(float(r["maxClosedFormDeviation"]) <= 1e-8 for r in rows)
    assert list(rows[0]) == cli.sweep_header(["c"], 0)
    assert sorted(os.listdir(out)) == ["run_0000", "run_0001", "run_0002", "run_0003", "run_0004", "sweep.csv"]


def test_sweep_free_particle_rates_and_jobs(tmp_path):
    grid = write_json(tmp_path / "g.json", {"c": [1.0, 2.0, 4.0]})
    cfg = sc.bundled_path("free_particle_unphysical")
    one, two = tmp_path / "one", tmp_path / "two"
    assert cli.main(["sweep", cfg, "--grid", grid, "--out", str(one)]) == 0
    assert cli.main(["sweep", cfg, "--grid", grid, "--out", str(two), "--jobs", "2"]) == 0
    assert (one / "sweep.csv").read_bytes() == (two / "sweep.csv").read_bytes()
    rows = read_csv(one / "sweep.csv")
    for r, c in zip(rows, (1.0, 2.0, 4.0)):
        cols = {r[f"growth{k}:series"]: float(r[f"growth{k}:rate"]) for k in range(2)}
        assert cols["vminus"] == pytest.approx(c, rel=0.01)
        assert cols["qminus"] == pytest.approx(c, rel=0.01)


def test_sweep_records_failures_per_row(tmp_path):
    grid = write_json(tmp_path / "g.json", {"m": [1.0, 0.0]})
    raw = bundled("oscillator_underdamped")
    raw["integrator"]["t_end"] = 1.0
    raw["growth"] = []
    out = tmp_path / "s"
    code = cli.main(["sweep", write_json(tmp_path / "c.json", raw), "--grid", grid, "--out", str(out)])
    rows = read_csv(out / "sweep.csv")
    assert rows[0]["status"] == "ok" and rows[1]["status"] != "ok" and rows[1]["error"]
    assert code in (0, 2)


@pytest.mark.parametrize("grid", [{}, {"c": []}, [1, 2], {"c": ["a"]}])
def test_empty_or_bad_grid(tmp_path, grid):
    g = write_json(tmp_path / "g.json", grid)
    assert cli.main(["sweep", sc.bundled_path("free_fall"), "--grid", g, "--out", str(tmp_path / "o")]) == 2


def test_list_models(capsys):
    assert cli.main(["list-models"]) == 0
    out = capsys.readouterr().out
    for name in ("free_particle", "damped_oscillator", "central_force", "two_body", "polynomial_drag"):
        assert name in out
    assert "oscillator_underdamped" in out


def test_verify_parser_suite(capsys):
    assert cli.main(["verify", "parser"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "0 failed" in out


def test_verify_impossible_tolerance_fails(capsys):
    assert cli.main(["verify", "brackets", "--tol", "1e-30"]) == 1


def test_console_script_exit_code(tmp_path):
    cfg = {"n": 1, "L": "v[0]^2/2", "K": "q1[0]*q2[0]"}
    p = write_json(tmp_path / "k.json", cfg)
    proc = subprocess.run([sys.executable, "-m", "ncmech.cli", "run", p], capture_output=True, text=True,
                          cwd=tmp_path)
    assert proc.returncode == 2
