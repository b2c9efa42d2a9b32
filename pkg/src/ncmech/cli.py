"""``ncmech`` command-line entry point.

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 integration failure.
"""

import argparse
import csv
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import models as mdl
from . import scenario as sc
from .errors import (
    AntisymmetryError,
    ConfigError,
    DomainError,
    NcmechError,
    NonRegularError,
    StepUnderflowError,
)

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_INTEGRATION = 0, 1, 2, 3

INTEGRATION_ERRORS = (NonRegularError, StepUnderflowError, DomainError)


def _err(msg):
    print(f"ncmech: {msg}", file=sys.stderr)


def _exit_code(exc):
    if isinstance(exc, (ConfigError, AntisymmetryError)):
        return EXIT_CONFIG
    if isinstance(exc, INTEGRATION_ERRORS):
        return EXIT_INTEGRATION
    return EXIT_INTEGRATION if isinstance(exc, NcmechError) else EXIT_CONFIG


# ------------------------------------------------------------------ run


def cmd_run(args):
    try:
        cfg = sc.load_config(args.config)
        res = sc.run_scenario(cfg)
    except NcmechError as exc:
        _err(str(exc))
        return _exit_code(exc)
    out = args.out or os.path.join("out", cfg.name)
    sc.write_artifacts(out, res)
    s = res.summary
    print(f"{cfg.name}: {s['samples']} samples written to {out}")
    worst = max(s["maxResiduals"].items(), key=lambda kv: kv[1])
    print(f"  worst rate residual {worst[0]} = {worst[1]:.3e}")
    if s.get("maxClosedFormDeviation") is not None:
        print(f"  max closed-form deviation {s['maxClosedFormDeviation']:.3e}")
    for g in s["growthFits"]:
        if g.get("rate") is not None:
            print(f"  growth rate of {g['series']} on {g['window']}: {g['rate']:.6g}")
    for w in s["warnings"]:
        print(f"  warning: {w}")
    return EXIT_OK


# ------------------------------------------------------------------ verify


def cmd_verify(args):
    from .verify import all_passed, run_suites

    results = run_suites(args.suite, seed=args.seed, tol=args.tol)
    failed = sum(1 for c in results if not c.flag and not c.passed)
    flags = sum(1 for c in results if c.flag)
    print(f"{len(results) - failed - flags} passed, {failed} failed, {flags} flagged")
    return EXIT_OK if all_passed(results) else EXIT_VERIFY


# ------------------------------------------------------------------ sweep


def load_grid(path):
    """Grid JSON maps parameter names to lists of numbers; returns the cartesian product."""
    try:
        with open(path) as fh:
            grid = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"grid file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("grid must be a non-empty object of parameter lists")
    for k, vals in grid.items():
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) for v in vals):
            raise ConfigError(f"grid entry {k!r} must be a list of numbers")
    keys = list(grid)
    points = [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]
    if not points:
        raise ConfigError("grid is empty")
    return keys, points


def _sweep_one(job):
    index, raw, point, out_dir = job
    raw = json.loads(json.dumps(raw))
    raw["params"] = {**raw.get("params", {}), **point}
    raw["name"] = f"{raw.get('name', 'run')}_{index:04d}"
    row = {"index": index, "status": "ok", "error": ""}
    try:
        cfg = sc.parse_config(raw)
        res = sc.run_scenario(cfg)
        sc.write_artifacts(os.path.join(out_dir, f"run_{index:04d}"), res)
        row["summary"] = sc._jsonable(res.summary)
    except NcmechError as exc:
        row["status"] = "config_error" if _exit_code(exc) == EXIT_CONFIG else "integration_error"
        row["error"] = str(exc)
    return row


def sweep_rows(raw, keys, points, out_dir, jobs=1):
    work = [(i, raw, p, out_dir) for i, p in enumerate(points)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_one, work))
    else:
        rows = [_sweep_one(w) for w in work]
    rows.sort(key=lambda r: r["index"])
    for r, p in zip(rows, points):
        r["point"] = p
    return rows


def sweep_header(keys, n_growth):
    cols = ["index"] + keys + ["status", "error", "regime", "maxClosedFormDeviation", "maxRateResidual"]
    for k in range(n_growth):
        cols += [f"growth{k}:series", f"growth{k}:rate", f"growth{k}:expected"]
    return cols


def write_sweep_csv(path, keys, rows, n_growth):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(sweep_header(keys, n_growth))
        for r in rows:
            s = r.get("summary", {})
            line = [r["index"]] + [sc.fmt(r["point"][k]) for k in keys] + [r["status"], r["error"]]
            line.append(s.get("regime", ""))
            dev = s.get("maxClosedFormDeviation")
            line.append("" if dev is None else sc.fmt(dev))
            res = s.get("maxResiduals")
            line.append(sc.fmt(max(v for v in res.values() if v is not None)) if res else "")
            fits = s.get("growthFits", [])
            for k in range(n_growth):
                g = fits[k] if k < len(fits) else {}
                line.append(g.get("series", ""))
                line.append("" if g.get("rate") is None else sc.fmt(g["rate"]))
                line.append("" if g.get("expected") is None else sc.fmt(g["expected"]))
            w.writerow(line)


def cmd_sweep(args):
    try:
        cfg = sc.load_config(args.config)
        keys, points = load_grid(args.grid)
    except NcmechError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    out = args.out or os.path.join("out", f"{cfg.name}_sweep")
    os.makedirs(out, exist_ok=True)
    raw = dict(cfg.raw)
    if "seed" in raw or os.environ.get("NCMECH_SEED") is not None:
        raw["seed"] = cfg.seed
    rows = sweep_rows(raw, keys, points, out, max(1, args.jobs))
    path = os.path.join(out, "sweep.csv")
    write_sweep_csv(path, keys, rows, len(cfg.growth))
    ok = sum(r["status"] == "ok" for r in rows)
    print(f"{ok}/{len(rows)} runs succeeded; aggregate written to {path}")
    for r in rows:
        if r["status"] != "ok":
            print(f"  run {r['index']}: {r['status']}: {r['error']}")
    if any(r["status"] == "config_error" for r in rows):
        return EXIT_CONFIG
    return EXIT_OK if ok else EXIT_INTEGRATION


# ------------------------------------------------------------------ list-models


def cmd_list_models(args):
    for name, entry in mdl.catalog().items():
        params = ", ".join(f"{k}={v:g}" for k, v in entry.defaults.items())
        oracle = "closed form" if entry.has_closed_form else "no closed form"
        print(f"{name:22s} n={entry.n}  {params}  [{oracle}]")
        print(f"    {entry.description}")
    print()
    print("bundled scenarios: " + ", ".join(sc.bundled_scenarios()))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="ncmech", description="Nonconservative mechanics with doubled variables.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="integrate a scenario and write trajectory, ledger and summary")
    r.add_argument("config", help="config JSON path or bundled scenario name")
    r.add_argument("--out", help="output directory (default out/<name>)")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", nargs="?", default="all", choices=("all", "brackets", "ledger", "oracles", "parser"))
    v.add_argument("--seed", type=int, default=0, help="seed for random sample points")
    v.add_argument("--tol", type=float, default=None, help="override every check tolerance")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="run a scenario over a parameter grid")
    s.add_argument("config")
    s.add_argument("--grid", required=True, help="JSON object mapping parameter names to value lists")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", help="output directory (default out/<name>_sweep)")
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("list-models", help="print the model catalog")
    m.set_defaults(func=cmd_list_models)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
