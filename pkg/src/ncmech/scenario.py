"""Scenario configs: loading, running, and writing CSV/JSON artifacts.

A scenario is a JSON object::

    {
      "name": "oscillator_underdamped",
      "model": "damped_oscillator",              # or "n", "L", "K" for inline systems
      "params": {"m": 1, "w": 1, "c": 0.5},
      "initial": {"qp": 1, "vp": 0, "physical": true},
      "integrator": {"rel_tol": 1e-10, "abs_tol": 1e-12, "t_end": 20, "sample_dt": 0.01},
      "ledger": {"transformations": "builtin"},
      "growth": [{"series": "vminus", "window": [1, 5], "expected": 1.0}],
      "seed": 0
    }

``initial`` takes either light-cone keys (qp, vp, qm, vm) or copy keys
(q1, v1, q2, v2).  ``physical`` zeroes q- and v-; ``jitter`` adds seeded
uniform noise of that size to q- and v-.
"""

import copy
import csv
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import charges as ch
from . import models as mdl
from .errors import ConfigError, NcmechError
from .expr import evaluate, parse
from .hamiltonian import momenta
from .integrate import envelope_rate_fit, growth_rate_fit, integrate_adaptive, integrate_rk4, window
from .lagrangian import DoubledState, SystemSpec

SERIES = ("qplus", "qminus", "vplus", "vminus", "q1", "q2", "v1", "v2")
INTEGRATOR_DEFAULTS = {"method": "dopri5", "rel_tol": 1e-10, "abs_tol": 1e-12, "t_end": 10.0, "sample_dt": 0.01}


@dataclass
class ScenarioConfig:
    name: str
    model: object
    params: dict
    initial: dict
    integrator: dict
    ledger: dict
    growth: list
    seed: int = 0
    n: int = 0
    L: str = ""
    K: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def inline(self):
        return self.model is None


def bundled_scenarios():
    """Names of the scenario files shipped with the package."""
    root = resources.files("ncmech") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_path(name):
    return str(resources.files("ncmech") / "scenarios" / f"{name}.json")


def load_config(source):
    """Parse a config from a path, a bundled scenario name, or a dict."""
    if isinstance(source, dict):
        raw = copy.deepcopy(source)
    else:
        path = str(source)
        if not os.path.exists(path) and path in bundled_scenarios():
            path = bundled_path(path)
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw):
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {"name", "model", "params", "initial", "integrator", "ledger", "growth", "seed", "n", "L", "K",
             "description"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
    has_model = "model" in raw
    has_inline = any(k in raw for k in ("L", "K", "n"))
    if has_model == has_inline:
        raise ConfigError("config needs exactly one of 'model' or inline 'n'/'L'/'K'")
    params = raw.get("params", {})
    if not isinstance(params, dict) or not all(isinstance(v, (int, float)) for v in params.values()):
        raise ConfigError("'params' must map names to numbers")
    integ = dict(INTEGRATOR_DEFAULTS)
    integ.update(raw.get("integrator", {}))
    if integ["method"] not in ("dopri5", "rk4"):
        raise ConfigError(f"unknown integrator method {integ['method']!r}")
    for key in ("rel_tol", "abs_tol", "t_end", "sample_dt"):
        if not isinstance(integ[key], (int, float)) or not integ[key] > 0:
            raise ConfigError(f"integrator.{key} must be a positive number")
    growth = raw.get("growth", [])
    for g in growth:
        if g.get("series") not in SERIES:
            raise ConfigError(f"growth series must be one of {SERIES}")
        w = g.get("window")
        if not (isinstance(w, list) and len(w) == 2 and w[0] < w[1]):
            raise ConfigError("growth window must be [t_lo, t_hi] with t_lo < t_hi")
    seed = raw.get("seed", 0)
    env_seed = os.environ.get("NCMECH_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"NCMECH_SEED must be an integer, got {env_seed!r}") from exc
    cfg = ScenarioConfig(
        name=raw.get("name", raw.get("model", "inline")),
        model=raw.get("model"),
        params={k: float(v) for k, v in params.items()},
        initial=dict(raw.get("initial", {})),
        integrator=integ,
        ledger=dict(raw.get("ledger", {})),
        growth=list(growth),
        seed=int(seed),
        n=int(raw.get("n", 0)),
        L=raw.get("L", ""),
        K=raw.get("K", "0"),
        raw=raw,
    )
    return cfg


# ------------------------------------------------------------------ building


def build_system(cfg):
    """(SystemSpec, ModelEntry or None) for a config; raises ConfigError on bad input."""
    try:
        if cfg.inline:
            if cfg.n < 1 or not cfg.L:
                raise ConfigError("inline systems need 'n' >= 1 and 'L'")
            return SystemSpec(cfg.n, cfg.L, cfg.K, cfg.params, cfg.name), None
        entry = mdl.get_model(cfg.model)
        return entry.spec(cfg.params), entry
    except ConfigError:
        raise
    except NcmechError as exc:
        raise ConfigError(str(exc)) from exc


def initial_state(cfg, spec, entry):
    ic = dict(cfg.initial)
    jitter = float(ic.pop("jitter", 0.0))
    try:
        if entry is not None:
            s = mdl.initial_state(entry, ic, spec.n)
        else:
            s = mdl.initial_state(_InlineEntry(spec.n), ic, spec.n)
    except NcmechError as exc:
        raise ConfigError(str(exc)) from exc
    if jitter:
        rng = np.random.default_rng(cfg.seed)
        dq, dv = rng.uniform(-jitter, jitter, size=(2, spec.n))
        s = DoubledState.from_lightcone(0.0, s.qplus, s.vplus, s.qminus + dq, s.vminus + dv)
    return s


@dataclass
class _InlineEntry:
    n: int
    default_ic: dict = field(default_factory=dict)


def transformations_for(cfg, spec, entry):
    wanted = cfg.ledger.get("transformations", "builtin")
    if wanted == "builtin":
        kind = entry.kind if entry is not None else "inline"
        return ch.builtin_transformations(kind, spec.n, spec.params)
    available = {"time": ch.time_translation(spec.n)}
    available["so11"] = ch.so11(spec.n)
    for a in range(spec.n):
        coef = "c" if "c" in spec.params else None
        available[f"translation{a}"] = ch.translation(spec.n, a, coef, spec.params)
    if spec.n == 3:
        for a in range(3):
            t = ch.rotation(a)
            available[t.name] = t
    out = []
    for name in wanted:
        if name not in available:
            raise ConfigError(f"unknown transformation {name!r}")
        out.append(available[name])
    return out


# ------------------------------------------------------------------ running


@dataclass
class RunResult:
    cfg: ScenarioConfig
    spec: object
    entry: object
    trajectory: object
    ledger: object
    summary: dict


def _series(traj, name, comp=0):
    return getattr(traj, name)[:, comp]


def run_scenario(cfg):
    """Integrate a scenario, evaluate the Noether ledger, and build the summary dict."""
    spec, entry = build_system(cfg)
    s0 = initial_state(cfg, spec, entry)
    integ = cfg.integrator
    if integ["method"] == "rk4":
        traj = integrate_rk4(spec, s0, integ["t_end"], integ["sample_dt"])
    else:
        traj = integrate_adaptive(spec, s0, integ["t_end"], integ["rel_tol"], integ["abs_tol"],
                                  integ["sample_dt"])
    if not traj.is_finite():
        raise NcmechError("trajectory contains non-finite values")
    trs = transformations_for(cfg, spec, entry)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ch.GridTooCoarseWarning)
        ledger = ch.rate_residuals(spec, traj, trs)
    summary = {
        "name": cfg.name,
        "model": cfg.model if cfg.model else "inline",
        "params": spec.params,
        "seed": cfg.seed,
        "integrator": {**integ, **traj.meta},
        "samples": len(traj),
        "maxResiduals": ledger.max_residuals,
        "fdErrorEstimate": ledger.fd_error_max,
        "warnings": [str(w.message) for w in caught],
        "conservation": _conservation(ledger, trs),
        "growthFits": [_growth(traj, g, spec.params) for g in cfg.growth],
    }
    if entry is not None and entry.has_closed_form:
        try:
            Y, _ = mdl.closed_form_series(entry, spec.params, s0, traj.times)
            summary["maxClosedFormDeviation"] = float(np.max(np.abs(traj.Y - Y)))
        except NcmechError as exc:
            summary["maxClosedFormDeviation"] = None
            summary["closedFormNote"] = str(exc)
    if entry is not None and entry.kind == "oscillator":
        summary["regime"] = mdl.oscillator_regime(spec.params)
    if entry is not None and entry.kind == "central":
        summary["angularMomentum"] = _angular_summary(traj, spec)
    return RunResult(cfg, spec, entry, traj, ledger, summary)


def _conservation(ledger, trs):
    out = {}
    names = ["H"] + [t.name for t in trs if not t.delta_t]
    for k in names:
        vals = np.array([s.values[k] for s in ledger.samples])
        out[k] = float(np.max(np.abs(vals - vals[0])))
    return out


def _expected(value, params):
    if isinstance(value, str):
        try:
            return evaluate(parse(value), params)
        except NcmechError as exc:
            raise ConfigError(f"bad growth expectation {value!r}: {exc}") from exc
    return float(value)


def _growth(traj, g, params):
    comp = int(g.get("component", 0))
    t, x = window(traj.times, _series(traj, g["series"], comp), *g["window"])
    entry = {"series": g["series"], "component": comp, "window": list(g["window"]),
             "envelope": bool(g.get("envelope", False))}
    try:
        fit = envelope_rate_fit(t, x) if entry["envelope"] else growth_rate_fit(t, x)
        entry.update(rate=fit.rate, r2=fit.r2)
    except NcmechError as exc:
        entry.update(rate=None, r2=None, error=str(exc))
    if "expected" in g:
        entry["expected"] = _expected(g["expected"], params)
        if entry["rate"] is not None:
            err = abs(entry["rate"] - entry["expected"])
            if entry["expected"] != 0.0:
                entry["relErr"] = err / abs(entry["expected"])
            else:
                entry["absErr"] = err
    return entry


def _angular_summary(traj, spec):
    mu = spec.params.get("mu", 1.0)
    J = mu * np.cross(traj.qplus, traj.vplus)
    mag = np.linalg.norm(J, axis=1)
    fit = growth_rate_fit(traj.times, mag)
    Jhat0 = J[0] / mag[0]
    out_of_plane = float(np.max(np.abs(traj.qplus @ Jhat0)))
    p = spec.params
    return {
        "decayRate": -fit.rate,
        "r2": fit.r2,
        "derivedRate": mdl.angular_momentum_decay_rate(p),
        "publishedRate": p["c"] / (2 * mu),
        "maxOutOfPlane": out_of_plane,
    }


# ------------------------------------------------------------------ writing


def fmt(x):
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def trajectory_header(n):
    cols = ["t"]
    for base in ("q1", "v1", "q2", "v2", "qplus", "qminus", "p1", "p2"):
        cols += [f"{base}[{i}]" for i in range(n)]
    return cols


def write_trajectory(path, res):
    traj, spec = res.trajectory, res.spec
    n = spec.n
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trajectory_header(n))
        for i in range(len(traj)):
            s = traj.state(i)
            ph = momenta(spec, s)
            row = [s.t]
            for arr in (s.q1, s.v1, s.q2, s.v2, s.qplus, s.qminus, ph.p1, ph.p2):
                row += list(arr)
            w.writerow([fmt(x) for x in row])


def ledger_header(ledger):
    names = ledger.charge_names
    res = list(ledger.samples[0].residuals)
    return ["t"] + names + [f"res:{r}" for r in res]


def write_ledger(path, res):
    ledger = res.ledger
    header = ledger_header(ledger)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for s in ledger.samples:
            row = [s.t] + [s.values[k] for k in ledger.charge_names] + list(s.residuals.values())
            w.writerow([fmt(x) for x in row])


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_summary(path, summary):
    with open(path, "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_artifacts(out_dir, res):
    os.makedirs(out_dir, exist_ok=True)
    write_trajectory(os.path.join(out_dir, "trajectory.csv"), res)
    write_ledger(os.path.join(out_dir, "ledger.csv"), res)
    write_summary(os.path.join(out_dir, "summary.json"), res.summary)
