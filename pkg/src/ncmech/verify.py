"""Verification suites behind ``ncmech verify``.

Each suite returns a list of :class:`Check`.  Flags are informational (the
published-versus-derived constants report) and never count as failures.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import charges as ch
from . import expr as ex
from . import models as mdl
from .errors import ExprSyntaxError, NcmechError
from .hamiltonian import (
    HamiltonianObservable,
    PhaseState,
    fd_poisson_bracket,
    hamiltonian_flow_check,
    lightcone_observable,
    poisson_bracket,
)
from .integrate import growth_rate_fit, integrate_adaptive
from .lagrangian import DoubledState, residual_eom

SUITES = ("parser", "brackets", "ledger", "oracles")


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    value: float = math.nan
    tol: float = math.nan
    flag: bool = False
    note: str = ""

    def line(self):
        if self.flag:
            status = "FLAG"
        else:
            status = "PASS" if self.passed else "FAIL"
        parts = [f"[{status}] {self.suite}: {self.name}"]
        if not math.isnan(self.value):
            parts.append(f"value={self.value:.3e}")
        if not math.isnan(self.tol):
            parts.append(f"tol={self.tol:.1e}")
        if self.note:
            parts.append(self.note)
        return "  ".join(parts)


def _check(suite, name, value, tol, note=""):
    value = float(value)
    return Check(suite, name, bool(value <= tol), value, tol, note=note)


# ------------------------------------------------------------------ parser


def _random_ast(rng, depth, names):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return ex.Const(float(rng.choice([0.5, 1.0, 2.0, 3.25, 1e-3, 7.0])))
        return ex.Sym(str(rng.choice(names)))
    r = rng.random()
    if r < 0.15:
        return ex.Unary("neg", _random_ast(rng, depth - 1, names))
    if r < 0.3:
        fn = str(rng.choice(ex.FUNCTIONS))
        return ex.Unary(fn, _random_ast(rng, depth - 1, names))
    op = str(rng.choice(["+", "-", "*", "/", "^"]))
    return ex.Binary(op, _random_ast(rng, depth - 1, names), _random_ast(rng, depth - 1, names))


def _roundtrip_ok(e):
    return ex.parse(ex.to_string(e)) == e


def suite_parser(seed=0, tol=None):
    from .scenario import bundled_scenarios, load_config

    out = []
    bad = []
    count = 0
    for name, entry in mdl.catalog().items():
        spec = entry.spec()
        for label, e in (("L", spec.L), ("K", spec.K)):
            count += 1
            if not _roundtrip_ok(e):
                bad.append(f"{name}.{label}")
    for name in bundled_scenarios():
        cfg = load_config(name)
        texts = [cfg.L, cfg.K] if cfg.inline else []
        texts += [g["expected"] for g in cfg.growth if isinstance(g.get("expected"), str)]
        for text in texts:
            count += 1
            if not _roundtrip_ok(ex.parse(text)):
                bad.append(f"{name}:{text}")
    out.append(Check("parser", f"round trip of {count} corpus expressions", not bad,
                     note=", ".join(bad)))

    rng = np.random.default_rng(seed)
    names = ["x", "y", "q1[0]", "v2[1]"]
    fails = sum(not _roundtrip_ok(_random_ast(rng, 5, names)) for _ in range(500))
    out.append(Check("parser", "round trip of 500 random trees", fails == 0, float(fails), 0.0))

    try:
        ex.parse("q1[0] +* 2")
        out.append(Check("parser", "syntax error offset", False, note="no error raised"))
    except ExprSyntaxError as exc:
        out.append(Check("parser", "syntax error offset", exc.position == 7, note=str(exc)))
    return out


# ------------------------------------------------------------------ brackets


def _random_phase(rng, n, scale=1.0):
    return PhaseState(0.0, *rng.uniform(-scale, scale, size=(4, n)))


def suite_brackets(seed=0, tol=None):
    out = []
    rng = np.random.default_rng(seed)
    spec = mdl.get_model("damped_oscillator").spec()
    canon = {
        "{q1,p1}=1": ("q1[0]", "p1[0]", 1.0),
        "{q2,p2}=-1": ("q2[0]", "p2[0]", -1.0),
        "{q+,p-}=1/2": (lightcone_observable("qplus"), lightcone_observable("pminus"), 0.5),
        "{q-,p+}=1/2": (lightcone_observable("qminus"), lightcone_observable("pplus"), 0.5),
        "{q+,p+}=0": (lightcone_observable("qplus"), lightcone_observable("pplus"), 0.0),
        "{q1,q2}=0": ("q1[0]", "q2[0]", 0.0),
    }
    points = [_random_phase(rng, 1) for _ in range(100)]
    ctol = tol if tol is not None else 1e-12
    for name, (f, g, want) in canon.items():
        worst = max(abs(poisson_bracket(spec, f, g, ph) - want) for ph in points)
        out.append(_check("brackets", name, worst, ctol))

    atol = tol if tol is not None else 1e-9
    for c in (0.5, 1.0):
        rep = ch.verify_oscillator_algebra(1.0, 1.0, c, points=100, tol=atol, rng_seed=seed)
        for rel, val in rep.residuals.items():
            out.append(_check("brackets", f"oscillator c={c}: {rel}", val, atol,
                              note=f"omega_+^2={rep.omega_plus_sq:.12g}"))

    # jet gradients against central differences, for H and the built-in charges
    worst = 0.0
    H = HamiltonianObservable(spec)
    obs = ch.builtin_charges("oscillator", spec)
    for ph in points[:20]:
        for name, o in obs.items():
            worst = max(worst, abs(poisson_bracket(spec, H, o, ph) - fd_poisson_bracket(spec, H, o, ph)))
    out.append(_check("brackets", "jet vs finite-difference brackets with H", worst, 1e-6))

    worst = 0.0
    for ph in points[:10]:
        worst = max(worst, hamiltonian_flow_check(spec, ph).max_discrepancy)
    out.append(_check("brackets", "Hamilton's equations vs Lagrangian flow", worst, 1e-8))
    return out


# ------------------------------------------------------------------ ledger

HOMOGENEOUS_KINDS = ("linear", "oscillator", "central", "two_body")


def _random_states(rng, n, count, scale=1.0):
    return [DoubledState(float(rng.uniform(0, 1)), *rng.uniform(-scale, scale, size=(4, n)))
            for _ in range(count)]


def _offset_states(rng, n, count):
    # keep radii away from zero for central potentials
    out = []
    for s in _random_states(rng, n, count, 0.3):
        out.append(DoubledState(s.t, s.q1 + 1.5, s.v1, s.q2 + 1.5, s.v2))
    return out


def suite_ledger(seed=0, tol=None):
    from .scenario import build_system, bundled_scenarios, initial_state, load_config, transformations_for

    out = []
    rtol = tol if tol is not None else 1e-6
    ftol = tol if tol is not None else ch.FKK_TOL
    for name in bundled_scenarios():
        cfg = load_config(name)
        spec, entry = build_system(cfg)
        s0 = initial_state(cfg, spec, entry)
        it = cfg.integrator
        traj = integrate_adaptive(spec, s0, it["t_end"], it["rel_tol"], it["abs_tol"], it["sample_dt"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ch.GridTooCoarseWarning)
            led = ch.rate_residuals(spec, traj, transformations_for(cfg, spec, entry))
        mr = led.max_residuals
        out.append(_check("ledger", f"{name}: dE1/dt = v1.F1", mr["E1"], rtol))
        out.append(_check("ledger", f"{name}: dE2/dt = -v2.F2", mr["E2"], rtol))
        out.append(_check("ledger", f"{name}: dH/dt = -dLam/dt", mr["H"], rtol))
        others = {k: v for k, v in mr.items() if k not in ("E1", "E2", "H", "fkk", "fkk_fd")}
        if others:
            k = max(others, key=others.get)
            out.append(_check("ledger", f"{name}: remaining rate equations (worst {k})", others[k], rtol))
        out.append(_check("ledger", f"{name}: force identity, analytic derivative", mr["fkk"], ftol))
        out.append(_check("ledger", f"{name}: force identity, finite-difference derivative", mr["fkk_fd"], ftol))

    rng = np.random.default_rng(seed)
    htol = tol if tol is not None else 1e-10
    for name, entry in mdl.catalog().items():
        spec = entry.spec()
        pts = _offset_states(rng, spec.n, 100) if entry.kind in ("central", "two_body") \
            else _random_states(rng, spec.n, 100)
        rep = ch.check_H_equals_E1_minus_E2(spec, pts, tol=htol)
        if entry.kind in HOMOGENEOUS_KINDS:
            out.append(_check("ledger", f"{name}: H = E1 - E2 at 100 states", rep.max_residual, htol))
        else:
            out.append(Check("ledger", f"{name}: H = E1 - E2 refused (K not first-degree homogeneous)",
                             not rep.identity_checked and not rep.homogeneous,
                             rep.max_scaling_residual))
    return out


# ------------------------------------------------------------------ oracles


def _oracle_cases():
    cat = mdl.catalog()
    yield "free_particle", cat["free_particle"], {}, {"qp": 0.2, "vp": 1.0, "qm": 0.01, "vm": 0.02}, 5.0
    yield "free_particle n=2", mdl.get_model("free_particle", n=2), {}, \
        {"qp": [0.1, -0.3], "vp": [1.0, 0.5], "qm": [0.0, 0.01], "vm": [0.01, 0.0]}, 5.0
    yield "free_particle_circle", cat["free_particle_circle"], {}, {"qp": 0.3, "vp": 0.4, "qm": 0.02, "vm": 0.01}, 5.0
    yield "free_fall", cat["free_fall"], {}, {"qp": 1.0, "vp": -0.5, "qm": 0.01, "vm": -0.02}, 5.0
    for c in (0.5, 2.0, 3.0, 0.0):
        yield f"damped_oscillator c={c}", cat["damped_oscillator"], {"c": c}, \
            {"qp": 1.0, "vp": 0.2, "qm": 0.01, "vm": 0.0}, 10.0
    yield "polynomial_drag", cat["polynomial_drag"], {}, {"qp": 0.0, "vp": 1.0, "qm": 0.1, "vm": 0.07}, 5.0
    yield "polynomial_drag negative v", cat["polynomial_drag"], {}, {"qp": 0.0, "vp": -1.5, "qm": 0.1, "vm": 0.0}, 5.0
    yield "polynomial_drag gravity", cat["polynomial_drag"], {"g": 1.0}, {"qp": 0.0, "vp": 0.2}, 5.0
    yield "polynomial_drag gravity fast", cat["polynomial_drag"], {"g": 1.0}, {"qp": 0.0, "vp": 3.0}, 5.0


def oracle_residual(entry, params, ic, t_end, points=100):
    """Largest EOM residual of a closed form on a uniform grid over [0, t_end]."""
    spec = entry.spec(params)
    s0 = mdl.initial_state(entry, ic, spec.n)
    times = np.linspace(0.0, t_end, points)
    Y, acc = mdl.closed_form_series(entry, spec.params, s0, times)
    worst = 0.0
    for i, t in enumerate(times):
        s = DoubledState.from_vector(float(t), Y[i])
        r = residual_eom(spec, s, acc[i])
        scale = 1.0 + float(np.max(np.abs(Y[i])))
        worst = max(worst, float(np.max(np.abs(r))) / scale)
    return worst


def _measured_energy_coefficient(seed):
    # dE/dt = k c v1 v2 with E = (E1 + E2)/2, fitted along a physical trajectory
    entry = mdl.get_model("damped_oscillator")
    spec = entry.spec({"c": 0.5})
    s0 = mdl.initial_state(entry, {"qp": 1.0, "physical": True}, 1)
    traj = integrate_adaptive(spec, s0, 10.0, 1e-11, 1e-13, 0.01)
    E = np.array([0.5 * (ch.sector_energy(spec, s, 1) + ch.sector_energy(spec, s, 2)) for s in traj.states])
    dE = ch.fd5(E, traj.dt)[2:-2]
    base = spec.params["c"] * (traj.v1[:, 0] * traj.v2[:, 0])[2:-2]
    return float(np.dot(dE, base) / np.dot(base, base))


def _measured_angular_decay():
    entry = mdl.get_model("central_force")
    spec = entry.spec()
    s0 = mdl.initial_state(entry, {"qp": [1, 0, 0], "vp": [0, 1, 0], "physical": True}, 3)
    traj = integrate_adaptive(spec, s0, 10.0, 1e-10, 1e-12, 0.05)
    J = np.linalg.norm(np.cross(traj.qplus, traj.vplus), axis=1)
    # in units of c/mu, to compare with the c = mu = 1 constants below
    p = spec.params
    return -growth_rate_fit(traj.times, J).rate * p["mu"] / p["c"]


def suite_oracles(seed=0, tol=None):
    out = []
    otol = tol if tol is not None else 1e-8
    for label, entry, params, ic, t_end in _oracle_cases():
        try:
            worst = oracle_residual(entry, params, ic, t_end)
            out.append(_check("oracles", f"{label}: closed form in the EOM on 100 points", worst, otol))
        except NcmechError as exc:
            out.append(Check("oracles", label, False, note=str(exc)))
    out.extend(discrepancy_report(seed))
    return out


def discrepancy_report(seed=0, measure=True):
    """Published constants versus engine-derived ones, as FLAG lines."""
    out = []
    measured = {}
    if measure:
        measured["oscillator_energy_rate"] = _measured_energy_coefficient(seed)
        measured["angular_momentum_decay"] = _measured_angular_decay()
    for d in mdl.published_discrepancies(c1=2.0, c2=1.0, g=1.0, c=1.0, m=1.0, mu=1.0, w=1.0):
        note = f"published={d.published:.6g} derived={d.derived:.6g}"
        if d.key in measured:
            note += f" measured={measured[d.key]:.6g}"
        out.append(Check("discrepancy", f"{d.key}: {d.quantity}", True, flag=not d.agrees, note=note))
    return out


RUNNERS = {
    "parser": suite_parser,
    "brackets": suite_brackets,
    "ledger": suite_ledger,
    "oracles": suite_oracles,
}


def run_suites(suite="all", seed=0, tol=None, echo=print):
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        for c in RUNNERS[name](seed=seed, tol=tol):
            results.append(c)
            if echo is not None:
                echo(c.line())
    return results


def all_passed(results):
    return all(c.passed for c in results if not c.flag)

