"""Noether ledger: conserved generators, violated sector charges, and their rate equations.

Conserved quantities of the doubled system (H and the generators of symmetries
of the full doubled Lagrangian) sit next to the sector energies and charges
E1, E2, J_1, J_2, which the nonconservative forces drive.  Rate equations are
checked along sampled trajectories by comparing finite-difference time
derivatives against their analytic right-hand sides.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .errors import NcmechError
from .hamiltonian import (ExprObservable, FunctionObservable, HamiltonianObservable, PhaseState,
                          hamiltonian_from_state, poisson_bracket, velocities_from_momenta)
from .lagrangian import DoubledState, _blocks, accelerations, lambda_jet, nonconservative_forces

FKK_TOL = 1e-8


class GridTooCoarseWarning(UserWarning):
    pass


# ------------------------------------------------------------ transformations


@dataclass(frozen=True)
class Transformation:
    """Infinitesimal transformation ``dQ = delta(t, q1, q2)`` with optional time shift.

    ``delta`` holds 2n expressions ordered like Q = (q1, q2).  A
    ``boundary`` term B declares quasi-invariance, dLam = dB/dt.
    """

    name: str
    delta: tuple
    n: int
    delta_t: float = 0.0
    boundary: object = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        table = ex.SymbolTable(["t"] + ex.indexed("q1", self.n) + ex.indexed("q2", self.n) + list(self.params))
        parsed = tuple(ex.parse(d, table) if isinstance(d, str) else d for d in self.delta)
        if len(parsed) != 2 * self.n:
            raise NcmechError(f"transformation {self.name!r} needs {2 * self.n} components")
        for d in parsed:
            for s in d.symbols():
                if s not in table:
                    raise NcmechError(f"transformation may not reference {s!r}")
        object.__setattr__(self, "delta", parsed)
        if isinstance(self.boundary, str):
            dtab = ex.SymbolTable.doubled(self.n, self.params)
            object.__setattr__(self, "boundary", ex.parse(self.boundary, dtab))
        if self.delta_t not in (0.0, 1.0):
            raise NcmechError("delta_t must be 0 or 1")

    @property
    def mixing(self):
        """True when a copy-1 component references copy-2 coordinates or the reverse."""
        n = self.n
        for A, d in enumerate(self.delta):
            other = "q2[" if A < n else "q1["
            if any(s.startswith(other) for s in d.symbols()):
                return True
        return False


def time_translation(n):
    zero = ["0"] * (2 * n)
    return Transformation("time", tuple(zero), n, delta_t=1.0)


def so11(n=1):
    """Boost mixing the copies: dq1 = q2, dq2 = q1."""
    d = [f"q2[{i}]" for i in range(n)] + [f"q1[{i}]" for i in range(n)]
    return Transformation("so11", tuple(d), n)


def translation(n, axis=0, coef="c", params=None):
    """Equal shift of both copies along ``axis``; the linear K changes by d/dt[(coef/2)(q1 - q2)]."""
    d = ["1" if i == axis else "0" for i in range(n)] * 2
    boundary = f"(({coef})/2)*(q1[{axis}] - q2[{axis}])" if coef else None
    return Transformation(f"translation{axis}", tuple(d), n, boundary=boundary, params=dict(params or {}))


def rotation(axis, offset=0, n=3):
    """Rotation about a coordinate axis of the vector in components offset..offset+2, both copies."""
    j, k = [(1, 2), (2, 0), (0, 1)][axis]
    comps = []
    for base in ("q1", "q2"):
        d = ["0"] * n
        d[offset + j] = f"-{base}[{offset + k}]"
        d[offset + k] = f"{base}[{offset + j}]"
        comps += d
    return Transformation(f"rotation{'xyz'[axis]}", tuple(comps), n)


def builtin_transformations(kind, n, params=None):
    """Symmetries appropriate to a model kind."""
    out = [time_translation(n)]
    if kind in ("linear", "oscillator"):
        out.append(so11(n))
    if kind == "linear":
        out.append(translation(n, 0, "c", params))
    if kind == "central":
        out += [rotation(a) for a in range(3)]
    return out


# ------------------------------------------------------------- point values


def _delta_jets(spec, s, tr):
    """Values and Jacobians of dQ w.r.t. the seeds (Q, V, t)."""
    env = s.bindings({**spec.params, **tr.params})
    vals = np.empty(2 * spec.n)
    jac = np.zeros((2 * spec.n, 4 * spec.n + 1))
    for A, d in enumerate(tr.delta):
        jet = ex.evaluate_jet(d, env, spec.seeds)
        vals[A] = jet.value
        jac[A] = jet.grad
    return vals, jac


def _sector_jets(spec, s):
    env = s.bindings(spec.params)
    j1 = ex.evaluate_jet(spec._L1, env, spec.seeds)
    j2 = ex.evaluate_jet(spec._L2, env, spec.seeds)
    return j1, j2


def _sector_parts(spec, jet, copy):
    """(dL/dq, dL/dv, dL/dt) of one copy's Lagrangian from a doubled-seed jet."""
    n = spec.n
    o = 0 if copy == 1 else n
    g = jet.grad
    return g[o:o + n], g[2 * n + o:2 * n + o + n], g[4 * n]


def sector_energy(spec, s, sector):
    """E_i = v_i . dL_i/dv_i - L_i."""
    L = spec._L1 if sector == 1 else spec._L2
    jet = ex.evaluate_jet(L, s.bindings(spec.params), spec.seeds)
    _, dv, _ = _sector_parts(spec, jet, sector)
    v = s.v1 if sector == 1 else s.v2
    return float(v @ dv - jet.value)


def noether_charge(spec, s, tr):
    """dQ . dLam/dV + delta_t (V . dLam/dV - Lam) - B."""
    jet = lambda_jet(spec, s)
    b = _blocks(spec, jet)
    vals, _ = _delta_jets(spec, s, tr)
    out = float(vals @ b["dV"])
    if tr.delta_t:
        out += float(s.V @ b["dV"] - jet.value)
    if tr.boundary is not None:
        out -= ex.evaluate(tr.boundary, s.bindings({**spec.params, **tr.params}))
    return out


@dataclass
class _PointLedger:
    values: dict
    rhs: dict
    fkk_lhs: float
    g_k: float
    g_k_dot: float
    k_t: float


def _point_ledger(spec, s, transformations):
    """Charge values and analytic rate right-hand sides at one state."""
    n = spec.n
    acc = accelerations(spec, s)
    A = acc.A
    lam = lambda_jet(spec, s)
    b = _blocks(spec, lam)
    f1, f2 = nonconservative_forces(spec, s, acc)
    j1, j2 = _sector_jets(spec, s)
    dq1, dv1, dt1 = _sector_parts(spec, j1, 1)
    dq2, dv2, dt2 = _sector_parts(spec, j2, 2)
    E1 = float(s.v1 @ dv1 - j1.value)
    E2 = float(s.v2 @ dv2 - j2.value)
    H = float(s.V @ b["dV"] - lam.value)
    values = {"H": H, "E1": E1, "E2": E2, "E": 0.5 * (E1 + E2)}
    rhs = {
        "H": -float(b["dt"]),
        "E1": float(s.v1 @ f1) - float(dt1),
        "E2": -float(s.v2 @ f2) - float(dt2),
    }
    rhs["E"] = 0.5 * (rhs["E1"] + rhs["E2"])

    # identity: v1.F1 + v2.F2 = -d/dt(V . dK/dV - K) - dK/dt
    kjet = ex.evaluate_jet(spec.K, s.bindings(spec.params), spec.seeds)
    kb = _blocks(spec, kjet)
    H_K = kjet.hess
    V = s.V
    gG = np.empty(4 * n + 1)
    gG[:2 * n] = H_K[2 * n:4 * n, :2 * n].T @ V - kb["dQ"]
    gG[2 * n:4 * n] = H_K[2 * n:4 * n, 2 * n:4 * n] @ V
    gG[4 * n] = float(V @ H_K[2 * n:4 * n, 4 * n]) - kb["dt"]
    G_dot = float(gG[:2 * n] @ V + gG[2 * n:4 * n] @ A + gG[4 * n])
    fkk_lhs = float(s.v1 @ f1 + s.v2 @ f2)
    G = float(V @ kb["dV"] - kjet.value)

    for tr in transformations:
        if tr.delta_t:
            continue
        vals, jac = _delta_jets(spec, s, tr)
        dvals = jac[:, :2 * n] @ V + jac[:, 4 * n]
        name = tr.name
        Q = float(vals @ b["dV"])
        dB = 0.0
        if tr.boundary is not None:
            bj = ex.evaluate_jet(tr.boundary, s.bindings({**spec.params, **tr.params}), spec.seeds)
            Q -= bj.value
            dB = float(bj.grad[:2 * n] @ V + bj.grad[2 * n:4 * n] @ A + bj.grad[4 * n])
        values[name] = Q
        rhs[name] = float(b["dQ"] @ vals + b["dV"] @ dvals) - dB
        if tr.mixing:
            continue
        J1 = float(vals[:n] @ dv1)
        J2 = float(vals[n:] @ dv2)
        values[f"{name}_1"] = J1
        values[f"{name}_2"] = J2
        values[f"{name}_avg"] = 0.5 * (J1 + J2)
        dL1 = float(dq1 @ vals[:n] + dv1 @ dvals[:n])
        dL2 = float(dq2 @ vals[n:] + dv2 @ dvals[n:])
        rhs[f"{name}_1"] = float(vals[:n] @ f1) + dL1
        rhs[f"{name}_2"] = -float(vals[n:] @ f2) + dL2
        rhs[f"{name}_avg"] = 0.5 * (rhs[f"{name}_1"] + rhs[f"{name}_2"])
    return _PointLedger(values, rhs, fkk_lhs, G, G_dot, float(kb["dt"]))


# ------------------------------------------------------------- trajectories


@dataclass
class ChargeSample:
    t: float
    values: dict
    residuals: dict


def fd5(y, h):
    """Five-point central derivative at interior indices 2..N-3 (NaN elsewhere)."""
    y = np.asarray(y, dtype=float)
    d = np.full_like(y, np.nan)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    return d


def richardson_error(y, h):
    """|D_h - D_2h| / 15 where both stencils fit (NaN elsewhere)."""
    y = np.asarray(y, dtype=float)
    dh = fd5(y, h)
    d2 = np.full_like(y, np.nan)
    d2[4:-4] = (y[:-8] - 8 * y[2:-6] + 8 * y[6:-2] - y[8:]) / (24 * h)
    return np.abs(dh - d2) / 15


@dataclass
class LedgerResult:
    samples: list
    max_residuals: dict
    fkk_max: float
    fd_error_max: dict
    charge_names: list


def rate_residuals(spec, traj, transformations=(), tol=1e-6):
    """Rate-equation residuals along a uniformly sampled trajectory.

    Each charge is differentiated by five-point central differences and
    compared with its analytic right-hand side.  ``E_sum`` checks the
    2 dE/dt equation, whose residual is the sum of the E1 and E2 residuals;
    ``<name>_sum`` does the same for sector charges.  ``fkk`` is the pointwise
    identity between v.F_K and the time derivative of v.dK/dv - K.  Emits
    :class:`GridTooCoarseWarning` if the Richardson estimate of the
    differentiation error exceeds ``tol``.
    """
    times = traj.times
    if len(times) < 5:
        raise NcmechError("need at least five samples for the rate equations")
    h = float(times[1] - times[0])
    if not np.allclose(np.diff(times), h, rtol=1e-9, atol=1e-12):
        raise NcmechError("rate residuals need a uniform sample grid")
    points = [_point_ledger(spec, traj.state(i), transformations) for i in range(len(times))]
    names = list(points[0].values)
    series = {k: np.array([p.values[k] for p in points]) for k in names}
    rhs = {k: np.array([p.rhs[k] for p in points]) for k in points[0].rhs}
    res = {}
    fd_err = {}
    for k, r in rhs.items():
        res[k] = fd5(series[k], h) - r
        fd_err[k] = float(np.nanmax(richardson_error(series[k], h))) if len(times) >= 9 else math.nan
    res["E_sum"] = fd5(series["E1"] + series["E2"], h) - (rhs["E1"] + rhs["E2"])
    for tr in transformations:
        k1, k2 = f"{tr.name}_1", f"{tr.name}_2"
        if k1 in rhs:
            res[f"{tr.name}_sum"] = fd5(series[k1] + series[k2], h) - (rhs[k1] + rhs[k2])
    lhs = np.array([p.fkk_lhs for p in points])
    k_t = np.array([p.k_t for p in points])
    fkk = lhs + np.array([p.g_k_dot for p in points]) + k_t
    # same identity with the time derivative taken by finite differences
    fkk_fd = lhs + fd5(np.array([p.g_k for p in points]), h) + k_t
    res["fkk_fd"] = fkk_fd
    worst = max((v for v in fd_err.values() if not math.isnan(v)), default=0.0)
    if worst > tol:
        warnings.warn(f"finite-difference error estimate {worst:.2e} exceeds {tol:.1e}; refine the grid",
                      GridTooCoarseWarning, stacklevel=2)
    samples = []
    for i, t in enumerate(times):
        vals = {k: float(series[k][i]) for k in names}
        rr = {k: float(v[i]) for k, v in res.items()}
        rr["fkk"] = float(fkk[i])
        samples.append(ChargeSample(float(t), vals, rr))
    maxres = {k: float(np.nanmax(np.abs(v))) for k, v in res.items()}
    maxres["fkk"] = float(np.max(np.abs(fkk)))
    traj.charges = samples
    return LedgerResult(samples, maxres, maxres["fkk"], fd_err, names)


# ------------------------------------------------------- H = E1 - E2 check


@dataclass
class HomogeneityReport:
    homogeneous: bool
    time_independent: bool
    identity_checked: bool
    passed: bool
    max_residual: float
    max_scaling_residual: float


def _scaled_velocities(s, lam):
    return DoubledState(s.t, s.q1, lam * s.v1, s.q2, lam * s.v2)


def check_H_equals_E1_minus_E2(spec, points, tol=1e-10, scaling_tol=1e-10):
    """Check H = E1 - E2 after confirming K is velocity-homogeneous of degree one and t-independent.

    The identity is only asserted when both pre-checks pass; otherwise
    ``identity_checked`` is False and the report fails.
    """
    scale_res = 0.0
    t_res = 0.0
    for s in points:
        env = s.bindings(spec.params)
        k0 = ex.evaluate(spec.K, env)
        for lam in (0.5, 2.0, 3.0):
            k = ex.evaluate(spec.K, _scaled_velocities(s, lam).bindings(spec.params))
            scale_res = max(scale_res, abs(k - lam * k0) / (1.0 + abs(lam * k0)))
        jet = ex.evaluate_jet(spec.K, env, ["t"])
        t_res = max(t_res, abs(jet.grad[0]))
    homogeneous = scale_res <= scaling_tol
    t_indep = t_res <= scaling_tol
    if not (homogeneous and t_indep):
        return HomogeneityReport(homogeneous, t_indep, False, False, math.nan, scale_res)
    worst = 0.0
    for s in points:
        H = hamiltonian_from_state(spec, s)
        diff = H - (sector_energy(spec, s, 1) - sector_energy(spec, s, 2))
        worst = max(worst, abs(diff))
    return HomogeneityReport(True, True, True, worst <= tol, worst, scale_res)


# ------------------------------------------------------- oscillator algebra


def _lc_exprs():
    return {
        "qp": "((q1[0] + q2[0])/2)",
        "qm": "((q1[0] - q2[0])/2)",
        "pp": "((p1[0] + p2[0])/2)",
        "pm": "((p1[0] - p2[0])/2)",
    }


def oscillator_observables(m, c, wp2):
    """Jtilde, E0+-, E+- and E as phase-space expression observables.

    ``wp2`` is the value of omega_+^2 used in the quadratic forms.
    """
    x = _lc_exprs()
    params = {"m": m, "c": c, "W": wp2}
    qp, qm, pp, pm = x["qp"], x["qm"], x["pp"], x["pm"]
    out = {
        "Jtilde": "q1[0]*p2[0] - q2[0]*p1[0]",
        "E0+": f"(1/(2*m))*({pp}^2 + {pm}^2) + (m*W/2)*({qp}^2 + {qm}^2)",
        "E0-": f"(1/(2*m))*({pp}^2 - {pm}^2) + (m*W/2)*({qp}^2 - {qm}^2)",
        "E+": f"(1/(2*m))*{pp}^2 + (m*W/2)*{qp}^2 - (c/(2*m))*{pp}*{qp}",
        "E-": f"(1/(2*m))*{pm}^2 + (m*W/2)*{qm}^2 + (c/(2*m))*{pm}*{qm}",
        "E": "(1/(4*m))*(p1[0]^2 + p2[0]^2) + (m*W/4)*(q1[0]^2 + q2[0]^2) - (c/(4*m))*(q1[0]*p2[0] + q2[0]*p1[0])",
        "EpEm_rhs": f"-(1/4)*(W + c^2/(4*m^2))*(q1[0]*p2[0] - q2[0]*p1[0]) + (c/(2*m))*(-(1/m)*{pp}*{pm} + m*W*{qp}*{qm})",
    }
    return {k: ExprObservable(v, 1, params, name=k) for k, v in out.items()}


def _random_phase_points(rng, count, n=1, scale=1.0):
    return [PhaseState(0.0, *rng.uniform(-scale, scale, size=(4, n))) for _ in range(count)]


def derive_omega_plus_sq(spec, rng_seed=0, points=3):
    """Coefficient making E = E+ + E- hold, with E the engine's (E1 + E2)/2.

    E - (E+ + E-) is affine in omega_+^2; each random phase point yields one
    estimate.  Returns (value, spread).
    """
    m, c = spec.params["m"], spec.params["c"]
    rng = np.random.default_rng(rng_seed)
    obs0 = oscillator_observables(m, c, 0.0)
    ests = []
    for ph in _random_phase_points(rng, points):
        s = velocities_from_momenta(spec, ph)
        E = 0.5 * (sector_energy(spec, s, 1) + sector_energy(spec, s, 2))
        rest = obs0["E+"].value(ph) + obs0["E-"].value(ph)
        quad = 0.5 * m * float(ph.qplus[0] ** 2 + ph.qminus[0] ** 2)
        ests.append((E - rest) / quad)
    ests = np.array(ests)
    return float(np.mean(ests)), float(np.ptp(ests))


@dataclass
class AlgebraReport:
    passed: bool
    residuals: dict
    omega_plus_sq: float
    tol: float


def verify_oscillator_algebra(m=1.0, w=1.0, c=1.0, points=100, tol=1e-9, rng_seed=0):
    """Bracket relations of H, Jtilde, E+- and E0+- at random phase points."""
    from .models import model_damped_oscillator

    spec = model_damped_oscillator(m, w, c).spec()
    wp2, _ = derive_omega_plus_sq(spec, rng_seed)
    obs = oscillator_observables(m, c, wp2)
    Hobs = HamiltonianObservable(spec)
    J = obs["Jtilde"]
    rng = np.random.default_rng(rng_seed + 1)
    relations = {
        "{H,Jtilde}=0": lambda ph: poisson_bracket(spec, Hobs, J, ph),
        "{Jtilde,E+}=2E+": lambda ph: poisson_bracket(spec, J, obs["E+"], ph) - 2 * obs["E+"].value(ph),
        "{Jtilde,E-}=-2E-": lambda ph: poisson_bracket(spec, J, obs["E-"], ph) + 2 * obs["E-"].value(ph),
        "{Jtilde,E0+}=2E0-": lambda ph: poisson_bracket(spec, J, obs["E0+"], ph) - 2 * obs["E0-"].value(ph),
        "{Jtilde,E0-}=2E0+": lambda ph: poisson_bracket(spec, J, obs["E0-"], ph) - 2 * obs["E0+"].value(ph),
        "{E0+,E0-}=W/2 Jtilde": lambda ph: poisson_bracket(spec, obs["E0+"], obs["E0-"], ph)
        - 0.5 * wp2 * J.value(ph),
        "{E+,E-}=published": lambda ph: poisson_bracket(spec, obs["E+"], obs["E-"], ph)
        - obs["EpEm_rhs"].value(ph),
        "E=E++E-": lambda ph: obs["E"].value(ph) - obs["E+"].value(ph) - obs["E-"].value(ph),
    }
    worst = {k: 0.0 for k in relations}
    for ph in _random_phase_points(rng, points):
        for k, fn in relations.items():
            worst[k] = max(worst[k], abs(fn(ph)))
    return AlgebraReport(all(v <= tol for v in worst.values()), worst, wp2, tol)


# ------------------------------------------------------------ built-ins


def _jtilde_obs(n):
    def value(ph):
        return float(ph.q1 @ ph.p2 - ph.q2 @ ph.p1)

    def grad(ph):
        return np.stack([ph.p2, -ph.q2, -ph.p1, ph.q1])

    return FunctionObservable("Jtilde", value, grad)


def _translation_obs(n, c, axis=0):
    e = np.zeros(n)
    e[axis] = 1.0

    def value(ph):
        return float(ph.p1[axis] - ph.p2[axis] - 0.5 * c * (ph.q1[axis] - ph.q2[axis]))

    def grad(ph):
        return np.stack([-0.5 * c * e, e, 0.5 * c * e, -e])

    return FunctionObservable(f"P{axis}", value, grad)


def _cross_grad(r, p, k):
    """Gradients of (r x p)_k w.r.t. r and p."""
    e = np.eye(3)[k]
    return np.cross(p, e), np.cross(e, r)


def _angular_obs(kind, k):
    """J_k = (r1 x p1 + r2 x p2)_k / 2 or calJ_k = (r1 x p1 - r2 x p2)_k."""
    w1, w2 = (0.5, 0.5) if kind == "J" else (1.0, -1.0)

    def value(ph):
        return float(w1 * np.cross(ph.q1, ph.p1)[k] + w2 * np.cross(ph.q2, ph.p2)[k])

    def grad(ph):
        g1r, g1p = _cross_grad(ph.q1, ph.p1, k)
        g2r, g2p = _cross_grad(ph.q2, ph.p2, k)
        return np.stack([w1 * g1r, w1 * g1p, w2 * g2r, w2 * g2p])

    return FunctionObservable(f"{kind}{'xyz'[k]}", value, grad)


def _energy_obs(m, c, wp2):
    """(E1 + E2)/2 for the linear-drag oscillator in phase variables (wp2 = w^2 + c^2/4m^2)."""

    def value(ph):
        return float((ph.p1 @ ph.p1 + ph.p2 @ ph.p2) / (4 * m) + m * wp2 / 4 * (ph.q1 @ ph.q1 + ph.q2 @ ph.q2)
                     - c / (4 * m) * (ph.q1 @ ph.p2 + ph.q2 @ ph.p1))

    def grad(ph):
        return np.stack([
            m * wp2 / 2 * ph.q1 - c / (4 * m) * ph.p2,
            ph.p1 / (2 * m) - c / (4 * m) * ph.q2,
            m * wp2 / 2 * ph.q2 - c / (4 * m) * ph.p1,
            ph.p2 / (2 * m) - c / (4 * m) * ph.q1,
        ])

    return FunctionObservable("E", value, grad)


def _epm_obs(m, c, wp2, sign):
    """E+ or E- with analytic gradient, omega_+^2 = wp2 (zero for the free particle)."""

    def parts(ph):
        if sign > 0:
            return ph.qplus, ph.pplus
        return ph.qminus, ph.pminus

    def value(ph):
        q, p = parts(ph)
        return float(p @ p / (2 * m) + m * wp2 / 2 * (q @ q) - sign * c / (2 * m) * (p @ q))

    def grad(ph):
        q, p = parts(ph)
        dq = m * wp2 * q - sign * c / (2 * m) * p
        dp = p / m - sign * c / (2 * m) * q
        # chain rule through q+- = (q1 +- q2)/2, p+- = (p1 +- p2)/2
        return np.stack([dq / 2, dp / 2, sign * dq / 2, sign * dp / 2])

    return FunctionObservable("E+" if sign > 0 else "E-", value, grad)


def builtin_charges(kind, spec):
    """Named analytic observables for a model kind.

    ``linear`` and ``oscillator`` kinds (n = 1 for the energies) give H,
    Jtilde, P, E, E+ and E-; ``central`` gives H and the components of J and
    calJ.
    """
    n = spec.n
    p = spec.params
    out = {"H": HamiltonianObservable(spec)}
    if kind in ("linear", "oscillator"):
        m = p.get("m")
        c = p.get("c")
        if "R" in p:
            m, c = m * p["R"] ** 2, c * p["R"] ** 2
        wp2 = p["w"] ** 2 + c * c / (4 * m * m) if kind == "oscillator" else c * c / (4 * m * m)
        out["Jtilde"] = _jtilde_obs(n)
        if kind == "linear":
            out["P"] = _translation_obs(n, c)
        if n == 1 and "g" not in p:
            out["E"] = _energy_obs(m, c, wp2)
            out["E+"] = _epm_obs(m, c, wp2, +1)
            out["E-"] = _epm_obs(m, c, wp2, -1)
        return out
    if kind == "central":
        for k in range(3):
            out[f"J{'xyz'[k]}"] = _angular_obs("J", k)
            out[f"calJ{'xyz'[k]}"] = _angular_obs("calJ", k)
        return out
    if kind == "polynomial":
        return out
    raise NcmechError(f"no built-in charges for kind {kind!r}")
