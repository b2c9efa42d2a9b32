"""Doubled Lagrangian, Euler-Lagrange solve, nonconservative forces, light-cone views.

The doubled Lagrangian is ``Lam = L(q1, v1) - L(q2, v2) + K(q1, v1, q2, v2)``.
Coordinates are stacked as ``Q = (q1, q2)`` and velocities as ``V = (v1, v2)``;
all jets of ``Lam`` are taken over the seed vector ``(Q, V, t)``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .errors import NcmechError, NonRegularError
from .expr import Expression, SymbolTable, indexed

REGULARITY_RTOL = 1e-10


# ------------------------------------------------------------------------ types


@dataclass(frozen=True)
class SystemSpec:
    """A conservative Lagrangian ``L`` over (t, q[i], v[i]) plus a nonconservative
    potential ``K`` over (t, q1[i], v1[i], q2[i], v2[i]).

    ``L`` and ``K`` may be given as strings; they are parsed against the symbol
    tables implied by ``n`` and the parameter names.  ``K`` must be
    antisymmetric under the copy interchange, which is checked numerically at
    construction.
    """

    n: int
    L: Expression
    K: Expression
    params: dict = field(default_factory=dict)
    name: str = ""
    description: str = ""
    check_antisymmetry: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise NcmechError("n must be a positive integer")
        params = {k: float(v) for k, v in self.params.items()}
        object.__setattr__(self, "params", params)
        single = SymbolTable.single(self.n, params)
        doubled = SymbolTable.doubled(self.n, params)
        if isinstance(self.L, str):
            object.__setattr__(self, "L", ex.parse(self.L, single))
        if isinstance(self.K, str):
            object.__setattr__(self, "K", ex.parse(self.K, doubled))
        for name in self.L.symbols():
            if name not in single:
                raise NcmechError(f"L may not reference {name!r}")
        for name in self.K.symbols():
            if name not in doubled:
                raise NcmechError(f"K may not reference {name!r}")
        if self.check_antisymmetry:
            ex.require_antisymmetric(self.K, self.n, params=params, trials=64, tol=1e-9)
        lam = assemble_lambda(self)
        object.__setattr__(self, "_lambda", lam)
        object.__setattr__(self, "_L1", _copy_of(self.L, self.n, "1"))
        object.__setattr__(self, "_L2", _copy_of(self.L, self.n, "2"))

    @property
    def lam(self):
        return self._lambda

    def with_params(self, **updates):
        params = dict(self.params)
        params.update(updates)
        return SystemSpec(self.n, self.L, self.K, params, self.name, self.description)

    # seed layout -----------------------------------------------------------

    @property
    def q_names(self):
        return indexed("q1", self.n) + indexed("q2", self.n)

    @property
    def v_names(self):
        return indexed("v1", self.n) + indexed("v2", self.n)

    @property
    def seeds(self):
        return self.q_names + self.v_names + ["t"]


def _copy_of(L, n, copy):
    mapping = {}
    for i in range(n):
        mapping[f"q[{i}]"] = ex.Sym(f"q{copy}[{i}]")
        mapping[f"v[{i}]"] = ex.Sym(f"v{copy}[{i}]")
    return ex.substitute(L, mapping)


@dataclass
class DoubledState:
    t: float
    q1: np.ndarray
    v1: np.ndarray
    q2: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        self.t = float(self.t)
        for name in ("q1", "v1", "q2", "v2"):
            setattr(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))

    @property
    def n(self):
        return self.q1.shape[0]

    @property
    def Q(self):
        return np.concatenate([self.q1, self.q2])

    @property
    def V(self):
        return np.concatenate([self.v1, self.v2])

    @property
    def qplus(self):
        return (self.q1 + self.q2) / 2

    @property
    def qminus(self):
        return (self.q1 - self.q2) / 2

    @property
    def vplus(self):
        return (self.v1 + self.v2) / 2

    @property
    def vminus(self):
        return (self.v1 - self.v2) / 2

    def bindings(self, params=None):
        env = dict(params or {})
        env["t"] = self.t
        for i in range(self.n):
            env[f"q1[{i}]"] = float(self.q1[i])
            env[f"v1[{i}]"] = float(self.v1[i])
            env[f"q2[{i}]"] = float(self.q2[i])
            env[f"v2[{i}]"] = float(self.v2[i])
        return env

    def as_vector(self):
        return np.concatenate([self.q1, self.q2, self.v1, self.v2])

    @classmethod
    def from_vector(cls, t, y):
        n = y.shape[0] // 4
        return cls(t, y[:n], y[2 * n:3 * n], y[n:2 * n], y[3 * n:])

    @classmethod
    def from_lightcone(cls, t, qp, vp, qm, vm):
        qp, vp, qm, vm = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (qp, vp, qm, vm))
        return cls(t, qp + qm, vp + vm, qp - qm, vp - vm)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.as_vector())) and np.isfinite(self.t))


@dataclass
class LightConeState:
    t: float
    qp: np.ndarray
    vp: np.ndarray
    qm: np.ndarray
    vm: np.ndarray


@dataclass
class EomSolve:
    a1: np.ndarray
    a2: np.ndarray
    mass_matrix_det: float
    condition_estimate: float
    mass_matrix: np.ndarray = field(repr=False, default=None)

    @property
    def A(self):
        return np.concatenate([self.a1, self.a2])

    @property
    def aplus(self):
        return (self.a1 + self.a2) / 2

    @property
    def aminus(self):
        return (self.a1 - self.a2) / 2


# ------------------------------------------------------------------- operations


def assemble_lambda(spec):
    """Return ``L(q1, v1) - L(q2, v2) + K`` as a single expression."""
    L1 = _copy_of(spec.L, spec.n, "1")
    L2 = _copy_of(spec.L, spec.n, "2")
    return ex.add(ex.sub(L1, L2), spec.K)


def lambda_jet(spec, s):
    """Jet of the doubled Lagrangian over seeds (q1, q2, v1, v2, t)."""
    return ex.evaluate_jet(spec.lam, s.bindings(spec.params), spec.seeds)


def lambda_value(spec, s):
    return ex.evaluate(spec.lam, s.bindings(spec.params))


def _blocks(spec, jet):
    n2 = 2 * spec.n
    g, H = jet.grad, jet.hess
    return {
        "dQ": g[:n2],
        "dV": g[n2:2 * n2],
        "dt": g[2 * n2],
        "VV": H[n2:2 * n2, n2:2 * n2],
        "VQ": H[n2:2 * n2, :n2],
        "Vt": H[n2:2 * n2, 2 * n2],
    }


def mass_matrix(spec, s):
    """Velocity Hessian d2Lam/dV dV and its determinant."""
    b = _blocks(spec, lambda_jet(spec, s))
    M = b["VV"]
    return M, float(np.linalg.det(M))


def accelerations(spec, s):
    """Solve the Euler-Lagrange equations of the doubled Lagrangian for (a1, a2).

    Solves ``M A = dLam/dQ - d2Lam/dt dV - (d2Lam/dQ dV) V`` with ``M`` the
    velocity Hessian.  Raises :class:`NonRegularError` if
    ``|det M| < 1e-10 (1 + ||M||_inf)``.
    """
    b = _blocks(spec, lambda_jet(spec, s))
    M = b["VV"]
    rhs = b["dQ"] - b["Vt"] - b["VQ"] @ s.V
    det = float(np.linalg.det(M))
    norm = float(np.max(np.sum(np.abs(M), axis=1)))
    if not abs(det) >= REGULARITY_RTOL * (1.0 + norm):
        raise NonRegularError(f"doubled Lagrangian is not regular (det {det:.3e})", state=s)
    A = np.linalg.solve(M, rhs)
    cond = norm * float(np.max(np.sum(np.abs(np.linalg.inv(M)), axis=1)))
    n = spec.n
    return EomSolve(A[:n], A[n:], det, cond, M)


def _accel_vector(accel):
    if isinstance(accel, EomSolve):
        return accel.A
    if isinstance(accel, tuple):
        return np.concatenate([np.atleast_1d(accel[0]), np.atleast_1d(accel[1])])
    return np.asarray(accel, dtype=float)


def residual_eom(spec, s, accel):
    """``dLam/dQ - d/dt dLam/dV`` evaluated with the given accelerations."""
    b = _blocks(spec, lambda_jet(spec, s))
    A = _accel_vector(accel)
    return b["dQ"] - (b["Vt"] + b["VQ"] @ s.V + b["VV"] @ A)


def euler_lagrange_operator(expression, spec, s, accel):
    """(d/dQ - d/dt d/dV) applied to an arbitrary doubled-symbol expression."""
    jet = ex.evaluate_jet(expression, s.bindings(spec.params), spec.seeds)
    b = _blocks(spec, jet)
    A = _accel_vector(accel)
    return b["dQ"] - (b["Vt"] + b["VQ"] @ s.V + b["VV"] @ A)


def nonconservative_forces(spec, s, accel):
    """(F_K)_a = dK/dQ_a - d/dt dK/dV_a, returned as (fk1, fk2)."""
    F = euler_lagrange_operator(spec.K, spec, s, accel)
    n = spec.n
    return F[:n], F[n:]


def sector_euler_lagrange(spec, s, accel):
    """Euler-Lagrange expressions of L in each copy: (EL(L1), EL(L2))."""
    E1 = euler_lagrange_operator(spec._L1, spec, s, accel)
    E2 = euler_lagrange_operator(spec._L2, spec, s, accel)
    n = spec.n
    return E1[:n], E2[n:]


def to_lightcone(s):
    return LightConeState(s.t, s.qplus, s.vplus, s.qminus, s.vminus)


def from_lightcone(lc):
    return DoubledState.from_lightcone(lc.t, lc.qp, lc.vp, lc.qm, lc.vm)


def conservative_copy_accelerations(spec, q, v, t=0.0):
    """Accelerations of a single copy of L, used as the K = 0 reference."""
    n = spec.n
    env = dict(spec.params)
    env["t"] = t
    names_q = indexed("q", n)
    names_v = indexed("v", n)
    for i in range(n):
        env[names_q[i]] = float(q[i])
        env[names_v[i]] = float(v[i])
    jet = ex.evaluate_jet(spec.L, env, names_q + names_v + ["t"])
    g, H = jet.grad, jet.hess
    M = H[n:2 * n, n:2 * n]
    rhs = g[:n] - H[n:2 * n, 2 * n] - H[n:2 * n, :n] @ np.asarray(v, dtype=float)
    return np.linalg.solve(M, rhs)
