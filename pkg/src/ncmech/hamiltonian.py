"""Legendre transform, Hamiltonian, and the generalized Poisson bracket.

Momenta follow the sign convention ``p1 = dLam/dv1`` and ``p2 = -dLam/dv2``,
which makes each copy look canonical on its own.  The bracket carries the
matching sign flip on the second copy::

    {f, g} = f_q1 g_p1 - f_p1 g_q1 - (f_q2 g_p2 - f_p2 g_q2)

Observables expose ``value(ph)`` and ``gradient(ph)``; the gradient is a
``(4, n)`` array ordered as (d/dq1, d/dp1, d/dq2, d/dp2).
"""

from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .errors import NoConvergenceError, NonRegularError
from .expr import SymbolTable, indexed
from .lagrangian import REGULARITY_RTOL, DoubledState, lambda_jet, lambda_value

NEWTON_MAX_ITER = 50
NEWTON_RTOL = 1e-12


@dataclass
class PhaseState:
    t: float
    q1: np.ndarray
    p1: np.ndarray
    q2: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        self.t = float(self.t)
        for name in ("q1", "p1", "q2", "p2"):
            setattr(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))

    @property
    def n(self):
        return self.q1.shape[0]

    @property
    def qplus(self):
        return (self.q1 + self.q2) / 2

    @property
    def qminus(self):
        return (self.q1 - self.q2) / 2

    @property
    def pplus(self):
        return (self.p1 + self.p2) / 2

    @property
    def pminus(self):
        return (self.p1 - self.p2) / 2

    def as_array(self):
        return np.stack([self.q1, self.p1, self.q2, self.p2])

    @classmethod
    def from_array(cls, t, arr):
        return cls(t, arr[0], arr[1], arr[2], arr[3])

    @classmethod
    def from_lightcone(cls, t, qp, pp, qm, pm):
        qp, pp, qm, pm = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (qp, pp, qm, pm))
        return cls(t, qp + qm, pp + pm, qp - qm, pp - pm)

    def bindings(self, params=None):
        env = dict(params or {})
        env["t"] = self.t
        for i in range(self.n):
            env[f"q1[{i}]"] = float(self.q1[i])
            env[f"p1[{i}]"] = float(self.p1[i])
            env[f"q2[{i}]"] = float(self.q2[i])
            env[f"p2[{i}]"] = float(self.p2[i])
        return env


def phase_seeds(n):
    return indexed("q1", n) + indexed("p1", n) + indexed("q2", n) + indexed("p2", n)


# ------------------------------------------------------------------ observables


class Observable:
    name = "observable"

    def value(self, ph):
        raise NotImplementedError

    def gradient(self, ph):
        raise NotImplementedError


class ExprObservable(Observable):
    """An expression over (t, q1[i], p1[i], q2[i], p2[i]) and parameters.

    Derivatives come from second-order jets.
    """

    def __init__(self, expression, n, params=None, name=None):
        self.n = n
        self.params = dict(params or {})
        if isinstance(expression, str):
            expression = ex.parse(expression, SymbolTable.phase(n, self.params))
        self.expression = expression
        self.name = name or ex.to_string(expression)

    def value(self, ph):
        return ex.evaluate(self.expression, ph.bindings(self.params))

    def gradient(self, ph):
        jet = ex.evaluate_jet(self.expression, ph.bindings(self.params), phase_seeds(self.n))
        return jet.grad.reshape(4, self.n)

    def __mul__(self, other):
        return ExprObservable(ex.mul(self.expression, other.expression), self.n, {**self.params, **other.params})

    def __add__(self, other):
        return ExprObservable(ex.add(self.expression, other.expression), self.n, {**self.params, **other.params})


class FunctionObservable(Observable):
    """An observable with hand-written value and gradient functions."""

    def __init__(self, name, value_fn, grad_fn):
        self.name = name
        self._value = value_fn
        self._grad = grad_fn

    def value(self, ph):
        return float(self._value(ph))

    def gradient(self, ph):
        return np.asarray(self._grad(ph), dtype=float)


class HamiltonianObservable(Observable):
    """H(q, p) of a system, computed through the Lagrangian.

    The gradient uses the Legendre identities dH/dp1 = v1, dH/dp2 = -v2 and
    dH/dQ = -dLam/dQ at fixed velocities.
    """

    name = "H"

    def __init__(self, spec):
        self.spec = spec

    def value(self, ph):
        return hamiltonian_value(self.spec, ph)

    def gradient(self, ph):
        s = velocities_from_momenta(self.spec, ph)
        jet = ex.evaluate_jet(self.spec.lam, s.bindings(self.spec.params), self.spec.q_names)
        n = self.spec.n
        dQ = -jet.grad
        return np.stack([dQ[:n], s.v1, dQ[n:], -s.v2])


class LagrangianObservable(Observable):
    """A function F(t, Q, V) pulled back to phase space through the Legendre map.

    ``fn(spec, s)`` returns ``(value, dF/dQ, dF/dV)`` at the doubled state ``s``.
    The phase-space gradient follows from implicit differentiation of the
    momentum map.
    """

    def __init__(self, spec, fn, name="F"):
        self.spec = spec
        self.fn = fn
        self.name = name

    def value(self, ph):
        s = velocities_from_momenta(self.spec, ph)
        return float(self.fn(self.spec, s)[0])

    def gradient(self, ph):
        spec = self.spec
        n = spec.n
        s = velocities_from_momenta(spec, ph)
        _, dFdQ, dFdV = self.fn(spec, s)
        jet = lambda_jet(spec, s)
        n2 = 2 * n
        H = jet.hess
        sign = np.concatenate([np.ones(n), -np.ones(n)])
        # P(Q, V) = S dLam/dV, S = diag(1, -1)
        dPdV = sign[:, None] * H[n2:2 * n2, n2:2 * n2]
        dPdQ = sign[:, None] * H[n2:2 * n2, :n2]
        inv = np.linalg.inv(dPdV)
        dVdP = inv
        dVdQ = -inv @ dPdQ
        gQ = dFdQ + dFdV @ dVdQ
        gP = dFdV @ dVdP
        return np.stack([gQ[:n], gP[:n], gQ[n:], gP[n:]])


# -------------------------------------------------------------------- Legendre


def _momentum_map(spec, s):
    """(P, dP/dV) for the current doubled state."""
    n = spec.n
    jet = ex.evaluate_jet(spec.lam, s.bindings(spec.params), spec.v_names)
    sign = np.concatenate([np.ones(n), -np.ones(n)])
    return sign * jet.grad, sign[:, None] * jet.hess


def momenta(spec, s):
    """Canonical momenta ``p1 = dLam/dv1`` and ``p2 = -dLam/dv2``."""
    P, _ = _momentum_map(spec, s)
    n = spec.n
    return PhaseState(s.t, s.q1, P[:n], s.q2, P[n:])


def kinetic_guess(spec, ph):
    """Velocity guess v = M_L^{-1} p with M_L the velocity Hessian of L at v = 0."""
    n = spec.n
    guesses = []
    for q, p in ((ph.q1, ph.p1), (ph.q2, ph.p2)):
        env = dict(spec.params)
        env["t"] = ph.t
        for i in range(n):
            env[f"q[{i}]"] = float(q[i])
            env[f"v[{i}]"] = 0.0
        jet = ex.evaluate_jet(spec.L, env, indexed("v", n))
        ML = jet.hess
        if abs(np.linalg.det(ML)) < REGULARITY_RTOL * (1.0 + np.max(np.abs(ML))):
            raise NonRegularError("kinetic Hessian of L is singular")
        guesses.append(np.linalg.solve(ML, p))
    return np.concatenate(guesses)


def velocities_from_momenta(spec, ph, guess=None):
    """Invert the momentum map by Newton iteration.

    Converges when ``||p - p(q, v)||_inf <= 1e-12 (1 + ||p||_inf)``.  Raises
    :class:`NonRegularError` on a singular Jacobian and
    :class:`NoConvergenceError` after 50 iterations.
    """
    n = spec.n
    target = np.concatenate([ph.p1, ph.p2])
    V = kinetic_guess(spec, ph) if guess is None else np.asarray(guess, dtype=float).copy()
    tol = NEWTON_RTOL * (1.0 + np.max(np.abs(target)))
    resid = np.inf
    for _ in range(NEWTON_MAX_ITER + 1):
        s = DoubledState(ph.t, ph.q1, V[:n], ph.q2, V[n:])
        P, J = _momentum_map(spec, s)
        r = target - P
        resid = float(np.max(np.abs(r)))
        if resid <= tol:
            return s
        norm = float(np.max(np.sum(np.abs(J), axis=1)))
        if not abs(np.linalg.det(J)) >= REGULARITY_RTOL * (1.0 + norm):
            raise NonRegularError("momentum map Jacobian is singular", state=s)
        V = V + np.linalg.solve(J, r)
    raise NoConvergenceError("momentum inversion did not converge", resid)


def hamiltonian_value(spec, ph):
    """``H = v1.p1 - v2.p2 - Lam`` with velocities recovered from the momenta."""
    s = velocities_from_momenta(spec, ph)
    return float(s.v1 @ ph.p1 - s.v2 @ ph.p2 - lambda_value(spec, s))


def hamiltonian_from_state(spec, s):
    """H evaluated directly on a doubled state (no inversion needed)."""
    ph = momenta(spec, s)
    return float(s.v1 @ ph.p1 - s.v2 @ ph.p2 - lambda_value(spec, s))


# --------------------------------------------------------------------- brackets


def as_observable(spec, f, n=None):
    if isinstance(f, Observable):
        return f
    if n is None:
        n = spec.n
    params = spec.params if spec is not None else {}
    return ExprObservable(f, n, params)


def bracket_from_gradients(gf, gg):
    return float(
        gf[0] @ gg[1] - gf[1] @ gg[0] - (gf[2] @ gg[3] - gf[3] @ gg[2])
    )


def poisson_bracket(spec, f, g, ph):
    """Generalized Poisson bracket {f, g} at the phase point ``ph``."""
    f = as_observable(spec, f, ph.n)
    g = as_observable(spec, g, ph.n)
    return bracket_from_gradients(f.gradient(ph), g.gradient(ph))


def fd_gradient(obs, ph, h=1e-5):
    """Central-difference gradient of an observable (independent of jets)."""
    base = ph.as_array()
    grad = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        step = h * (1.0 + abs(base[idx]))
        up = base.copy()
        dn = base.copy()
        up[idx] += step
        dn[idx] -= step
        fu = obs.value(PhaseState.from_array(ph.t, up))
        fd = obs.value(PhaseState.from_array(ph.t, dn))
        grad[idx] = (fu - fd) / (up[idx] - dn[idx])
    return grad


def fd_poisson_bracket(spec, f, g, ph, h=1e-5):
    f = as_observable(spec, f, ph.n)
    g = as_observable(spec, g, ph.n)
    return bracket_from_gradients(fd_gradient(f, ph, h), fd_gradient(g, ph, h))


def lightcone_observable(kind, i=0, n=1):
    """q+, q-, p+ or p- of component ``i`` as an expression observable."""
    a, b, op = {
        "qplus": ("q1", "q2", "+"),
        "qminus": ("q1", "q2", "-"),
        "pplus": ("p1", "p2", "+"),
        "pminus": ("p1", "p2", "-"),
    }[kind]
    return ExprObservable(f"({a}[{i}] {op} {b}[{i}]) / 2", n, name=f"{kind}[{i}]")


# ------------------------------------------------------------------- flow check


@dataclass
class FlowReport:
    passed: bool
    max_discrepancy: float
    discrepancies: dict = field(default_factory=dict)


def _fd4(fun, x, h):
    return (-fun(x + 2 * h) + 8 * fun(x + h) - 8 * fun(x - h) + fun(x - 2 * h)) / (12 * h)


def hamiltonian_flow_check(spec, ph, tol=1e-8, h=1e-4):
    """Compare Hamilton's equations against the Lagrangian flow at ``ph``.

    dH/dq and dH/dp come from fourth-order central differences of
    :func:`hamiltonian_value`; the Lagrangian side supplies the velocities and
    the momentum rates d/dt (dLam/dV) along the Euler-Lagrange solution.
    """
    from .lagrangian import accelerations

    n = spec.n
    s = velocities_from_momenta(spec, ph)
    acc = accelerations(spec, s)
    jet = lambda_jet(spec, s)
    n2 = 2 * n
    H = jet.hess
    dV = H[n2:2 * n2, :n2] @ s.V + H[n2:2 * n2, n2:2 * n2] @ acc.A + H[n2:2 * n2, 2 * n2]
    pdot = np.concatenate([dV[:n], -dV[n:]])

    base = ph.as_array()
    dH = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        step = h * (1.0 + abs(base[idx]))

        def f(x, idx=idx):
            arr = base.copy()
            arr[idx] = x
            return hamiltonian_value(spec, PhaseState.from_array(ph.t, arr))

        dH[idx] = _fd4(f, base[idx], step)

    checks = {
        "qdot1": np.max(np.abs(s.v1 - dH[1])),
        "qdot2": np.max(np.abs(s.v2 + dH[3])),
        "pdot1": np.max(np.abs(pdot[:n] + dH[0])),
        "pdot2": np.max(np.abs(pdot[n:] - dH[2])),
    }
    worst = float(max(checks.values()))
    return FlowReport(worst <= tol, worst, {k: float(v) for k, v in checks.items()})
