"""Time integration of the doubled equations of motion.

The first-order system is ``y = (q1, q2, v1, v2)``, ``y' = (v1, v2, a1, a2)``
with accelerations from :func:`ncmech.lagrangian.accelerations`.  Two
integrators are provided: classical fixed-step RK4 and an adaptive
Dormand-Prince 5(4) pair with PI step-size control and its fourth-order
continuous extension for sampling onto a uniform output grid.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import NcmechError, NonRegularError, StepUnderflowError
from .lagrangian import DoubledState, accelerations

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# continuous extension, y(t + th) = y + h K^T P [th, th^2, th^3, th^4]
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# PI controller exponents
ALPHA = 0.17
BETA = 0.04


def make_rhs(spec):
    n = spec.n

    def rhs(t, y):
        s = DoubledState.from_vector(t, y)
        try:
            acc = accelerations(spec, s)
        except NonRegularError as exc:
            exc.state = s
            raise
        return np.concatenate([y[2 * n:], acc.a1, acc.a2])

    return rhs


# ------------------------------------------------------------------------ RK4


def step_rk4(spec, s, h):
    """One classical fourth-order Runge-Kutta step of size ``h``."""
    if h == 0.0:
        return DoubledState(s.t, s.q1.copy(), s.v1.copy(), s.q2.copy(), s.v2.copy())
    rhs = make_rhs(spec)
    y = s.as_vector()
    t = s.t
    k1 = rhs(t, y)
    k2 = rhs(t + h / 2, y + h / 2 * k1)
    k3 = rhs(t + h / 2, y + h / 2 * k2)
    k4 = rhs(t + h, y + h * k3)
    return DoubledState.from_vector(t + h, y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4))


def integrate_rk4(spec, s0, t_end, h):
    """Fixed-step RK4 from ``s0.t`` to ``t_end``; the last step is shortened to land on it."""
    states = [s0]
    s = s0
    nsteps = int(np.ceil((t_end - s0.t) / h - 1e-9))
    for k in range(nsteps):
        step = min(h, t_end - s.t) if k == nsteps - 1 else h
        s = step_rk4(spec, s, step)
        states.append(s)
    times = np.array([x.t for x in states])
    Y = np.array([x.as_vector() for x in states])
    return TrajectoryRecord(spec, times, Y, {"method": "rk4", "h": h, "steps": nsteps})


# -------------------------------------------------------------- trajectories


@dataclass
class TrajectoryRecord:
    """Uniformly sampled trajectory.

    ``Y`` holds one row ``(q1, q2, v1, v2)`` per sample time.
    """

    spec: object
    times: np.ndarray
    Y: np.ndarray
    meta: dict = field(default_factory=dict)
    charges: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.times) != len(self.Y):
            raise NcmechError("sample count mismatch")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise NcmechError("sample times must be strictly increasing")
        self._phase = None

    def __len__(self):
        return len(self.times)

    @property
    def n(self):
        return self.Y.shape[1] // 4

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def state(self, i):
        return DoubledState.from_vector(self.times[i], self.Y[i])

    @property
    def states(self):
        return [self.state(i) for i in range(len(self))]

    @property
    def phase_states(self):
        from .hamiltonian import momenta

        if self._phase is None:
            self._phase = [momenta(self.spec, s) for s in self.states]
        return self._phase

    def _block(self, k):
        n = self.n
        return self.Y[:, k * n:(k + 1) * n]

    @property
    def q1(self):
        return self._block(0)

    @property
    def q2(self):
        return self._block(1)

    @property
    def v1(self):
        return self._block(2)

    @property
    def v2(self):
        return self._block(3)

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

    def is_finite(self):
        return bool(np.all(np.isfinite(self.Y)))


# ------------------------------------------------------------------ adaptive


def _error_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(rhs, t0, y0, f0, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def integrate_adaptive(spec, s0, t_end, rel_tol=1e-10, abs_tol=1e-12, sample_dt=0.01, monitor=None):
    """Integrate with the Dormand-Prince 5(4) pair and sample on a uniform grid.

    Output times are ``s0.t + k * sample_dt`` up to ``t_end``.  ``monitor``, if
    given, is called as ``monitor(t, y)`` after every accepted step.  Raises
    :class:`StepUnderflowError` when the step falls below ``1e-14`` times the
    span, and propagates :class:`NonRegularError`.
    """
    t0 = s0.t
    if not t_end > t0:
        raise NcmechError("t_end must exceed the initial time")
    if not (1e-14 <= rel_tol <= 1e-2 and 1e-14 <= abs_tol <= 1e-2):
        raise NcmechError("tolerances must lie in [1e-14, 1e-2]")
    if not sample_dt > 0:
        raise NcmechError("sample_dt must be positive")
    span = t_end - t0
    nsamp = int(np.floor(span / sample_dt + 1e-9))
    times = t0 + sample_dt * np.arange(nsamp + 1)
    rhs = make_rhs(spec)

    y = s0.as_vector()
    t = t0
    f = rhs(t, y)
    out = np.empty((nsamp + 1, y.shape[0]))
    out[0] = y
    next_i = 1
    h = _initial_step(rhs, t, y, f, rel_tol, abs_tol, span)
    h_min = 1e-14 * span
    err_prev = 1.0
    accepted = rejected = 0
    K = np.empty((7, y.shape[0]))
    while t < t_end:
        if h < h_min:
            raise StepUnderflowError(t, h)
        h = min(h, t_end - t)
        K[0] = f
        for i in range(1, 6):
            dy = np.dot(np.array(_A[i]), K[:i]) * h
            K[i] = rhs(t + _C[i] * h, y + dy)
        y_new = y + h * np.dot(_B, K[:6])
        t_new = t + h
        f_new = rhs(t_new, y_new)
        K[6] = f_new
        err = _error_norm(h * np.dot(_E, K), y, y_new, rel_tol, abs_tol)
        if not np.isfinite(err):
            err = np.inf
        if err <= 1.0:
            Q = K.T @ _P
            while next_i <= nsamp and times[next_i] <= t_new + 1e-12 * span:
                x = (times[next_i] - t) / h
                p = np.cumprod(np.full(4, x))
                out[next_i] = y + h * (Q @ p)
                next_i += 1
            factor = MAX_FACTOR if err == 0.0 else SAFETY * err ** -ALPHA * err_prev ** BETA
            factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            t, y, f = t_new, y_new, f_new
            accepted += 1
            if monitor is not None:
                monitor(t, y)
            h = h * factor
        else:
            rejected += 1
            factor = MIN_FACTOR if not np.isfinite(err) else max(MIN_FACTOR, SAFETY * err ** -ALPHA)
            h = h * min(1.0, factor)
    meta = {
        "method": "dopri5",
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "sample_dt": sample_dt,
        "accepted_steps": accepted,
        "rejected_steps": rejected,
    }
    return TrajectoryRecord(spec, times, out, meta)


# ---------------------------------------------------------------- growth fits


class GrowthFit(NamedTuple):
    rate: float
    r2: float


def growth_rate_fit(t, x):
    """Least-squares slope of log|x| against t, with the coefficient of determination."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if len(t) < 2:
        raise NcmechError("need at least two samples")
    if np.any(x == 0.0) or (np.any(x > 0) and np.any(x < 0)):
        raise NcmechError("window contains a zero crossing")
    y = np.log(np.abs(x))
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return GrowthFit(float(slope), r2)


def envelope_peaks(t, x):
    """Times and values of the local maxima of |x|, refined by a parabola through
    each sampled maximum and its neighbours."""
    t = np.asarray(t, dtype=float)
    a = np.abs(np.asarray(x, dtype=float))
    idx = np.nonzero((a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:]))[0] + 1
    pt, pv = [], []
    for i in idx:
        y0, y1, y2 = a[i - 1], a[i], a[i + 1]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        pt.append(t[i] + shift * (t[i + 1] - t[i]))
        pv.append(y1 - 0.25 * (y0 - y2) * shift)
    return np.array(pt), np.array(pv)


def envelope_rate_fit(t, x):
    """Growth rate of the oscillation envelope of ``x`` from its peak values."""
    pt, pv = envelope_peaks(t, x)
    if len(pt) < 3:
        raise NcmechError("fewer than three envelope peaks in window")
    return growth_rate_fit(pt, pv)


def window(times, values, t_lo, t_hi):
    mask = (times >= t_lo - 1e-12) & (times <= t_hi + 1e-12)
    return times[mask], values[mask]
