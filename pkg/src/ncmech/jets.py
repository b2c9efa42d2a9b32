"""Second-order forward-mode jets.

A ``Jet2`` carries a value together with its gradient and Hessian with respect
to a fixed, ordered set of seed variables.  Plain floats act as jets with zero
derivatives, and every operation below accepts either, so subtrees that do not
depend on any seed stay cheap scalars.
"""

import math

import numpy as np

from .errors import DomainError


class Jet2:
    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def variable(cls, value, index, k):
        grad = np.zeros(k)
        grad[index] = 1.0
        return cls(value, grad, np.zeros((k, k)))

    @classmethod
    def constant(cls, value, k):
        return cls(value, np.zeros(k), np.zeros((k, k)))

    @property
    def k(self):
        return self.grad.shape[0]

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, other):
        return power(self, other)


def lift(x, k):
    """Return ``x`` as a Jet2 over ``k`` seeds."""
    if isinstance(x, Jet2):
        return x
    return Jet2.constant(x, k)


def value_of(x):
    return x.value if isinstance(x, Jet2) else float(x)


def add(a, b):
    if isinstance(a, Jet2):
        if isinstance(b, Jet2):
            return Jet2(a.value + b.value, a.grad + b.grad, a.hess + b.hess)
        return Jet2(a.value + b, a.grad, a.hess)
    if isinstance(b, Jet2):
        return Jet2(a + b.value, b.grad, b.hess)
    return a + b


def sub(a, b):
    if isinstance(a, Jet2):
        if isinstance(b, Jet2):
            return Jet2(a.value - b.value, a.grad - b.grad, a.hess - b.hess)
        return Jet2(a.value - b, a.grad, a.hess)
    if isinstance(b, Jet2):
        return Jet2(a - b.value, -b.grad, -b.hess)
    return a - b


def neg(a):
    if isinstance(a, Jet2):
        return Jet2(-a.value, -a.grad, -a.hess)
    return -a


def mul(a, b):
    if isinstance(a, Jet2):
        if isinstance(b, Jet2):
            cross = np.outer(a.grad, b.grad)
            return Jet2(
                a.value * b.value,
                a.value * b.grad + b.value * a.grad,
                a.value * b.hess + b.value * a.hess + cross + cross.T,
            )
        return Jet2(a.value * b, a.grad * b, a.hess * b)
    if isinstance(b, Jet2):
        return Jet2(a * b.value, a * b.grad, a * b.hess)
    return a * b


def _chain(u, f0, f1, f2):
    """Compose a scalar function (value f0, derivatives f1, f2) with jet ``u``."""
    return Jet2(f0, f1 * u.grad, f1 * u.hess + f2 * np.outer(u.grad, u.grad))


def reciprocal(u):
    x = value_of(u)
    if x == 0.0:
        raise DomainError("division by zero")
    if not isinstance(u, Jet2):
        return 1.0 / x
    inv = 1.0 / x
    return _chain(u, inv, -inv * inv, 2.0 * inv * inv * inv)


def div(a, b):
    if not isinstance(b, Jet2):
        if b == 0.0:
            raise DomainError("division by zero")
        if isinstance(a, Jet2):
            return Jet2(a.value / b, a.grad / b, a.hess / b)
        return a / b
    if not isinstance(a, Jet2):
        return mul(a, reciprocal(b))
    return mul(a, reciprocal(b))


def sin(u):
    if not isinstance(u, Jet2):
        return math.sin(u)
    s, c = math.sin(u.value), math.cos(u.value)
    return _chain(u, s, c, -s)


def cos(u):
    if not isinstance(u, Jet2):
        return math.cos(u)
    s, c = math.sin(u.value), math.cos(u.value)
    return _chain(u, c, -s, -c)


def exp(u):
    x = value_of(u)
    try:
        e = math.exp(x)
    except OverflowError as exc:
        raise DomainError(f"exp overflow at {x!r}") from exc
    if not isinstance(u, Jet2):
        return e
    return _chain(u, e, e, e)


def log(u):
    x = value_of(u)
    if x <= 0.0:
        raise DomainError(f"log of non-positive argument {x!r}")
    if not isinstance(u, Jet2):
        return math.log(x)
    return _chain(u, math.log(x), 1.0 / x, -1.0 / (x * x))


def sqrt(u):
    x = value_of(u)
    if x < 0.0:
        raise DomainError(f"sqrt of negative argument {x!r}")
    if not isinstance(u, Jet2):
        return math.sqrt(x)
    if x == 0.0:
        raise DomainError("sqrt is not differentiable at 0")
    r = math.sqrt(x)
    return _chain(u, r, 0.5 / r, -0.25 / (r * x))


def fabs(u):
    # d|x|/dx and d2|x|/dx2 are taken as 0 at x == 0
    if not isinstance(u, Jet2):
        return abs(u)
    x = u.value
    if x > 0.0:
        return Jet2(x, u.grad, u.hess)
    if x < 0.0:
        return Jet2(-x, -u.grad, -u.hess)
    return Jet2(0.0, np.zeros_like(u.grad), np.zeros_like(u.hess))


def _real_pow(x, p):
    if x < 0.0 and not float(p).is_integer():
        raise DomainError(f"negative base {x!r} with non-integer exponent {p!r}")
    if x == 0.0 and p < 0:
        raise DomainError("division by zero in power")
    try:
        return math.pow(x, p)
    except OverflowError as exc:
        raise DomainError(f"overflow in {x!r}^{p!r}") from exc


def power(a, b):
    if isinstance(b, Jet2):
        # a^b = exp(b log a) requires a > 0
        return exp(mul(b, log(a)))
    p = float(b)
    if not isinstance(a, Jet2):
        return _real_pow(float(a), p)
    x = a.value
    if p == 0.0:
        return Jet2(1.0, np.zeros_like(a.grad), np.zeros_like(a.hess))
    if p == 1.0:
        return a
    if p == 2.0:
        return mul(a, a)
    f0 = _real_pow(x, p)
    if x == 0.0 and p < 2.0:
        raise DomainError(f"power {p!r} is not twice differentiable at 0")
    f1 = p * _real_pow(x, p - 1.0)
    f2 = p * (p - 1.0) * _real_pow(x, p - 2.0) if p != 1.0 else 0.0
    return _chain(a, f0, f1, f2)
