"""Scalar expression language.

Expressions describe Lagrangians, nonconservative potentials, observables and
symmetry transformations.  Text is parsed into an immutable AST whose leaves
are constants and symbols drawn from a declared :class:`SymbolTable`.  The AST
can be evaluated on floats or on :class:`~ncmech.jets.Jet2` values; every
derivative used elsewhere in the package comes from the latter.

Grammar (``^`` binds tighter than unary minus, and is right associative)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := base ('^' factor)?
    base   := number | symbol | func '(' expr ')' | '(' expr ')'
    func   := sin | cos | exp | log | sqrt | abs
    symbol := ident | ident '[' int ']'
"""

import re
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .errors import (
    AntisymmetryError,
    ExprSyntaxError,
    NcmechError,
    UnboundSymbolError,
    UnknownSymbolError,
)
from .jets import Jet2

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")

_UNARY_IMPL = {
    "neg": jets.neg,
    "sin": jets.sin,
    "cos": jets.cos,
    "exp": jets.exp,
    "log": jets.log,
    "sqrt": jets.sqrt,
    "abs": jets.fabs,
}

_BINARY_IMPL = {
    "+": jets.add,
    "-": jets.sub,
    "*": jets.mul,
    "/": jets.div,
    "^": jets.power,
}


# --------------------------------------------------------------------------- AST


class Expression:
    """Base class of AST nodes.  Nodes are immutable and compare structurally."""

    __slots__ = ()

    def symbols(self):
        """Set of symbol names appearing in the expression."""
        out = set()
        _collect_symbols(self, out)
        return out

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, eq=True)
class Const(Expression):
    value: float


@dataclass(frozen=True, eq=True)
class Sym(Expression):
    name: str


@dataclass(frozen=True, eq=True)
class Unary(Expression):
    op: str  # "neg" or one of FUNCTIONS
    arg: Expression


@dataclass(frozen=True, eq=True)
class Binary(Expression):
    op: str  # one of + - * / ^
    left: Expression
    right: Expression


def _collect_symbols(node, out):
    stack = [node]
    while stack:
        e = stack.pop()
        if isinstance(e, Sym):
            out.add(e.name)
        elif isinstance(e, Unary):
            stack.append(e.arg)
        elif isinstance(e, Binary):
            stack.append(e.left)
            stack.append(e.right)


def const(x):
    return Const(float(x))


def sym(name):
    return Sym(name)


def add(a, b):
    return Binary("+", a, b)


def sub(a, b):
    return Binary("-", a, b)


def mul(a, b):
    return Binary("*", a, b)


def div(a, b):
    return Binary("/", a, b)


def neg(a):
    return Unary("neg", a)


def substitute(e, mapping):
    """Replace symbols by expressions; purely syntactic, no simplification."""
    if isinstance(e, Sym):
        return mapping.get(e.name, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.arg, mapping))
    return Binary(e.op, substitute(e.left, mapping), substitute(e.right, mapping))


# ------------------------------------------------------------------ symbol table


class SymbolTable:
    """The set of names an expression may reference.

    Indexed symbols such as ``q1[2]`` are flattened into plain names when the
    table is declared.
    """

    def __init__(self, names=()):
        self._names = set()
        for name in names:
            self.add(name)

    def add(self, name):
        if name in FUNCTIONS:
            raise NcmechError(f"{name!r} is a reserved function name")
        self._names.add(name)

    def __contains__(self, name):
        return name in self._names

    def __iter__(self):
        return iter(sorted(self._names))

    def __len__(self):
        return len(self._names)

    def union(self, other):
        return SymbolTable(set(self) | set(other))

    @classmethod
    def single(cls, n, params=()):
        """Symbols of a conservative Lagrangian: t, q[i], v[i] and parameters."""
        names = ["t"] + indexed("q", n) + indexed("v", n)
        return cls(names + list(params))

    @classmethod
    def doubled(cls, n, params=()):
        """Symbols over both copies: t, q1[i], v1[i], q2[i], v2[i] and parameters."""
        names = ["t"]
        for base in ("q1", "v1", "q2", "v2"):
            names += indexed(base, n)
        return cls(names + list(params))

    @classmethod
    def phase(cls, n, params=()):
        """Phase-space symbols: t, q1[i], p1[i], q2[i], p2[i] and parameters."""
        names = ["t"]
        for base in ("q1", "p1", "q2", "p2"):
            names += indexed(base, n)
        return cls(names + list(params))

    @classmethod
    def lightcone(cls, n, params=()):
        names = ["t"]
        for base in ("qp", "vp", "qm", "vm"):
            names += indexed(base, n)
        if n == 1:
            names += ["q_plus", "v_plus", "q_minus", "v_minus"]
        return cls(names + list(params))


def indexed(base, n):
    return [f"{base}[{i}]" for i in range(n)]


# ----------------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()\[\]])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, symbols):
        self.tokens = _tokenize(text)
        self.i = 0
        self.symbols = symbols

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.next()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            e = Binary(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.next()[1]
            e = Binary(op, e, self.factor())
        return e

    def factor(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.next()
            return Unary("neg", self.factor())
        return self.power()

    def power(self):
        base = self.base()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.next()
            return Binary("^", base, self.factor())
        return base

    def base(self):
        kind, text, pos = self.next()
        if kind == "number":
            return Const(float(text))
        if kind == "ident":
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            name = text
            if self.peek()[1] == "[":
                self.next()
                k2, t2, p2 = self.next()
                if k2 != "number" or not t2.isdigit():
                    raise ExprSyntaxError("expected integer index", p2)
                self.expect("]")
                name = f"{text}[{int(t2)}]"
            if self.symbols is not None and name not in self.symbols:
                raise UnknownSymbolError(name, pos)
            return Sym(name)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", pos)


def parse(text, symbols=None):
    """Parse ``text`` into an :class:`Expression`.

    If ``symbols`` is given, every symbol must be declared in it, otherwise
    :class:`UnknownSymbolError` is raised.
    """
    return _Parser(text, symbols).parse()


def to_string(e):
    """Print an expression in a form that parses back to an equal AST."""
    if isinstance(e, Const):
        if e.value < 0:
            return f"(-{-e.value!r})"
        return repr(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{to_string(e.arg)})"
        return f"{e.op}({to_string(e.arg)})"
    return f"({to_string(e.left)} {e.op} {to_string(e.right)})"


# -------------------------------------------------------------------- evaluation


def _compile(e):
    """Turn the AST into nested closures over an environment dict."""
    if isinstance(e, Const):
        v = e.value
        return lambda env: v
    if isinstance(e, Sym):
        name = e.name

        def lookup(env):
            try:
                return env[name]
            except KeyError:
                raise UnboundSymbolError(name) from None

        return lookup
    if isinstance(e, Unary):
        f = _UNARY_IMPL[e.op]
        inner = compiled(e.arg)
        return lambda env: f(inner(env))
    f = _BINARY_IMPL[e.op]
    left = compiled(e.left)
    right = compiled(e.right)
    return lambda env: f(left(env), right(env))


def compiled(e):
    fn = getattr(e, "_fn", None)
    if fn is None:
        fn = _compile(e)
        object.__setattr__(e, "_fn", fn)
    return fn


def evaluate(e, bindings):
    """Evaluate on 64-bit floats."""
    return float(compiled(e)(bindings))


def evaluate_jet(e, bindings, seeds):
    """Evaluate ``e`` as a :class:`Jet2` with respect to ``seeds`` (ordered names)."""
    k = len(seeds)
    env = dict(bindings)
    for i, name in enumerate(seeds):
        if name not in env:
            raise UnboundSymbolError(name)
        env[name] = Jet2.variable(env[name], i, k)
    return jets.lift(compiled(e)(env), k)


# ------------------------------------------------------------------ antisymmetry


@dataclass
class AntisymmetryReport:
    passed: bool
    max_residual: float
    boundary_passed: bool
    boundary_max_residual: float
    counterexample: dict = field(default=None)

    def __bool__(self):
        return self.passed and self.boundary_passed


def swap_copies(bindings, n):
    """Interchange copy-1 and copy-2 coordinates and velocities."""
    out = dict(bindings)
    for i in range(n):
        for a, b in ((f"q1[{i}]", f"q2[{i}]"), (f"v1[{i}]", f"v2[{i}]")):
            out[a], out[b] = bindings[b], bindings[a]
    return out


def check_antisymmetry(K, n, trials=64, tol=1e-9, rng_seed=0, params=None):
    """Sample K(x1, x2) + K(x2, x1) at random points in [-2, 2]^(4n+1).

    Also checks that dK/dv1 + dK/dv2 vanishes where the two copies coincide.
    Evaluation errors are re-raised with the offending point attached.
    """
    params = dict(params or {})
    rng = np.random.default_rng(rng_seed)
    names = SymbolTable.doubled(n)
    coords = [s for s in names if s != "t"]
    v1 = indexed("v1", n)
    v2 = indexed("v2", n)
    worst, worst_point = 0.0, None
    bworst = 0.0
    for _ in range(trials):
        x = rng.uniform(-2.0, 2.0, size=4 * n + 1)
        point = dict(zip(["t"] + coords, x.tolist()))
        point.update(params)
        try:
            r = abs(evaluate(K, point) + evaluate(K, swap_copies(point, n)))
        except NcmechError as exc:
            raise _attach(exc, point)
        if r > worst or worst_point is None:
            worst, worst_point = r, point
        diag = dict(point)
        for i in range(n):
            diag[f"q2[{i}]"] = diag[f"q1[{i}]"]
            diag[f"v2[{i}]"] = diag[f"v1[{i}]"]
        try:
            jet = evaluate_jet(K, diag, v1 + v2)
        except NcmechError as exc:
            raise _attach(exc, diag)
        bworst = max(bworst, float(np.max(np.abs(jet.grad[:n] + jet.grad[n:]))) if n else 0.0)
    passed = worst <= tol
    return AntisymmetryReport(
        passed=passed,
        max_residual=worst,
        boundary_passed=bworst <= tol,
        boundary_max_residual=bworst,
        counterexample=None if passed else worst_point,
    )


def _attach(exc, point):
    exc.point = point
    return exc


def require_antisymmetric(K, n, params=None, trials=64, tol=1e-9, rng_seed=0):
    report = check_antisymmetry(K, n, trials=trials, tol=tol, rng_seed=rng_seed, params=params)
    if not report.passed:
        raise AntisymmetryError(
            f"K is not antisymmetric under 1<->2: residual {report.max_residual:.3e} "
            f"at {report.counterexample}"
        )
    return report


# ------------------------------------------------------------- light-cone input


def lightcone_to_doubled(e, n):
    """Rewrite light-cone symbols (qp, qm, vp, vm) into copy-1/copy-2 symbols.

    Uses q+ = (q1 + q2)/2 and q- = (q1 - q2)/2 and likewise for velocities.
    For ``n == 1`` the aliases ``q_plus``, ``q_minus``, ``v_plus``, ``v_minus``
    are accepted as well.
    """
    half = Const(2.0)
    mapping = {}
    for i in range(n):
        for lc, a, b in (("q", "q1", "q2"), ("v", "v1", "v2")):
            s1, s2 = Sym(f"{a}[{i}]"), Sym(f"{b}[{i}]")
            mapping[f"{lc}p[{i}]"] = div(add(s1, s2), half)
            mapping[f"{lc}m[{i}]"] = div(sub(s1, s2), half)
    if n == 1:
        mapping["q_plus"] = mapping["qp[0]"]
        mapping["q_minus"] = mapping["qm[0]"]
        mapping["v_plus"] = mapping["vp[0]"]
        mapping["v_minus"] = mapping["vm[0]"]
    return substitute(e, mapping)
