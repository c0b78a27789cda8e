"""Truncated power series over F_p, Hensel lifting, and bounded witness
search for existential ring sentences over F_p((t)).

Polynomials in t are tuples of coefficients, lowest degree first, trimmed
of trailing zeros. The uniformizer t is the constant ``varpi``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .fragments import NotExistential, classify
from .logic import (
    And, Bot, Eq, Exists, Formula, Not, Or, Sentence, Top, Var, LogicError, Implies,
    Iff,
)
from .models import is_prime, NotAField


class NonSimpleRoot(ValueError):
    pass


class NotARoot(ValueError):
    pass


# --------------------------------------------------------------------------
# F_p[t]


def ptrim(a: Sequence[int], p: int) -> tuple:
    out = [c % p for c in a]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def padd(a, b, p):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], p)


def pneg(a, p):
    return ptrim([-c for c in a], p)


def psub(a, b, p):
    return padd(a, pneg(b, p), p)


def pmul(a, b, p, limit: int | None = None):
    if not a or not b:
        return ()
    n = len(a) + len(b) - 1
    if limit is not None:
        n = min(n, limit)
    out = [0] * n
    for i, x in enumerate(a):
        if x == 0 or i >= n:
            continue
        for j, y in enumerate(b):
            if i + j >= n:
                break
            out[i + j] += x * y
    return ptrim(out, p)


def pformat(a: Sequence[int], var: str = "t") -> str:
    if not a:
        return "0"
    parts = []
    for i, c in enumerate(a):
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            parts.append(str(c))
        else:
            parts.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(parts)


# --------------------------------------------------------------------------
# Truncated series


@dataclass(frozen=True)
class Series:
    """An element of F_p[[t]]/(t^N)."""

    p: int
    N: int
    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", ptrim(list(self.coeffs)[: self.N], self.p))

    @classmethod
    def const(cls, p, N, c):
        return cls(p, N, (c,))

    @classmethod
    def t(cls, p, N):
        return cls(p, N, (0, 1))

    def coefficient(self, i: int) -> int:
        return self.coeffs[i] if i < len(self.coeffs) else 0

    def _check(self, other):
        if isinstance(other, int):
            return Series.const(self.p, self.N, other)
        if other.p != self.p:
            raise ValueError("characteristic mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        return Series(self.p, min(self.N, other.N), padd(self.coeffs, other.coeffs, self.p))

    __radd__ = __add__

    def __neg__(self):
        return Series(self.p, self.N, pneg(self.coeffs, self.p))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        n = min(self.N, other.N)
        return Series(self.p, n, pmul(self.coeffs, other.coeffs, self.p, limit=n))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Series.const(self.p, self.N, 1)
        for _ in range(k):
            out = out * self
        return out

    def valuation(self) -> int | None:
        """t-adic order; None for the zero series (order ≥ N)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def residue(self) -> int:
        return self.coefficient(0)

    def is_unit(self) -> bool:
        return self.residue() != 0

    def inverse(self) -> "Series":
        c0 = self.residue()
        if c0 == 0:
            raise ZeroDivisionError("not a unit mod t")
        inv0 = pow(c0, -1, self.p)
        out = [inv0]
        for k in range(1, self.N):
            acc = sum(self.coefficient(i) * out[k - i] for i in range(1, k + 1))
            out.append((-inv0 * acc) % self.p)
        return Series(self.p, self.N, out)

    def truncate(self, N: int) -> "Series":
        return Series(self.p, N, self.coeffs)

    def lift(self, N: int) -> "Series":
        return Series(self.p, N, self.coeffs)

    def __str__(self):
        return pformat(self.coeffs)


class TruncatedSeriesModel:
    """F_p[[t]]/(t^N) with t-adic valuation. Not a field: only products of
    series whose orders sum below N keep exact valuations."""

    def __init__(self, p: int, N: int):
        if not is_prime(p):
            raise NotAField(f"{p} is not prime")
        self.p, self.N = p, N

    def element(self, coeffs) -> Series:
        return Series(self.p, self.N, tuple(coeffs))

    @property
    def uniformizer(self) -> Series:
        return Series.t(self.p, self.N)

    def elements(self):
        for cs in itertools.product(range(self.p), repeat=self.N):
            yield Series(self.p, self.N, cs)

    def valuation(self, x: Series):
        v = x.valuation()
        return math.inf if v is None else v

    def residue(self, x: Series) -> int:
        return x.residue()


# --------------------------------------------------------------------------
# Hensel lifting


def _poly_x(f: Sequence[Sequence[int]], p: int, N: int) -> list[Series]:
    return [Series(p, N, tuple(c)) for c in f]


def eval_poly(f: Sequence[Series], a: Series) -> Series:
    """Horner evaluation of Σ f_i x^i at a."""
    acc = Series(a.p, a.N, ())
    for c in reversed(f):
        acc = acc * a + c.truncate(a.N)
    return acc


def derivative(f: Sequence[Series]) -> list[Series]:
    return [c * i for i, c in enumerate(f)][1:]


@dataclass(frozen=True)
class Lift:
    root: Series
    steps: int
    residue_root: int


def hensel_lift(f: Sequence[Sequence[int]], a0: int, N: int, p: int) -> Lift:
    """Lift a simple root a0 of f mod t to a root mod t^N by Newton steps
    that double the precision.

    ``f`` lists the coefficients of x^0, x^1, ... each as a polynomial in t.
    """
    if not is_prime(p):
        raise NotAField(f"{p} is not prime")
    if N < 1:
        raise ValueError("precision must be positive")
    a0 %= p
    base = _poly_x(f, p, 1)
    a = Series.const(p, 1, a0)
    if eval_poly(base, a).residue() != 0:
        raise NotARoot(f"f({a0}) is not 0 mod t")
    if eval_poly(derivative(base), a).residue() == 0:
        raise NonSimpleRoot(f"f'({a0}) vanishes mod t")
    full = _poly_x(f, p, N)
    deriv = derivative(full)
    prec, steps = 1, 0
    while prec < N:
        prec = min(2 * prec, N)
        a = a.lift(prec)
        a = a - eval_poly(full, a) * eval_poly(deriv, a).inverse()
        steps += 1
    return Lift(a.lift(N), steps, a0)


def newton_bound(N: int) -> int:
    return math.ceil(math.log2(N)) + 1 if N > 1 else 1


def roots_mod(f: Sequence[Sequence[int]], p: int, N: int) -> list[Series]:
    """All series mod t^N that are roots of f, by exhaustion (tiny sizes)."""
    full = _poly_x(f, p, N)
    out = []
    for cs in itertools.product(range(p), repeat=N):
        a = Series(p, N, cs)
        if not eval_poly(full, a).coeffs:
            out.append(a)
    return out


# --------------------------------------------------------------------------
# Witness search over F_p[t]


FOUND = "found"
HENSEL = "hensel"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class WitnessResult:
    status: str
    witnesses: Mapping[str, tuple] = field(default_factory=dict)
    lift: Lift | None = None
    note: str = ""

    def describe(self) -> str:
        if self.status == FOUND:
            inner = ", ".join(f"{k}={pformat(v)}" for k, v in self.witnesses.items())
            return f"Found({inner})"
        if self.status == HENSEL:
            return f"CertifiedByHensel(residue root {self.lift.root.residue()}, lift {self.lift.root})"
        return f"Unknown({self.note})" if self.note else "Unknown"


def _eval_t(t, env, p):
    if isinstance(t, Var):
        return env[t.name]
    if not t.args:
        if t.fn == "0.K":
            return ()
        if t.fn == "1.K":
            return (1 % p,)
        if t.fn == "varpi":
            return (0, 1)
        raise LogicError(f"unsupported constant {t.fn}")
    a, b = (_eval_t(x, env, p) for x in t.args)
    if t.fn == "+.K":
        return padd(a, b, p)
    if t.fn == "-.K":
        return psub(a, b, p)
    if t.fn == "*.K":
        return pmul(a, b, p)
    raise LogicError(f"unsupported function {t.fn}")


def _eval_qf(f: Formula, env, p) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Eq):
        return _eval_t(f.left, env, p) == _eval_t(f.right, env, p)
    if isinstance(f, Not):
        return not _eval_qf(f.arg, env, p)
    if isinstance(f, And):
        return _eval_qf(f.left, env, p) and _eval_qf(f.right, env, p)
    if isinstance(f, Or):
        return _eval_qf(f.left, env, p) or _eval_qf(f.right, env, p)
    if isinstance(f, Implies):
        return (not _eval_qf(f.left, env, p)) or _eval_qf(f.right, env, p)
    if isinstance(f, Iff):
        return _eval_qf(f.left, env, p) == _eval_qf(f.right, env, p)
    raise LogicError(f"not quantifier-free: {f!r}")


# polynomials in one variable x with F_p[t] coefficients: dict degree -> tuple


def _xadd(a, b, p):
    out = dict(a)
    for d, c in b.items():
        out[d] = padd(out.get(d, ()), c, p)
    return {d: c for d, c in out.items() if c}


def _xmul(a, b, p):
    out: dict = {}
    for d1, c1 in a.items():
        for d2, c2 in b.items():
            out[d1 + d2] = padd(out.get(d1 + d2, ()), pmul(c1, c2, p), p)
    return {d: c for d, c in out.items() if c}


def _symbolic(t, var, p):
    if isinstance(t, Var):
        if t.name != var:
            raise LogicError(f"unexpected variable {t.name}")
        return {1: (1,)}
    if not t.args:
        c = _eval_t(t, {}, p)
        return {0: c} if c else {}
    a, b = (_symbolic(x, var, p) for x in t.args)
    if t.fn == "+.K":
        return _xadd(a, b, p)
    if t.fn == "-.K":
        return _xadd(a, {d: pneg(c, p) for d, c in b.items()}, p)
    return _xmul(a, b, p)


def _split_prenex(f: Formula):
    names = []
    while isinstance(f, Exists):
        names.append(f.var)
        f = f.body
    return names, f


def _search_leaf(leaf: Formula, p: int, D: int, N: int, max_tuples: int) -> WitnessResult:
    names, matrix = _split_prenex(leaf)
    polys = [ptrim(cs, p) for cs in itertools.product(range(p), repeat=D + 1)]
    polys.sort(key=lambda a: (len(a), a))
    if len(polys) ** len(names) <= max_tuples:
        for combo in itertools.product(polys, repeat=len(names)):
            env = dict(zip(names, combo))
            if _eval_qf(matrix, env, p):
                return WitnessResult(FOUND, env)
    if len(names) == 1 and isinstance(matrix, Eq):
        f = _xadd(_symbolic(matrix.left, names[0], p),
                  {d: pneg(c, p) for d, c in _symbolic(matrix.right, names[0], p).items()}, p)
        if f:
            coeffs = [f.get(d, ()) for d in range(max(f) + 1)]
            for a0 in range(p):
                try:
                    return WitnessResult(HENSEL, {}, hensel_lift(coeffs, a0, N, p))
                except (NotARoot, NonSimpleRoot):
                    continue
    return WitnessResult(UNKNOWN, note="no witness of bounded degree, no simple residue root")


def laurent_witness_search(phi: Sentence, p: int, D: int = 2, N: int = 8,
                           max_tuples: int = 200_000) -> WitnessResult:
    """Semi-decide F_p((t)) ⊨ phi for existential phi. Never answers false."""
    if not classify(phi).exists:
        raise NotExistential("laurent_witness_search needs an existential sentence")
    if not is_prime(p):
        raise NotAField(f"{p} is not prime")

    def go(f):
        if isinstance(f, And):
            a = go(f.left)
            if a.status == UNKNOWN:
                return a
            b = go(f.right)
            if b.status == UNKNOWN:
                return b
            if HENSEL in (a.status, b.status):
                return a if a.status == HENSEL else b
            return WitnessResult(FOUND, {**a.witnesses, **b.witnesses})
        if isinstance(f, Or):
            a = go(f.left)
            return a if a.status != UNKNOWN else go(f.right)
        return _search_leaf(f, p, D, N, max_tuples)

    return go(phi)
