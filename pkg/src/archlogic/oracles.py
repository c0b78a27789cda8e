"""Decision procedures: finite prime fields, one-quantifier existential
sentences over Q, a refutation-sound bounded-prime check, and the toy
propositional instance where every stratified theory is exactly decidable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .fragments import NotExistential, classify
from .logic import (
    And, Bot, Eq, Exists, Forall, Formula, Iff, Implies, LogicError, Not, Or, Rel,
    Sentence, Top, Var, atom, print_canonical, toy_signature,
)
from .models import evaluate, is_prime, prime_field, primes_up_to

YES, NO, UNKNOWN = "yes", "no", "unknown"
EXACT, REFUTATION_SOUND, WITNESS_SOUND = "exact", "refutation-sound", "witness-sound"


class NotPrime(ValueError):
    pass


class BudgetExceeded(ValueError):
    """A prenex leaf has more quantifiers than the decider supports."""


@dataclass(frozen=True)
class OracleAnswer:
    verdict: str
    soundness: str = EXACT
    evidence: str = ""
    trace: tuple = ()

    def __post_init__(self):
        if self.verdict not in (YES, NO, UNKNOWN):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.soundness == EXACT and self.verdict == UNKNOWN:
            raise ValueError("an exact answer cannot be unknown")
        if self.soundness == REFUTATION_SOUND and self.verdict == YES:
            raise ValueError("refutation-sound answers never say yes")
        if self.soundness == WITNESS_SOUND and self.verdict == NO:
            raise ValueError("witness-sound answers never say no")

    @property
    def yes(self) -> bool:
        return self.verdict == YES

    @property
    def no(self) -> bool:
        return self.verdict == NO

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "soundness": self.soundness, "evidence": self.evidence}
        if self.trace:
            out["trace"] = list(self.trace)
        return out


def exact(flag: bool, evidence: str = "") -> OracleAnswer:
    return OracleAnswer(YES if flag else NO, EXACT, evidence)


# --------------------------------------------------------------------------
# Finite prime fields


def decide_finite_field(p: int, s: Sentence) -> OracleAnswer:
    """Truth in F_p; on existential sentences this is F_{p,∃}-membership."""
    if not is_prime(p):
        raise NotPrime(p)
    return exact(evaluate(prime_field(p), s), f"exhaustion over F_{p}")


def bounded_prime_check(s: Sentence, B: int) -> OracleAnswer:
    """Look for a prime p ≤ B with F_p ⊭ s. Never answers Yes."""
    if B < 2:
        raise ValueError("prime bound must be at least 2")
    for p in primes_up_to(B):
        if not evaluate(prime_field(p), s):
            return OracleAnswer(NO, REFUTATION_SOUND, f"refuted in F_{p}")
    return OracleAnswer(UNKNOWN, REFUTATION_SOUND, f"holds for all p <= {B}")


# --------------------------------------------------------------------------
# One-quantifier existential sentences over Q


def _poly_add(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def integer_poly(t, var: str | None) -> list[int]:
    """A ring term in at most one variable as integer coefficients, low first."""
    if isinstance(t, Var):
        if t.name != var:
            raise LogicError(f"unexpected variable {t.name}")
        return [0, 1]
    if not t.args:
        if t.fn == "0.K":
            return []
        if t.fn == "1.K":
            return [1]
        raise LogicError(f"unsupported constant {t.fn}")
    a, b = (integer_poly(x, var) for x in t.args)
    if t.fn == "+.K":
        return _poly_add(a, b)
    if t.fn == "-.K":
        return _poly_add(a, [-c for c in b])
    if t.fn == "*.K":
        return _poly_mul(a, b)
    raise LogicError(f"unsupported function {t.fn}")


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return out


def rational_roots(f: Sequence[int]) -> list[Fraction]:
    """Rational roots of a nonzero integer polynomial (rational root theorem)."""
    f = _trim(f)
    if len(f) <= 1:
        return []
    roots = set()
    while f and f[0] == 0:
        roots.add(Fraction(0))
        f = f[1:]
    if len(f) > 1:
        for num in _divisors(f[0]):
            for den in _divisors(f[-1]):
                for cand in (Fraction(num, den), Fraction(-num, den)):
                    if _peval(f, cand) == 0:
                        roots.add(cand)
    return sorted(roots)


def _peval(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def _qf_atom_polys(f: Formula, var, out: list):
    if isinstance(f, Eq):
        out.append(_poly_add(integer_poly(f.left, var), [-c for c in integer_poly(f.right, var)]))
    elif isinstance(f, Not):
        _qf_atom_polys(f.arg, var, out)
    elif isinstance(f, (And, Or, Implies, Iff)):
        _qf_atom_polys(f.left, var, out)
        _qf_atom_polys(f.right, var, out)
    elif isinstance(f, (Exists, Forall, Rel)):
        raise LogicError(f"not a quantifier-free ring formula: {print_canonical(f)}")


def _qf_truth(f: Formula, var, x) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Eq):
        return _peval(integer_poly(f.left, var), x) == _peval(integer_poly(f.right, var), x)
    if isinstance(f, Not):
        return not _qf_truth(f.arg, var, x)
    if isinstance(f, And):
        return _qf_truth(f.left, var, x) and _qf_truth(f.right, var, x)
    if isinstance(f, Or):
        return _qf_truth(f.left, var, x) or _qf_truth(f.right, var, x)
    if isinstance(f, Implies):
        return (not _qf_truth(f.left, var, x)) or _qf_truth(f.right, var, x)
    if isinstance(f, Iff):
        return _qf_truth(f.left, var, x) == _qf_truth(f.right, var, x)
    raise LogicError(f"not quantifier-free: {print_canonical(f)}")


def _cauchy_bound(f: Sequence[int]) -> int:
    lead = abs(f[-1])
    return 1 + max(abs(c) for c in f[:-1]) // lead + 1 if len(f) > 1 else 0


def q_candidates(matrix: Formula, var: str) -> list[Fraction]:
    """Points of Q at which the matrix takes every truth value it takes at all.

    Each atom is a polynomial identity; off the finitely many roots of the
    nonzero atom polynomials every atom is constant, so the roots plus one
    point beyond all of them exhaust the possible truth patterns.
    """
    polys: list = []
    _qf_atom_polys(matrix, var, polys)
    polys = [f for f in polys if len(f) > 1]
    roots = set()
    for f in polys:
        roots.update(rational_roots(f))
    generic = max([_cauchy_bound(f) for f in polys] + [0]) + 1
    return sorted(roots) + [Fraction(generic)]


def _decide_leaf_q(leaf: Formula) -> tuple[bool, str]:
    if isinstance(leaf, Exists):
        if isinstance(leaf.body, Exists):
            raise BudgetExceeded(print_canonical(leaf))
        var, matrix = leaf.var, leaf.body
        for x in q_candidates(matrix, var):
            if _qf_truth(matrix, var, x):
                return True, f"{var}={x}"
        return False, f"no candidate satisfies {print_canonical(matrix)}"
    return _qf_truth(leaf, None, 0), "ground"


def decide_exists1_Q(s: Sentence) -> OracleAnswer:
    """Exact truth in Q of a sentence built by ∧/∨ from ∃_1 prenex leaves."""
    m = classify(s)
    if not m.exists:
        raise NotExistential(print_canonical(s))
    if m.e > 1:
        raise BudgetExceeded(f"e = {m.e} > 1")
    notes = []

    def go(f):
        if isinstance(f, And):
            return go(f.left) and go(f.right)
        if isinstance(f, Or):
            return go(f.left) or go(f.right)
        truth, note = _decide_leaf_q(f)
        notes.append(note)
        return truth

    return exact(go(s), "; ".join(notes))


# --------------------------------------------------------------------------
# The toy instance: nullary atoms r_1, r_2, ..., T = ∅, ρ_n = r_n


def atom_index(name: str, prefix: str = "r") -> int:
    if not name.startswith(prefix) or not name[len(prefix):].isdigit():
        raise LogicError(f"not a toy atom: {name}")
    return int(name[len(prefix):])


@dataclass(frozen=True)
class ToyInstance:
    """Window of k atoms used for corpora; the language has r_1, r_2, ...
    without bound, so ρ_n = r_n exists for every n."""

    window: int = 4
    prefix: str = "r"

    def signature(self, width: int | None = None):
        return toy_signature(width or self.window, self.prefix)

    def rho(self, n: int) -> Formula:
        return atom(f"{self.prefix}{n}")

    def not_rho(self, n: int) -> Formula:
        return Not(self.rho(n))

    def max_index(self, f: Formula) -> int:
        return _max_index(f, self.prefix)

    def mask(self, f: Formula, width: int) -> int:
        """Truth set of f over the 2^width assignments to r_1..r_width, as
        a bitmask: bit a is set iff f holds where r_i = bit i-1 of a."""
        return _mask(f, width, self.prefix)


@lru_cache(maxsize=None)
def _atom_mask(i: int, width: int) -> int:
    out = 0
    for a in range(1 << width):
        if a >> (i - 1) & 1:
            out |= 1 << a
    return out


_MAX_INDEX: dict = {}


def _max_index(f: Formula, prefix: str) -> int:
    key = (f, prefix)
    hit = _MAX_INDEX.get(key)
    if hit is not None:
        return hit
    if isinstance(f, Rel):
        out = atom_index(f.name, prefix)
    elif isinstance(f, Not):
        out = _max_index(f.arg, prefix)
    elif isinstance(f, (And, Or, Implies, Iff)):
        out = max(_max_index(f.left, prefix), _max_index(f.right, prefix))
    elif isinstance(f, (Top, Bot)):
        out = 0
    else:
        raise LogicError(f"not a propositional formula: {print_canonical(f)}")
    if len(_MAX_INDEX) < 1_000_000:
        _MAX_INDEX[key] = out
    return out


def _mask(f: Formula, width: int, prefix: str) -> int:
    full = (1 << (1 << width)) - 1
    if isinstance(f, Rel):
        i = atom_index(f.name, prefix)
        if i > width:
            raise ValueError(f"{f.name} outside width {width}")
        return _atom_mask(i, width)
    if isinstance(f, Top):
        return full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return full & ~_mask(f.arg, width, prefix)
    a = _mask(f.left, width, prefix)
    b = _mask(f.right, width, prefix)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    if isinstance(f, Implies):
        return (full & ~a) | b
    if isinstance(f, Iff):
        return full & ~(a ^ b)
    raise LogicError(f"not a propositional formula: {print_canonical(f)}")


@lru_cache(maxsize=None)
def _stratum_mask(n: int, width: int) -> int:
    """Assignments satisfying r_1..r_{n-1} and ¬r_n (n ≤ width)."""
    out = 0
    need = (1 << (n - 1)) - 1
    for a in range(1 << width):
        if a & ((1 << n) - 1) == need:
            out |= 1 << a
    return out


def _widen(mask: int, width: int, target: int) -> int:
    """The same truth set over more atoms: the new atoms are irrelevant."""
    for k in range(width, target):
        mask |= mask << (1 << k)
    return mask


def _native(f: Formula, prefix: str) -> tuple[int, int]:
    """(w, truth set over r_1..r_w) with w the highest atom index in f."""
    if isinstance(f, Rel):
        i = atom_index(f.name, prefix)
        return i, _atom_mask(i, i)
    if isinstance(f, Top):
        return 0, 1
    if isinstance(f, Bot):
        return 0, 0
    if isinstance(f, Not):
        w, m = _native(f.arg, prefix)
        return w, ((1 << (1 << w)) - 1) & ~m
    wa, a = _native(f.left, prefix)
    wb, b = _native(f.right, prefix)
    w = max(wa, wb)
    a, b = _widen(a, wa, w), _widen(b, wb, w)
    full = (1 << (1 << w)) - 1
    if isinstance(f, And):
        return w, a & b
    if isinstance(f, Or):
        return w, a | b
    if isinstance(f, Implies):
        return w, (full & ~a) | b
    if isinstance(f, Iff):
        return w, full & ~(a ^ b)
    raise LogicError(f"not a propositional formula: {print_canonical(f)}")


class ToyOracles:
    """Exact oracles for Σ = T_L and its strata on the toy instance.

    Each query builds one truth table over the atoms f mentions and widens
    it to cover whichever stratum axioms are involved.
    """

    def __init__(self, inst: ToyInstance):
        self.inst = inst
        self.queries = 0

    def _table(self, f: Formula) -> tuple[int, int]:
        return _native(f, self.inst.prefix)

    @staticmethod
    def _in_stratum(w: int, m: int, n: int) -> bool:
        width = max(w, n)
        return _stratum_mask(n, width) & ~_widen(m, w, width) == 0

    def sigma(self, f: Formula) -> OracleAnswer:
        self.queries += 1
        w, m = self._table(f)
        return exact(m == (1 << (1 << w)) - 1, "tautology check")

    def sigma0(self, f: Formula) -> OracleAnswer:
        self.queries += 1
        w, m = self._table(f)
        return exact(bool(m >> ((1 << w) - 1) & 1), "all atoms true")

    def sigma_n(self, f: Formula, n: int) -> OracleAnswer:
        if n < 0:
            raise ValueError("stratum index must be >= 0")
        if n == 0:
            return self.sigma0(f)
        self.queries += 1
        w, m = self._table(f)
        return exact(self._in_stratum(w, m, n), f"stratum {n}")

    def sigma_gt(self, f: Formula, m: int = 0) -> OracleAnswer:
        """φ ∈ Σ_{>m}: membership in every stratum n > m. Strata beyond the
        highest mentioned atom index agree, so the check is finite."""
        self.queries += 1
        w, mask = self._table(f)
        top = max(w, m) + 1
        ok = all(self._in_stratum(w, mask, n) for n in range(m + 1, top + 2))
        return exact(ok, f"strata {m + 1}..{top + 1}")

    def sigma_pos(self, f: Formula) -> OracleAnswer:
        return self.sigma_gt(f, 0)

    def sigma_gg0(self, f: Formula) -> OracleAnswer:
        self.queries += 1
        w, m = self._table(f)
        ok = self._in_stratum(w, m, w + 1) and self._in_stratum(w, m, w + 2)
        return exact(ok, f"strata {w + 1},{w + 2}")

    def sigma_N(self, f: Formula, n: int) -> OracleAnswer:
        return self.sigma_n(f, n)


def toy_oracles(inst: ToyInstance) -> ToyOracles:
    return ToyOracles(inst)


# --------------------------------------------------------------------------
# Field strata: Σ_N for existential ring sentences


def fields_stratum(s: Sentence, n: int) -> OracleAnswer:
    """(s, n) ∈ F_{N,∃}: for prime n truth in F_n; for other n ≥ 1 the
    stratum "characteristic n" has no fields, so every sentence follows."""
    if n < 1:
        raise ValueError("use the characteristic-zero oracle for n = 0")
    if is_prime(n):
        return decide_finite_field(n, s)
    return exact(True, f"no field has characteristic {n}")


def describe(ans: OracleAnswer) -> str:
    return json.dumps(ans.to_json(), sort_keys=True)
