"""Syntactic fragments: membership, quantifier budgets, and enumeration in
Gödel-code order.

Membership is decided on the syntax tree only. A sentence is existential if
it is built with ∧ and ∨ from prenex-existential sentences (a block of ∃
followed by a quantifier-free matrix); universal sentences are the dual.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .logic import (
    And, BINARY, Bot, Eq, Exists, Forall, Formula, Iff, Implies, L_RING, Not, Or,
    Rel, Sentence, Signature, Top, Var, App, print_canonical,
)

QF = "qf"
EXISTS = "exists"
EXISTS_N = "exists_n"
FORALL = "forall"
FORALL_N = "forall_n"
BAR = "bar"
LITERAL = "lit"
ALL = "all"
KINDS = (QF, EXISTS, EXISTS_N, FORALL, FORALL_N, BAR, LITERAL, ALL)


class NotExistential(ValueError):
    pass


@dataclass(frozen=True)
class FragmentDescriptor:
    kind: str
    signature: Signature = L_RING
    n: int | None = None
    base: FragmentDescriptor | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown fragment kind {self.kind!r}")
        if self.kind in (EXISTS_N, FORALL_N) and (self.n is None or self.n < 0):
            raise ValueError(f"{self.kind} needs a budget n >= 0")
        if self.kind == BAR and (self.base is None or self.base.kind not in (EXISTS, FORALL)):
            raise ValueError("bar fragments need an exists or forall base")

    def contains(self, s: Sentence) -> bool:
        return classify(s).has(self)

    def __str__(self):
        if self.kind in (EXISTS_N, FORALL_N):
            return f"{self.kind.split('_')[0]}:{self.n}"
        if self.kind == BAR:
            return f"bar-{self.base.kind}"
        return self.kind


def qf(sig: Signature = L_RING) -> FragmentDescriptor:
    return FragmentDescriptor(QF, sig)


def exists(sig: Signature = L_RING, n: int | None = None) -> FragmentDescriptor:
    if n is None:
        return FragmentDescriptor(EXISTS, sig)
    return FragmentDescriptor(EXISTS_N, sig, n)


def forall(sig: Signature = L_RING, n: int | None = None) -> FragmentDescriptor:
    if n is None:
        return FragmentDescriptor(FORALL, sig)
    return FragmentDescriptor(FORALL_N, sig, n)


def bar(base: FragmentDescriptor) -> FragmentDescriptor:
    return FragmentDescriptor(BAR, base.signature, base=base)


def literal(sig: Signature) -> FragmentDescriptor:
    return FragmentDescriptor(LITERAL, sig)


def everything(sig: Signature = L_RING) -> FragmentDescriptor:
    return FragmentDescriptor(ALL, sig)


def parse_fragment(name: str, sig: Signature = L_RING) -> FragmentDescriptor:
    """Fragment from its command-line name (qf, exists, exists:N, ...)."""
    if name in (QF, EXISTS, FORALL, LITERAL, ALL):
        return FragmentDescriptor(name, sig)
    if name.startswith("exists:") or name.startswith("forall:"):
        head, _, n = name.partition(":")
        return (exists if head == "exists" else forall)(sig, int(n))
    if name in ("bar-exists", "bar-forall"):
        return bar(FragmentDescriptor(name[4:], sig))
    raise ValueError(f"unknown fragment name {name!r}")


# --------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class Membership:
    qf: bool
    exists: bool
    forall: bool
    bar: bool
    literal: bool
    e: int | None  # existential quantifier budget, when exists
    a: int | None  # universal quantifier budget, when forall

    def has(self, F: FragmentDescriptor) -> bool:
        kind = F.kind
        if kind == ALL:
            return True
        if kind == QF:
            return self.qf
        if kind == EXISTS:
            return self.exists
        if kind == EXISTS_N:
            return self.exists and self.e <= F.n
        if kind == FORALL:
            return self.forall
        if kind == FORALL_N:
            return self.forall and self.a <= F.n
        if kind == BAR:
            return self.bar
        return self.literal

    def flags(self) -> dict:
        out = {"qf": self.qf, "exists": self.exists, "forall": self.forall,
               "bar": self.bar, "lit": self.literal}
        if self.e is not None:
            out["e"] = self.e
        if self.a is not None:
            out["a"] = self.a
        return out


def _is_qf(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return _is_qf(f.arg)
    if isinstance(f, (And, Or, Implies, Iff)):
        return _is_qf(f.left) and _is_qf(f.right)
    return True


def _prenex(f: Formula, quant) -> int | None:
    """Length of the leading ``quant`` block when the rest is QF, else None."""
    k = 0
    while isinstance(f, quant):
        f = f.body
        k += 1
    return k if _is_qf(f) else None


def leaves(f: Formula) -> Iterator[Formula]:
    """Maximal subformulas not headed by ∧ or ∨."""
    if isinstance(f, (And, Or)):
        yield from leaves(f.left)
        yield from leaves(f.right)
    else:
        yield f


def _budget(f: Formula, quant) -> int | None:
    worst = 0
    for leaf in leaves(f):
        k = _prenex(leaf, quant)
        if k is None:
            return None
        worst = max(worst, k)
    return worst


def _is_literal_fragment(f: Formula) -> bool:
    for leaf in leaves(f):
        if isinstance(leaf, Not):
            leaf = leaf.arg
            if not isinstance(leaf, (Rel, Eq)):
                return False
        elif not isinstance(leaf, (Rel, Eq, Top, Bot)):
            return False
    return True


def _bar(f: Formula) -> bool:
    if isinstance(f, (And, Or)):
        return _bar(f.left) and _bar(f.right)
    g = f.arg if isinstance(f, Not) else f
    return _budget(g, Exists) is not None or _budget(g, Forall) is not None


def classify(s: Sentence) -> Membership:
    e = _budget(s, Exists)
    a = _budget(s, Forall)
    return Membership(
        qf=_is_qf(s),
        exists=e is not None,
        forall=a is not None,
        bar=_bar(s),
        literal=_is_literal_fragment(s),
        e=e,
        a=a,
    )


def quantifier_budget(s: Sentence) -> int:
    e = _budget(s, Exists)
    if e is None:
        raise NotExistential(print_canonical(s))
    return e


def bar_member(s: Sentence, base: FragmentDescriptor) -> bool:
    """Membership in the ∧/∨-closure of base ∪ ¬base.

    Prenex-universal leaves count as negated existential ones (and dually),
    so the bar of the existential and of the universal fragment coincide.
    """
    if base.kind not in (EXISTS, FORALL):
        raise ValueError("bar_member needs an exists or forall base")
    return _bar(s)


# --------------------------------------------------------------------------
# Enumeration in code order
#
# Gödel codes compare like (length, text) on canonical strings, so the
# enumeration walks lengths upward and sorts each length class. Bound
# variables are named by binder depth (x, y, z, u, w, x5, ...); the stream is
# therefore surjective onto members up to renaming of bound variables.

VARIABLE_NAMES = ("x", "y", "z", "u", "w")


def binder_name(depth: int) -> str:
    return VARIABLE_NAMES[depth] if depth < len(VARIABLE_NAMES) else f"x{depth}"


class _Grammar:
    """All canonical strings of a given exact length, per syntactic class."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self._terms = {}
        self._forms = {}

    def terms(self, length: int, scope: tuple, sort: str) -> list:
        key = (length, scope, sort)
        hit = self._terms.get(key)
        if hit is not None:
            return hit
        out = []
        if length > 0:
            for d, s in enumerate(scope):
                name = binder_name(d)
                if s == sort and len(name) == length:
                    out.append((name, Var(name, s)))
            for c, s in self.sig.constants.items():
                if s == sort and len(c) == length:
                    out.append((c, App(c, ())))
            for fn, (args, res) in self.sig.functions.items():
                if res != sort:
                    continue
                rest = length - len(fn) - 2 - len(args)
                for parts in self._split(rest, len(args)):
                    pools = [self.terms(n, scope, a) for n, a in zip(parts, args)]
                    for combo in itertools.product(*pools):
                        text = "(" + " ".join([fn, *(c[0] for c in combo)]) + ")"
                        out.append((text, App(fn, tuple(c[1] for c in combo))))
        self._terms[key] = out
        return out

    @staticmethod
    def _split(total: int, k: int):
        if k == 0:
            if total == 0:
                yield ()
            return
        if k == 1:
            if total >= 1:
                yield (total,)
            return
        for first in range(1, total - k + 2):
            for rest in _Grammar._split(total - first, k - 1):
                yield (first, *rest)

    def atoms(self, length: int, scope: tuple) -> list:
        out = []
        if length == 6:
            out.append(("(true)", Top()))
        if length == 7:
            out.append(("(false)", Bot()))
        for sort in self.sig.sorts:
            for a, b in self._split(length - 5, 2):
                for ta in self.terms(a, scope, sort):
                    for tb in self.terms(b, scope, sort):
                        out.append((f"(= {ta[0]} {tb[0]})", Eq(ta[1], tb[1])))
        for rel, args in self.sig.relations.items():
            if not args:
                if len(rel) == length:
                    out.append((rel, Rel(rel, ())))
                continue
            rest = length - len(rel) - 2 - len(args)
            for parts in self._split(rest, len(args)):
                pools = [self.terms(n, scope, a) for n, a in zip(parts, args)]
                for combo in itertools.product(*pools):
                    text = "(" + " ".join([rel, *(c[0] for c in combo)]) + ")"
                    out.append((text, Rel(rel, tuple(c[1] for c in combo))))
        return out

    def forms(self, length: int, scope: tuple, cls: str, k: int | None = None) -> list:
        """Classes: lit, qf, all, pex/pfa (prenex blocks of at most k
        quantifiers, k=None unbounded), ex/fa (their ∧/∨ closure)."""
        key = (length, scope, cls, k)
        hit = self._forms.get(key)
        if hit is not None:
            return hit
        found: dict[str, Formula] = {}
        if length > 0:
            self._fill(found, length, scope, cls, k)
        out = list(found.items())
        self._forms[key] = out
        return out

    def _binary(self, found, length, scope, sub, k, ops):
        for op in ops:
            name = BINARY[op]
            rest = length - len(name) - 4
            for a, b in self._split(rest, 2):
                right = self.forms(b, scope, sub, k)
                if not right:
                    continue
                for ta, fa in self.forms(a, scope, sub, k):
                    for tb, fb in right:
                        found[f"({name} {ta} {tb})"] = op(fa, fb)

    def _negations(self, found, length, scope, cls, k):
        for text, f in self.forms(length - 6, scope, cls, k):
            found[f"(not {text})"] = Not(f)

    def _quantified(self, found, length, scope, quants, sub, k):
        depth = len(scope)
        name = binder_name(depth)
        for quant in quants:
            word = "exists" if quant is Exists else "forall"
            for sort in self.sig.sorts:
                head = f"({word} ({name} {sort}) "
                for text, f in self.forms(length - len(head) - 1, scope + (sort,), sub, k):
                    found[head + text + ")"] = quant(name, sort, f)

    def _fill(self, found, length, scope, cls, k):
        if cls == "lit":
            for text, f in self.atoms(length, scope):
                found[text] = f
            for text, f in self.atoms(length - 6, scope):
                if isinstance(f, (Rel, Eq)):
                    found[f"(not {text})"] = Not(f)
            self._binary(found, length, scope, "lit", None, (And, Or))
        elif cls == "qf":
            for text, f in self.atoms(length, scope):
                found[text] = f
            self._negations(found, length, scope, "qf", None)
            self._binary(found, length, scope, "qf", None, (And, Or, Implies, Iff))
        elif cls == "all":
            for text, f in self.atoms(length, scope):
                found[text] = f
            self._negations(found, length, scope, "all", None)
            self._binary(found, length, scope, "all", None, (And, Or, Implies, Iff))
            self._quantified(found, length, scope, (Exists, Forall), "all", None)
        elif cls in ("pex", "pfa"):
            for text, f in self.forms(length, scope, "qf"):
                found[text] = f
            if k is None or k > 0:
                quant = Exists if cls == "pex" else Forall
                self._quantified(found, length, scope, (quant,), cls,
                                 None if k is None else k - 1)
        elif cls in ("ex", "fa"):
            for text, f in self.forms(length, scope, "p" + cls, k):
                found[text] = f
            self._binary(found, length, scope, cls, k, (And, Or))
        else:
            raise ValueError(cls)

    def sentences(self, length: int, F: FragmentDescriptor) -> list:
        kind = F.kind
        if kind == LITERAL:
            pool = self.forms(length, (), "lit")
        elif kind == QF:
            pool = self.forms(length, (), "qf")
        elif kind in (EXISTS, EXISTS_N):
            pool = self.forms(length, (), "ex", F.n)
        elif kind in (FORALL, FORALL_N):
            pool = self.forms(length, (), "fa", F.n)
        else:
            pool = self.forms(length, (), "all")
        return sorted(pool)


class FragmentStream:
    """Lazily materialised code-ordered list of the members of a fragment."""

    MAX_LENGTH = 400

    def __init__(self, F: FragmentDescriptor):
        self.F = F
        self._grammar = _Grammar(F.signature)
        self._items: list[Sentence] = []
        self._texts: list[str] = []
        self._length = 0

    def __getitem__(self, i: int) -> Sentence:
        while len(self._items) <= i:
            self._advance()
        return self._items[i]

    def text(self, i: int) -> str:
        self[i]
        return self._texts[i]

    def _advance(self):
        self._length += 1
        if self._length > self.MAX_LENGTH:
            raise RuntimeError(f"fragment {self.F} has too few members below length {self.MAX_LENGTH}")
        for text, f in self._grammar.sentences(self._length, self.F):
            if self.F.kind in (BAR, ALL) or self.F.contains(f):
                if self.F.kind == BAR and not _bar(f):
                    continue
                self._items.append(f)
                self._texts.append(text)

    def __iter__(self) -> Iterator[Sentence]:
        for i in itertools.count():
            yield self[i]

    def index_of(self, s: Sentence, limit: int = 100_000) -> int | None:
        text = print_canonical(s)
        for i in range(limit):
            t = self.text(i)
            if t == text:
                return i
            if len(t) > len(text):
                return None
        return None


@lru_cache(maxsize=64)
def fragment_stream(F: FragmentDescriptor) -> FragmentStream:
    return FragmentStream(F)


def enumerate_fragment(F: FragmentDescriptor, i: int) -> Sentence:
    """The (i+1)-th member of ``F`` in ascending Gödel-code order."""
    if i < 0:
        raise IndexError(i)
    return fragment_stream(F)[i]
