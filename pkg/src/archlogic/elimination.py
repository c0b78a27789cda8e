"""Proof-search elimination.

Candidates φ_0, φ_1, … of L1 are paired with prover budgets; pairs (l, m)
are walked in the order (l,m) ≺ (l',m') iff l+m < l'+m' or (l+m = l'+m'
and m < m'), and the first φ_m for which the prover shows T2 ⊢ ψ ↔ ιφ_m
within l ticks is returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Protocol, Sequence

from .fragments import (
    FragmentDescriptor, classify, fragment_stream, quantifier_budget,
)
from .interpretations import TranslationMap
from .logic import (
    And, Bot, Eq, Formula, Iff, Implies, Not, Or, Rel, Sentence, Top, TOP, conj, disj,
    atom, print_canonical, symbols_of,
)
from .models import FiniteStructure, evaluate
from .theory import Theory

PROVED, REFUTED, UNKNOWN = "proved", "refuted", "unknown"


# --------------------------------------------------------------------------
# Pair enumeration


def enumerate_pairs(i: int) -> tuple[int, int]:
    """The i-th pair (l, m) under ≺."""
    if i < 0:
        raise ValueError("index must be >= 0")
    d = (math.isqrt(8 * i + 1) - 1) // 2
    j = i - d * (d + 1) // 2
    return d - j, j


def pair_index(l: int, m: int) -> int:
    d = l + m
    return d * (d + 1) // 2 + m


def precedes(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return sum(a) < sum(b) or (sum(a) == sum(b) and a[1] < b[1])


# --------------------------------------------------------------------------
# Provers


@dataclass(frozen=True)
class ProofOutcome:
    status: str
    witness: str | None = None


class Prover(Protocol):
    name: str

    def prove(self, theory: Theory, s: Sentence, ticks: int) -> ProofOutcome: ...


def prop_atoms(f: Formula) -> set[str]:
    if isinstance(f, Rel):
        if f.args:
            raise TypeError("relation with arguments in a propositional formula")
        return {f.name}
    if isinstance(f, Not):
        return prop_atoms(f.arg)
    if isinstance(f, (And, Or, Implies, Iff)):
        return prop_atoms(f.left) | prop_atoms(f.right)
    if isinstance(f, (Top, Bot)):
        return set()
    raise TypeError(f"not propositional: {print_canonical(f)}")


@lru_cache(maxsize=None)
def _bit_mask(pos: int, width: int) -> int:
    out = 0
    for a in range(1 << width):
        if a >> pos & 1:
            out |= 1 << a
    return out


def prop_mask(f: Formula, index: dict, width: int) -> int:
    """Truth set of f over assignments to ``index`` (atom -> bit), as a bitmask."""
    full = (1 << (1 << width)) - 1
    if isinstance(f, Rel):
        return _bit_mask(index[f.name], width)
    if isinstance(f, Top):
        return full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return full & ~prop_mask(f.arg, index, width)
    a, b = prop_mask(f.left, index, width), prop_mask(f.right, index, width)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    if isinstance(f, Implies):
        return (full & ~a) | b
    return full & ~(a ^ b)


class TruthTableProver:
    """Exact for propositional theories: needs one tick per atom involved."""

    name = "tt"

    def __init__(self):
        self.calls = 0

    def prove(self, theory: Theory, s: Sentence, ticks: int) -> ProofOutcome:
        atoms = set(prop_atoms(s))
        for a in theory.axiom_list():
            atoms |= prop_atoms(a)
        if ticks < len(atoms):
            return ProofOutcome(UNKNOWN)
        self.calls += 1
        names = sorted(atoms)
        index = {n: i for i, n in enumerate(names)}
        width = len(names)
        full = (1 << (1 << width)) - 1
        models = full
        for a in theory.axiom_list():
            models &= prop_mask(a, index, width)
        bad = models & ~prop_mask(s, index, width)
        if not bad:
            return ProofOutcome(PROVED)
        row = (bad & -bad).bit_length() - 1
        true = [n for n in names if row >> index[n] & 1]
        return ProofOutcome(REFUTED, "{" + ",".join(true) + "}")


class RefuterProver:
    """A battery of finite models of the theory; never proves."""

    name = "refute"

    def __init__(self, battery: Sequence[FiniteStructure]):
        self.battery = tuple(battery)

    def prove(self, theory: Theory, s: Sentence, ticks: int) -> ProofOutcome:
        for M in self.battery[: ticks + 1]:
            if not evaluate(M, s):
                return ProofOutcome(REFUTED, M.name)
        return ProofOutcome(UNKNOWN)


class GroundProver:
    """Propositional abstraction: maximal atoms and quantified subformulas
    become propositional letters (identified up to syntax, with t ≐ t read
    as true). A tautology of the abstraction is valid in every theory."""

    name = "ground"

    def __init__(self, depth: int = 8):
        self.depth = depth

    def prove(self, theory: Theory, s: Sentence, ticks: int) -> ProofOutcome:
        letters: dict = {}
        abstract = _abstract(s, letters)
        if len(letters) > min(ticks, self.depth):
            return ProofOutcome(UNKNOWN)
        index = {n: i for i, n in enumerate(sorted(letters.values()))}
        width = len(index)
        if prop_mask(abstract, index, width) == (1 << (1 << width)) - 1:
            return ProofOutcome(PROVED)
        return ProofOutcome(UNKNOWN)


def _abstract(f: Formula, letters: dict) -> Formula:
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Eq) and f.left == f.right:
        return TOP
    if isinstance(f, Not):
        return Not(_abstract(f.arg, letters))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_abstract(f.left, letters), _abstract(f.right, letters))
    key = print_canonical(f)
    if key not in letters:
        letters[key] = f"p{len(letters)}"
    return atom(letters[key])


@dataclass(frozen=True)
class Refutation:
    status: str
    witness: str | None = None


def finite_model_refuter(battery: Sequence[FiniteStructure], psi: Sentence,
                         iota_phi: Sentence) -> Refutation:
    """Refuted iff some battery model separates ψ and ιφ."""
    for M in battery:
        if evaluate(M, psi) != evaluate(M, iota_phi):
            return Refutation(REFUTED, M.name)
    return Refutation(UNKNOWN)


PROVERS = {"tt": TruthTableProver, "ground": GroundProver}


# --------------------------------------------------------------------------
# Candidate streams


class FilteredStream:
    """The members of ``base`` satisfying ``keep``, reindexed from 0."""

    def __init__(self, base, keep: Callable[[Sentence], bool], scan_limit: int = 10_000_000):
        self.base, self.keep, self.scan_limit = base, keep, scan_limit
        self._items: list = []
        self._pos = 0

    def __getitem__(self, i: int) -> Sentence:
        while len(self._items) <= i:
            if self._pos >= self.scan_limit:
                raise IndexError(i)
            s = self.base[self._pos]
            self._pos += 1
            if self.keep(s):
                self._items.append(s)
        return self._items[i]


class NormalFormStream:
    """Disjunctive normal forms over r_1..r_j for j = 0..k: for each j the
    truth functions that depend on r_j, ordered by truth table."""

    def __init__(self, atoms: Sequence[str]):
        self.atoms = list(atoms)
        self._items: list[Sentence] = [Bot(), Top()]
        for j in range(1, len(self.atoms) + 1):
            self._items.extend(self._block(j))

    def _block(self, j: int):
        names = self.atoms[:j]
        rows = 1 << j
        minterms = []
        for a in range(rows):
            lits = [atom(n) if a >> i & 1 else Not(atom(n)) for i, n in enumerate(names)]
            minterms.append(conj(lits))
        lo_rows = [a for a in range(rows) if not a >> (j - 1) & 1]
        for f in range(1 << rows):
            # f depends on r_j unless its table repeats across the top bit
            if all((f >> a & 1) == (f >> (a | 1 << (j - 1)) & 1) for a in lo_rows):
                continue
            yield disj([minterms[a] for a in range(rows) if f >> a & 1])

    def __len__(self):
        return len(self._items)

    def __getitem__(self, i: int) -> Sentence:
        return self._items[i]


class DovetailStream:
    """Alternates a primary stream with a finite secondary one; after the
    secondary runs out only the primary continues. Surjective whenever the
    primary is."""

    def __init__(self, primary, secondary):
        self.primary, self.secondary = primary, secondary
        self._n = len(secondary)

    def __getitem__(self, i: int) -> Sentence:
        if i < 2 * self._n:
            return self.primary[i // 2] if i % 2 == 0 else self.secondary[i // 2]
        return self.primary[i - self._n]


def toy_candidates(F1: FragmentDescriptor) -> DovetailStream:
    """Code order over the literal fragment, interleaved with normal forms."""
    atoms = sorted(F1.signature.relations, key=lambda n: (len(n), n))
    return DovetailStream(fragment_stream(F1), NormalFormStream(atoms))


# --------------------------------------------------------------------------
# Search


class BudgetExhausted(Exception):
    def __init__(self, frontier: "Frontier"):
        super().__init__(f"budget exhausted after {frontier.pairs_visited} pairs")
        self.frontier = frontier


@dataclass(frozen=True)
class Frontier:
    """Enough state to resume: the current diagonal, the candidates alive
    when it started, how far into it the walk got, and who survived so far."""

    diagonal: int
    live: tuple
    position: int
    survivors: tuple
    pairs_visited: int

    @property
    def next_pair(self) -> tuple:
        order = list(self.live) + [self.diagonal]
        m = order[self.position]
        return (self.diagonal - m, m)

    def to_json(self) -> dict:
        return {"diagonal": self.diagonal, "live": list(self.live), "position": self.position,
                "survivors": list(self.survivors), "pairs_visited": self.pairs_visited,
                "next_pair": list(self.next_pair)}

    @classmethod
    def from_json(cls, data) -> "Frontier":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["diagonal"], tuple(data["live"]), data["position"],
                   tuple(data["survivors"]), data["pairs_visited"])


@dataclass(frozen=True)
class SearchState:
    pair: tuple
    candidate: str
    outcome: str


@dataclass(frozen=True)
class SearchResult:
    candidate: Sentence
    index: int
    pair: tuple
    pairs_visited: int
    transcript: tuple = ()

    def to_json(self) -> dict:
        return {"status": "found", "candidate": print_canonical(self.candidate),
                "index": self.index, "pair": list(self.pair), "pairs_visited": self.pairs_visited}


class Searcher:
    """Elimination search for one bridge; caches candidate images and
    battery evaluations across queries."""

    def __init__(self, iota: TranslationMap, candidates, T2: Theory, prover,
                 battery: Sequence[FiniteStructure] = (), record: bool = False):
        if isinstance(candidates, FragmentDescriptor):
            candidates = fragment_stream(candidates)
        self.iota = iota
        self.candidates = candidates
        self.T2 = T2
        self.prover = prover
        self.battery = tuple(M for M in battery if self._models_theory(M))
        self.record = record
        self._images: list = []
        self._vectors: list = []

    def _models_theory(self, M) -> bool:
        if not self.T2.explicit:
            return True
        return all(evaluate(M, a) for a in self.T2.axioms)

    def _vector(self, s: Sentence) -> int:
        out = 0
        for j, M in enumerate(self.battery):
            if evaluate(M, s):
                out |= 1 << j
        return out

    def image(self, m: int) -> Sentence:
        while len(self._images) <= m:
            k = len(self._images)
            img = self.iota(self.candidates[k])
            self._images.append(img)
            self._vectors.append(None)
        return self._images[m]

    def _image_vector(self, m: int) -> int:
        self.image(m)
        v = self._vectors[m]
        if v is None:
            v = self._vector(self._images[m])
            self._vectors[m] = v
        return v

    def search(self, psi: Sentence, budget: int = 10_000, start: Frontier | None = None) -> SearchResult:
        psi_vec = self._vector(psi) if self.battery else 0
        d = start.diagonal if start else 0
        live = list(start.live) if start else []
        pos = start.position if start else 0
        survivors = list(start.survivors) if start else []
        visited = start.pairs_visited if start else 0
        transcript = []
        while True:
            order = live + [d]
            for k in range(pos, len(order)):
                m = order[k]
                l = d - m
                if visited >= budget:
                    raise BudgetExhausted(Frontier(d, tuple(live), k, tuple(survivors), visited))
                visited += 1
                phi = self.candidates[m]
                if m == d and self.battery and self._image_vector(m) != psi_vec:
                    if self.record:
                        transcript.append(SearchState((l, m), print_canonical(phi), "refuted by battery"))
                    continue
                outcome = self.prover.prove(self.T2, Iff(psi, self.image(m)), l)
                if self.record:
                    transcript.append(SearchState((l, m), print_canonical(phi), outcome.status))
                if outcome.status == PROVED:
                    return SearchResult(phi, m, (l, m), visited, tuple(transcript))
                if outcome.status == UNKNOWN:
                    survivors.append(m)
            live, survivors, pos = survivors, [], 0
            d += 1


def _graded_stream(candidates, e: int):
    if isinstance(candidates, FragmentDescriptor):
        candidates = fragment_stream(candidates)
    return FilteredStream(candidates, lambda s: _within_budget(s, e))


def _within_budget(s: Sentence, e: int) -> bool:
    m = classify(s)
    return m.exists and m.e <= e


def search_elimination(psi: Sentence, iota: TranslationMap, candidates, T2: Theory, prover,
                       budget: int = 10_000, battery: Sequence[FiniteStructure] = (),
                       start: Frontier | None = None, fast_path: bool = False,
                       record: bool = False) -> SearchResult:
    """First φ_m (in ≺ order of (ticks, m)) with T2 ⊢ ψ ↔ ιφ_m.

    ``candidates`` is a fragment descriptor (code order) or any indexable
    stream. With ``fast_path`` a syntactic preimage of ψ under ι is tried
    first, then checked like any other candidate.
    """
    if fast_path:
        hit = _fast_path(psi, iota, T2, prover)
        if hit is not None:
            return hit
    return Searcher(iota, candidates, T2, prover, battery, record).search(psi, budget, start)


def search_elimination_graded(psi: Sentence, iota: TranslationMap, candidates, T2: Theory, prover,
                              budget: int = 10_000, battery: Sequence[FiniteStructure] = (),
                              start: Frontier | None = None, fast_path: bool = False,
                              record: bool = False) -> SearchResult:
    """As search_elimination, with candidates confined to existential
    sentences of quantifier budget at most e(ψ)."""
    e = quantifier_budget(psi)
    if fast_path:
        hit = _fast_path(psi, iota, T2, prover)
        if hit is not None and _within_budget(hit.candidate, e):
            return hit
    stream = _graded_stream(candidates, e)
    result = Searcher(iota, stream, T2, prover, battery, record).search(psi, budget, start)
    assert _within_budget(result.candidate, e)
    return result


def _fast_path(psi, iota, T2, prover) -> SearchResult | None:
    pre = getattr(iota, "preimage", None)
    if pre is None:
        return None
    try:
        phi = pre(psi)
    except (KeyError, TypeError, ValueError):
        return None
    if phi is None or iota(phi) != psi or not iota.source.contains(phi):
        return None
    if not symbols_of(phi) <= iota.source.signature.symbols():
        return None
    outcome = prover.prove(T2, Iff(psi, iota(phi)), 1 << 30)
    if outcome.status != PROVED:
        return None
    return SearchResult(phi, -1, (0, -1), 1, (SearchState((0, -1), print_canonical(phi), "syntactic preimage"),))
