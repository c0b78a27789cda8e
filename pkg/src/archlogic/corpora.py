"""Sentence corpora: exhaustive propositional ones and seeded random ring
sentences. Every random generator takes an explicit random.Random so a
seed fixes the corpus.
"""

from __future__ import annotations

import random
from typing import Sequence

from .fragments import binder_name
from .logic import (
    BOT, TOP, And, App, Eq, Exists, Forall, Formula, Not, Or, Sentence, Var, atom,
)


def literal_depth(f: Formula) -> int:
    """Depth in the literal grammar: literals, ⊤ and ⊥ count 1, each ∧/∨ adds 1."""
    if isinstance(f, (And, Or)):
        return 1 + max(literal_depth(f.left), literal_depth(f.right))
    return 1


def literal_formulas(atoms: Sequence[str], depth: int) -> list[Formula]:
    """Every ∧/∨ combination of literals, ⊤ and ⊥ up to ``depth``, in a
    fixed order (by depth, then left operand, then right operand)."""
    base = [atom(a) for a in atoms] + [Not(atom(a)) for a in atoms] + [TOP, BOT]
    levels = [base]
    everything = list(base)
    for _ in range(2, depth + 1):
        fresh = []
        prev = levels[-1]
        older = everything[: len(everything) - len(prev)]
        # at least one operand has the previous depth
        for a in everything:
            for b in prev:
                fresh.append(And(a, b))
                fresh.append(Or(a, b))
        for a in prev:
            for b in older:
                fresh.append(And(a, b))
                fresh.append(Or(a, b))
        levels.append(fresh)
        everything.extend(fresh)
    return everything


# --------------------------------------------------------------------------
# Ring sentences


def _one_plus(n: int):
    one = App("1.K", ())
    out = one
    for _ in range(n - 1):
        out = App("+.K", (one, out))
    return out


def random_term(rng: random.Random, scope: Sequence[str], size: int = 2):
    if size <= 0 or rng.random() < 0.3:
        leaves = [Var(x, "K") for x in scope] + [App("0.K", ()), App("1.K", ())]
        if rng.random() < 0.15:
            return _one_plus(rng.randint(2, 3))
        return rng.choice(leaves)
    fn = rng.choice(["+.K", "*.K", "-.K", "*.K"])
    return App(fn, (random_term(rng, scope, size - 1), random_term(rng, scope, size - 1)))


def random_ring_formula(rng: random.Random, depth: int, quantifiers: int,
                        scope: tuple = (), term_size: int = 2) -> Formula:
    """A formula of L_ring with connective depth ≤ depth and at most
    ``quantifiers`` binders, free variables drawn from ``scope``."""
    if depth == 0 or rng.random() < 0.2:
        return Eq(random_term(rng, scope, term_size), random_term(rng, scope, term_size))
    r = rng.random()
    if quantifiers > 0 and r < 0.4:
        x = binder_name(len(scope))
        body = random_ring_formula(rng, depth - 1, quantifiers - 1, scope + (x,), term_size)
        return (Exists if rng.random() < 0.6 else Forall)(x, "K", body)
    if r < 0.55:
        return Not(random_ring_formula(rng, depth - 1, quantifiers, scope, term_size))
    budget = quantifiers
    left_q = rng.randint(0, budget)
    left = random_ring_formula(rng, depth - 1, left_q, scope, term_size)
    right = random_ring_formula(rng, depth - 1, budget - left_q, scope, term_size)
    return (And if rng.random() < 0.5 else Or)(left, right)


def ring_corpus(seed: int, count: int, depth: int = 4, quantifiers: int = 3) -> list[Sentence]:
    rng = random.Random(seed)
    return [random_ring_formula(rng, depth, quantifiers) for _ in range(count)]


def random_existential(rng: random.Random, n: int, depth: int = 4) -> Sentence:
    """∃x_1…x_k θ with k ≤ n and θ quantifier-free of depth ≤ depth-k."""
    k = rng.randint(0, n)
    scope = tuple(binder_name(i) for i in range(k))
    matrix = _random_qf(rng, scope, max(depth - k, 0))
    out = matrix
    for x in reversed(scope):
        out = Exists(x, "K", out)
    return out


def _random_qf(rng: random.Random, scope, depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        return Eq(random_term(rng, scope, 2), random_term(rng, scope, 2))
    r = rng.random()
    if r < 0.3:
        return Not(_random_qf(rng, scope, depth - 1))
    return (And if r < 0.65 else Or)(_random_qf(rng, scope, depth - 1), _random_qf(rng, scope, depth - 1))


def existential_corpus(seed: int, count: int, n: int, depth: int = 4) -> list[Sentence]:
    rng = random.Random(seed)
    return [random_existential(rng, n, depth) for _ in range(count)]


def _poly_term(coeffs: Sequence[int], x: str):
    """Σ c_i x^i as a ring term; negative coefficients become 0 - |c|."""
    def const(c):
        if c == 0:
            return App("0.K", ())
        mag = _one_plus(abs(c))
        return mag if c > 0 else App("-.K", (App("0.K", ()), mag))

    def power(i):
        out = Var(x, "K")
        for _ in range(i - 1):
            out = App("*.K", (Var(x, "K"), out))
        return out

    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        terms.append(const(c) if i == 0 else App("*.K", (const(c), power(i))))
    if not terms:
        return App("0.K", ())
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = App("+.K", (t, out))
    return out


def random_exists1(rng: random.Random, max_degree: int = 2, max_coeff: int = 3,
                   max_atoms: int = 2) -> Sentence:
    """∃x θ(x) with θ a boolean combination of polynomial equations in x."""
    def eq():
        deg = rng.randint(1, max_degree)
        coeffs = [rng.randint(-max_coeff, max_coeff) for _ in range(deg + 1)]
        if coeffs[-1] == 0:
            coeffs[-1] = rng.choice([-1, 1])
        return Eq(_poly_term(coeffs, "x"), App("0.K", ()))

    parts = [eq() for _ in range(rng.randint(1, max_atoms))]
    body = parts[0]
    for p in parts[1:]:
        r = rng.random()
        if r < 0.4:
            body = And(body, p)
        elif r < 0.7:
            body = And(body, Not(p))
        else:
            body = Or(body, p)
    return Exists("x", "K", body)


def poly_sentence(coeffs: Sequence[int]) -> Sentence:
    """∃x Σ c_i x^i ≐ 0."""
    return Exists("x", "K", Eq(_poly_term(coeffs, "x"), App("0.K", ())))
