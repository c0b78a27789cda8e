"""Characteristic stratification: ρ_n, shifted sentences, and the oracle
algorithms that relate Σ, Σ_0, Σ_{>0}, Σ_{≫0} and the uniform Σ_N.

Oracles are plain callables returning an OracleAnswer. Every algorithm
records its oracle calls as trace entries {step, oracle, query, verdict}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .logic import App, Eq, Formula, Not, Or, Sentence, print_canonical
from .oracles import (
    EXACT, NO, REFUTATION_SOUND, UNKNOWN, WITNESS_SOUND, YES, OracleAnswer, ToyInstance,
)

Oracle = Callable[[Sentence], OracleAnswer]
UniformOracle = Callable[[Sentence, int], OracleAnswer]

DEFAULT_STEP_CAP = 10_000

# stratum selectors
ZERO, AT_N, GREATER_THAN, EVENTUALLY, UNIFORM_PAIR = "zero", "at", "gt", "eventually", "pair"


@dataclass(frozen=True)
class StratQuery:
    sentence: Sentence
    selector: str
    n: int | None = None

    def __post_init__(self):
        if self.selector in (AT_N, UNIFORM_PAIR) and (self.n is None or self.n < 1):
            raise ValueError(f"{self.selector} needs n >= 1")
        if self.selector == GREATER_THAN and (self.n is None or self.n < 0):
            raise ValueError("gt needs m >= 0")


class CharFamily:
    """n ↦ ρ_n and n ↦ ¬ρ_n."""

    def __init__(self, rho: Callable[[int], Formula], name: str = ""):
        self._rho = rho
        self.name = name

    def rho(self, n: int) -> Formula:
        if n < 1:
            raise ValueError("ρ_n needs n >= 1")
        return self._rho(n)

    def not_rho(self, n: int) -> Formula:
        return Not(self.rho(n))


def _ones(n: int):
    one = App("1.K", ())
    out = one
    for _ in range(n - 1):
        out = App("+.K", (one, out))
    return out


def rho(n: int) -> Sentence:
    """¬(1+…+1 ≐ 0) with n ones: the characteristic is not n."""
    if n < 1:
        raise ValueError("ρ_n needs n >= 1")
    return Not(Eq(_ones(n), App("0.K", ())))


def not_rho(n: int) -> Sentence:
    return Not(rho(n))


FIELDS = CharFamily(rho, "fields")


def toy_family(inst: ToyInstance | None = None) -> CharFamily:
    inst = inst or ToyInstance()
    return CharFamily(inst.rho, "toy")


def shift(phi: Sentence, n: int, family: CharFamily = FIELDS) -> Sentence:
    """φ_n = φ ∨ ¬ρ_1 ∨ … ∨ ¬ρ_n, with φ_0 = φ."""
    if n < 0:
        raise ValueError("shift needs n >= 0")
    if n == 0:
        return phi
    tail = family.not_rho(n)
    for i in range(n - 1, 0, -1):
        tail = Or(family.not_rho(i), tail)
    return Or(phi, tail)


def reduce_uniform(phi: Sentence, n: int, family: CharFamily = FIELDS) -> Sentence:
    """ψ = φ_{n-1} ∨ ρ_n, so that (φ,n) ∈ Σ_N ⇔ ψ ∈ Σ ⇔ ψ ∈ Σ_{>0}."""
    if n < 1:
        raise ValueError("reduce_uniform needs n >= 1")
    return Or(shift(phi, n - 1, family), family.rho(n))


# --------------------------------------------------------------------------
# Algorithms


class _Run:
    def __init__(self, name: str):
        self.name = name
        self.trace: list[dict] = []
        self.answers: list[OracleAnswer] = []

    def ask(self, step, label, oracle, query, *extra) -> OracleAnswer:
        ans = oracle(query, *extra)
        entry = {"step": step, "oracle": label, "query": print_canonical(query),
                 "verdict": ans.verdict}
        if extra:
            entry["n"] = extra[0]
        self.trace.append(entry)
        self.answers.append(ans)
        return ans

    def note(self, step, message):
        self.trace.append({"step": step, "note": message})

    def finish(self, verdict: str, evidence: str) -> OracleAnswer:
        if verdict == UNKNOWN:
            soundness = REFUTATION_SOUND
        elif all(a.soundness == EXACT for a in self.answers):
            soundness = EXACT
        else:
            soundness = WITNESS_SOUND if verdict == YES else REFUTATION_SOUND
        return OracleAnswer(verdict, soundness, f"{self.name}: {evidence}", tuple(self.trace))


def _trusted_yes(a: OracleAnswer) -> bool:
    return a.verdict == YES and a.soundness in (EXACT, WITNESS_SOUND)


def _trusted_no(a: OracleAnswer) -> bool:
    return a.verdict == NO and a.soundness in (EXACT, REFUTATION_SOUND)


def split_membership(phi: Sentence, sigma0: Oracle, sigma_pos: Oracle) -> OracleAnswer:
    """φ ∈ Σ iff φ ∈ Σ_0 and φ ∈ Σ_{>0}."""
    run = _Run("split")
    a = run.ask(1, "sigma0", sigma0, phi)
    if _trusted_no(a):
        return run.finish(NO, "not in Σ_0")
    b = run.ask(2, "sigma>0", sigma_pos, phi)
    if _trusted_no(b):
        return run.finish(NO, "not in Σ_>0")
    if _trusted_yes(a) and _trusted_yes(b):
        return run.finish(YES, "in Σ_0 and Σ_>0")
    return run.finish(UNKNOWN, "an oracle could not decide")


def decide_zero_char(phi: Sentence, sigma: Oracle, sigma_pos: Oracle, sigma_gg0: Oracle,
                     family: CharFamily = FIELDS, cap: int = DEFAULT_STEP_CAP) -> OracleAnswer:
    """Decide φ ∈ Σ_0 from oracles for Σ, Σ_{>0} and Σ_{≫0}."""
    run = _Run("zero")
    a = run.ask(1, "sigma>>0", sigma_gg0, phi)
    if _trusted_no(a):
        return run.finish(NO, "step 1: not in Σ_>>0")
    if not _trusted_yes(a):
        return run.finish(UNKNOWN, "step 1 undecided")
    m0 = None
    for m in range(cap + 1):
        b = run.ask(2, "sigma>0", sigma_pos, shift(phi, m, family))
        if _trusted_yes(b):
            m0 = m
            break
        if not _trusted_no(b):
            return run.finish(UNKNOWN, f"step 2 undecided at m={m}")
    if m0 is None:
        run.note(2, f"step cap {cap} reached")
        return run.finish(UNKNOWN, f"step cap {cap} reached")
    c = run.ask(3, "sigma", sigma, shift(phi, m0, family))
    if _trusted_yes(c):
        return run.finish(YES, f"step 3 at m0={m0}")
    if _trusted_no(c):
        return run.finish(NO, f"step 3 at m0={m0}")
    return run.finish(UNKNOWN, "step 3 undecided")


def decide_positive(phi: Sentence, sigma_gg0: Oracle, sigma_pos_sub: Oracle,
                    sigma_uniform: UniformOracle, family: CharFamily = FIELDS,
                    cap: int = DEFAULT_STEP_CAP) -> OracleAnswer:
    """Decide φ ∈ Σ_{>0} from oracles for Σ_{≫0}, Σ'_{>0} (Σ' ⊆ Σ with the
    same Σ_{≫0}, asserted by the caller) and Σ_N."""
    run = _Run("positive")
    a = run.ask(1, "sigma>>0", sigma_gg0, phi)
    if _trusted_no(a):
        return run.finish(NO, "step 1: not in Σ_>>0")
    if not _trusted_yes(a):
        return run.finish(UNKNOWN, "step 1 undecided")
    m0 = None
    for m in range(cap + 1):
        b = run.ask(2, "sigma'>0", sigma_pos_sub, shift(phi, m, family))
        if _trusted_yes(b):
            m0 = m
            break
        if not _trusted_no(b):
            return run.finish(UNKNOWN, f"step 2 undecided at m={m}")
    if m0 is None:
        run.note(2, f"step cap {cap} reached")
        return run.finish(UNKNOWN, f"step cap {cap} reached")
    for n in range(1, m0 + 1):
        c = run.ask(3, "sigmaN", sigma_uniform, phi, n)
        if _trusted_no(c):
            return run.finish(NO, f"step 3: (φ,{n}) not in Σ_N")
        if not _trusted_yes(c):
            return run.finish(UNKNOWN, f"step 3 undecided at n={n}")
    return run.finish(YES, f"step 3: (φ,n) in Σ_N for 1 <= n <= {m0}")


def uniform_via(phi: Sentence, n: int, oracle: Oracle, family: CharFamily = FIELDS,
                label: str = "sigma") -> OracleAnswer:
    """Decide (φ,n) ∈ Σ_N by asking ``oracle`` (Σ or Σ_{>0}) about reduce_uniform(φ,n)."""
    run = _Run("uniform")
    psi = reduce_uniform(phi, n, family)
    run.note(0, f"reduce ({print_canonical(phi)}, {n}) -> {print_canonical(psi)}")
    a = run.ask(1, label, oracle, psi)
    if a.verdict == UNKNOWN:
        return run.finish(UNKNOWN, "oracle undecided")
    return run.finish(a.verdict, "membership of the reduced sentence")
