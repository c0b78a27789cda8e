"""Theories and contexts.

A theory is either a finite list of axioms or an intensional handle given by
a membership test for its deductive closure. Entailment for explicit
theories is decided relative to a finite model universe: T ⊨ φ when every
universe model of T satisfies φ.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .fragments import FragmentDescriptor
from .logic import Sentence, Signature, print_canonical, symbols_of
from .models import FiniteStructure, evaluate


class UniverseEmpty(ValueError):
    """No universe model satisfies the theory."""


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: tuple = ()
    member: Callable[[Sentence], bool] | None = None
    enumerator: Callable[[int], Sentence] | None = None
    name: str = "T"

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        bad = [a for a in self.axioms if not symbols_of(a) <= self.signature.symbols()]
        if bad:
            raise ValueError(f"axiom outside {self.signature.name}: {print_canonical(bad[0])}")

    @property
    def explicit(self) -> bool:
        return self.member is None

    def models(self, universe: Sequence[FiniteStructure]) -> list[FiniteStructure]:
        if not self.explicit:
            raise TypeError("model filtering needs an explicit theory")
        return [M for M in universe if all(evaluate(M, a) for a in self.axioms)]

    def entails(self, s: Sentence, universe: Sequence[FiniteStructure] | None = None) -> bool:
        if not self.explicit:
            return bool(self.member(s))
        if universe is None:
            raise TypeError("explicit theories decide entailment over a model universe")
        mods = self.models(universe)
        if not mods:
            raise UniverseEmpty(self.name)
        return all(evaluate(M, s) for M in mods)

    def restrict(self, F: FragmentDescriptor, universe=None) -> "Theory":
        """T_L: the consequences of T that lie in F."""
        return Theory(self.signature, (), lambda s: F.contains(s) and self.entails(s, universe),
                      None, f"{self.name}|{F}")

    def axiom_list(self) -> list[Sentence]:
        if not self.explicit:
            raise TypeError("intensional theories are not listable")
        return list(self.axioms)


def empty_theory(sig: Signature, name: str = "T") -> Theory:
    return Theory(sig, (), name=name)


@dataclass(frozen=True)
class Context:
    fragment: FragmentDescriptor
    theory: Theory
    signature: Signature | None = None

    def __post_init__(self):
        if self.signature is None:
            object.__setattr__(self, "signature", self.theory.signature)
        if self.theory.explicit:
            allowed = self.signature.symbols()
            for a in self.theory.axioms:
                if not symbols_of(a) <= allowed:
                    raise ValueError(f"axiom outside the context signature: {print_canonical(a)}")
