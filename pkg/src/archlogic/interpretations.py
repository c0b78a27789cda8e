"""Sentence maps between languages and finite checks of the laws they and
the structure maps of bridges are supposed to satisfy.

All checks are relative to a finite sentence corpus and finite model
universes; a "pass" means no counterexample exists inside them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .fragments import FragmentDescriptor, everything, exists, literal
from .logic import (
    And, App, Bot, Eq, Exists, Forall, Formula, Iff, Implies, L_O, L_RING, L_VAL, Not,
    Or, Rel, Sentence, Signature, Term, Top, Var, atom, print_canonical, toy_signature,
)
from .models import FiniteStructure, evaluate, propositional_model, all_assignments, residue_field
from .theory import Context, Theory, UniverseEmpty, empty_theory


# --------------------------------------------------------------------------
# Structural maps


def map_formula(f: Formula, atom_fn: Callable[[Formula], Formula],
                sort_fn: Callable[[str], str] = lambda s: s) -> Formula:
    """Rebuild f, replacing atoms via atom_fn and binder sorts via sort_fn."""
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, (Eq, Rel)):
        return atom_fn(f)
    if isinstance(f, Not):
        return Not(map_formula(f.arg, atom_fn, sort_fn))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(map_formula(f.left, atom_fn, sort_fn), map_formula(f.right, atom_fn, sort_fn))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, sort_fn(f.sort), map_formula(f.body, atom_fn, sort_fn))
    raise TypeError(f"not a formula: {f!r}")


def _to_residue_term(t: Term) -> Term:
    if isinstance(t, Var):
        return Var(t.name, "k")
    name = t.fn[:-2] + ".k" if t.fn.endswith(".K") else t.fn
    return App(name, tuple(_to_residue_term(a) for a in t.args))


def _residue_atom(f: Formula) -> Formula:
    if isinstance(f, Eq):
        return Eq(_to_residue_term(f.left), _to_residue_term(f.right))
    return Rel(f.name, tuple(_to_residue_term(a) for a in f.args))


def residue_interpret(phi: Sentence) -> Sentence:
    """ι_k: ring symbols move to the residue sort k, quantifiers range over k."""
    return map_formula(phi, _residue_atom, lambda s: "k" if s == "K" else s)


def _from_residue_term(t: Term) -> Term:
    if isinstance(t, Var):
        return Var(t.name, "K")
    name = t.fn[:-2] + ".K" if t.fn.endswith(".k") else t.fn
    return App(name, tuple(_from_residue_term(a) for a in t.args))


def residue_preimage(psi: Sentence) -> Sentence:
    """Undo ι_k symbol by symbol; callers check that ι_k maps the result back."""
    def atom_fn(f):
        if isinstance(f, Eq):
            return Eq(_from_residue_term(f.left), _from_residue_term(f.right))
        return Rel(f.name, tuple(_from_residue_term(a) for a in f.args))
    return map_formula(psi, atom_fn, lambda s: "K" if s == "k" else s)


def _onesorted_atom(f: Formula) -> Formula:
    if isinstance(f, Rel) and f.name == "O":
        (t,) = f.args
        return Not(Rel("<.G", (App("v", (t,)), App("0.G", ()))))
    return f


def onesorted_to_valued(phi: Sentence) -> Sentence:
    """O(t) becomes ¬(v(t) < 0); everything else stays on sort K."""
    return map_formula(phi, _onesorted_atom)


def rename_atoms(mapping: Mapping[str, Formula]) -> Callable[[Sentence], Sentence]:
    def atom_fn(f):
        if isinstance(f, Rel) and not f.args and f.name in mapping:
            return mapping[f.name]
        return f
    return lambda phi: map_formula(phi, atom_fn)


@dataclass(frozen=True)
class TranslationMap:
    source: FragmentDescriptor
    target: FragmentDescriptor
    fn: Callable[[Sentence], Sentence]
    name: str = ""
    preimage: Callable[[Sentence], Sentence] | None = None

    def __call__(self, s: Sentence) -> Sentence:
        return self.fn(s)

    def lands_in_target(self, corpus: Iterable[Sentence]) -> list[Sentence]:
        """Source members whose image leaves the target fragment."""
        return [s for s in corpus if self.source.contains(s) and not self.target.contains(self.fn(s))]


def identity_map(F: FragmentDescriptor) -> TranslationMap:
    return TranslationMap(F, F, lambda s: s, "identity")


def residue_map(F: FragmentDescriptor | None = None) -> TranslationMap:
    F = F or everything(L_RING)
    target = FragmentDescriptor(F.kind, L_VAL, F.n, F.base)
    return TranslationMap(F, target, residue_interpret, "residue", residue_preimage)


def onesorted_map(F: FragmentDescriptor | None = None) -> TranslationMap:
    F = F or everything(L_O)
    target = FragmentDescriptor(F.kind, L_VAL, F.n, F.base)
    return TranslationMap(F, target, onesorted_to_valued, "onesorted")


def constant_map(source: FragmentDescriptor, target: FragmentDescriptor, value: Sentence) -> TranslationMap:
    return TranslationMap(source, target, lambda s: value, f"constant {print_canonical(value)}")


# --------------------------------------------------------------------------
# Bridges


@dataclass(frozen=True)
class BridgeDescriptor:
    c1: Context
    c2: Context
    sigma: Callable[[FiniteStructure], FiniteStructure]
    name: str = ""


@dataclass(frozen=True)
class ArchDescriptor:
    bridge: BridgeDescriptor
    extension: BridgeDescriptor
    interpretation: TranslationMap

    def problems(self, corpus1: Iterable[Sentence]) -> list[str]:
        out = []
        if self.bridge.c1.theory != self.extension.c1.theory or self.bridge.c2.theory != self.extension.c2.theory:
            out.append("the extension changes a theory")
        for s in corpus1:
            if self.bridge.c1.fragment.contains(s) and not self.bridge.c2.fragment.contains(self.interpretation(s)):
                out.append(f"ι leaves L2 on {print_canonical(s)}")
                break
        return out


@dataclass(frozen=True)
class ToyBridge:
    """Nullary atoms r_1..r_k and s_1..s_k, both theories empty, ι(r_i) = s_{π(i)},
    σ the pullback of an s-assignment along ι."""

    k: int
    perm: tuple
    bridge: BridgeDescriptor
    interpretation: TranslationMap
    inverse: TranslationMap
    universe2: tuple
    universe1: tuple

    @property
    def sig1(self) -> Signature:
        return self.bridge.c1.signature

    @property
    def sig2(self) -> Signature:
        return self.bridge.c2.signature


def toy_bridge(k: int = 3, perm: Sequence[int] | None = None) -> ToyBridge:
    perm = tuple(perm) if perm is not None else tuple(range(1, k + 1))
    if sorted(perm) != list(range(1, k + 1)):
        raise ValueError("perm must be a permutation of 1..k")
    sig1, sig2 = toy_signature(k, "r"), toy_signature(k, "s")
    L1, L2 = literal(sig1), literal(sig2)
    fwd = {f"r{i}": atom(f"s{perm[i - 1]}") for i in range(1, k + 1)}
    back = {f"s{perm[i - 1]}": atom(f"r{i}") for i in range(1, k + 1)}

    def sigma(M):
        true = [f"r{i}" for i in range(1, k + 1) if M.relations[f"s{perm[i - 1]}"]()]
        return propositional_model(sig1, true)

    bridge = BridgeDescriptor(Context(L1, empty_theory(sig1, "T1")),
                              Context(L2, empty_theory(sig2, "T2")), sigma,
                              f"toy{k}" + ("" if perm == tuple(range(1, k + 1)) else f"/{''.join(map(str, perm))}"))
    return ToyBridge(k, perm, bridge,
                     TranslationMap(L1, L2, rename_atoms(fwd), "iota", rename_atoms(back)),
                     TranslationMap(L2, L1, rename_atoms(back), "iota^-1", rename_atoms(fwd)),
                     tuple(all_assignments(sig2)), tuple(all_assignments(sig1)))


def identity_bridge(ctx: Context) -> BridgeDescriptor:
    return BridgeDescriptor(ctx, ctx, lambda M: M, "identity")


def residue_bridge(T1: Theory | None = None, T2: Theory | None = None,
                   F: FragmentDescriptor | None = None) -> BridgeDescriptor:
    F = F or exists(L_RING)
    F2 = FragmentDescriptor(F.kind, L_VAL, F.n, F.base)
    return BridgeDescriptor(Context(F, T1 or empty_theory(L_RING, "fields")),
                            Context(F2, T2 or empty_theory(L_VAL, "valued fields")),
                            residue_field, "residue")


# --------------------------------------------------------------------------
# Checks


def corpus_hash(corpus: Iterable[Sentence]) -> str:
    h = hashlib.sha256()
    for s in corpus:
        h.update(print_canonical(s).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class LawResult:
    law: str
    status: str  # "pass" | "fail"
    witness: str | None = None
    checked: int = 0
    corpus: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = {"law": self.law, "status": self.status, "checked": self.checked, "corpus": self.corpus}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _entails(T: Theory, s: Sentence, universe) -> bool:
    return T.entails(s, universe)


def verify_translation_laws(tau1: TranslationMap, tau2: TranslationMap | None,
                            c1: Context, c2: Context,
                            universe1: Sequence[FiniteStructure], universe2: Sequence[FiniteStructure],
                            corpus1: Sequence[Sentence], corpus2: Sequence[Sentence] | None = None
                            ) -> list[LawResult]:
    """Translation law for τ1 and, given τ2, both bitranslation laws.

    Entailment T ⊨ χ means truth in every universe model of T.
    """
    mods1, mods2 = c1.theory.models(universe1), c2.theory.models(universe2)
    if not mods1 or not mods2:
        raise UniverseEmpty("a theory has no model in its universe")
    corpus1 = [s for s in corpus1 if c1.fragment.contains(s)]
    if corpus2 is None:
        corpus2 = [tau1(s) for s in corpus1]
    corpus2 = [s for s in corpus2 if c2.fragment.contains(s)]
    h1, h2 = corpus_hash(corpus1), corpus_hash(corpus2)

    def holds(mods, s):
        return all(evaluate(M, s) for M in mods)

    out = []
    witness = None
    for s in corpus1:
        if holds(mods1, s) != holds(mods2, tau1(s)):
            witness = print_canonical(s)
            break
    out.append(LawResult("translation", "fail" if witness else "pass", witness, len(corpus1), h1))
    if tau2 is not None:
        witness = None
        for s in corpus2:
            if holds(mods2, s) != holds(mods1, tau2(s)):
                witness = print_canonical(s)
                break
        out.append(LawResult("translation-back", "fail" if witness else "pass", witness, len(corpus2), h2))
        witness = None
        for s in corpus1:
            if not holds(mods1, Iff(s, tau2(tau1(s)))):
                witness = print_canonical(s)
                break
        out.append(LawResult("bitrans1", "fail" if witness else "pass", witness, len(corpus1), h1))
        witness = None
        for s in corpus2:
            if not holds(mods2, Iff(s, tau1(tau2(s)))):
                witness = print_canonical(s)
                break
        out.append(LawResult("bitrans2", "fail" if witness else "pass", witness, len(corpus2), h2))
    return out


def _theory_vector(M: FiniteStructure, corpus: Sequence[Sentence]) -> frozenset:
    return frozenset(i for i, s in enumerate(corpus) if evaluate(M, s))


def verify_bridge_axioms(B: BridgeDescriptor, universe2: Sequence[FiniteStructure],
                         universe1: Sequence[FiniteStructure], corpus1: Sequence[Sentence],
                         corpus2: Sequence[Sentence], corpus1_hat: Sequence[Sentence] | None = None
                         ) -> dict[str, LawResult]:
    """(sur), (mon) and (wm) with Th_L(M) replaced by the corpus sentences
    of L true in M, and model classes replaced by the universes."""
    mods2 = B.c2.theory.models(universe2)
    mods1 = B.c1.theory.models(universe1)
    if not mods1 or not mods2:
        raise UniverseEmpty("a theory has no model in its universe")
    corpus1 = [s for s in corpus1 if B.c1.fragment.contains(s)]
    corpus2 = [s for s in corpus2 if B.c2.fragment.contains(s)]
    hat = list(corpus1_hat) if corpus1_hat is not None else corpus1
    h = corpus_hash(corpus1 + corpus2 + hat)

    images = [B.sigma(M) for M in mods2]
    th1_img = [_theory_vector(S, corpus1) for S in images]
    th1_hat_img = [_theory_vector(S, hat) for S in images]
    th2 = [_theory_vector(M, corpus2) for M in mods2]
    th1_N = [_theory_vector(N, corpus1) for N in mods1]
    th1_hat_N = [_theory_vector(N, hat) for N in mods1]

    report = {}
    witness = None
    for j, N in enumerate(mods1):
        if th1_N[j] not in th1_img:
            witness = N.name or f"universe1[{j}]"
            break
    report["sur"] = LawResult("sur", "fail" if witness else "pass", witness, len(mods1), h)

    witness = None
    for a, M in enumerate(mods2):
        for b, M2 in enumerate(mods2):
            if th1_img[a] <= th1_img[b] and not th2[a] <= th2[b]:
                missing = min(th2[a] - th2[b])
                witness = f"{M.name or a} vs {M2.name or b}: {print_canonical(corpus2[missing])}"
                break
        if witness:
            break
    report["mon"] = LawResult("mon", "fail" if witness else "pass", witness, len(mods2) ** 2, h)

    witness = None
    for a, M in enumerate(mods2):
        for j, N in enumerate(mods1):
            if th1_N[j] <= th1_img[a]:
                if not any(th1_hat_img[b] == th1_hat_N[j] and th2[b] <= th2[a] for b in range(len(mods2))):
                    witness = f"M={M.name or a}, N={N.name or j}"
                    break
        if witness:
            break
    report["wm"] = LawResult("wm", "fail" if witness else "pass", witness, len(mods1) * len(mods2), h)
    return report


def report_json(results) -> str:
    if isinstance(results, Mapping):
        results = list(results.values())
    return json.dumps([r.to_json() for r in results], sort_keys=True)
