"""Finite structures and Tarski evaluation by quantifier exhaustion.

Structures interpret symbols by Python callables, so large prime fields need
no tables; table-driven structures (JSON, small rings) wrap their tables.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Any, Callable, Mapping, Sequence

from .logic import (
    And, App, Bot, Eq, Exists, Forall, Formula, Iff, Implies, L_O, L_RING, L_VAL,
    BUILTIN_SIGNATURES, LogicError, Not, Or, Rel, Sentence, Signature, Top, Var,
    conj, print_canonical, term_vars, Term,
)
from .fragments import binder_name


class SignatureMismatch(LogicError):
    pass


class NotAField(ValueError):
    pass


class _Infinity:
    """The top element ∞ of the value set."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def _as_function(spec):
    if callable(spec):
        return spec
    table = dict(spec)
    return lambda *args: table[args]


def _as_relation(spec):
    if callable(spec):
        return spec
    if isinstance(spec, bool):
        return lambda: spec
    rows = frozenset(spec)
    return lambda *args: args in rows


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    signature: Signature
    carriers: Mapping[str, tuple]
    functions: Mapping[str, Callable] = field(default_factory=dict)
    relations: Mapping[str, Callable] = field(default_factory=dict)
    constants: Mapping[str, Any] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "carriers", MappingProxyType(
            {s: tuple(c) for s, c in self.carriers.items()}))
        object.__setattr__(self, "functions", MappingProxyType(
            {k: _as_function(v) for k, v in self.functions.items()}))
        object.__setattr__(self, "relations", MappingProxyType(
            {k: _as_relation(v) for k, v in self.relations.items()}))
        object.__setattr__(self, "constants", MappingProxyType(dict(self.constants)))
        object.__setattr__(self, "_compiled", {})
        missing = self.signature.symbols() - self.symbols()
        if missing:
            raise SignatureMismatch(f"{self.name or 'structure'} does not interpret {sorted(missing)}")
        for s in self.signature.sorts:
            if s not in self.carriers:
                raise SignatureMismatch(f"no carrier for sort {s}")

    def symbols(self) -> set[str]:
        return set(self.functions) | set(self.relations) | set(self.constants)

    def size(self, sort: str | None = None) -> int:
        if sort is None:
            sort = self.signature.sorts[0]
        return len(self.carriers[sort])

    def __repr__(self):
        return f"FiniteStructure({self.name or self.signature.name})"


# --------------------------------------------------------------------------
# Evaluation


def _compile_term(t: Term, M: FiniteStructure, slots: dict) -> Callable:
    if isinstance(t, Var):
        i = slots[t.name]
        return lambda env: env[i]
    if not t.args:
        value = M.constants[t.fn]
        return lambda env: value
    fn = M.functions[t.fn]
    if not any(term_vars(a) for a in t.args):
        value = fn(*(_compile_term(a, M, slots)(None) for a in t.args))
        return lambda env: value
    parts = [_compile_term(a, M, slots) for a in t.args]
    if len(parts) == 1:
        (a,) = parts
        return lambda env: fn(a(env))
    if len(parts) == 2:
        a, b = parts
        return lambda env: fn(a(env), b(env))
    return lambda env: fn(*(p(env) for p in parts))


def _compile(f: Formula, M: FiniteStructure, slots: dict, depth: int, width: list) -> Callable:
    cls = type(f)
    if cls is Top:
        return lambda env: True
    if cls is Bot:
        return lambda env: False
    if cls is Eq:
        a = _compile_term(f.left, M, slots)
        b = _compile_term(f.right, M, slots)
        return lambda env: a(env) == b(env)
    if cls is Rel:
        rel = M.relations[f.name]
        if not f.args:
            value = bool(rel())
            return lambda env: value
        parts = [_compile_term(a, M, slots) for a in f.args]
        return lambda env: bool(rel(*(p(env) for p in parts)))
    if cls is Not:
        a = _compile(f.arg, M, slots, depth, width)
        return lambda env: not a(env)
    if cls in (And, Or, Implies, Iff):
        a = _compile(f.left, M, slots, depth, width)
        b = _compile(f.right, M, slots, depth, width)
        if cls is And:
            return lambda env: a(env) and b(env)
        if cls is Or:
            return lambda env: a(env) or b(env)
        if cls is Implies:
            return lambda env: (not a(env)) or b(env)
        return lambda env: a(env) == b(env)
    if cls in (Exists, Forall):
        carrier = M.carriers[f.sort]
        width[0] = max(width[0], depth + 1)
        body = _compile(f.body, M, {**slots, f.var: depth}, depth + 1, width)
        d = depth
        if cls is Exists:
            def exists(env):
                for x in carrier:
                    env[d] = x
                    if body(env):
                        return True
                return False
            return exists

        def forall(env):
            for x in carrier:
                env[d] = x
                if not body(env):
                    return False
            return True
        return forall
    raise TypeError(f"not a formula: {f!r}")


def compile_sentence(M: FiniteStructure, s: Sentence) -> Callable[[], bool]:
    cache = M._compiled
    hit = cache.get(s)
    if hit is not None:
        return hit
    width = [0]
    try:
        fn = _compile(s, M, {}, 0, width)
    except KeyError as exc:
        raise SignatureMismatch(f"{M!r} does not interpret {exc.args[0]}") from None
    n = width[0]
    run = (lambda: fn(None)) if n == 0 else (lambda: fn([None] * n))
    if len(cache) < 50_000:
        cache[s] = run
    return run


def _propositional_value(f: Formula, rels) -> bool:
    cls = type(f)
    if cls is Rel:
        if f.args:
            raise SignatureMismatch(f"{f.name} applied to terms in a structure without carriers")
        try:
            return bool(rels[f.name]())
        except KeyError:
            raise SignatureMismatch(f"no interpretation of {f.name}") from None
    if cls is Not:
        return not _propositional_value(f.arg, rels)
    if cls is And:
        return _propositional_value(f.left, rels) and _propositional_value(f.right, rels)
    if cls is Or:
        return _propositional_value(f.left, rels) or _propositional_value(f.right, rels)
    if cls is Top:
        return True
    if cls is Bot:
        return False
    if cls is Implies:
        return (not _propositional_value(f.left, rels)) or _propositional_value(f.right, rels)
    if cls is Iff:
        return _propositional_value(f.left, rels) == _propositional_value(f.right, rels)
    raise SignatureMismatch(f"{type(f).__name__} needs a sorted structure")


def evaluate(M: FiniteStructure, s: Sentence) -> bool:
    """M ⊨ s, by exhausting the finite carriers."""
    if not M.carriers:
        return _propositional_value(s, M.relations)
    return compile_sentence(M, s)()


def evaluate_term(M: FiniteStructure, t: Term, assignment: Mapping[str, Any] | None = None):
    names = list(assignment or {})
    fn = _compile_term(t, M, {n: i for i, n in enumerate(names)})
    return fn([assignment[n] for n in names])


# --------------------------------------------------------------------------
# Rings and fields


def finite_ring(elements: Sequence, add: Callable, mul: Callable, zero, one,
                name: str, check: bool = True) -> FiniteStructure:
    """Commutative ring with 1 over ``elements`` as an L_ring structure."""
    elements = tuple(elements)
    negs = {}
    for a in elements:
        inv = [b for b in elements if add(a, b) == zero]
        if len(inv) != 1:
            raise ValueError(f"{name}: {a} has no unique additive inverse")
        negs[a] = inv[0]
    plus = {(a, b): add(a, b) for a in elements for b in elements}
    minus = {(a, b): add(a, negs[b]) for a in elements for b in elements}
    times = {(a, b): mul(a, b) for a in elements for b in elements}
    M = FiniteStructure(
        L_RING, {"K": elements},
        {"+.K": plus, "-.K": minus, "*.K": times},
        {}, {"0.K": zero, "1.K": one}, name,
    )
    if check and len(elements) <= 32:
        problems = ring_axiom_violations(M)
        if problems:
            raise ValueError(f"{name} is not a commutative ring: {problems[0]}")
    return M


def ring_axiom_violations(M: FiniteStructure, sort: str = "K") -> list[str]:
    suffix = "." + sort
    el = M.carriers[sort]
    add, sub, mul = (M.functions[s + suffix] for s in "+-*")
    zero, one = M.constants["0" + suffix], M.constants["1" + suffix]
    out = []
    for a in el:
        if add(a, zero) != a:
            out.append(f"{a}+0")
        if mul(a, one) != a:
            out.append(f"{a}*1")
        for b in el:
            if add(a, b) != add(b, a) or mul(a, b) != mul(b, a):
                out.append(f"commutativity at {a},{b}")
            if add(sub(a, b), b) != a:
                out.append(f"subtraction at {a},{b}")
            for c in el:
                if add(add(a, b), c) != add(a, add(b, c)):
                    out.append(f"+ associativity at {a},{b},{c}")
                if mul(mul(a, b), c) != mul(a, mul(b, c)):
                    out.append(f"* associativity at {a},{b},{c}")
                if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)):
                    out.append(f"distributivity at {a},{b},{c}")
        if len(out) > 10:
            break
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def primes_up_to(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(bound ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i, v in enumerate(sieve) if v]


@lru_cache(maxsize=512)
def prime_field(p: int) -> FiniteStructure:
    if not is_prime(p):
        raise NotAField(f"{p} is not prime")
    return FiniteStructure(
        L_RING, {"K": range(p)},
        {"+.K": lambda a, b: (a + b) % p,
         "-.K": lambda a, b: (a - b) % p,
         "*.K": lambda a, b: (a * b) % p},
        {}, {"0.K": 0, "1.K": 1}, f"F_{p}",
    )


@lru_cache(maxsize=64)
def zmod(n: int) -> FiniteStructure:
    if n < 2:
        raise ValueError("Z/n needs n >= 2")
    return finite_ring(range(n), lambda a, b: (a + b) % n, lambda a, b: (a * b) % n,
                       0, 1, f"Z/{n}")


def _digits(x: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(x % p)
        x //= p
    return out


def _undigits(ds: Sequence[int], p: int) -> int:
    x = 0
    for d in reversed(ds):
        x = x * p + d
    return x


def poly_quotient(p: int, modulus: Sequence[int], name: str | None = None) -> FiniteStructure:
    """F_p[x]/(modulus) for a monic ``modulus`` given low-degree first.

    Elements are encoded as integers whose base-p digits are the residue's
    coefficients.
    """
    modulus = [c % p for c in modulus]
    k = len(modulus) - 1
    if k < 1 or modulus[-1] != 1:
        raise ValueError("modulus must be monic of degree >= 1")

    def add(a, b):
        return _undigits([(x + y) % p for x, y in zip(_digits(a, p, k), _digits(b, p, k))], p)

    def mul(a, b):
        da, db = _digits(a, p, k), _digits(b, p, k)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
        for d in range(len(prod) - 1, k - 1, -1):
            c = prod[d]
            if c:
                for i in range(k + 1):
                    prod[d - k + i] = (prod[d - k + i] - c * modulus[i]) % p
        return _undigits(prod[:k], p)

    if name is None:
        terms = [f"x^{i}" if i > 1 else ("x" if i == 1 else "1")
                 for i, c in enumerate(modulus) if c]
        name = f"F_{p}[x]/({'+'.join(reversed(terms))})"
    return finite_ring(range(p ** k), add, mul, 0, 1, name)


def _irreducible(p: int, k: int) -> list[int]:
    for tail in itertools.product(range(p), repeat=k):
        candidate = list(tail) + [1]
        if candidate[0] == 0:
            continue
        # degree <= 3 irreducibility is root-freeness; general k by trial division
        if _is_irreducible(candidate, p):
            return candidate
    raise ValueError(f"no irreducible of degree {k} over F_{p}")


def _is_irreducible(f: list[int], p: int) -> bool:
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            if _poly_mod(f, g, p) == [0] * d:
                return False
    return True


def _poly_mod(f: list[int], g: list[int], p: int) -> list[int]:
    r = list(f)
    dg = len(g) - 1
    for d in range(len(r) - 1, dg - 1, -1):
        c = r[d] % p
        if c:
            for i in range(dg + 1):
                r[d - dg + i] = (r[d - dg + i] - c * g[i]) % p
    return [x % p for x in r[:dg]]


@lru_cache(maxsize=32)
def galois_field(q: int) -> FiniteStructure:
    for p in range(2, q + 1):
        if q % p == 0:
            break
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1 or not is_prime(p):
        raise NotAField(f"{q} is not a prime power")
    if k == 1:
        return zmod(p) if p <= 32 else prime_field(p)
    return poly_quotient(p, _irreducible(p, k), name=f"F_{q}")


def is_field(M: FiniteStructure, sort: str = "K") -> bool:
    suffix = "." + sort
    el = M.carriers[sort]
    zero, one = M.constants["0" + suffix], M.constants["1" + suffix]
    if zero == one:
        return False
    mul = M.functions["*" + suffix]
    return all(any(mul(a, b) == one for b in el) for a in el if a != zero)


# --------------------------------------------------------------------------
# Valued wrappers and propositional models


def trivially_valued(F: FiniteStructure) -> FiniteStructure:
    """(F, v_triv) as a three-sorted valued field; residue field = F."""
    if F.signature.sorts != ("K",) or not is_field(F):
        raise NotAField(f"{F!r} is not a field")
    zero = F.constants["0.K"]
    fns = {}
    for sort in ("K", "k"):
        for op in "+-*":
            fns[f"{op}.{sort}"] = F.functions[f"{op}.K"]
    fns["+.G"] = lambda a, b: INF if a is INF or b is INF else 0
    fns["v"] = lambda x: INF if x == zero else 0
    fns["res"] = lambda x: x
    consts = {"0.K": zero, "1.K": F.constants["1.K"], "0.k": zero,
              "1.k": F.constants["1.K"], "0.G": 0, "inf.G": INF}
    carrier = F.carriers["K"]
    return FiniteStructure(
        L_VAL, {"K": carrier, "k": carrier, "G": (0, INF)}, fns,
        {"<.G": lambda a, b: a == 0 and b is INF}, consts,
        f"({F.name},v_triv)",
    )


def residue_field(M: FiniteStructure) -> FiniteStructure:
    """The structure map σ_k: the residue sort of a valued structure as a ring."""
    fns = {f"{op}.K": M.functions[f"{op}.k"] for op in "+-*"}
    consts = {"0.K": M.constants["0.k"], "1.K": M.constants["1.k"]}
    return FiniteStructure(L_RING, {"K": M.carriers["k"]}, fns, {}, consts,
                           f"res({M.name})")


def onesorted_view(M: FiniteStructure) -> FiniteStructure:
    """The L_O structure of a valued structure: O is the valuation ring."""
    v, lt, zero_g = M.functions["v"], M.relations["<.G"], M.constants["0.G"]
    fns = {f"{op}.K": M.functions[f"{op}.K"] for op in "+-*"}
    consts = {"0.K": M.constants["0.K"], "1.K": M.constants["1.K"]}
    return FiniteStructure(L_O, {"K": M.carriers["K"]}, fns,
                           {"O": lambda x: not lt(v(x), zero_g)}, consts,
                           f"O({M.name})")


def propositional_model(sig: Signature, true_atoms) -> FiniteStructure:
    true_atoms = set(true_atoms)
    rels = {a: (a in true_atoms) for a in sig.relations}
    name = "{" + ",".join(sorted(true_atoms, key=_atom_key)) + "}"
    return FiniteStructure(sig, {}, {}, rels, {}, name)


def _atom_key(name: str):
    digits = "".join(c for c in name if c.isdigit())
    return (name.rstrip("0123456789"), int(digits) if digits else 0)


def all_assignments(sig: Signature) -> list[FiniteStructure]:
    atoms = sorted(sig.relations, key=_atom_key)
    out = []
    for bits in itertools.product((False, True), repeat=len(atoms)):
        out.append(propositional_model(sig, [a for a, b in zip(atoms, bits) if b]))
    return out


# --------------------------------------------------------------------------
# JSON tables


def structure_from_json(data: Mapping | str) -> FiniteStructure:
    """Load ``{signature?, name?, sorts:{S:[...]}, functions:{f:[[args..,val],..]},
    relations:{R:[[args..],..]}}``. Nullary functions are constants."""
    if isinstance(data, str):
        data = json.loads(data)
    sig_name = data.get("signature", "ring")
    sig = BUILTIN_SIGNATURES[sig_name] if sig_name in BUILTIN_SIGNATURES else None
    sorts = {s: tuple(_freeze(x) for x in els) for s, els in data["sorts"].items()}
    fns, consts = {}, {}
    for name, rows in data.get("functions", {}).items():
        rows = [tuple(_freeze(x) for x in r) for r in rows]
        if rows and len(rows[0]) == 1:
            consts[name] = rows[0][0]
        else:
            fns[name] = {r[:-1]: r[-1] for r in rows}
    consts.update({k: _freeze(v) for k, v in data.get("constants", {}).items()})
    rels = {}
    for name, rows in data.get("relations", {}).items():
        rels[name] = frozenset(tuple(_freeze(x) for x in r) for r in rows)
    if sig is None:
        raise SignatureMismatch(f"unknown signature {sig_name!r}")
    return FiniteStructure(sig, sorts, fns, rels, consts, data.get("name", ""))


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(y) for y in x)
    if x == "inf":
        return INF
    return x


def _thaw(x):
    return "inf" if x is INF else x


def structure_to_json(M: FiniteStructure) -> dict:
    sig = M.signature
    fns = {}
    for name, (args, _) in sig.functions.items():
        fn = M.functions[name]
        rows = []
        for combo in itertools.product(*(M.carriers[a] for a in args)):
            rows.append([*map(_thaw, combo), _thaw(fn(*combo))])
        fns[name] = rows
    for name in sig.constants:
        fns[name] = [[_thaw(M.constants[name])]]
    rels = {}
    for name, args in sig.relations.items():
        rel = M.relations[name]
        rels[name] = [list(map(_thaw, combo))
                      for combo in itertools.product(*(M.carriers[a] for a in args))
                      if rel(*combo)]
    return {
        "signature": sig.name,
        "name": M.name,
        "sorts": {s: [_thaw(x) for x in M.carriers[s]] for s in sig.sorts},
        "functions": fns,
        "relations": rels,
    }


# --------------------------------------------------------------------------
# ∃_n-inclusion via generated substructures


@dataclass(frozen=True)
class Substructure:
    generators: tuple
    elements: Mapping[str, tuple]  # per sort, in order of first naming
    terms: Mapping[Any, Term]  # (sort, element) -> naming term


@dataclass(frozen=True)
class InclusionResult:
    holds: bool
    n: int
    substructure: Substructure | None = None
    witness: Sentence | None = None
    embeddings_checked: int = 0

    def __bool__(self):
        return self.holds


def generated_substructure(M: FiniteStructure, gens: Sequence, sort: str | None = None) -> Substructure:
    """Closure of ``gens`` (all of one sort) and the constants under every
    function symbol; each element is named by the first term reaching it."""
    sig = M.signature
    sort = sort or sig.sorts[0]
    names: dict = {}
    order: dict[str, list] = {s: [] for s in sig.sorts}

    def add(s, x, t):
        if (s, x) not in names:
            names[(s, x)] = t
            order[s].append(x)
            return True
        return False

    for i, g in enumerate(gens):
        add(sort, g, Var(binder_name(i), sort))
    for c, s in sig.constants.items():
        add(s, M.constants[c], App(c, ()))
    changed = True
    while changed:
        changed = False
        for fn, (args, res) in sig.functions.items():
            f = M.functions[fn]
            for combo in itertools.product(*(list(order[a]) for a in args)):
                x = f(*combo)
                if add(res, x, App(fn, tuple(names[(a, y)] for a, y in zip(args, combo)))):
                    changed = True
    return Substructure(tuple(gens), MappingProxyType({s: tuple(v) for s, v in order.items()}),
                        MappingProxyType(names))


def _diagram(M: FiniteStructure, sub: Substructure, sort: str) -> list[Formula]:
    sig = M.signature
    names = sub.terms
    lits: list[Formula] = []
    for i, g in enumerate(sub.generators):
        t = names[(sort, g)]
        if t != Var(binder_name(i), sort):
            lits.append(Eq(Var(binder_name(i), sort), t))
    for c, s in sig.constants.items():
        t = names[(s, M.constants[c])]
        if t != App(c, ()):
            lits.append(Eq(App(c, ()), t))
    for fn, (args, res) in sig.functions.items():
        f = M.functions[fn]
        for combo in itertools.product(*(sub.elements[a] for a in args)):
            lhs = App(fn, tuple(names[(a, y)] for a, y in zip(args, combo)))
            rhs = names[(res, f(*combo))]
            if lhs != rhs:
                lits.append(Eq(lhs, rhs))
    for rel, args in sig.relations.items():
        r = M.relations[rel]
        for combo in itertools.product(*(sub.elements[a] for a in args)):
            atom = Rel(rel, tuple(names[(a, y)] for a, y in zip(args, combo)))
            lits.append(atom if r(*combo) else Not(atom))
    for s in sig.sorts:
        els = sub.elements[s]
        for i, x in enumerate(els):
            for y in els[i + 1:]:
                lits.append(Not(Eq(names[(s, x)], names[(s, y)])))
    return lits


def _embeds(M: FiniteStructure, N: FiniteStructure, sub: Substructure, sort: str):
    """Images of the generators in N (lexicographic by carrier index) that
    extend to an embedding of the generated substructure, or None."""
    sig = M.signature
    k = len(sub.generators)
    tried = 0
    for images in itertools.product(N.carriers[sort], repeat=k):
        tried += 1
        env = {binder_name(i): b for i, b in enumerate(images)}
        h = {}
        ok = True
        for (s, x), t in sub.terms.items():
            h[(s, x)] = evaluate_term(N, t, env)
        for s in sig.sorts:
            imgs = [h[(s, x)] for x in sub.elements[s]]
            if len(set(imgs)) != len(imgs):
                ok = False
                break
        if ok:
            for fn, (args, res) in sig.functions.items():
                f, g = M.functions[fn], N.functions[fn]
                for combo in itertools.product(*(sub.elements[a] for a in args)):
                    if h[(res, f(*combo))] != g(*(h[(a, y)] for a, y in zip(args, combo))):
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            for c, s in sig.constants.items():
                if h[(s, M.constants[c])] != N.constants[c]:
                    ok = False
        if ok:
            for rel, args in sig.relations.items():
                r, q = M.relations[rel], N.relations[rel]
                for combo in itertools.product(*(sub.elements[a] for a in args)):
                    if bool(r(*combo)) != bool(q(*(h[(a, y)] for a, y in zip(args, combo)))):
                        ok = False
                        break
        if ok:
            return images, tried
    return None, tried


def _minimise(lits: list[Formula], wrap, N: FiniteStructure) -> list[Formula]:
    """Greedily drop literals (longest first) while the wrapped conjunction
    stays false in N."""
    keep = sorted(lits, key=lambda f: (len(print_canonical(f)), print_canonical(f)))
    for lit in sorted(keep, key=lambda f: -len(print_canonical(f))):
        trial = [x for x in keep if x is not lit]
        if not evaluate(N, wrap(trial)):
            keep = trial
    return keep


def exists_n_inclusion(M: FiniteStructure, N: FiniteStructure, n: int,
                       sort: str | None = None) -> InclusionResult:
    """Decide Th_∃n(M) ⊆ Th_∃n(N): every substructure of M generated by at
    most n elements must embed into N."""
    if M.signature != N.signature:
        raise SignatureMismatch(f"{M!r} and {N!r} have different signatures")
    sig = M.signature
    sort = sort or sig.sorts[0]
    seen = set()
    checked = 0
    tuples = itertools.product(M.carriers[sort], repeat=n) if n > 0 else [()]
    for gens in tuples:
        sub = generated_substructure(M, gens, sort)
        key = tuple((s, frozenset(sub.elements[s])) for s in sig.sorts)
        if key in seen:
            continue
        seen.add(key)
        images, tried = _embeds(M, N, sub, sort)
        checked += tried
        if images is None:
            def wrap(parts, k=len(gens)):
                body = conj(parts)
                for i in reversed(range(k)):
                    body = Exists(binder_name(i), sort, body)
                return body
            lits = _minimise(_diagram(M, sub, sort), wrap, N)
            return InclusionResult(False, n, sub, wrap(lits), checked)
    return InclusionResult(True, n, None, None, checked)
