"""Multi-sorted first-order syntax: signatures, terms, formulas, and the
canonical S-expression text form.

Every sentence in the package is an immutable tree of the dataclasses below.
The canonical text form is the only serialization; Gödel codes, enumeration
order and golden tests are all defined on it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union


class LogicError(Exception):
    """Base class for errors raised by the syntax layer."""


class ParseError(LogicError):
    """Malformed S-expression or grammar violation."""


class SortError(LogicError):
    """Ill-sorted application, equality or quantifier."""


class FreeVariable(LogicError):
    """An open formula was given where a sentence is required."""


class UnknownSymbol(LogicError):
    """A symbol that the signature does not declare."""


# --------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True, eq=False)
class Signature:
    name: str
    sorts: tuple[str, ...]
    functions: Mapping[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)
    relations: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "functions", MappingProxyType(
            {k: (tuple(a), r) for k, (a, r) in self.functions.items()}))
        object.__setattr__(self, "relations", MappingProxyType(
            {k: tuple(a) for k, a in self.relations.items()}))
        object.__setattr__(self, "constants", MappingProxyType(dict(self.constants)))
        problems = self.problems()
        if problems:
            raise SortError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        seen: set[str] = set()
        for table in (self.functions, self.relations, self.constants):
            for name in table:
                if name in seen:
                    out.append(f"symbol {name!r} declared twice")
                seen.add(name)
        for name in seen & set(RESERVED):
            out.append(f"symbol {name!r} is reserved")
        sorts = set(self.sorts)
        for name, (args, res) in self.functions.items():
            for s in (*args, res):
                if s not in sorts:
                    out.append(f"function {name} uses undeclared sort {s}")
        for name, args in self.relations.items():
            for s in args:
                if s not in sorts:
                    out.append(f"relation {name} uses undeclared sort {s}")
        for name, s in self.constants.items():
            if s not in sorts:
                out.append(f"constant {name} uses undeclared sort {s}")
        return out

    def symbols(self) -> set[str]:
        return set(self.functions) | set(self.relations) | set(self.constants)

    def extend(self, name: str, *, sorts=(), functions=None, relations=None,
               constants=None) -> Signature:
        return Signature(
            name,
            self.sorts + tuple(s for s in sorts if s not in self.sorts),
            {**self.functions, **(functions or {})},
            {**self.relations, **(relations or {})},
            {**self.constants, **(constants or {})},
        )

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return (self.name, self.sorts, dict(self.functions), dict(self.relations),
                dict(self.constants)) == (other.name, other.sorts, dict(other.functions),
                                          dict(other.relations), dict(other.constants))

    def __hash__(self):
        return hash((self.name, self.sorts))

    def __repr__(self):
        return f"Signature({self.name!r})"


RESERVED = ("true", "false", "=", "not", "and", "or", "->", "<->", "exists", "forall")


def _field_symbols(sort: str) -> tuple[dict, dict]:
    binary = ((sort, sort), sort)
    return ({f"+.{sort}": binary, f"-.{sort}": binary, f"*.{sort}": binary},
            {f"0.{sort}": sort, f"1.{sort}": sort})


def _ring() -> Signature:
    fns, consts = _field_symbols("K")
    return Signature("ring", ("K",), fns, {}, consts)


def _val() -> Signature:
    fk, ck = _field_symbols("K")
    fr, cr = _field_symbols("k")
    fns = {**fk, **fr, "+.G": (("G", "G"), "G"), "v": (("K",), "G"), "res": (("K",), "k")}
    consts = {**ck, **cr, "0.G": "G", "inf.G": "G"}
    return Signature("val", ("K", "k", "G"), fns, {"<.G": ("G", "G")}, consts)


L_RING = _ring()
L_VAL = _val()
L_VAL_VARPI = L_VAL.extend("val-varpi", constants={"varpi": "K"})
L_O = L_RING.extend("onesorted", relations={"O": ("K",)})
# ring language with a name for the uniformizer t, used by the series search
L_RING_T = L_RING.extend("ring-t", constants={"varpi": "K"})

BUILTIN_SIGNATURES = {
    "ring": L_RING,
    "val": L_VAL,
    "val-varpi": L_VAL_VARPI,
    "onesorted": L_O,
    "ring-t": L_RING_T,
}


def propositional(atoms: Iterable[str], name: str | None = None) -> Signature:
    """Signature with only nullary relation symbols (no sorts)."""
    atoms = list(atoms)
    return Signature(name or "prop:" + ",".join(atoms), (), {}, {a: () for a in atoms}, {})


def toy_signature(k: int, prefix: str = "r") -> Signature:
    return propositional([f"{prefix}{i}" for i in range(1, k + 1)], name=f"toy-{prefix}{k}")


# --------------------------------------------------------------------------
# Terms and formulas


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True, slots=True)
class App:
    """Function application; constants are applications with no arguments."""
    fn: str
    args: tuple = ()


Term = Union[Var, App]


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class Bot:
    pass


@dataclass(frozen=True, slots=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Rel:
    name: str
    args: tuple = ()


@dataclass(frozen=True, slots=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    var: str
    sort: str
    body: "Formula"


Formula = Union[Top, Bot, Eq, Rel, Not, And, Or, Implies, Iff, Exists, Forall]
Sentence = Formula

TOP = Top()
BOT = Bot()

BINARY = {And: "and", Or: "or", Implies: "->", Iff: "<->"}
QUANTIFIERS = {Exists: "exists", Forall: "forall"}


def conj(parts: Sequence[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ⊤."""
    if not parts:
        return TOP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return BOT
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def atom(name: str) -> Rel:
    return Rel(name, ())


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.arg)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from subformulas(f.body)


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Rel):
        out: set[str] = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    return set()


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def symbols_of(f: Formula) -> set[str]:
    out: set[str] = set()

    def term(t):
        if isinstance(t, App):
            out.add(t.fn)
            for a in t.args:
                term(a)

    for g in subformulas(f):
        if isinstance(g, Eq):
            term(g.left)
            term(g.right)
        elif isinstance(g, Rel):
            out.add(g.name)
            for a in g.args:
                term(a)
    return out


def quantifier_count(f: Formula) -> int:
    return sum(isinstance(g, (Exists, Forall)) for g in subformulas(f))


def depth(f: Formula) -> int:
    """Height of the connective tree; atoms, ⊤ and ⊥ have depth 0."""
    if isinstance(f, Not):
        return 1 + depth(f.arg)
    if isinstance(f, (And, Or, Implies, Iff)):
        return 1 + max(depth(f.left), depth(f.right))
    if isinstance(f, (Exists, Forall)):
        return 1 + depth(f.body)
    return 0


# --------------------------------------------------------------------------
# Printing


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.fn
    return "(" + " ".join([t.fn, *map(print_term, t.args)]) + ")"


def print_canonical(f: Formula) -> str:
    """Canonical text of a formula.

    Nullary relation atoms print as a bare symbol, every other compound form
    is parenthesised; binary connectives are always binary.
    """
    parts: list[str] = []
    _emit(f, parts)
    return "".join(parts)


def _emit(f: Formula, out: list[str]) -> None:
    cls = type(f)
    if cls is Top:
        out.append("(true)")
    elif cls is Bot:
        out.append("(false)")
    elif cls is Eq:
        out.append(f"(= {print_term(f.left)} {print_term(f.right)})")
    elif cls is Rel:
        if f.args:
            out.append("(" + " ".join([f.name, *map(print_term, f.args)]) + ")")
        else:
            out.append(f.name)
    elif cls is Not:
        out.append("(not ")
        _emit(f.arg, out)
        out.append(")")
    elif cls in BINARY:
        out.append("(" + BINARY[cls] + " ")
        _emit(f.left, out)
        out.append(" ")
        _emit(f.right, out)
        out.append(")")
    elif cls in QUANTIFIERS:
        out.append(f"({QUANTIFIERS[cls]} ({f.var} {f.sort}) ")
        _emit(f.body, out)
        out.append(")")
    else:
        raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_IDENT = re.compile(r"[^\s()]+")


def read_sexpr(text: str):
    """Read exactly one S-expression into nested lists of strings."""
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise ParseError("empty input")
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == ")":
            raise ParseError("unexpected ')'")
        if tok != "(":
            return tok
        items = []
        while True:
            if pos >= len(tokens):
                raise ParseError("unbalanced '('")
            if tokens[pos] == ")":
                pos += 1
                return items
            items.append(read())

    out = read()
    if pos != len(tokens):
        raise ParseError(f"trailing input after position {pos}")
    return out


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse a possibly open formula; free variables are not allowed to be
    resolved (there is no binder to give them a sort) so they raise."""
    return _Reader(sig).formula(read_sexpr(text), {})


def parse_sentence(text: str, sig: Signature) -> Sentence:
    f = parse_formula(text, sig)
    errors = check_well_sorted(f, sig)
    if errors:
        raise SortError("; ".join(errors))
    return f


class _Reader:
    def __init__(self, sig: Signature):
        self.sig = sig

    def formula(self, sx, env: dict[str, str]) -> Formula:
        sig = self.sig
        if isinstance(sx, str):
            if sx in sig.relations:
                if sig.relations[sx]:
                    raise SortError(f"relation {sx} needs {len(sig.relations[sx])} arguments")
                return Rel(sx, ())
            if sx in ("true", "false"):
                raise ParseError(f"{sx} must be written ({sx})")
            raise UnknownSymbol(f"unknown atom {sx!r}")
        if not sx:
            raise ParseError("empty list")
        head, rest = sx[0], sx[1:]
        if not isinstance(head, str):
            raise ParseError("formula head must be a symbol")
        if head == "true" or head == "false":
            if rest:
                raise ParseError(f"({head}) takes no arguments")
            return TOP if head == "true" else BOT
        if head == "=":
            if len(rest) != 2:
                raise ParseError("= takes two terms")
            left, right = (self.term(t, env) for t in rest)
            ls, rs = self.sort_of(left), self.sort_of(right)
            if ls != rs:
                raise SortError(f"equality between sorts {ls} and {rs}")
            return Eq(left, right)
        if head == "not":
            if len(rest) != 1:
                raise ParseError("not takes one formula")
            return Not(self.formula(rest[0], env))
        if head in ("and", "or"):
            if len(rest) < 2:
                raise ParseError(f"{head} takes at least two formulas")
            parts = [self.formula(x, env) for x in rest]
            return conj(parts) if head == "and" else disj(parts)
        if head in ("->", "<->"):
            if len(rest) != 2:
                raise ParseError(f"{head} takes two formulas")
            left, right = (self.formula(x, env) for x in rest)
            return Implies(left, right) if head == "->" else Iff(left, right)
        if head in ("exists", "forall"):
            if len(rest) != 2 or not isinstance(rest[0], list) or len(rest[0]) != 2 \
                    or not all(isinstance(x, str) for x in rest[0]):
                raise ParseError(f"{head} expects ({head} (x SORT) body)")
            var, sort = rest[0]
            if sort not in sig.sorts:
                raise SortError(f"quantifier over undeclared sort {sort}")
            if var in sig.symbols() or var in RESERVED:
                raise ParseError(f"cannot bind symbol {var!r}")
            body = self.formula(rest[1], {**env, var: sort})
            return (Exists if head == "exists" else Forall)(var, sort, body)
        if head in sig.relations:
            want = sig.relations[head]
            if len(rest) != len(want):
                raise SortError(f"relation {head} takes {len(want)} arguments")
            args = tuple(self.term(t, env) for t in rest)
            for a, s in zip(args, want):
                if self.sort_of(a) != s:
                    raise SortError(f"argument of {head} has sort {self.sort_of(a)}, expected {s}")
            return Rel(head, args)
        raise UnknownSymbol(f"unknown formula head {head!r}")

    def term(self, sx, env: dict[str, str]) -> Term:
        sig = self.sig
        if isinstance(sx, str):
            if sx in env:
                return Var(sx, env[sx])
            if sx in sig.constants:
                return App(sx, ())
            if sx in sig.functions or sx in sig.relations:
                raise SortError(f"symbol {sx} used without arguments")
            raise FreeVariable(f"unbound variable {sx!r}")
        if not sx or not isinstance(sx[0], str):
            raise ParseError("term head must be a symbol")
        head, rest = sx[0], sx[1:]
        if head not in sig.functions:
            if head in sig.constants:
                raise SortError(f"constant {head} applied to arguments")
            raise UnknownSymbol(f"unknown function {head!r}")
        want, _ = sig.functions[head]
        if len(rest) != len(want):
            raise SortError(f"function {head} takes {len(want)} arguments")
        args = tuple(self.term(t, env) for t in rest)
        for a, s in zip(args, want):
            if self.sort_of(a) != s:
                raise SortError(f"argument of {head} has sort {self.sort_of(a)}, expected {s}")
        return App(head, args)

    def sort_of(self, t: Term) -> str:
        return term_sort(t, self.sig)


def term_sort(t: Term, sig: Signature) -> str:
    if isinstance(t, Var):
        return t.sort
    if t.fn in sig.constants:
        return sig.constants[t.fn]
    return sig.functions[t.fn][1]


# --------------------------------------------------------------------------
# Sort checking of programmatically built trees


def check_well_sorted(f: Formula, sig: Signature) -> list[str]:
    """All sort violations in ``f``; an empty list means well sorted."""
    errors: list[str] = []

    def term(t, env) -> str | None:
        if isinstance(t, Var):
            if t.sort not in sig.sorts:
                errors.append(f"variable {t.name} has undeclared sort {t.sort}")
                return None
            if t.name in env and env[t.name] != t.sort:
                errors.append(f"variable {t.name} used at sort {t.sort}, bound at {env[t.name]}")
            return t.sort
        if not isinstance(t, App):
            errors.append(f"not a term: {t!r}")
            return None
        if t.fn in sig.constants:
            if t.args:
                errors.append(f"constant {t.fn} applied to arguments")
            return sig.constants[t.fn]
        if t.fn not in sig.functions:
            errors.append(f"unknown function {t.fn}")
            return None
        want, res = sig.functions[t.fn]
        if len(t.args) != len(want):
            errors.append(f"function {t.fn} takes {len(want)} arguments, got {len(t.args)}")
            return res
        for a, s in zip(t.args, want):
            got = term(a, env)
            if got is not None and got != s:
                errors.append(f"SortError: argument of {t.fn} has sort {got}, expected {s}")
        return res

    def form(g, env):
        if isinstance(g, (Top, Bot)):
            return
        if isinstance(g, Eq):
            ls, rs = term(g.left, env), term(g.right, env)
            if ls is not None and rs is not None and ls != rs:
                errors.append(f"SortError: equality between sorts {ls} and {rs}")
        elif isinstance(g, Rel):
            if g.name not in sig.relations:
                errors.append(f"unknown relation {g.name}")
                return
            want = sig.relations[g.name]
            if len(g.args) != len(want):
                errors.append(f"relation {g.name} takes {len(want)} arguments, got {len(g.args)}")
                return
            for a, s in zip(g.args, want):
                got = term(a, env)
                if got is not None and got != s:
                    errors.append(f"SortError: argument of {g.name} has sort {got}, expected {s}")
        elif isinstance(g, Not):
            form(g.arg, env)
        elif isinstance(g, (And, Or, Implies, Iff)):
            form(g.left, env)
            form(g.right, env)
        elif isinstance(g, (Exists, Forall)):
            if g.sort not in sig.sorts:
                errors.append(f"quantifier binds undeclared sort {g.sort}")
            form(g.body, {**env, g.var: g.sort})
        else:
            errors.append(f"not a formula: {g!r}")

    form(f, {})
    return errors
