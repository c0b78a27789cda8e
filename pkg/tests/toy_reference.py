"""Direct truth-table decisions for the toy instance (atoms r1, r2, ...,
T = ∅, ρ_n = r_n), written from the model-class definitions of the strata
and sharing no code with the library oracles."""

import itertools

import numpy as np

from archlogic.logic import And, Bot, Iff, Implies, Not, Or, Rel, Top


def truth(f, true_atoms):
    if isinstance(f, Rel):
        return f.name in true_atoms
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not truth(f.arg, true_atoms)
    a, b = truth(f.left, true_atoms), truth(f.right, true_atoms)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    if isinstance(f, Implies):
        return (not a) or b
    if isinstance(f, Iff):
        return a == b
    raise TypeError(f)


def max_atom(f):
    if isinstance(f, Rel):
        return int(f.name[1:])
    if isinstance(f, Not):
        return max_atom(f.arg)
    if isinstance(f, (And, Or, Implies, Iff)):
        return max(max_atom(f.left), max_atom(f.right))
    return 0


def assignments(width):
    for bits in itertools.product((False, True), repeat=width):
        yield {f"r{i + 1}" for i, b in enumerate(bits) if b}


def holds_where(f, width, condition):
    """φ is true on every assignment of r1..r_width meeting condition."""
    return all(truth(f, a) for a in assignments(width) if condition(a))


def in_sigma(f):
    """Σ = T_L with T = ∅: validity."""
    return holds_where(f, max_atom(f), lambda a: True)


def in_sigma0(f):
    """T_0 = {ρ_n}: the single model where every atom is true."""
    w = max_atom(f)
    return truth(f, {f"r{i}" for i in range(1, w + 1)})


def in_sigma_n(f, n):
    """T_n = {ρ_1, …, ρ_{n-1}, ¬ρ_n}."""
    if n == 0:
        return in_sigma0(f)
    w = max(max_atom(f), n)
    return holds_where(f, w, lambda a: all(f"r{i}" in a for i in range(1, n)) and f"r{n}" not in a)


def in_sigma_gt(f, m):
    """∩_{n>m} Σ_n: models whose first false atom has index above m; over
    the mentioned atoms this is "r1..rm true"."""
    w = max(max_atom(f), m)
    return holds_where(f, w, lambda a: all(f"r{i}" in a for i in range(1, m + 1)))


def in_sigma_gg0(f):
    """∪_m ∩_{n≥m} Σ_n, checked at every m up to the first stable one."""
    return any(in_sigma_gt(f, m) for m in range(0, max_atom(f) + 2))


def columns(width):
    """Row r of the grid is the assignment with r_i true iff bit i-1 of r."""
    rows = np.arange(1 << width)
    return {f"r{i}": (rows >> (i - 1) & 1).astype(bool) for i in range(1, width + 1)}


def vector(f, cols):
    """Truth of f on every row at once."""
    if isinstance(f, Rel):
        return cols[f.name]
    n = len(next(iter(cols.values())))
    if isinstance(f, Top):
        return np.ones(n, dtype=bool)
    if isinstance(f, Bot):
        return np.zeros(n, dtype=bool)
    if isinstance(f, Not):
        return ~vector(f.arg, cols)
    a, b = vector(f.left, cols), vector(f.right, cols)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    if isinstance(f, Implies):
        return ~a | b
    if isinstance(f, Iff):
        return a == b
    raise TypeError(f)


class Table:
    """The truth table of f over r1..r_width, computed once; answers the
    same stratum questions as the functions above for formulas whose atoms
    lie among r1..r_width."""

    _grids: dict = {}

    def __init__(self, f, width):
        if width not in Table._grids:
            cols = columns(width)
            Table._grids[width] = cols
        self.cols = Table._grids[width]
        self.width = width
        self.values = vector(f, self.cols)

    def _all(self, condition):
        return bool(np.all(self.values[condition]))

    def sigma(self):
        return bool(self.values.all())

    def sigma0(self):
        return bool(self.values[-1])

    def sigma_n(self, n):
        if n == 0:
            return self.sigma0()
        assert n <= self.width
        prefix = np.ones(len(self.values), dtype=bool)
        for i in range(1, n):
            prefix &= self.cols[f"r{i}"]
        return self._all(prefix & ~self.cols[f"r{n}"])

    def sigma_gt(self, m):
        prefix = np.ones(len(self.values), dtype=bool)
        for i in range(1, m + 1):
            prefix &= self.cols[f"r{i}"]
        return self._all(prefix)
