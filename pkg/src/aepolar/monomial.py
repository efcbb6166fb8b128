"""Monomial-code view of polar codes.

A monomial over ``n`` binary variables is stored as an integer bitmask of its
variables.  Code-bit index ``i`` corresponds to the monomial whose variables
are the zero bits of ``i``; with this choice the evaluation of monomial ``i``
is exactly row ``i`` of ``T_2^{(x)n}`` and lower variable indices are more
reliable, so lower-triangular affine maps are automorphisms of every
decreasing code.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .gf2 import AffineTransform, BlockStructure, RowSpace, identity


class NotDecreasingError(ValueError):
    """Raised when an operation needs a decreasing monomial set."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def index_to_monomial(i: int, n: int) -> int:
    if not 0 <= i < 1 << n:
        raise ValueError(f"index {i} out of range for n={n}")
    return ~i & ((1 << n) - 1)


def monomial_to_index(m: int, n: int) -> int:
    if not 0 <= m < 1 << n:
        raise ValueError(f"monomial {m:#b} out of range for n={n}")
    return ~m & ((1 << n) - 1)


def degree(m: int) -> int:
    return popcount(m)


def variables(m: int) -> list[int]:
    return [j for j in range(m.bit_length()) if m >> j & 1]


def monomial_str(m: int) -> str:
    return "*".join(f"x{j}" for j in variables(m)) or "1"


def eval_monomial(m: int, n: int) -> np.ndarray:
    """Evaluation vector of length ``2^n``; entry ``z`` is ``m`` at the complement of ``z``."""
    z = np.arange(1 << n)
    # m(~z) = 1 iff every variable of m has its bit of z equal to 0
    return ((z & m) == 0).astype(np.uint8)


def kron_power(n: int) -> np.ndarray:
    t = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        t = np.kron(np.array([[1, 0], [1, 1]], dtype=np.uint8), t)
    return t


def predecessors(m: int, n: int) -> Iterator[int]:
    """Immediate lower neighbours of ``m`` in the universal partial order.

    These are the factors ``m / x_j`` and the shifts ``m x_{j-1} / x_j``; their
    transitive closure generates the whole order.
    """
    for j in range(n):
        if m >> j & 1:
            yield m & ~(1 << j)
            if j > 0 and not m >> (j - 1) & 1:
                yield (m & ~(1 << j)) | (1 << (j - 1))


def precedes(m1: int, m2: int) -> bool:
    """``m1 <= m2`` in the universal partial order (divisibility plus index domination)."""
    v1, v2 = variables(m1), variables(m2)
    if len(v1) > len(v2):
        return False
    # m1 must be dominated by some degree-|m1| factor of m2; matching the
    # largest indices of m2 is optimal
    tail = v2[len(v2) - len(v1):]
    return all(a <= b for a, b in zip(v1, tail))


@dataclass(frozen=True)
class MonomialSet:
    """A set of monomials over ``n`` variables.

    Doubles as a generating set ``G`` and, through the index bijection, as an
    information set.
    """

    n: int
    members: frozenset[int]

    def __post_init__(self) -> None:
        members = frozenset(int(m) for m in self.members)
        bad = [m for m in members if not 0 <= m < 1 << self.n]
        if bad:
            raise ValueError(f"monomials out of range for n={self.n}: {bad}")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "MonomialSet":
        return cls(n, frozenset(index_to_monomial(int(i), n) for i in indices))

    @classmethod
    def reed_muller(cls, r: int, n: int) -> "MonomialSet":
        return cls(n, frozenset(m for m in range(1 << n) if degree(m) <= r))

    def indices(self) -> list[int]:
        return sorted(monomial_to_index(m, self.n) for m in self.members)

    def with_members(self, extra: Iterable[int]) -> "MonomialSet":
        return MonomialSet(self.n, self.members | frozenset(extra))

    def generator_matrix(self) -> np.ndarray:
        rows = [eval_monomial(index_to_monomial(i, self.n), self.n) for i in self.indices()]
        return np.array(rows, dtype=np.uint8).reshape(len(rows), 1 << self.n)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __contains__(self, m: int) -> bool:
        return m in self.members


def is_decreasing(g: MonomialSet) -> bool:
    """True iff ``g`` contains all factors and antecedents of its members."""
    return all(p in g.members for m in g.members for p in predecessors(m, g.n))


def downward_closure(seed: MonomialSet) -> MonomialSet:
    """Smallest decreasing set containing ``seed``."""
    out = set(seed.members)
    stack = list(out)
    while stack:
        m = stack.pop()
        for p in predecessors(m, seed.n):
            if p not in out:
                out.add(p)
                stack.append(p)
    return MonomialSet(seed.n, frozenset(out))


def _require_decreasing(g: MonomialSet) -> None:
    if not is_decreasing(g):
        raise NotDecreasingError("monomial set is not decreasing")


def min_info_set(g: MonomialSet) -> MonomialSet:
    """Maximal elements of ``g``; their downward closure gives back ``g``."""
    _require_decreasing(g)
    below = {p for m in g.members for p in predecessors(m, g.n)}
    return MonomialSet(g.n, g.members - below)


def polar_transform(u: np.ndarray) -> np.ndarray:
    """``u T_N`` over GF(2) along the last axis (the transform is an involution)."""
    x = np.array(u, dtype=np.uint8, copy=True)
    size = x.shape[-1]
    lead = x.shape[:-1]
    h = 1
    while h < size:
        v = x.reshape(lead + (size // (2 * h), 2, h))
        v[..., 0, :] ^= v[..., 1, :]
        h *= 2
    return x


def is_automorphism(g: MonomialSet, t: AffineTransform) -> bool:
    """Check that ``t`` maps every generator row into the code (row-space membership)."""
    if t.n != g.n:
        raise ValueError(f"transform on {t.n} variables, code on {g.n}")
    rows = g.generator_matrix()
    space = RowSpace(rows)
    perm = t.index_map()
    for row in rows:
        moved = np.empty_like(row)
        moved[perm] = row
        if moved.tobytes() != row.tobytes() and moved not in space:
            return False
    return True


def elementary(n: int, i: int, j: int) -> AffineTransform:
    """The transvection ``I + E_ij``, i.e. ``x_i -> x_i + x_j``."""
    a = identity(n)
    a[i, j] ^= 1
    return AffineTransform.linear(a)


def aux_cell(g: MonomialSet, i: int, j: int) -> list[int]:
    """Monomials missing from ``g`` that keep ``x_i -> x_i + x_j`` from being an automorphism."""
    if i == j:
        return []
    bi, bj = 1 << i, 1 << j
    need = {(m & ~bi) | bj for m in g.members if m & bi and not m & bj}
    return sorted(need - g.members)


def compute_aux(g: MonomialSet) -> list[list[list[int]]]:
    """The ``n x n`` grid of :func:`aux_cell` lists; empty cells are free positions."""
    _require_decreasing(g)
    return [[aux_cell(g, i, j) for j in range(g.n)] for i in range(g.n)]


def free_positions(g: MonomialSet) -> np.ndarray:
    """Boolean ``n x n`` grid, True where the elementary transvection is an automorphism."""
    n = g.n
    free = np.ones((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            free[i, j] = not aux_cell(g, i, j)
    return free


def block_structure(g: MonomialSet) -> BlockStructure:
    """Coarsest block structure whose in-block transvections are all automorphisms."""
    _require_decreasing(g)
    free = free_positions(g)
    n = g.n
    sizes, start = [], 0
    while start < n:
        stop = start + 1
        while stop < n and free[start:stop, stop].all():
            stop += 1
        sizes.append(stop - start)
        start = stop
    return BlockStructure(tuple(sizes))
