"""Binary linear algebra over GF(2) and block-lower-triangular affine groups.

Matrices are plain ``numpy`` arrays of ``uint8`` holding 0/1 entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np


class SingularMatrixError(ValueError):
    """Raised when a matrix has no inverse over GF(2)."""


def as_bin(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint8) & 1


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.uint8)


def mat_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix product over GF(2)."""
    x = as_bin(x)
    y = as_bin(y)
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[0]:
        raise ValueError(f"dimension mismatch: {x.shape} @ {y.shape}")
    return ((x.astype(np.int64) @ y.astype(np.int64)) & 1).astype(np.uint8)


def mat_vec(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    x = as_bin(x)
    v = as_bin(v)
    if x.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: {x.shape} @ {v.shape}")
    return ((x.astype(np.int64) @ v.astype(np.int64)) & 1).astype(np.uint8)


def rank(x: np.ndarray) -> int:
    """Rank over GF(2) by row reduction."""
    m = as_bin(x).copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivots = np.nonzero(m[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + pivots[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hit = np.nonzero(m[:, c])[0]
        hit = hit[hit != r]
        m[hit] ^= m[r]
        r += 1
    return r


def is_invertible(x: np.ndarray) -> bool:
    x = as_bin(x)
    return x.shape[0] == x.shape[1] and rank(x) == x.shape[0]


def mat_inverse(x: np.ndarray) -> np.ndarray:
    """Inverse over GF(2) by Gauss-Jordan elimination on ``[x | I]``."""
    x = as_bin(x)
    n, m = x.shape
    if n != m:
        raise ValueError(f"matrix is not square: {x.shape}")
    aug = np.concatenate([x, identity(n)], axis=1)
    for c in range(n):
        pivots = np.nonzero(aug[c:, c])[0]
        if pivots.size == 0:
            raise SingularMatrixError("matrix is singular over GF(2)")
        p = c + pivots[0]
        if p != c:
            aug[[c, p]] = aug[[p, c]]
        hit = np.nonzero(aug[:, c])[0]
        hit = hit[hit != c]
        aug[hit] ^= aug[c]
    return aug[:, n:].copy()


def permutation_matrix(p: Sequence[int]) -> np.ndarray:
    """Matrix ``P`` with ``P[p[i], i] = 1``, i.e. ``P e_i = e_{p[i]}``."""
    n = len(p)
    m = np.zeros((n, n), dtype=np.uint8)
    m[np.asarray(p), np.arange(n)] = 1
    return m


def permutation_vector(pm: np.ndarray) -> np.ndarray:
    """Inverse of :func:`permutation_matrix`."""
    pm = as_bin(pm)
    if not (pm.sum(axis=0) == 1).all() or not (pm.sum(axis=1) == 1).all():
        raise ValueError("not a permutation matrix")
    return np.argmax(pm, axis=0)


class RowSpace:
    """Row space of a binary matrix, for fast membership queries.

    Rows are packed into Python integers and kept in reduced echelon form
    keyed by their leading bit.
    """

    def __init__(self, rows: Iterable) -> None:
        self._basis: dict[int, int] = {}
        for row in rows:
            self.add(row)

    @staticmethod
    def pack(row) -> int:
        bits = np.packbits(as_bin(row), bitorder="little")
        return int.from_bytes(bits.tobytes(), "little")

    def _reduce(self, v: int) -> int:
        while v:
            lead = v.bit_length() - 1
            b = self._basis.get(lead)
            if b is None:
                return v
            v ^= b
        return 0

    def add(self, row) -> bool:
        v = self._reduce(row if isinstance(row, int) else self.pack(row))
        if v == 0:
            return False
        self._basis[v.bit_length() - 1] = v
        return True

    def __contains__(self, row) -> bool:
        v = row if isinstance(row, int) else self.pack(row)
        return self._reduce(v) == 0

    @property
    def dim(self) -> int:
        return len(self._basis)


@dataclass(frozen=True)
class BlockStructure:
    """Ordered diagonal block sizes ``(s_1, ..., s_t)`` of a BLT matrix."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive: {self.sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def of(cls, s: "BlockStructure | Sequence[int]") -> "BlockStructure":
        return s if isinstance(s, cls) else cls(tuple(s))

    @classmethod
    def trivial(cls, n: int) -> "BlockStructure":
        return cls((1,) * n)

    @classmethod
    def absorbed(cls, n: int) -> "BlockStructure":
        """The structure ``(2, 1, ..., 1)``."""
        return cls((2,) + (1,) * (n - 2))

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def bounds(self) -> list[tuple[int, int]]:
        """Half-open ``(start, stop)`` index range of each block."""
        out, start = [], 0
        for s in self.sizes:
            out.append((start, start + s))
            start += s
        return out

    def block_index(self) -> np.ndarray:
        """Block number of each row/column."""
        return np.repeat(np.arange(len(self.sizes)), self.sizes)

    def mask(self) -> np.ndarray:
        """Boolean mask of the entries allowed to be nonzero in a BLT matrix."""
        blk = self.block_index()
        return blk[:, None] >= blk[None, :]

    def refines(self, coarser: "BlockStructure | Sequence[int]") -> bool:
        """True when every block boundary of ``coarser`` is also one of ours."""
        coarser = BlockStructure.of(coarser)
        if coarser.n != self.n:
            return False
        mine = {stop for _, stop in self.bounds()}
        return all(stop in mine for _, stop in coarser.bounds())

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self) -> int:
        return len(self.sizes)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.sizes)) + ")"


@dataclass(frozen=True, eq=False)
class AffineTransform:
    """The affine map ``z -> a z + b`` on ``GF(2)^n`` with invertible ``a``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        a = as_bin(self.a)
        b = as_bin(self.b)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or b.shape != (a.shape[0],):
            raise ValueError(f"bad shapes a={a.shape} b={b.shape}")
        if not is_invertible(a):
            raise SingularMatrixError("transformation matrix is not invertible")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def identity(cls, n: int) -> "AffineTransform":
        return cls(identity(n), np.zeros(n, dtype=np.uint8))

    @classmethod
    def linear(cls, a) -> "AffineTransform":
        a = as_bin(a)
        return cls(a, np.zeros(a.shape[0], dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return mat_vec(self.a, z) ^ self.b

    def compose(self, inner: "AffineTransform") -> "AffineTransform":
        """``self o inner``: apply ``inner`` first."""
        return AffineTransform(mat_mul(self.a, inner.a), self(inner.b))

    def inverse(self) -> "AffineTransform":
        ai = mat_inverse(self.a)
        return AffineTransform(ai, mat_vec(ai, self.b))

    def index_map(self) -> np.ndarray:
        """Image of every index ``z`` in ``[0, 2^n)``, bit ``j`` of ``z`` being coordinate ``j``."""
        n = self.n
        z = np.arange(1 << n)
        bits = ((z[:, None] >> np.arange(n)) & 1).astype(np.int64)
        img = ((bits @ self.a.T.astype(np.int64)) & 1) ^ self.b
        return img @ (1 << np.arange(n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffineTransform):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    def __hash__(self) -> int:
        return hash((self.a.tobytes(), self.b.tobytes()))


def is_blta_member(x: np.ndarray, s: BlockStructure | Sequence[int]) -> bool:
    """True iff ``x`` is invertible with no nonzero entry above the block diagonal of ``s``."""
    s = BlockStructure.of(s)
    x = as_bin(x)
    if x.shape != (s.n, s.n):
        raise ValueError(f"structure {s} does not match matrix of shape {x.shape}")
    if (x[~s.mask()] != 0).any():
        return False
    # a BLT matrix is invertible iff each diagonal block is
    return all(is_invertible(x[lo:hi, lo:hi]) for lo, hi in s.bounds())


def gl_size(m: int) -> int:
    return prod((1 << m) - (1 << i) for i in range(m))


def blta_size(s: BlockStructure | Sequence[int]) -> int:
    """Number of affine maps whose matrix is BLT with structure ``s``."""
    s = BlockStructure.of(s)
    n = s.n
    return (1 << (n * (n + 1) // 2)) * prod(
        prod((1 << j) - 1 for j in range(2, si + 1)) for si in s.sizes
    )


def _lu_row_pivot(c: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``perm, L, U`` with ``c[perm] = L U``, L unit lower and U unit upper triangular."""
    n = c.shape[0]
    u = c.copy()
    low = identity(n)
    perm = np.arange(n)
    for k in range(n):
        pivots = np.nonzero(u[k:, k])[0]
        if pivots.size == 0:
            raise SingularMatrixError("matrix is singular over GF(2)")
        p = k + pivots[0]
        if p != k:
            u[[k, p]] = u[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            low[[k, p], :k] = low[[p, k], :k]
        hit = k + 1 + np.nonzero(u[k + 1:, k])[0]
        u[hit] ^= u[k]
        low[hit, k] = 1
    return perm, low, u


def pul_decompose(t: AffineTransform) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split ``a z + b`` into ``P U (L z + b0)``.

    Returns ``(P, U, L, b0)`` with ``P`` a permutation matrix, ``U`` unit upper
    triangular and ``L`` unit lower triangular.  Obtained from a row-pivoted LU
    factorisation of the index-reversed matrix ``J a J``.
    """
    n = t.n
    rev = np.arange(n)[::-1]
    perm, low, up = _lu_row_pivot(t.a[np.ix_(rev, rev)])
    # J a J = Q^T L' U' with Q the row permutation, so a = (J Q^T J)(J L' J)(J U' J)
    q = np.zeros((n, n), dtype=np.uint8)
    q[np.arange(n), perm] = 1
    p_mat = q.T[np.ix_(rev, rev)].copy()
    u_mat = low[np.ix_(rev, rev)].copy()
    l_mat = up[np.ix_(rev, rev)].copy()
    b0 = mat_vec(mat_inverse(u_mat), mat_vec(p_mat.T, t.b))
    return p_mat, u_mat, l_mat, b0


def random_invertible(m: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        x = rng.integers(0, 2, size=(m, m), dtype=np.uint8)
        if is_invertible(x):
            return x


def sample_blta(s: BlockStructure | Sequence[int], rng: np.random.Generator) -> AffineTransform:
    """Uniform draw from BLTA(s)."""
    s = BlockStructure.of(s)
    n = s.n
    a = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
    a[~s.mask()] = 0
    for lo, hi in s.bounds():
        a[lo:hi, lo:hi] = random_invertible(hi - lo, rng)
    b = rng.integers(0, 2, size=n, dtype=np.uint8)
    return AffineTransform(a, b)


def enumerate_blt_matrices(s: BlockStructure | Sequence[int]):
    """Yield every invertible BLT matrix with structure ``s`` (small ``n`` only)."""
    s = BlockStructure.of(s)
    n = s.n
    free = np.argwhere(s.mask())
    for word in range(1 << len(free)):
        a = np.zeros((n, n), dtype=np.uint8)
        bits = (word >> np.arange(len(free))) & 1
        a[free[:, 0], free[:, 1]] = bits
        if all(is_invertible(a[lo:hi, lo:hi]) for lo, hi in s.bounds()):
            yield a


def compositions(n: int):
    """All ordered block structures summing to ``n``."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first,) + rest
