"""Equivalence classes of automorphisms under automorphism SC decoding.

SC absorbs BLTA(2,1,...,1) whenever the first block has size > 1, so two
automorphisms give the same SC output iff ``A_1 A_2^{-1}`` is BLT with
structure ``(2,1,...,1)``.  Class representatives are built as ``P U`` with
``P`` permuting inside the blocks and ``U`` unit upper triangular inside the
blocks.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial, prod
from typing import Iterable, Sequence

import numpy as np

from .gf2 import (
    AffineTransform,
    BlockStructure,
    identity,
    is_blta_member,
    mat_inverse,
    mat_mul,
    permutation_matrix,
)


class SelectionExhausted(RuntimeError):
    """The thresholds could not be met for the requested number of representatives."""


def apply_affine(v, t: AffineTransform) -> np.ndarray:
    """Permute a length-``2^n`` vector: entry ``z`` moves to ``a z + b``."""
    v = np.asarray(v)
    perm = t.index_map()
    if v.shape[-1] != perm.size:
        raise ValueError(f"vector length {v.shape[-1]} does not match 2^{t.n}")
    out = np.empty_like(v)
    out[..., perm] = v
    return out


def ec_count(s: BlockStructure | Sequence[int]) -> int:
    """Number of SC equivalence classes of BLTA(s), i.e. |BLTA(s)| / |BLTA(2,1,...,1)|."""
    s = BlockStructure.of(s)
    if s.sizes[0] < 2:
        raise ValueError("first block must have size > 1 for BLTA(2,1,...,1) to be absorbed")
    total = prod(prod((1 << j) - 1 for j in range(2, si + 1)) for si in s.sizes)
    return total // 3


def count_au_ap(s: BlockStructure | Sequence[int]) -> tuple[int, int]:
    """Sizes of the block upper-triangular and block permutation automorphism sets."""
    s = BlockStructure.of(s)
    return (
        prod(1 << (si * (si - 1) // 2) for si in s.sizes),
        prod(factorial(si) for si in s.sizes),
    )


def hamming_distance(a, b) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


def same_ec(t1: AffineTransform, t2: AffineTransform) -> bool:
    """True iff ``t1`` and ``t2`` produce the same automorphism SC output."""
    n = t1.n
    if n < 2:
        return True
    prod_ = mat_mul(t1.a, mat_inverse(t2.a))
    return is_blta_member(prod_, BlockStructure.absorbed(n))


def u_positions(s: BlockStructure | Sequence[int]) -> list[tuple[int, int]]:
    """Strictly-upper in-block positions, blocks in order, row-major inside each block."""
    s = BlockStructure.of(s)
    return [(r, c) for lo, hi in s.bounds() for r in range(lo, hi) for c in range(r + 1, hi)]


@dataclass(frozen=True, eq=False)
class EcRepresentative:
    p_vec: np.ndarray  # p[i] = j  <=>  P[j, i] = 1
    u_vec: np.ndarray
    transform: AffineTransform

    @classmethod
    def build(cls, s: BlockStructure | Sequence[int], p_vec, u_vec) -> "EcRepresentative":
        s = BlockStructure.of(s)
        p_vec = np.asarray(p_vec, dtype=np.int64)
        u_vec = np.asarray(u_vec, dtype=np.uint8) & 1
        pos = u_positions(s)
        if sorted(p_vec.tolist()) != list(range(s.n)):
            raise ValueError(f"not a permutation: {p_vec.tolist()}")
        blk = s.block_index()
        if (blk[p_vec] != blk).any():
            raise ValueError("permutation leaves its blocks")
        if u_vec.shape != (len(pos),):
            raise ValueError(f"u_vec must have {len(pos)} bits")
        u = identity(s.n)
        for bit, (r, c) in zip(u_vec, pos):
            u[r, c] = bit
        a = mat_mul(permutation_matrix(p_vec), u)
        p_vec.setflags(write=False)
        u_vec.setflags(write=False)
        return cls(p_vec, u_vec, AffineTransform.linear(a))

    @classmethod
    def identity(cls, s: BlockStructure | Sequence[int]) -> "EcRepresentative":
        s = BlockStructure.of(s)
        return cls.build(s, np.arange(s.n), np.zeros(len(u_positions(s)), dtype=np.uint8))


def random_block_permutation(s: BlockStructure, rng: np.random.Generator) -> np.ndarray:
    return np.concatenate([lo + rng.permutation(hi - lo) for lo, hi in s.bounds()])


def generate_representatives(
    s: BlockStructure | Sequence[int],
    m_count: int,
    d: tuple[int, int] = (0, 0),
    rng: np.random.Generator | None = None,
    max_attempts: int | None = None,
) -> list[EcRepresentative]:
    """Draw ``m_count`` pairwise non-equivalent ``P U`` representatives.

    The identity comes first.  Each further candidate needs Hamming distance
    at least ``d = (d_u, d_p)`` to every accepted one on the ``u`` and ``p``
    vectors, and must not fall into an already covered class.
    """
    s = BlockStructure.of(s)
    d_u, d_p = d
    if d_u < 0 or d_p < 0:
        raise ValueError("thresholds must be non-negative")
    if m_count < 1:
        raise ValueError("need at least one representative")
    if m_count > ec_count(s):
        raise SelectionExhausted(f"only {ec_count(s)} classes exist for S={s}")
    rng = np.random.default_rng() if rng is None else rng
    if max_attempts is None:
        max_attempts = 10_000 * m_count
    m = len(u_positions(s))
    reps = [EcRepresentative.identity(s)]
    attempts = 0
    while len(reps) < m_count:
        if attempts >= max_attempts:
            raise SelectionExhausted(f"found {len(reps)} of {m_count} after {attempts} draws")
        attempts += 1
        p = random_block_permutation(s, rng)
        u = rng.integers(0, 2, size=m, dtype=np.uint8)
        if any(hamming_distance(u, r.u_vec) < d_u or hamming_distance(p, r.p_vec) < d_p for r in reps):
            continue
        cand = EcRepresentative.build(s, p, u)
        if any(same_ec(cand.transform, r.transform) for r in reps):
            continue
        reps.append(cand)
    return reps


def class_labels(transforms: Iterable[AffineTransform]) -> list[int]:
    """Group transforms by :func:`same_ec`; returns a class label per transform."""
    heads: list[AffineTransform] = []
    labels = []
    for t in transforms:
        for k, h in enumerate(heads):
            if same_ec(t, h):
                labels.append(k)
                break
        else:
            heads.append(t)
            labels.append(len(heads) - 1)
    return labels
