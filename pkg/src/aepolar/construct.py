"""Reliability ordering by density evolution under the Gaussian approximation
and the automorphism-driven code design loop."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .gf2 import BlockStructure
from .monomial import (
    MonomialSet,
    aux_cell,
    block_structure,
    degree,
    downward_closure,
    is_decreasing,
)

log = logging.getLogger(__name__)

DEFAULT_SNR_STEP_DB = 0.25
DEFAULT_SNR_SPAN_DB = 4.0


class DesignFailure(RuntimeError):
    """No code with the requested parameters was found in the SNR sweep."""


def _log_phi(x: np.ndarray) -> np.ndarray:
    """log of the two-piece approximation of phi(x) = 1 - E[tanh(l/2)], l ~ N(x, 2x)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    small = (x > 0) & (x < 10)
    large = x >= 10
    out[small] = -0.4527 * x[small] ** 0.86 + 0.0218
    xl = x[large]
    out[large] = 0.5 * np.log(np.pi / xl) - xl / 4 + np.log1p(-10 / (7 * xl))
    return np.minimum(out, 0.0)


def _check_node_mean(m: np.ndarray, iters: int = 80) -> np.ndarray:
    """Mean LLR after a check node: phi^-1(1 - (1 - phi(m))^2), solved by bisection in the log domain."""
    m = np.asarray(m, dtype=float)
    lp = _log_phi(m)
    target = lp + np.log(2 - np.exp(lp))
    lo = np.zeros_like(m)
    hi = m.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = _log_phi(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def ga_means(N: int, snr_db: float) -> np.ndarray:
    """Mean LLR of every bit-channel of ``T_N`` for BPSK on AWGN at Es/N0 = ``snr_db``.

    The most significant index bit is the first polarisation step: a 0 bit takes
    the check-node update, a 1 bit doubles the mean.
    """
    n = int(N).bit_length() - 1
    if N < 1 or 1 << n != N:
        raise ValueError(f"N must be a power of two, got {N}")
    sigma2 = 1.0 / (2.0 * 10.0 ** (snr_db / 10.0))
    m = np.array([2.0 / sigma2])
    for _ in range(n):
        nxt = np.empty(2 * m.size)
        nxt[0::2] = _check_node_mean(m)
        nxt[1::2] = 2.0 * m
        m = nxt
    return m


@dataclass(frozen=True)
class ReliabilityList:
    order: tuple[int, ...]  # most reliable first
    design_snr_db: float

    def rank(self) -> np.ndarray:
        """Position of each index in ``order``."""
        r = np.empty(len(self.order), dtype=int)
        r[np.asarray(self.order)] = np.arange(len(self.order))
        return r


def dega_reliability(N: int, snr_db: float) -> ReliabilityList:
    means = ga_means(N, snr_db)
    # descending mean, lower index first on ties
    order = np.lexsort((np.arange(N), -means))
    return ReliabilityList(tuple(int(i) for i in order), float(snr_db))


def max_degree(g: MonomialSet) -> int:
    if not len(g):
        raise ValueError("empty monomial set")
    return max(degree(m) for m in g.members)


@dataclass(frozen=True)
class CodeProfile:
    n: int
    K: int
    info_set: tuple[int, ...]
    structure: BlockStructure
    crc_bits: int = 0
    design_snr_db: float = 0.0
    _info_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        info = tuple(sorted(int(i) for i in self.info_set))
        N = 1 << self.n
        if len(set(info)) != len(info) or any(not 0 <= i < N for i in info):
            raise ValueError("information set must hold distinct indices in [0, N)")
        if len(info) != self.K:
            raise ValueError(f"|info_set|={len(info)} but K={self.K}")
        if self.crc_bits not in (0, 6):
            raise ValueError("crc_bits must be 0 or 6")
        if self.crc_bits >= max(self.K, 1):
            raise ValueError("CRC does not fit in the information set")
        s = BlockStructure.of(self.structure)
        if s.n != self.n:
            raise ValueError(f"structure {s} does not sum to n={self.n}")
        object.__setattr__(self, "info_set", info)
        object.__setattr__(self, "structure", s)
        mask = np.zeros(N, dtype=bool)
        mask[list(info)] = True
        mask.setflags(write=False)
        object.__setattr__(self, "_info_mask", mask)

    @classmethod
    def from_monomials(cls, g: MonomialSet, crc_bits: int = 0, design_snr_db: float = 0.0) -> "CodeProfile":
        return cls(g.n, len(g), tuple(g.indices()), block_structure(g), crc_bits, design_snr_db)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def frozen_set(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(~self._info_mask)[0])

    @property
    def info_mask(self) -> np.ndarray:
        return self._info_mask

    @property
    def payload_bits(self) -> int:
        return self.K - self.crc_bits

    def monomials(self) -> MonomialSet:
        return MonomialSet.from_indices(self.info_set, self.n)

    def crc_positions(self) -> tuple[int, ...]:
        """The ``crc_bits`` least reliable information positions, in index order."""
        if not self.crc_bits:
            return ()
        rank = dega_reliability(self.N, self.design_snr_db).rank()
        worst = sorted(self.info_set, key=lambda i: (-rank[i], i))[: self.crc_bits]
        return tuple(sorted(worst))

    def payload_positions(self) -> tuple[int, ...]:
        crc = set(self.crc_positions())
        return tuple(i for i in self.info_set if i not in crc)


def _snr_grid(lo: float, step: float, hi: float) -> list[float]:
    if step <= 0:
        raise ValueError("SNR step must be positive")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + k * step for k in range(max(count, 0))]


def _free_blocks(g: MonomialSet, s: BlockStructure, K: int) -> MonomialSet:
    """Add the monomials that free every in-block position of ``s``, block by block.

    Each column is revisited until the aux matrix shows it free; stops early
    once the set outgrows ``K``.
    """
    for lo, hi in s.bounds():
        for col in range(lo, hi):
            while True:
                extra = set()
                for row in range(lo, hi):
                    extra.update(aux_cell(g, row, col))
                if not extra:
                    break
                g = g.with_members(extra)
                if len(g) > K:
                    return g
        if len(g) > K:
            return g
    return g


def design(
    N: int,
    K: int,
    s: BlockStructure | Sequence[int],
    snr_min_db: float,
    snr_step_db: float = DEFAULT_SNR_STEP_DB,
    snr_max_db: float | None = None,
) -> MonomialSet:
    """Find a decreasing ``(N, K)`` generating set whose automorphism group contains BLTA(s).

    Outer loop over design SNR, inner loop shrinking the reliability seed from
    ``K - 1`` monomials until freeing the blocks of ``s`` lands exactly on ``K``.
    """
    n = int(N).bit_length() - 1
    if 1 << n != N:
        raise ValueError(f"N must be a power of two, got {N}")
    s = BlockStructure.of(s)
    if s.n != n:
        raise ValueError(f"block structure {s} does not sum to n={n}")
    if not 0 < K < N:
        raise ValueError(f"need 0 < K < N, got K={K}")
    if snr_max_db is None:
        snr_max_db = snr_min_db + DEFAULT_SNR_SPAN_DB
    for snr in _snr_grid(snr_min_db, snr_step_db, snr_max_db):
        order = dega_reliability(N, snr).order
        ks = K - 1
        while ks >= 1:
            g = downward_closure(MonomialSet.from_indices(order[:ks], n))
            d_max = max_degree(g)
            if sum(comb(n, k) for k in range(d_max + 1)) < K:
                break
            if len(g) <= K:
                g = _free_blocks(g, s, K)
                if len(g) == K:
                    assert is_decreasing(g)
                    log.debug("design found at %.2f dB with K_s=%d", snr, ks)
                    return g
            ks -= 1
    raise DesignFailure(f"code not achievable: N={N} K={K} S={s} up to {snr_max_db} dB")


def design_profile(
    N: int,
    K: int,
    s: BlockStructure | Sequence[int],
    snr_min_db: float,
    snr_step_db: float = DEFAULT_SNR_STEP_DB,
    snr_max_db: float | None = None,
    crc_bits: int = 0,
) -> CodeProfile:
    g = design(N, K, s, snr_min_db, snr_step_db, snr_max_db)
    return CodeProfile.from_monomials(g, crc_bits=crc_bits, design_snr_db=snr_min_db)
