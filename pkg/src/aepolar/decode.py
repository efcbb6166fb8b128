"""Polar encoding, SC / SCL decoding and the automorphism ensemble decoder.

LLRs use the natural log with positive values favouring bit 0.  Decoders
accept a single frame of shape ``(N,)`` or a batch of shape ``(B, N)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .autgroup import apply_affine
from .construct import CodeProfile
from .gf2 import AffineTransform
from .monomial import polar_transform

CRC6_POLY = (1, 1, 0, 0, 0, 0, 1)  # x^6 + x^5 + 1, highest degree first


class NotAnAutomorphismError(ValueError):
    pass


# --------------------------------------------------------------------------- CRC

def _crc6_remainder(bits: np.ndarray) -> np.ndarray:
    reg = np.concatenate([np.asarray(bits, dtype=np.uint8) & 1, np.zeros(6, dtype=np.uint8)])
    poly = np.array(CRC6_POLY, dtype=np.uint8)
    for i in range(len(reg) - 6):
        if reg[i]:
            reg[i : i + 7] ^= poly
    return reg[-6:]


def crc6_attach(info) -> np.ndarray:
    """Append the 6 parity bits of the systematic CRC with generator x^6 + x^5 + 1."""
    info = np.asarray(info, dtype=np.uint8) & 1
    if info.size == 0:
        raise ValueError("empty payload")
    return np.concatenate([info, _crc6_remainder(info)])


def crc6_check(bits) -> bool:
    bits = np.asarray(bits, dtype=np.uint8) & 1
    if bits.size <= 6:
        raise ValueError("word too short to carry a CRC-6")
    return np.array_equal(_crc6_remainder(bits[:-6]), bits[-6:])


# --------------------------------------------------------------------------- encoding

def place_info(u_info, profile: CodeProfile) -> np.ndarray:
    """Put ``K`` information-set bits (CRC included) into a length-N input vector."""
    u_info = np.asarray(u_info, dtype=np.uint8)
    if u_info.shape[-1] != profile.K:
        raise ValueError(f"expected {profile.K} information bits, got {u_info.shape[-1]}")
    u = np.zeros(u_info.shape[:-1] + (profile.N,), dtype=np.uint8)
    u[..., profile.info_mask] = u_info & 1
    return u


def encode(payload, profile: CodeProfile) -> np.ndarray:
    """Codeword ``u T_N`` for ``K - crc_bits`` payload bits (batched on leading axes)."""
    payload = np.asarray(payload, dtype=np.uint8) & 1
    if payload.shape[-1] != profile.payload_bits:
        raise ValueError(f"expected {profile.payload_bits} payload bits, got {payload.shape[-1]}")
    u = np.zeros(payload.shape[:-1] + (profile.N,), dtype=np.uint8)
    u[..., list(profile.payload_positions())] = payload
    if profile.crc_bits:
        flat = payload.reshape(-1, payload.shape[-1])
        crc = np.array([_crc6_remainder(p) for p in flat], dtype=np.uint8)
        u[..., list(profile.crc_positions())] = crc.reshape(payload.shape[:-1] + (6,))
    return polar_transform(u)


def extract_info(codeword, profile: CodeProfile) -> np.ndarray:
    """The ``K`` information-set bits of a codeword."""
    return polar_transform(codeword)[..., profile.info_mask]


def extract_payload(codeword, profile: CodeProfile) -> np.ndarray:
    return polar_transform(codeword)[..., list(profile.payload_positions())]


def crc_ok(codeword, profile: CodeProfile) -> np.ndarray:
    """CRC verdict per frame; always True for a code without CRC."""
    codeword = np.atleast_2d(codeword)
    if not profile.crc_bits:
        return np.ones(codeword.shape[0], dtype=bool)
    u = polar_transform(codeword)
    payload = u[:, list(profile.payload_positions())]
    crc = u[:, list(profile.crc_positions())]
    return np.array([np.array_equal(_crc6_remainder(p), c) for p, c in zip(payload, crc)])


# --------------------------------------------------------------------------- metric

def ls_metric(llr, codeword) -> np.ndarray:
    """Least-squares distance of the BPSK image of ``codeword`` to the received frame.

    Reported in LLR units relative to the hard-decision point: the sum of
    ``|llr|`` over positions where the codeword disagrees with the sign of the
    LLR.  It differs from the squared Euclidean distance by a per-frame
    constant and a positive factor, so it ranks candidates identically, and it
    is 0 for the hard decision itself.
    """
    llr = np.asarray(llr, dtype=float)
    codeword = np.asarray(codeword)
    hard = llr < 0
    return np.where(hard != (codeword != 0), np.abs(llr), 0.0).sum(axis=-1)


def ml_bound_event(llr, transmitted, decoded) -> bool:
    """True when the wrong decision is also closer to the received frame than the truth."""
    if np.array_equal(np.asarray(transmitted) & 1, np.asarray(decoded) & 1):
        return False
    return bool(ls_metric(llr, decoded) < ls_metric(llr, transmitted))


# --------------------------------------------------------------------------- SC

def boxplus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact check-node combination of two LLRs, in a form that cannot overflow."""
    return (
        np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )


def minsum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def _check(exact: bool):
    return boxplus if exact else minsum


def _sc(llr: np.ndarray, mask: np.ndarray, f) -> np.ndarray:
    size = mask.size
    if not mask.any():
        return np.zeros(llr.shape, dtype=np.uint8)
    if mask.all():
        return (llr < 0).astype(np.uint8)
    h = size // 2
    a, b = llr[:, :h], llr[:, h:]
    left = _sc(f(a, b), mask[:h], f)
    right = _sc(b + (1 - 2 * left.astype(np.int8)) * a, mask[h:], f)
    return np.concatenate([left ^ right, right], axis=1)


def sc_codewords(llr, profile: CodeProfile, exact: bool = False) -> np.ndarray:
    """Batched SC decoding returning codeword estimates only.

    The check-node update is min-sum unless ``exact``.  Min-sum is the default
    because it decodes single-parity-check subcodes exactly like the Wagner
    rule, which is what makes BLTA(2,1,...,1) absorbed bit for bit.
    """
    llr = np.asarray(llr, dtype=float)
    flat = llr.reshape(-1, profile.N)
    return _sc(flat, profile.info_mask, _check(exact)).reshape(llr.shape)


@dataclass
class DecodeResult:
    codeword: np.ndarray
    info_bits: np.ndarray  # u over the information set, CRC included
    metric: float | np.ndarray
    branch: int | np.ndarray = 0


def _result(llr, codeword, profile, branch=0) -> DecodeResult:
    metric = ls_metric(llr, codeword)
    if np.ndim(metric) == 0:
        metric = float(metric)
    return DecodeResult(codeword, extract_info(codeword, profile), metric, branch)


def sc_decode(llr, profile: CodeProfile, exact: bool = False) -> DecodeResult:
    """Successive cancellation: frozen bits forced to 0, hard decisions elsewhere."""
    return _result(llr, sc_codewords(llr, profile, exact), profile)


# --------------------------------------------------------------------------- automorphism decoders

def _transform_of(rep) -> AffineTransform:
    return rep if isinstance(rep, AffineTransform) else rep.transform


def unpermute(v, t: AffineTransform) -> np.ndarray:
    """Inverse of :func:`apply_affine`."""
    return np.asarray(v)[..., t.index_map()]


def admits(profile: CodeProfile, t: AffineTransform) -> bool:
    """True iff ``t`` maps the code onto itself.

    Every permuted generator row is taken back to the ``u`` domain, where the
    frozen coordinates must vanish.
    """
    if t.n != profile.n:
        return False
    rows = polar_transform(np.eye(profile.N, dtype=np.uint8)[profile.info_mask])
    moved = polar_transform(apply_affine(rows, t))
    return not moved[:, ~profile.info_mask].any()


def asc_decode(llr, profile: CodeProfile, t, exact: bool = False, check: bool = True) -> DecodeResult:
    """SC run on the permuted frame, its codeword permuted back."""
    t = _transform_of(t)
    if check and not admits(profile, t):
        raise NotAnAutomorphismError("transform is not an automorphism of the code")
    x = unpermute(sc_codewords(apply_affine(llr, t), profile, exact), t)
    return _result(llr, x, profile)


def ae_candidates(llr, profile: CodeProfile, reps: Sequence, exact: bool = False) -> np.ndarray:
    """Codeword candidates of every branch, shape ``(M, B, N)``."""
    llr = np.atleast_2d(np.asarray(llr, dtype=float))
    ts = [_transform_of(r) for r in reps]
    stacked = np.stack([apply_affine(llr, t) for t in ts])
    x = sc_codewords(stacked.reshape(-1, profile.N), profile, exact).reshape(stacked.shape)
    return np.stack([unpermute(x[k], t) for k, t in enumerate(ts)])


def select_candidate(llr, cands: np.ndarray, profile: CodeProfile) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pick one candidate per frame from ``(M, B, N)`` by least-squares metric.

    With a CRC, candidates passing the check are preferred.  Ties go to the
    lowest branch index.
    """
    llr = np.atleast_2d(llr)
    metric = ls_metric(llr[None], cands)
    score = metric.copy()
    if profile.crc_bits:
        ok = np.stack([crc_ok(c, profile) for c in cands])
        score = np.where(ok, score, score + np.abs(llr).sum(axis=-1)[None] + 1.0)
    branch = np.argmin(score, axis=0)
    cols = np.arange(cands.shape[1])
    return cands[branch, cols], metric[branch, cols], branch


def ae_decode(llr, profile: CodeProfile, reps: Sequence, exact: bool = False) -> DecodeResult:
    """Automorphism ensemble of SC decoders with least-squares selection."""
    if not len(reps):
        raise ValueError("need at least one automorphism")
    single = np.ndim(llr) == 1
    llr2 = np.atleast_2d(np.asarray(llr, dtype=float))
    cands = ae_candidates(llr2, profile, reps, exact)
    x, metric, branch = select_candidate(llr2, cands, profile)
    if single:
        return DecodeResult(x[0], extract_info(x[0], profile), float(metric[0]), int(branch[0]))
    return DecodeResult(x, extract_info(x, profile), metric, branch)


# --------------------------------------------------------------------------- SCL

def _penalty(llr: np.ndarray, bit, exact: bool) -> np.ndarray:
    """Path-metric increment for deciding ``bit`` against ``llr``.

    Exact: ln(1 + exp(-(1 - 2 bit) llr)).  Otherwise its hard approximation,
    ``|llr|`` when the decision contradicts the LLR sign and 0 else; paired
    with min-sum updates, a complete path then scores exactly the
    least-squares metric of its codeword.
    """
    signed = -(1 - 2 * np.asarray(bit, dtype=float)) * llr
    return np.logaddexp(0.0, signed) if exact else np.maximum(signed, 0.0)


def _rate0_penalty(llr: np.ndarray, exact: bool) -> np.ndarray:
    """Total leaf penalty of an all-frozen subtree, per path."""
    if llr.shape[1] == 1:
        return _penalty(llr[:, 0], 0, exact)
    h = llr.shape[1] // 2
    a, b = llr[:, :h], llr[:, h:]
    return _rate0_penalty(_check(exact)(a, b), exact) + _rate0_penalty(a + b, exact)


def _scl(llr, mask, pm, L, exact):
    """Decode one node for every surviving path.

    Returns ``(x, parent, pm)``: node codewords of the new paths, the index of
    the incoming path each one extends, and the updated path metrics.
    """
    paths, size = llr.shape
    if not mask.any():
        return np.zeros((paths, size), dtype=np.uint8), np.arange(paths), pm + _rate0_penalty(llr, exact)
    if size == 1:
        lam = llr[:, 0]
        cand = np.stack([pm + _penalty(lam, 0, exact), pm + _penalty(lam, 1, exact)], axis=1).ravel()
        keep = np.argsort(cand, kind="stable")[:L]
        return (keep % 2).astype(np.uint8)[:, None], keep // 2, cand[keep]
    h = size // 2
    a, b = llr[:, :h], llr[:, h:]
    xl, pl, pm = _scl(_check(exact)(a, b), mask[:h], pm, L, exact)
    a, b = a[pl], b[pl]
    xr, pr, pm = _scl(b + (1 - 2 * xl.astype(np.int8)) * a, mask[h:], pm, L, exact)
    return np.concatenate([xl[pr] ^ xr, xr], axis=1), pl[pr], pm


def scl_candidates(llr, profile: CodeProfile, list_size: int, exact: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Surviving list after SCL on one frame, sorted by path metric."""
    llr = np.asarray(llr, dtype=float).reshape(1, profile.N)
    x, _, pm = _scl(llr, profile.info_mask, np.zeros(1), int(list_size), exact)
    order = np.argsort(pm, kind="stable")
    return x[order], pm[order]


def scl_decode(
    llr, profile: CodeProfile, list_size: int, use_crc: bool | None = None, exact: bool = False
) -> DecodeResult:
    """SC list decoding of a single frame.

    With a CRC the best path passing the check wins, otherwise the best metric.
    ``list_size=1`` reproduces :func:`sc_decode` with the same ``exact`` flag.
    """
    if list_size < 1:
        raise ValueError("list size must be at least 1")
    if use_crc is None:
        use_crc = bool(profile.crc_bits)
    x, pm = scl_candidates(llr, profile, list_size, exact)
    pick = 0
    if use_crc and profile.crc_bits:
        ok = np.nonzero(crc_ok(x, profile))[0]
        if ok.size:
            pick = int(ok[0])
    return _result(np.asarray(llr, dtype=float), x[pick], profile)
