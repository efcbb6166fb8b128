"""Monte-Carlo BLER estimation for BPSK over AWGN.

Every frame draws its payload and noise from its own generator seeded by
``(seed, point, frame)``, so results do not depend on chunking or on the
number of worker threads.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .construct import CodeProfile
from .decode import ae_decode, encode, ls_metric, sc_codewords, scl_decode

log = logging.getLogger(__name__)

CSV_COLUMNS = ("ebn0_db", "frames", "errors", "bler", "ml_bound_bler", "seed")
DEFAULT_MIN_ERRORS = 100
DEFAULT_MAX_FRAMES = 10**6


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0)))

    @classmethod
    def for_profile(cls, profile: CodeProfile, ebn0_db: float) -> "ChannelConfig":
        # CRC bits count as overhead
        return cls(float(ebn0_db), profile.payload_bits / profile.N)


def transmit(codeword, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """BPSK ``1 - 2x`` plus white Gaussian noise, returned as channel LLRs ``2y / sigma^2``."""
    x = np.asarray(codeword)
    y = (1.0 - 2.0 * x) + cfg.sigma * rng.standard_normal(x.shape)
    return 2.0 * y / cfg.sigma**2


@dataclass
class DecoderConfig:
    """Which decoder a simulation runs.

    ``kind`` is ``"sc"``, ``"scl"`` (uses ``list_size``) or ``"ae"`` (uses ``reps``).
    With ``ml_list_size > 0`` the ML bound also counts frames where an SCL
    decoder of that list size finds a word closer than the transmitted one.
    """

    kind: str = "sc"
    list_size: int = 1
    reps: Sequence = field(default_factory=list)
    exact: bool = False
    ml_list_size: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("sc", "scl", "ae"):
            raise ValueError(f"unknown decoder kind {self.kind!r}")
        if self.kind == "scl" and self.list_size < 1:
            raise ValueError("list size must be at least 1")
        if self.kind == "ae" and not len(self.reps):
            raise ValueError("AE decoding needs at least one automorphism")
        if self.ml_list_size < 0:
            raise ValueError("ML-bound list size must be non-negative")

    def label(self) -> str:
        if self.kind == "ae":
            return f"AE-{len(self.reps)}-SC"
        if self.kind == "scl":
            return f"SCL-{self.list_size}"
        return "SC"

    def decode(self, llr: np.ndarray, profile: CodeProfile) -> np.ndarray:
        """Codeword estimates for a batch of frames."""
        if self.kind == "sc":
            return sc_codewords(llr, profile, self.exact)
        if self.kind == "ae":
            return ae_decode(llr, profile, self.reps, self.exact).codeword
        return np.stack([scl_decode(l, profile, self.list_size, exact=self.exact).codeword for l in llr])


@dataclass(frozen=True)
class SimResult:
    ebn0_db: float
    frames: int
    frame_errors: int
    ml_errors: int
    seed: int

    @property
    def bler(self) -> float:
        return self.frame_errors / self.frames

    @property
    def ml_bound_bler(self) -> float:
        return self.ml_errors / self.frames


def frame_rng(seed: int, point: int, frame: int) -> np.random.Generator:
    return np.random.default_rng([seed, point, frame])


def simulate_frames(
    profile: CodeProfile, decoder: DecoderConfig, cfg: ChannelConfig, seed: int, point: int, start: int, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Error and ML-bound flags for frames ``start .. start + count - 1``."""
    payload = np.empty((count, profile.payload_bits), dtype=np.uint8)
    noise = np.empty((count, profile.N))
    for k in range(count):
        rng = frame_rng(seed, point, start + k)
        payload[k] = rng.integers(0, 2, profile.payload_bits, dtype=np.uint8)
        noise[k] = rng.standard_normal(profile.N)
    x = encode(payload, profile)
    y = (1.0 - 2.0 * x) + cfg.sigma * noise
    llr = 2.0 * y / cfg.sigma**2
    xhat = decoder.decode(llr, profile)
    err = (xhat != x).any(axis=1)
    ref = ls_metric(llr, x)
    ml = err & (ls_metric(llr, xhat) < ref)
    if decoder.ml_list_size:
        alt = np.stack([scl_decode(l, profile, decoder.ml_list_size, use_crc=False).codeword for l in llr])
        ml |= ls_metric(llr, alt) < ref
    return err, ml


def run_point(
    profile: CodeProfile,
    decoder: DecoderConfig,
    ebn0_db: float,
    point: int,
    min_errors: int = DEFAULT_MIN_ERRORS,
    max_frames: int = DEFAULT_MAX_FRAMES,
    seed: int = 0,
    workers: int = 1,
    chunk: int = 256,
) -> SimResult:
    """Simulate until ``min_errors`` frame errors or ``max_frames`` frames.

    The stop frame is the one carrying the ``min_errors``-th error, whatever
    the chunk size or worker count.
    """
    cfg = ChannelConfig.for_profile(profile, ebn0_db)
    frames = errors = ml_errors = 0
    starts = iter(range(0, max_frames, chunk))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        done = False
        while not done:
            wave = []
            for _ in range(max(1, workers)):
                s = next(starts, None)
                if s is None:
                    break
                wave.append((s, pool.submit(simulate_frames, profile, decoder, cfg, seed, point, s, min(chunk, max_frames - s))))
            if not wave:
                break
            for s, fut in wave:
                err, ml = fut.result()
                hits = np.nonzero(err)[0]
                if errors + hits.size >= min_errors:
                    stop = hits[min_errors - errors - 1] + 1
                    frames += int(stop)
                    errors = min_errors
                    ml_errors += int(ml[:stop].sum())
                    done = True
                    break
                frames += err.size
                errors += int(hits.size)
                ml_errors += int(ml.sum())
    log.debug("%.2f dB: %d frames, %d errors", ebn0_db, frames, errors)
    return SimResult(float(ebn0_db), frames, errors, ml_errors, seed)


def run_bler(
    profile: CodeProfile,
    decoder: DecoderConfig,
    ebn0_list: Sequence[float],
    min_errors: int = DEFAULT_MIN_ERRORS,
    max_frames: int = DEFAULT_MAX_FRAMES,
    seed: int = 0,
    workers: int = 1,
    chunk: int = 256,
) -> list[SimResult]:
    if min_errors < 1 or max_frames < 1:
        raise ValueError("stop rule needs min_errors >= 1 and max_frames >= 1")
    if not len(ebn0_list):
        raise ValueError("empty Eb/N0 list")
    return [
        run_point(profile, decoder, e, k, min_errors, max_frames, seed, workers, chunk)
        for k, e in enumerate(ebn0_list)
    ]


def results_csv(results: Sequence[SimResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([repr(r.ebn0_db), r.frames, r.frame_errors, repr(r.bler), repr(r.ml_bound_bler), r.seed])
    return buf.getvalue()
