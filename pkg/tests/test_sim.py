import math

import numpy as np
import pytest

from aepolar.autgroup import generate_representatives
from aepolar.construct import design_profile
from aepolar.decode import ae_decode, encode
from aepolar.sim import (
    CSV_COLUMNS,
    ChannelConfig,
    DecoderConfig,
    SimResult,
    results_csv,
    run_bler,
    run_point,
    transmit,
)

PROFILE = design_profile(32, 23, (3, 2), 0.0)


def test_sigma_convention():
    cfg = ChannelConfig(0.0, 0.5)
    assert math.isclose(cfg.sigma, 1.0)
    cfg = ChannelConfig.for_profile(design_profile(256, 128, (3, 5), 0.0, crc_bits=6), 2.0)
    assert math.isclose(cfg.rate, 122 / 256)


def test_transmit_statistics():
    cfg = ChannelConfig(1.0, 0.5)
    rng = np.random.default_rng(0)
    x = np.zeros(200_000, dtype=np.uint8)
    llr = transmit(x, cfg, rng)
    s2 = cfg.sigma**2
    # LLR of the all-zero word is N(2/s2, 4/s2)
    n = llr.size
    assert abs(llr.mean() - 2 / s2) < 4 * math.sqrt(4 / s2 / n)
    assert abs(llr.var() / (4 / s2) - 1) < 0.02
    assert (transmit(np.ones(4, dtype=np.uint8), ChannelConfig(60.0, 0.5), rng) < 0).all()


def test_decoder_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig("map")
    with pytest.raises(ValueError):
        DecoderConfig("ae")
    with pytest.raises(ValueError):
        DecoderConfig("scl", list_size=0)
    assert DecoderConfig("scl", list_size=8).label() == "SCL-8"


def test_stop_rule_and_errors():
    dec = DecoderConfig("sc")
    r = run_point(PROFILE, dec, 0.0, 0, min_errors=7, max_frames=10_000, seed=1)
    assert r.frame_errors == 7 and r.frames < 10_000
    r = run_point(PROFILE, dec, 8.0, 0, min_errors=5, max_frames=300, seed=1)
    assert r.frames == 300 and r.frame_errors < 5
    with pytest.raises(ValueError):
        run_bler(PROFILE, dec, [1.0], min_errors=0)
    with pytest.raises(ValueError):
        run_bler(PROFILE, dec, [1.0], max_frames=0)
    with pytest.raises(ValueError):
        run_bler(PROFILE, dec, [])


def test_last_frame_carries_last_error():
    dec = DecoderConfig("sc")
    a = run_point(PROFILE, dec, 1.0, 0, min_errors=10, seed=3, chunk=256)
    b = run_point(PROFILE, dec, 1.0, 0, min_errors=10, seed=3, chunk=7)
    assert a == b
    shorter = run_point(PROFILE, dec, 1.0, 0, min_errors=10, max_frames=a.frames - 1, seed=3)
    assert shorter.frame_errors == 9


@pytest.mark.parametrize("workers", [1, 3])
def test_reproducible_across_workers(workers):
    reps = generate_representatives((3, 2), 4, rng=np.random.default_rng(0))
    for dec in (DecoderConfig("sc"), DecoderConfig("ae", reps=reps), DecoderConfig("scl", list_size=4)):
        base = results_csv(run_bler(PROFILE, dec, [1.0, 2.0], 20, 5000, seed=9, workers=1, chunk=64))
        again = results_csv(run_bler(PROFILE, dec, [1.0, 2.0], 20, 5000, seed=9, workers=workers, chunk=64))
        assert base == again


def test_seed_changes_results():
    dec = DecoderConfig("sc")
    a = run_point(PROFILE, dec, 1.0, 0, min_errors=20, seed=1)
    b = run_point(PROFILE, dec, 1.0, 0, min_errors=20, seed=2)
    assert a.frames != b.frames


def test_ml_bound_not_above_bler():
    for dec in (DecoderConfig("sc"), DecoderConfig("scl", list_size=8)):
        r = run_point(PROFILE, dec, 1.0, 0, min_errors=30, seed=4)
        assert r.ml_errors <= r.frame_errors


def test_csv_format():
    text = results_csv([SimResult(1.5, 200, 10, 3, 7)])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "1.5,200,10,0.05,0.015,7"


def test_ml_list_bound_dominates_own_bound():
    dec = DecoderConfig("sc")
    own = run_point(PROFILE, dec, 1.0, 0, min_errors=40, seed=5)
    wide = run_point(PROFILE, DecoderConfig("sc", ml_list_size=32), 1.0, 0, min_errors=40, seed=5)
    assert wide.frames == own.frames and wide.frame_errors == own.frame_errors
    assert own.ml_errors <= wide.ml_errors <= wide.frame_errors
    with pytest.raises(ValueError):
        DecoderConfig("sc", ml_list_size=-1)


def test_ae_metric_non_increasing_in_m():
    reps = generate_representatives((3, 2), 8, rng=np.random.default_rng(1))
    rng = np.random.default_rng(2)
    x = encode(rng.integers(0, 2, (200, PROFILE.K), dtype=np.uint8), PROFILE)
    llr = transmit(x, ChannelConfig.for_profile(PROFILE, 1.0), rng)
    prev = None
    for m in range(1, 9):
        metric = ae_decode(llr, PROFILE, reps[:m]).metric
        if prev is not None:
            assert (metric <= prev + 1e-12).all()
        prev = metric


def test_bler_decreases_with_snr():
    dec = DecoderConfig("sc")
    lo, hi = run_bler(PROFILE, dec, [0.0, 3.0], min_errors=100, seed=6)
    # 100 errors each: relative std about 10 %, the gap is far larger
    assert hi.bler < 0.5 * lo.bler
