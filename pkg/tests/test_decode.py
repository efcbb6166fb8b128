import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aepolar.autgroup import apply_affine, generate_representatives
from aepolar.construct import CodeProfile, design_profile
from aepolar.decode import (
    NotAnAutomorphismError,
    admits,
    ae_decode,
    asc_decode,
    boxplus,
    crc6_attach,
    crc6_check,
    crc_ok,
    encode,
    extract_info,
    extract_payload,
    ls_metric,
    minsum,
    ml_bound_event,
    sc_codewords,
    sc_decode,
    scl_candidates,
    scl_decode,
    unpermute,
)
from aepolar.gf2 import AffineTransform, BlockStructure, sample_blta
from aepolar.monomial import MonomialSet, downward_closure, elementary, kron_power, polar_transform

RM13 = CodeProfile.from_monomials(MonomialSet.reed_muller(1, 3))
CODE_32 = CodeProfile.from_monomials(downward_closure(MonomialSet.from_indices([7, 9], 5)))


def noisy(profile, rng, sigma, frames=1):
    payload = rng.integers(0, 2, (frames, profile.payload_bits), dtype=np.uint8)
    x = encode(payload, profile)
    y = 1.0 - 2.0 * x + sigma * rng.standard_normal(x.shape)
    return x, 2 * y / sigma**2


def all_codewords(profile):
    k = profile.payload_bits
    payloads = np.array(list(itertools.product([0, 1], repeat=k)), dtype=np.uint8)
    return encode(payloads, profile)


def ml_oracle(llr, profile):
    cw = all_codewords(profile)
    return cw[np.argmin(ls_metric(llr[None], cw))]


def sequential_map_oracle(llr, profile):
    """Bit-by-bit MAP with earlier decisions fixed and later bits uniform."""
    N = profile.N
    t = kron_power(profile.n).astype(int)
    # log P(y | x) up to a constant: sum over positions of x_i * (-llr_i)
    decided: list[int] = []
    for i in range(N):
        if not profile.info_mask[i]:
            decided.append(0)
            continue
        like = []
        for b in (0, 1):
            tails = np.array(list(itertools.product([0, 1], repeat=N - i - 1)), dtype=int).reshape(2 ** (N - i - 1), N - i - 1)
            u = np.hstack([np.tile(decided + [b], (len(tails), 1)), tails])
            x = (u @ t) % 2
            like.append(np.logaddexp.reduce(-(x * llr).sum(axis=1)))
        decided.append(int(like[1] > like[0]))
    return (np.array(decided) @ t) % 2


def test_encode_trivial():
    assert not encode(np.zeros(RM13.K, dtype=np.uint8), RM13).any()
    full = CodeProfile(3, 8, tuple(range(8)), (3,))
    t = kron_power(3)
    for i in range(8):
        assert np.array_equal(encode(np.eye(8, dtype=np.uint8)[i], full), t[i])


@pytest.mark.parametrize("n", range(1, 7))
def test_encode_matches_kronecker_oracle(n):
    rng = np.random.default_rng(n)
    g = downward_closure(MonomialSet(n, frozenset(rng.integers(0, 1 << n, 2).tolist())))
    p = CodeProfile.from_monomials(g)
    payload = rng.integers(0, 2, (10, p.K), dtype=np.uint8)
    u = np.zeros((10, p.N), dtype=int)
    u[:, p.info_mask] = payload
    x = encode(payload, p)
    assert np.array_equal(x, (u @ kron_power(n)) % 2)
    assert np.array_equal(extract_info(x, p), payload)


def test_encode_wrong_length():
    with pytest.raises(ValueError):
        encode(np.zeros(3, dtype=np.uint8), RM13)


def test_boxplus_and_minsum():
    a = np.array([2.0, -3.0, 800.0, -800.0, 0.0])
    b = np.array([1.0, 4.0, 900.0, 700.0, 5.0])
    ex = boxplus(a, b)
    ref = 2 * np.arctanh(np.tanh(a[:2] / 2) * np.tanh(b[:2] / 2))
    assert np.allclose(ex[:2], ref)
    assert np.isfinite(ex).all() and np.isclose(ex[2], 800 - np.log(1 + np.exp(-100)) + np.log(1 + np.exp(-1700))) and ex[4] == 0
    assert np.array_equal(minsum(a, b), np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b)))


def test_sc_noiseless_recovery():
    rng = np.random.default_rng(0)
    p = design_profile(256, 128, (3, 5), 0.0)
    x = encode(rng.integers(0, 2, (5, p.K), dtype=np.uint8), p)
    for exact in (False, True):
        assert np.array_equal(sc_codewords(50.0 * (1 - 2.0 * x), p, exact), x)


def test_sc_all_frozen():
    p = CodeProfile(3, 0, (), (3,))
    res = sc_decode(np.random.default_rng(1).standard_normal(8), p)
    assert not res.codeword.any() and res.info_bits.size == 0


def test_sc_matches_sequential_map_oracle():
    rng = np.random.default_rng(2)
    hand = np.array([1.2, -0.4, 0.3, 2.2, -1.7, 0.9, 0.05, -0.6])
    assert np.array_equal(sc_decode(hand, RM13, exact=True).codeword, sequential_map_oracle(hand, RM13))
    for _ in range(200):
        _, llr = noisy(RM13, rng, 1.0)
        assert np.array_equal(sc_decode(llr[0], RM13, exact=True).codeword, sequential_map_oracle(llr[0], RM13))


def test_decode_result_invariants():
    rng = np.random.default_rng(3)
    _, llr = noisy(CODE_32, rng, 0.9)
    res = sc_decode(llr[0], CODE_32)
    assert np.array_equal(encode(res.info_bits, CODE_32), res.codeword)
    assert np.isclose(res.metric, ls_metric(llr[0], res.codeword))


@pytest.mark.parametrize("exact", [False, True])
def test_scl16_is_ml(exact):
    rng = np.random.default_rng(4)
    for _ in range(300):
        _, llr = noisy(RM13, rng, 1.0)
        dec = scl_decode(llr[0], RM13, 16, exact=exact).codeword
        ml = ml_oracle(llr[0], RM13)
        assert np.isclose(ls_metric(llr[0], dec), ls_metric(llr[0], ml)) if exact else np.array_equal(dec, ml)


@pytest.mark.parametrize("exact", [False, True])
def test_scl1_equals_sc(exact):
    rng = np.random.default_rng(5)
    _, llr = noisy(CODE_32, rng, 0.9, 200)
    sc = sc_codewords(llr, CODE_32, exact)
    for k in range(200):
        assert np.array_equal(scl_decode(llr[k], CODE_32, 1, exact=exact).codeword, sc[k])


def test_scl_noiseless():
    rng = np.random.default_rng(6)
    x, _ = noisy(CODE_32, rng, 1.0)
    for L in (1, 2, 8, 32):
        assert np.array_equal(scl_decode(20.0 * (1 - 2.0 * x[0]), CODE_32, L).codeword, x[0])
    with pytest.raises(ValueError):
        scl_decode(np.zeros(32), CODE_32, 0)


def test_crc6():
    rng = np.random.default_rng(7)
    for _ in range(50):
        word = crc6_attach(rng.integers(0, 2, rng.integers(1, 40)))
        assert crc6_check(word)
        for i in range(word.size):
            flipped = word.copy()
            flipped[i] ^= 1
            assert not crc6_check(flipped)
    # x^6 mod (x^6 + x^5 + 1) = x^5 + 1
    assert crc6_attach([1]).tolist() == [1, 1, 0, 0, 0, 0, 1]
    with pytest.raises(ValueError):
        crc6_attach([])


def test_crc_profile_roundtrip():
    p = design_profile(256, 128, (3, 5), 0.0, crc_bits=6)
    rng = np.random.default_rng(8)
    payload = rng.integers(0, 2, (4, p.payload_bits), dtype=np.uint8)
    x = encode(payload, p)
    assert crc_ok(x, p).all()
    assert np.array_equal(extract_payload(x, p), payload)
    for pos in p.payload_positions()[:10] + p.crc_positions():
        u = polar_transform(x[0])
        u[pos] ^= 1
        assert not crc_ok(polar_transform(u), p)[0]


def test_crc_aided_scl_picks_passing_path():
    p = design_profile(128, 64, (3, 4), 1.0, crc_bits=6)
    rng = np.random.default_rng(9)
    wins = 0
    for _ in range(100):
        x, llr = noisy(p, rng, 0.9)
        res = scl_decode(llr[0], p, 8)
        wins += np.array_equal(res.codeword, x[0])
        plain = scl_decode(llr[0], p, 8, use_crc=False)
        cands, _ = scl_candidates(llr[0], p, 8)
        passing = np.nonzero(crc_ok(cands, p))[0]
        expected = cands[passing[0]] if passing.size else cands[0]
        assert np.array_equal(res.codeword, expected)
        assert ls_metric(llr[0], plain.codeword) <= ls_metric(llr[0], res.codeword) + 1e-9
    assert wins > 80


def test_ls_metric_and_ml_bound_event():
    llr = np.array([2.0, -1.0, 0.5, -3.0])
    assert ls_metric(llr, [0, 1, 0, 1]) == 0
    assert ls_metric(llr, [1, 1, 0, 0]) == 5.0
    tx = np.array([0, 0, 0, 0])
    assert ml_bound_event(llr, tx, np.array([0, 1, 0, 1]))
    assert not ml_bound_event(llr, tx, tx)
    assert not ml_bound_event(llr, np.array([0, 1, 0, 1]), tx)
    # equivalent to squared Euclidean distance ranking
    y = np.array([0.3, -1.2, 0.9, -0.1])
    cands = np.array(list(itertools.product([0, 1], repeat=4)))
    euclid = ((y[None] - (1 - 2 * cands)) ** 2).sum(axis=1)
    offset = euclid - 2 * ls_metric(2 * y, cands)
    assert np.allclose(offset, offset[0])


def test_asc_identity_and_lta_equal_sc():
    rng = np.random.default_rng(10)
    _, llr = noisy(CODE_32, rng, 0.8, 100)
    sc = sc_codewords(llr, CODE_32)
    assert np.array_equal(asc_decode(llr, CODE_32, AffineTransform.identity(5)).codeword, sc)
    for _ in range(20):
        t = sample_blta(BlockStructure.trivial(5), rng)
        assert np.array_equal(asc_decode(llr, CODE_32, t).codeword, sc)


def test_asc_absorbs_blta_2_1_1():
    rng = np.random.default_rng(11)
    _, llr = noisy(CODE_32, rng, 0.8, 100)
    sc = sc_codewords(llr, CODE_32)
    for _ in range(20):
        t = sample_blta(BlockStructure.absorbed(5), rng)
        assert np.array_equal(asc_decode(llr, CODE_32, t).codeword, sc)


def test_asc_rejects_non_automorphism():
    with pytest.raises(NotAnAutomorphismError):
        asc_decode(np.zeros(32), CODE_32, elementary(5, 2, 3))
    assert not admits(CODE_32, elementary(5, 2, 3))
    assert admits(CODE_32, elementary(5, 3, 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_asc_output_is_codeword(seed):
    rng = np.random.default_rng(seed)
    t = sample_blta((3, 2), rng)
    _, llr = noisy(CODE_32, rng, 1.0)
    res = asc_decode(llr[0], CODE_32, t)
    assert np.array_equal(encode(res.info_bits, CODE_32), res.codeword)


def test_unpermute_inverts_apply():
    rng = np.random.default_rng(12)
    t = sample_blta((3, 2), rng)
    v = rng.standard_normal(32)
    assert np.array_equal(unpermute(apply_affine(v, t), t), v)


def test_ae_trivial_cases():
    rng = np.random.default_rng(13)
    x, llr = noisy(CODE_32, rng, 0.8, 50)
    res = ae_decode(llr, CODE_32, [AffineTransform.identity(5)])
    assert np.array_equal(res.codeword, sc_codewords(llr, CODE_32))
    reps = generate_representatives((3, 2), 4, rng=rng)
    clean = ae_decode(1 - 2.0 * x[0], CODE_32, reps)
    assert np.array_equal(clean.codeword, x[0]) and clean.metric == 0 and clean.branch == 0
    with pytest.raises(ValueError):
        ae_decode(llr, CODE_32, [])


def test_ae_picks_branch_that_recovers_transmission():
    p = design_profile(256, 128, (3, 5), 0.0)
    reps = generate_representatives((3, 5), 32, (4, 3), np.random.default_rng(0))
    rng = np.random.default_rng(14)
    found = 0
    while found < 5:
        x, llr = noisy(p, rng, 0.85)
        sc = sc_decode(llr[0], p)
        if np.array_equal(sc.codeword, x[0]):
            continue
        for r in reps[1:]:
            alt = asc_decode(llr[0], p, r)
            if np.array_equal(alt.codeword, x[0]) and ls_metric(llr[0], x[0]) < sc.metric:
                break
        else:
            continue
        res = ae_decode(llr[0], p, [reps[0], r])
        assert res.branch == 1 and np.array_equal(res.codeword, x[0])
        found += 1


def test_ae_batched_matches_single():
    rng = np.random.default_rng(15)
    reps = generate_representatives((3, 2), 4, rng=rng)
    _, llr = noisy(CODE_32, rng, 0.9, 20)
    batch = ae_decode(llr, CODE_32, reps)
    for k in range(20):
        one = ae_decode(llr[k], CODE_32, reps)
        assert np.array_equal(one.codeword, batch.codeword[k]) and one.branch == batch.branch[k]
