import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rspolar import channel as ch
from rspolar.concat import (MODES, ConcatSpec, InfeasibleDesignError, bits_to_symbols,
                            concat_encode, deinterleave, design_for_k, design_rate, interleave,
                            joint_decode, predicted_fep, profile_for, rate_adaptive_design,
                            rate_targeted_design, symbol_error_profile, symbols_to_bits)
from rspolar.gf import FieldSpec
from rspolar.polar import BitChannelQuality, PolarCodeSpec, bec_construct, select_info_set
from rspolar.rs import rs_encode, syndromes


def small_spec(n=64, k=32, t=4, tau=2, eps=0.3, bit_reversed=True):
    info = select_info_set(bec_construct(n.bit_length() - 1, eps), k)
    taus = (tau,) * (k // t) if isinstance(tau, int) else tau
    return ConcatSpec(PolarCodeSpec(n, info, bit_reversed), t, taus)


def random_messages(spec, B, seed):
    return np.random.default_rng(seed).integers(0, 2, (B, spec.message_bits), dtype=np.uint8)


# -- structure -------------------------------------------------------------------

def test_spec_bookkeeping():
    spec = small_spec(tau=(1, 2, 3, 0, 1, 1, 1, 1))
    assert (spec.r, spec.m, spec.n, spec.N) == (8, 15, 64, 960)
    assert spec.kappas == (13, 11, 9, 15, 13, 13, 13, 13)
    assert spec.message_bits == sum(spec.kappas) * 4
    assert spec.rate == pytest.approx(spec.message_bits / 960)
    assert spec.outer[2].distance == 7


def test_spec_validation():
    info = tuple(range(32, 64))
    with pytest.raises(ValueError):
        ConcatSpec(PolarCodeSpec(64, info), 5, (1,) * 6)
    with pytest.raises(ValueError):
        ConcatSpec(PolarCodeSpec(64, info), 4, (1,) * 7)
    with pytest.raises(ValueError):
        ConcatSpec(PolarCodeSpec(64, info), 4, (8,) * 8)
    with pytest.raises(ValueError):
        ConcatSpec(PolarCodeSpec(64, info), 4, (1,) * 8, FieldSpec(3))


def test_symbol_bit_maps_are_little_endian_inverses():
    assert bits_to_symbols(np.array([1, 0, 1, 1, 0, 0]), 3).tolist() == [5, 1]
    assert symbols_to_bits(np.array([5, 1]), 3).tolist() == [1, 0, 1, 1, 0, 0]
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, (4, 40))
    assert np.array_equal(symbols_to_bits(bits_to_symbols(bits, 4), 4), bits)


def test_interleaver_toy():
    # r=2 outer words of m=3 two-bit symbols; the words need not be RS codewords
    a = [1, 2, 3]
    b = [0, 3, 1]
    words = np.array([[a, b]])
    info = interleave(words, 2)
    assert info.shape == (1, 3, 4)
    # polar input j holds symbol j of every outer word, in outer-word order
    for j in range(3):
        assert info[0, j].tolist() == [a[j] & 1, a[j] >> 1, b[j] & 1, b[j] >> 1]
    assert np.array_equal(deinterleave(info, 2), words)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r=st.integers(1, 6), t=st.integers(2, 5))
def test_interleaver_is_bijective(seed, r, t):
    m = (1 << t) - 1
    words = np.random.default_rng(seed).integers(0, 1 << t, (3, r, m))
    assert np.array_equal(deinterleave(interleave(words, t), t), words)


def test_zero_message_encodes_to_zero():
    spec = small_spec()
    x = concat_encode(spec, np.zeros(spec.message_bits, dtype=np.uint8))
    assert x.shape == (spec.m, spec.n) and not x.any()
    assert x.size == spec.N


def test_encoded_symbols_form_rs_codewords():
    spec = small_spec(tau=(1, 2, 3, 0, 1, 1, 1, 1))
    msg = random_messages(spec, 1, 1)[0]
    x = concat_encode(spec, msg)
    from rspolar.polar import polar_transform, to_natural
    u = polar_transform(to_natural(spec.polar, x))
    info = u[:, list(spec.polar.info_set)]
    outer = deinterleave(info[None], spec.t)[0]
    syms = bits_to_symbols(msg, spec.t).tolist()
    start = 0
    for i, rs in enumerate(spec.outer):
        word = outer[i].tolist()
        assert not any(syndromes(rs, word))
        assert word == rs_encode(rs, syms[start:start + rs.dim])
        start += rs.dim


def test_encode_rejects_wrong_length():
    spec = small_spec()
    with pytest.raises(ValueError):
        concat_encode(spec, np.zeros(spec.message_bits + 1))


# -- design ----------------------------------------------------------------------

def test_symbol_error_profile():
    q = symbol_error_profile([0.1, 0.2, 0.0, 0.0], 2)
    assert q == pytest.approx([1 - 0.9 * 0.8, 0.0])
    with pytest.raises(ValueError):
        symbol_error_profile([0.1, 0.2, 0.3], 2)


def test_rate_adaptive_examples():
    # t E / k = 4 * 1e-6 / 4
    assert rate_adaptive_design([0.01], 15, 4, 4, 1e-6) == (4,)
    assert rate_adaptive_design([0.0], 15, 4, 4, 1e-6) == (1,)
    assert rate_adaptive_design([0.0], 15, 4, 4, 1e-6, allow_zero=True) == (0,)
    with pytest.raises(InfeasibleDesignError, match="group 1"):
        rate_adaptive_design([0.01, 0.9], 15, 4, 8, 1e-6)
    with pytest.raises(ValueError):
        rate_adaptive_design([0.01], 15, 4, 4, 1.0)


def test_rate_adaptive_minimality_against_direct_search():
    rng = np.random.default_rng(2)
    qs = rng.uniform(0, 0.05, 50)
    taus = rate_adaptive_design(qs, 15, 4, 200, 1e-3)
    thr = 4 * 1e-3 / 200
    for q, tau in zip(qs, taus):
        ok = [x for x in range(1, 8) if math.comb(15, x + 1) * q ** (x + 1) < thr]
        assert tau == ok[0]


@settings(max_examples=100, deadline=None)
@given(q1=st.floats(0, 0.3), q2=st.floats(0, 0.3), e=st.floats(1e-9, 0.5))
def test_rate_adaptive_is_monotone(q1, q2, e):
    lo, hi = sorted((q1, q2))
    try:
        t_hi = rate_adaptive_design([hi], 31, 5, 50, e)
    except InfeasibleDesignError:
        return
    assert rate_adaptive_design([lo], 31, 5, 50, e)[0] <= t_hi[0]


def test_predicted_fep_examples():
    assert predicted_fep((4,), (0.01,), 15) == pytest.approx(3003e-10)
    assert predicted_fep((1, 2, 3), (0.0, 0.0, 0.0), 15) == 0.0


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), e=st.floats(1e-8, 0.5))
def test_design_meets_its_own_target(seed, e):
    qs = np.random.default_rng(seed).uniform(0, 0.05, 20)
    try:
        taus = rate_adaptive_design(qs, 15, 4, 80, e)
    except InfeasibleDesignError:
        return
    assert predicted_fep(taus, qs, 15) < e


@pytest.fixture(scope="module")
def bec_quality():
    return bec_construct(9, 0.25)


def test_design_for_k_hits_rate(bec_quality):
    res = design_for_k(bec_quality, 300, 4, 0.5)
    assert res is not None
    assert abs(res.rate - 0.5) <= 0.005 * 0.5
    assert res.spec.rate == pytest.approx(res.rate)
    assert res.predicted_fep < res.target_fep
    assert design_rate(res.spec.taus, 15, 4, 512) == pytest.approx(res.rate)


def test_design_for_k_unreachable_returns_none(bec_quality):
    assert design_for_k(bec_quality, 200, 4, 0.5) is None


def test_rate_targeted_design_picks_lowest_predicted(bec_quality):
    res = rate_targeted_design(bec_quality, 4, 0.5, range(280, 352, 8))
    assert abs(res.rate - 0.5) <= 0.0025
    best = min(res.candidates, key=lambda row: row[2])
    assert res.spec.polar.k == best[0] and res.predicted_fep == best[2]
    single = rate_targeted_design(bec_quality, 4, 0.5, [res.spec.polar.k])
    assert single.spec == res.spec
    with pytest.raises(InfeasibleDesignError):
        rate_targeted_design(bec_quality, 4, 0.5, [100])
    with pytest.raises(ValueError):
        rate_targeted_design(bec_quality, 4, 0.5, [301])


def test_allow_zero_gives_zero_radius_on_perfect_groups():
    p = np.zeros(64)
    p[:8] = 0.01
    q = BitChannelQuality(p=p, trials=100)
    info = tuple(range(64))
    prof = profile_for(q, info, 4)
    taus = rate_adaptive_design(prof, 15, 4, 64, 1e-2, allow_zero=True)
    assert taus[2:] == (0,) * 14 and min(taus[:2]) > 0


# -- joint decoding ----------------------------------------------------------------

@pytest.mark.parametrize("mode", MODES)
def test_noiseless_round_trip(mode):
    spec = small_spec(tau=(1, 2, 3, 0, 1, 1, 1, 1))
    msgs = random_messages(spec, 5, 3)
    llr = ch.transmit(ch.NOISELESS, concat_encode(spec, msgs), np.random.default_rng(0))
    res = joint_decode(spec, llr, mode)
    assert np.array_equal(res.messages, msgs)
    assert not res.group_failed.any() and not res.corrections.any()


@pytest.mark.parametrize("mode", MODES)
def test_single_codeword_fully_erased(mode):
    spec = small_spec(tau=1)
    msgs = random_messages(spec, 20, 4)
    llr = ch.transmit(ch.NOISELESS, concat_encode(spec, msgs), np.random.default_rng(0))
    llr[:, 6, :] = 0.0
    res = joint_decode(spec, llr, mode)
    assert np.array_equal(res.messages, msgs)
    assert not res.group_failed.any()
    assert res.corrections.max() <= 1


def test_unbatched_input():
    spec = small_spec()
    msg = random_messages(spec, 1, 5)[0]
    llr = ch.transmit(ch.NOISELESS, concat_encode(spec, msg), np.random.default_rng(0))
    res = joint_decode(spec, llr, "sc")
    assert np.array_equal(res.messages, msg)
    assert res.inner_u.shape == (spec.m, spec.n)
    with pytest.raises(ValueError):
        joint_decode(spec, llr, "bogus")


def test_aligned_burst_of_limit_length_is_recovered():
    spec = small_spec(tau=2)
    length = (spec.outer[0].distance - 2) * spec.n + 1
    msgs = random_messages(spec, 2, 6)
    x = concat_encode(spec, msgs).reshape(2, spec.N)
    for offset in range(0, spec.N - length + 1, 37):
        llr = ch.transmit(ch.Burst(offset, length, ch.NOISELESS), x, np.random.default_rng(0))
        res = joint_decode(spec, llr, "sc-gmd-aml")
        assert np.array_equal(res.messages, msgs), offset


def test_modes_are_ordered_on_common_noise():
    spec = small_spec(n=64, k=32, tau=2)
    B = 400
    msgs = random_messages(spec, B, 7)
    llr = ch.transmit(ch.AwgnBpsk(1.0, spec.rate), concat_encode(spec, msgs),
                      np.random.default_rng(8))
    errs = {mode: int((joint_decode(spec, llr, mode).messages != msgs).any(axis=1).sum())
            for mode in MODES}
    assert errs["sc"] > 0
    assert errs["sc"] >= errs["sc-gmd"] >= errs["sc-gmd-ml"]
    assert errs["sc-gmd-aml"] >= errs["sc-gmd-ml"]


def test_failures_are_flagged_not_raised():
    spec = small_spec(tau=1)
    msgs = random_messages(spec, 10, 9)
    llr = ch.transmit(ch.BEC(0.6), concat_encode(spec, msgs), np.random.default_rng(1))
    res = joint_decode(spec, llr, "sc")
    assert res.group_failed.any()
    assert res.messages.shape == msgs.shape


def test_aml_tables_trust_bits_only_along_the_decided_path():
    from rspolar.concat import _aml_tables
    llrs = np.array([[0.0, -50.0, 50.0]])
    logp = _aml_tables(llrs, 3)[0]
    # the decided pattern (0, 1, 0) and its sibling (1, ., .) share the coin flip
    # on bit 0; after that flip bits 1 and 2 were computed on the wrong path
    assert logp[0b010] == pytest.approx(np.log(0.5), abs=1e-12)
    assert logp[0b001] == pytest.approx(np.log(0.125))
    assert logp[0b111] == pytest.approx(np.log(0.125))
    assert logp[0b000] < -40
    assert np.exp(np.logaddexp.reduce(logp)) <= 1 + 1e-12
    # with fully reliable bits the table is the plain product
    clean = np.array([[3.0, -2.0, 1.0]])
    l0, l1 = -np.logaddexp(0, -clean[0]), -np.logaddexp(0, clean[0])
    assert _aml_tables(clean, 3)[0, 0b010] == pytest.approx(l0[0] + l1[1] + l0[2])
