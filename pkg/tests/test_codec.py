import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarpilot.codec import (
    LLR_MAX,
    LlrMode,
    SCDecoder,
    encode_nonsystematic,
    encode_systematic,
    encode_with_pilots,
    f_exact,
    f_minsum,
    g_update,
    init_llrs,
    polar_transform,
    sc_decode,
)
from polarpilot.construction import CodeSpec, construct_info_set
from polarpilot.gf2 import IndexSet, kron_power
from polarpilot.pilots import PilotPlan, Scheme, no_pilots, select_eps, select_ueps

N8 = CodeSpec.from_info_set([4, 6, 7, 8], 8)
FIG1_PLAN = PilotPlan(Scheme.UEPS, IndexSet([3], 8), IndexSet([6], 8))


def matmul_encode(u, n):
    return (np.asarray(u) @ kron_power(n).bits.astype(int)) % 2


def sc_bruteforce(channel_llr, prior, n):
    """SC decisions by explicit marginalisation over all future bits."""
    N = 1 << n
    g = kron_power(n).bits.astype(int)
    words = np.array(list(itertools.product([0, 1], repeat=N)))
    # log P(y | x) up to a constant: sum_j L_j (1 - 2 x_j) / 2
    loglik = ((1 - 2 * (words @ g % 2)) * channel_llr / 2).sum(axis=1)
    u_hat = []
    for i in range(N):
        if abs(prior[i]) >= LLR_MAX:
            u_hat.append(int(prior[i] < 0))
            continue
        match = np.all(words[:, :i] == u_hat, axis=1) if i else np.ones(len(words), bool)
        l0 = np.logaddexp.reduce(loglik[match & (words[:, i] == 0)])
        l1 = np.logaddexp.reduce(loglik[match & (words[:, i] == 1)])
        u_hat.append(int(l0 - l1 + prior[i] < 0))
    return np.array(u_hat)


# -- transform and encoders --------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 9))
def test_transform_matches_generator_product(n):
    rng = np.random.default_rng(n)
    u = rng.integers(0, 2, size=(20, 1 << n))
    assert np.array_equal(polar_transform(u), matmul_encode(u, n))


@settings(max_examples=50)
@given(st.integers(1, 10), st.data())
def test_transform_is_an_involution(n, data):
    u = np.array(data.draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n)))
    assert np.array_equal(polar_transform(polar_transform(u)), u)


def test_systematic_small_example():
    x = encode_systematic(N8, [1, 0, 1, 1])
    assert x[[3, 5, 6, 7]].tolist() == [1, 0, 1, 1]
    # the codeword must be u G_N with zero frozen bits
    u = polar_transform(x)
    assert not u[N8.frozen_set.zero_based].any()


def test_all_zero_inputs_give_all_zero_codewords():
    assert not encode_systematic(N8, np.zeros(4)).any()
    assert not encode_with_pilots(N8, FIG1_PLAN, np.zeros(3)).any()


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10), st.sampled_from([0.25, 0.5, 0.75]), st.integers(0, 2**31))
def test_systematic_property(n, rate, seed):
    spec = construct_info_set(n, int(rate * (1 << n)))
    info = np.random.default_rng(seed).integers(0, 2, size=(4, spec.K))
    x = encode_systematic(spec, info)
    assert np.array_equal(x[:, spec.info_set.zero_based], info)
    u = polar_transform(x)
    assert not u[:, spec.frozen_set.zero_based].any()


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10), st.sampled_from([0.25, 0.5, 0.75]), st.sampled_from(["eps", "ueps"]),
       st.integers(0, 2**31))
def test_pilot_property(n, rate, scheme, seed):
    N = 1 << n
    spec = construct_info_set(n, int(rate * N))
    rng = np.random.default_rng(seed)
    values = rng.integers(0, 2, size=N // 4)
    select = select_eps if scheme == "eps" else select_ueps
    plan = select(spec, N // 4, pilot_values=values)
    info = rng.integers(0, 2, size=(4, spec.K - plan.info_pilots.size))
    x = encode_with_pilots(spec, plan, info)
    assert np.array_equal(x[:, plan.positions.zero_based], np.broadcast_to(values, (4, values.size)))
    assert np.array_equal(x[:, plan.data_positions(spec).zero_based], info)
    # the codeword is u G_N with every frozen position outside P_f at its frozen value
    u = polar_transform(x)
    assert not u[:, plan.encoding_set(spec).complement().zero_based].any()


def test_pilot_encoder_without_pilots_is_systematic():
    spec = construct_info_set(6, 32)
    info = np.random.default_rng(0).integers(0, 2, size=(5, 32))
    assert np.array_equal(encode_with_pilots(spec, no_pilots(spec), info),
                          encode_systematic(spec, info))


def test_fig1_instance():
    x = encode_with_pilots(N8, FIG1_PLAN, [1, 1, 0])
    assert x[2] == 0 and x[5] == 0
    assert x[[3, 6, 7]].tolist() == [1, 1, 0]


def test_nonsystematic_twice_is_identity():
    spec = CodeSpec(3, IndexSet.full(8))
    u = np.array([1, 0, 1, 1, 0, 0, 1, 0])
    assert np.array_equal(encode_nonsystematic(spec, encode_nonsystematic(spec, u)), u)


def test_encoders_check_lengths():
    with pytest.raises(ValueError):
        encode_systematic(N8, [1, 0, 1])
    with pytest.raises(ValueError):
        encode_systematic(N8, [1, 0, 1, 2])
    with pytest.raises(ValueError):
        encode_with_pilots(N8, FIG1_PLAN, [1, 0, 1, 1])


# -- LLR initial conditions --------------------------------------------------------

def test_mode_l_priors():
    spec = CodeSpec.from_info_set([4], 4)
    word = init_llrs(spec, None, [0.5, -1.0, 2.0, 3.0], "L")
    assert word.prior_llrs.tolist() == [LLR_MAX, LLR_MAX, LLR_MAX, 0.0]
    assert word.channel_llrs.tolist() == [0.5, -1.0, 2.0, 3.0]


def test_fig4_pilot_initialisation():
    word = init_llrs(N8, FIG1_PLAN, np.ones(8), "L_f_and_i")
    assert word.channel_llrs[2] == LLR_MAX and word.prior_llrs[2] == 0.0
    assert word.channel_llrs[5] == LLR_MAX and word.prior_llrs[5] == 0.0


@pytest.mark.parametrize("scheme", ["eps", "ueps"])
def test_l_f_moves_certainty_from_left_to_right(scheme):
    spec = construct_info_set(8, 128)
    plan = (select_eps if scheme == "eps" else select_ueps)(spec, 64)
    y = np.random.default_rng(1).normal(0, 3, 256)
    base = init_llrs(spec, plan, y, "L")
    lf = init_llrs(spec, plan, y, "L_f")
    k_f = plan.frozen_pilots.size
    left = lambda w: int(np.sum(np.abs(w.prior_llrs) >= LLR_MAX))
    right = lambda w: int(np.sum(np.abs(w.channel_llrs) >= LLR_MAX))
    assert left(base) - left(lf) == k_f
    assert right(lf) - right(base) == k_f
    li = init_llrs(spec, plan, y, "L_i")
    assert right(li) - right(base) == plan.info_pilots.size
    assert left(li) == left(base)


def test_pilot_value_one_gives_negative_llr():
    plan = PilotPlan(Scheme.UEPS, IndexSet([3], 8), IndexSet([6], 8), pilot_values=[1, 0])
    word = init_llrs(N8, plan, np.zeros(8), LlrMode.L_F_AND_I)
    assert word.channel_llrs[2] == -LLR_MAX and word.channel_llrs[5] == LLR_MAX


def test_received_llrs_are_clamped():
    word = init_llrs(N8, None, np.array([1e6, -1e6, 0, 0, 0, 0, 0, 0]), "L")
    assert word.channel_llrs[:2].tolist() == [LLR_MAX, -LLR_MAX]
    with pytest.raises(ValueError):
        init_llrs(N8, None, np.zeros(4))


# -- node updates -------------------------------------------------------------------

def test_g_hand_example():
    assert g_update(5.0, -3.0, 0) == 2.0
    assert g_update(5.0, -3.0, 1) == -8.0


@settings(max_examples=300)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_f_matches_tanh_rule_and_bound(a, c):
    ref = 2 * np.arctanh(np.tanh(a / 2) * np.tanh(c / 2)) if max(abs(a), abs(c)) < 15 else None
    got = f_exact(a, c)
    if ref is not None and np.isfinite(ref):
        assert np.isclose(got, ref, rtol=1e-9, atol=1e-9)
    assert abs(got) <= min(abs(a), abs(c)) + 1e-12
    assert abs(f_minsum(a, c)) == min(abs(a), abs(c))


def test_f_at_clamp_is_finite():
    # for large equal magnitudes 2 atanh(tanh(a/2)^2) -> a - ln 2
    assert f_exact(LLR_MAX, LLR_MAX) == pytest.approx(LLR_MAX - np.log(2), rel=1e-12)
    assert f_exact(-LLR_MAX, LLR_MAX) == pytest.approx(-(LLR_MAX - np.log(2)), rel=1e-12)


# -- SC decoder ----------------------------------------------------------------------

def test_n2_hand_example():
    spec = CodeSpec.from_info_set([2], 2)
    word = init_llrs(spec, None, [5.0, -3.0], "L")
    u_hat, info = sc_decode(spec, None, word)
    assert u_hat.tolist() == [0, 0]
    # x = u G = (0, 0), read back at position 2
    assert info.tolist() == [0]


@pytest.mark.parametrize("trial", range(30))
def test_sc_matches_bruteforce_marginalisation(trial):
    rng = np.random.default_rng(100 + trial)
    spec = N8 if trial % 2 else construct_info_set(3, 6)
    plan = FIG1_PLAN if trial % 3 == 0 and spec is N8 else None
    word = init_llrs(spec, plan, rng.normal(0.5, 2.0, 8), "L_f_and_i")
    got = SCDecoder(word.prior_llrs).decode(word.channel_llrs)
    assert np.array_equal(got, sc_bruteforce(word.channel_llrs, word.prior_llrs, 3))


def test_batch_and_single_frame_agree():
    spec = construct_info_set(6, 32)
    llr = np.random.default_rng(5).normal(1, 2, (7, 64))
    word = init_llrs(spec, None, llr, "L")
    dec = SCDecoder(word.prior_llrs)
    batch = dec.decode(word.channel_llrs)
    for row, frame in zip(batch, word.channel_llrs):
        assert np.array_equal(dec.decode(frame), row)


def test_zero_llr_decides_zero():
    spec = CodeSpec(2, IndexSet.full(4))
    word = init_llrs(spec, None, np.zeros(4), "L")
    assert not SCDecoder(word.prior_llrs).decode(word.channel_llrs).any()


@pytest.mark.parametrize("n", [3, 5, 8, 10])
@pytest.mark.parametrize("scheme", ["none", "eps", "ueps"])
def test_noiseless_roundtrip(n, scheme):
    N = 1 << n
    spec = construct_info_set(n, N // 2)
    plan = {"none": no_pilots(spec), "eps": select_eps(spec, N // 4),
            "ueps": select_ueps(spec, N // 4)}[scheme]
    rng = np.random.default_rng(n)
    info = rng.integers(0, 2, size=(200, spec.K - plan.info_pilots.size))
    x = encode_with_pilots(spec, plan, info)
    word = init_llrs(spec, plan, LLR_MAX * (1.0 - 2.0 * x), "L_f_and_i")
    u_hat, info_hat = sc_decode(spec, plan, word)
    assert np.array_equal(info_hat, info)
    assert np.array_equal(polar_transform(u_hat), x)


def test_pilot_llrs_influence_decisions():
    spec = construct_info_set(8, 128)
    plan = select_eps(spec, 64)
    rng = np.random.default_rng(2)
    info = rng.integers(0, 2, size=spec.K - plan.info_pilots.size)
    x = encode_with_pilots(spec, plan, info)
    clean = 4.0 * (1.0 - 2.0 * x)
    word = init_llrs(spec, plan, clean, "L_f_and_i")
    base = SCDecoder(word.prior_llrs).decode(word.channel_llrs)
    flipped = word.channel_llrs.copy()
    flipped[plan.info_pilots.zero_based[-1]] = -LLR_MAX
    assert not np.array_equal(SCDecoder(word.prior_llrs).decode(flipped), base)


def test_min_sum_decodes_clean_frames():
    spec = construct_info_set(6, 32)
    info = np.random.default_rng(9).integers(0, 2, size=(10, 32))
    x = encode_systematic(spec, info)
    word = init_llrs(spec, None, 3.0 * (1.0 - 2.0 * x), "L")
    _, info_hat = sc_decode(spec, None, word, min_sum=True)
    assert np.array_equal(info_hat, info)


def test_decoder_rejects_bad_prior():
    with pytest.raises(ValueError):
        SCDecoder(np.zeros(6))
