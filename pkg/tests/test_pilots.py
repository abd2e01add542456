import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarpilot.construction import CodeSpec, construct_info_set
from polarpilot.gf2 import IndexSet, is_zero, kron_power, submatrix
from polarpilot.pilots import (
    PilotPlan,
    Scheme,
    compute_D,
    compute_S,
    effective_rate,
    gamma_closed_form,
    gap_profile,
    no_pilots,
    parse_scheme,
    select_eps,
    select_pilots,
    select_ueps,
    spread_pilots,
    throughput,
    validate_plan,
)

N16 = CodeSpec.from_info_set([8, 10, 11, 12, 13, 14, 15, 16], 16)
N8 = CodeSpec.from_info_set([4, 6, 7, 8], 8)


def weight_one_columns_oracle(spec):
    """Column weights of the frozen rows, counted entry by entry."""
    g = kron_power(spec.n).bits
    frozen = spec.frozen_set.tolist()
    out = []
    for j in frozen:
        if sum(int(g[i - 1, j - 1]) for i in frozen) == 1:
            out.append(j)
    return out


def best_spread_oracle(forced, candidates, count, N):
    """Exhaustive search with the same lexicographic objective."""
    best, best_key = None, None
    for combo in itertools.combinations(sorted(candidates), count):
        gaps = gap_profile(list(forced) + list(combo), N)
        key = (gaps.max(), int((gaps ** 2).sum()))
        if best_key is None or key < best_key:
            best, best_key = list(combo), key
    return best, best_key


def key_of(positions, N):
    gaps = gap_profile(positions, N)
    return gaps.max(), int((gaps ** 2).sum())


# -- S and D -------------------------------------------------------------------

def test_worked_example_s():
    assert compute_S(N16).tolist() == [4, 6, 7, 9]


def test_small_s_examples():
    assert compute_S(CodeSpec.from_info_set([2], 2)).tolist() == [1]
    assert compute_S(N8).tolist() == [2, 3, 5]


@pytest.mark.parametrize("n", range(3, 9))
@pytest.mark.parametrize("rate", [0.25, 0.5, 0.75])
def test_s_matches_weight_oracle_and_restatement(n, rate):
    spec = construct_info_set(n, int(rate * (1 << n)))
    s = compute_S(spec)
    assert s.tolist() == weight_one_columns_oracle(spec)
    g = kron_power(n).bits
    for j in s:
        assert g[j - 1, j - 1] == 1
        assert all(g[i - 1, j - 1] == 0 for i in spec.frozen_set if i != j)


def test_d_examples():
    assert compute_D(4).tolist() == [4]
    assert compute_D(8).tolist() == [4, 8]
    d = compute_D(256)
    assert d.size == 64 and d.tolist() == list(range(4, 257, 4))
    with pytest.raises(ValueError):
        compute_D(2)


@pytest.mark.parametrize("n", range(2, 11))
def test_d_columns_vanish_outside_d(n):
    d = compute_D(1 << n)
    assert is_zero(submatrix(kron_power(n), d.complement(), d))


# -- gaps and spreading ----------------------------------------------------------

def test_gap_profile_uses_sentinels():
    assert gap_profile([3, 6], 8).tolist() == [3, 3, 3]
    assert gap_profile([], 4).tolist() == [5]


def test_ueps_n16_fits_in_s():
    plan = select_ueps(N16, 4)
    assert plan.frozen_pilots.tolist() == [4, 6, 7, 9]
    assert plan.info_pilots.size == 0


def test_ueps_n16_two_information_pilots_match_exhaustive_search():
    plan = select_ueps(N16, 6)
    assert plan.frozen_pilots.tolist() == [4, 6, 7, 9]
    best, best_key = best_spread_oracle([4, 6, 7, 9], N16.info_set.tolist(), 2, 16)
    assert key_of(plan.positions.tolist(), 16) == best_key
    assert plan.info_pilots.tolist() == best


@settings(max_examples=60, deadline=None)
@given(st.integers(8, 24).flatmap(lambda N: st.tuples(
    st.just(N),
    st.sets(st.integers(1, N), max_size=4),
    st.sets(st.integers(1, N), min_size=1, max_size=10),
    st.integers(0, 4),
)))
def test_spread_pilots_is_optimal(case):
    N, forced, cands, count = case
    cands = cands - forced
    count = min(count, len(cands))
    got = spread_pilots(forced, cands, count, N)
    assert len(got) == count and set(got) <= cands
    _, best_key = best_spread_oracle(forced, cands, count, N)
    assert key_of(list(forced) + got, N) == best_key


def test_spread_pilots_rejects_impossible_count():
    with pytest.raises(ValueError):
        spread_pilots([], [1, 2], 3, 8)


def test_ueps_split_override():
    plan = select_ueps(N16, 6, num_info_pilots=4)
    assert plan.frozen_pilots.tolist() == [4, 6]
    assert plan.info_pilots.size == 4
    assert validate_plan(N16, plan)
    with pytest.raises(ValueError):
        select_ueps(N16, 6, num_info_pilots=0)
    with pytest.raises(ValueError):
        select_ueps(N16, 13)


# -- EPS -------------------------------------------------------------------------

def test_eps_small_examples():
    plan = select_eps(N8, 2)
    assert plan.frozen_pilots.size == 0 and plan.info_pilots.tolist() == [4, 8]
    plan = select_eps(CodeSpec.from_info_set([4], 4), 1)
    assert plan.frozen_pilots.size == 0 and plan.info_pilots.tolist() == [4]


def test_eps_full_d_is_evenly_spaced():
    spec = construct_info_set(8, 128)
    plan = select_eps(spec, 64)
    d = compute_D(256)
    assert plan.frozen_pilots == d.intersection(spec.frozen_set)
    assert plan.info_pilots == d.intersection(spec.info_set)
    assert set(np.diff(plan.positions.members)) == {4}


def test_eps_bounds():
    spec = construct_info_set(8, 128)
    d_f = compute_D(256).intersection(spec.frozen_set).size
    with pytest.raises(ValueError):
        select_eps(spec, d_f - 1)
    with pytest.raises(ValueError):
        select_eps(spec, 65)
    plan = select_eps(spec, d_f + 5)
    assert plan.info_pilots.size == 5


# -- validation -------------------------------------------------------------------

@pytest.mark.parametrize("n", range(3, 11))
@pytest.mark.parametrize("rate", [0.25, 0.5, 0.75])
def test_selection_plans_validate(n, rate):
    N = 1 << n
    spec = construct_info_set(n, int(rate * N))
    num = N // 4
    for plan in (select_ueps(spec, num), select_eps(spec, num)):
        report = validate_plan(spec, plan)
        assert report.passed, (plan.scheme, report.failures())


def test_worked_uep_plan_n16():
    plan = PilotPlan(Scheme.UEPS, IndexSet([4, 6], 16), IndexSet.empty(16))
    assert validate_plan(N16, plan)


def test_adversarial_plan_fails_zero_block():
    plan = PilotPlan(Scheme.UEPS, IndexSet([1], 16), IndexSet.empty(16))
    report = validate_plan(N16, plan)
    assert "complement_rows_zero" in report.failures()
    assert "scheme_rule" in report.failures()


def test_fig1_plan_has_five_known_right_values():
    plan = PilotPlan(Scheme.UEPS, IndexSet([3], 8), IndexSet([6], 8))
    assert plan.encoding_set(N8).tolist() == [3, 4, 6, 7, 8]
    assert validate_plan(N8, plan)


def test_pilot_plan_checks():
    with pytest.raises(ValueError):
        PilotPlan(Scheme.EPS, IndexSet([4], 8), IndexSet([4], 8))
    with pytest.raises(ValueError):
        PilotPlan(Scheme.EPS, IndexSet([4], 8), IndexSet.empty(8), pilot_values=[0, 1])
    plan = PilotPlan(Scheme.EPS, IndexSet([4], 8), IndexSet([8], 8), pilot_values=[1, 0])
    assert plan.pilot_values.tolist() == [1, 0]
    assert plan.num_pilots == 2


def test_parse_scheme():
    assert parse_scheme("EPS") is Scheme.EPS
    assert parse_scheme("traditional") is Scheme.TRADITIONAL
    with pytest.raises(ValueError):
        parse_scheme("random")
    assert select_pilots(N8, "traditional", 2).num_inserted == 2


# -- throughput -------------------------------------------------------------------

def test_gamma_values():
    assert gamma_closed_form(0.25) == 0.9375
    assert gamma_closed_form(0.0) == 1.0


def test_equal_throughput_setup():
    spec = construct_info_set(8, 147)
    plan = select_ueps(spec, 64, num_info_pilots=45)
    rep = throughput(plan, spec)
    assert rep.r_selection == 102 / 256
    assert effective_rate(plan, spec) == 102 / 256
    base = construct_info_set(8, 128)
    ins = no_pilots(base, 64)
    assert throughput(ins, base).r_insertion == 0.4
    assert effective_rate(ins, base) == 128 / 320


def test_gamma_exact_matches_closed_form_when_split_is_proportional():
    # |P_i| = R * Kp: R_p / R_t = (1 - a)(1 + a) exactly
    spec = construct_info_set(8, 128)
    plan = select_ueps(spec, 64, num_info_pilots=32)
    rep = throughput(plan, spec)
    assert rep.alpha == 0.25
    assert np.isclose(rep.gamma_exact, rep.gamma, rtol=1e-15)
