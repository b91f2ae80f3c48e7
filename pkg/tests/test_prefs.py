"""Preference-model tests: WP queries, indifference solving, comparisons,
and classification."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gvcglab import (
    Comparison,
    Dichotomous,
    PwlMap,
    StructuralError,
    Tabular,
    ZERO_MAP,
    classify,
    compare_outcomes,
    empty_equivalent_transfer,
    negative_income_trio,
    pwl_leq,
    pwl_pointwise_max,
    random_dichotomous,
    random_pwl_map,
    rat,
    unit_demand_pref,
    wp,
)

A, B, AB = 0b01, 0b10, 0b11


def rising_map():
    """2 + 3t above -1/2, constant 1/2 below."""
    return PwlMap((F(-1, 2),), ((F(1, 2), F(0)), (F(2), F(3))))


def either_bundle_pref():
    return Dichotomous((A, B), rising_map())


# ---------------------------------------------------------------------------
# PwlMap structure


def test_pwl_validation_errors():
    with pytest.raises(StructuralError):
        PwlMap((F(1), F(0)), ((F(1), F(0)),) * 3)  # breakpoints not ascending
    with pytest.raises(StructuralError):
        PwlMap((F(0),), ((F(1), F(0)), (F(2), F(0))))  # jump at the breakpoint
    with pytest.raises(StructuralError):
        PwlMap((), ((F(1), F(-1)),))  # slope -1 kills transfer monotonicity
    with pytest.raises(StructuralError):
        PwlMap((F(0),), ((F(1), F(0)),))  # piece count mismatch
    with pytest.raises(StructuralError):
        rat("1/0")
    with pytest.raises(StructuralError):
        rat(0.5)  # floats are banned
    assert rat("1.9") == F(19, 10)  # decimal strings parse exactly
    assert rat("-1/40") == F(-1, 40)


def test_pwl_merges_collinear_pieces():
    m = PwlMap((F(0), F(1)), ((F(2), F(0)), (F(2), F(0)), (F(1), F(1))))
    assert m.breakpoints == (F(1),)
    assert m == PwlMap((F(1),), ((F(2), F(0)), (F(1), F(1))))


def test_pwl_positivity_checks():
    assert rising_map().is_strictly_positive()
    assert not PwlMap.constant(0).is_strictly_positive()
    assert PwlMap.constant(0).is_nonnegative()
    assert not PwlMap((), ((F(1), F(1, 2)),)).is_strictly_positive()  # dives left
    falling_forever = PwlMap((), ((F(1), F(-1, 2)),))
    assert not falling_forever.is_nonnegative()  # dives right


def test_pwl_pointwise_max_and_leq():
    f = PwlMap((), ((F(3), F(-1, 8)),))
    g = PwlMap((), ((F(4), F(-1, 4)),))
    h = pwl_pointwise_max(f, g)
    # crossing at t = 8
    assert h.breakpoints == (F(8),)
    for t in (F(-5), F(0), F(8), F(9), F(20)):
        assert h.value(t) == max(f.value(t), g.value(t))
    assert pwl_leq(f, h) and pwl_leq(g, h)
    assert not pwl_leq(h, f) and not pwl_leq(g, f)
    assert pwl_leq(f, f)


@settings(deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_pwl_pointwise_max_matches_values(seed_f, seed_g):
    f = random_pwl_map(random.Random(seed_f), "mixed")
    g = random_pwl_map(random.Random(seed_g), "mixed")
    h = pwl_pointwise_max(f, g)
    probes = {F(0), F(1, 3), F(-7)}
    for bp in f.breakpoints + g.breakpoints + h.breakpoints:
        probes.update((bp - 1, bp, bp + F(1, 2)))
    for t in probes:
        assert h.value(t) == max(f.value(t), g.value(t))


# ---------------------------------------------------------------------------
# wp


def test_wp_table_values():
    pref = either_bundle_pref()
    assert wp(pref, A, 0) == 2
    assert wp(pref, B, F(-1, 40)) == F(77, 40)
    assert wp(pref, AB, 0) == 2
    assert wp(pref, 0, F(5)) == 0


def test_wp_unacceptable_is_zero():
    pref = Dichotomous((AB,), PwlMap.constant(F(39, 10)))
    for t in (F(-1), F(0), F(7, 3)):
        assert wp(pref, A, t) == 0
        assert wp(pref, B, t) == 0
    assert wp(pref, AB, F(100)) == F(39, 10)


def test_wp_tabular_lookup_and_missing_bundle():
    pref = unit_demand_pref()
    assert wp(pref, A, 0) == 3
    assert wp(pref, B, 0) == 4
    assert wp(pref, AB, 0) == 4
    assert wp(pref, 0, 0) == 0
    partial = Tabular.from_table(2, {A: PwlMap.constant(1)})
    with pytest.raises(StructuralError):
        wp(partial, B, 0)


@settings(deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 3), st.fractions(-6, 6, max_denominator=32))
def test_wp_nonnegative_and_empty_zero(seed, bundle, t):
    pref = random_dichotomous(random.Random(seed), 2, "mixed")
    assert wp(pref, bundle, t) >= 0
    assert wp(pref, 0, t) == 0


# ---------------------------------------------------------------------------
# empty-equivalent transfers


def test_empty_equivalent_transfer_examples():
    pref = either_bundle_pref()
    assert empty_equivalent_transfer(pref, A, F(19, 10)) == F(-1, 40)
    quasilinear = Dichotomous((A,), PwlMap.constant(5))
    for pay in (F(0), F(3), F(-2), F(19, 7)):
        assert empty_equivalent_transfer(quasilinear, A, pay) == pay - 5


def test_empty_equivalent_transfer_against_bisection_oracle():
    # two-piece map: 4 - t/2 for t <= 0, constant 4 above
    kinked = PwlMap((F(0),), ((F(4), F(-1, 2)), (F(4), F(0))))
    pref = Dichotomous((A,), kinked)
    pay = F(2)

    def total(t):
        return t + kinked.value(t)

    lo, hi = F(-1), F(1)
    while total(lo) > pay:
        lo *= 2
    while total(hi) < pay:
        hi *= 2
    for _ in range(40):
        mid = (lo + hi) / 2
        if total(mid) < pay:
            lo = mid
        else:
            hi = mid
    solved = empty_equivalent_transfer(pref, A, pay)
    assert lo <= solved <= hi
    assert solved == F(-4)
    assert solved + wp(pref, A, solved) == pay


@settings(deadline=None)
@given(st.integers(0, 10**6), st.fractions(-10, 10, max_denominator=64))
def test_empty_equivalent_round_trip_exact(seed, pay):
    pref = random_dichotomous(random.Random(seed), 3, "mixed")
    bundle = random.Random(seed + 1).randrange(0, 8)
    t = empty_equivalent_transfer(pref, bundle, pay)
    assert t + wp(pref, bundle, t) == pay


@settings(deadline=None)
@given(
    st.integers(0, 10**6),
    st.fractions(-5, 5, max_denominator=32),
    st.fractions(1, 4, max_denominator=32),
)
def test_empty_equivalent_strictly_increasing_in_pay(seed, pay, bump):
    pref = random_dichotomous(random.Random(seed), 2, "mixed")
    lo = empty_equivalent_transfer(pref, AB, pay)
    hi = empty_equivalent_transfer(pref, AB, pay + bump)
    assert lo < hi


# ---------------------------------------------------------------------------
# outcome comparison


def test_compare_outcomes_unit_demand_facts():
    pref = unit_demand_pref()
    assert compare_outcomes(pref, (B, F(2)), (A, F(1))) is Comparison.BETTER
    assert compare_outcomes(pref, (B, F(4)), (A, F(3))) is Comparison.INDIFFERENT
    assert compare_outcomes(pref, (A, F(1)), (B, F(2))) is Comparison.WORSE


def test_compare_outcomes_reflexive():
    pref = either_bundle_pref()
    for outcome in ((A, F(1)), (0, F(0)), (AB, F(-3, 7))):
        assert compare_outcomes(pref, outcome, outcome) is Comparison.INDIFFERENT


def test_compare_outcomes_total_and_transitive_on_random_triples():
    rng = random.Random(11)
    order = {Comparison.BETTER: 1, Comparison.INDIFFERENT: 0, Comparison.WORSE: -1}
    for _ in range(300):
        pref = random_dichotomous(rng, 2, "mixed")
        outs = [
            (rng.randrange(0, 4), F(rng.randrange(-40, 41), rng.randrange(1, 9)))
            for _ in range(3)
        ]
        ranks = {(i, j): order[compare_outcomes(pref, outs[i], outs[j])] for i in range(3) for j in range(3)}
        for i in range(3):
            assert ranks[(i, i)] == 0
            for j in range(3):
                assert ranks[(i, j)] == -ranks[(j, i)]  # totality / antisymmetry
        key = [empty_equivalent_transfer(pref, b, p) for b, p in outs]
        for i in range(3):
            for j in range(3):
                assert ranks[(i, j)] == (key[j] > key[i]) - (key[j] < key[i])


def test_free_disposal_orders_supersets():
    pref = unit_demand_pref()
    for t in (F(-2), F(0), F(3), F(10)):
        for small, big in ((A, AB), (B, AB), (0, A), (0, B), (0, AB)):
            assert compare_outcomes(pref, (big, t), (small, t)) in (
                Comparison.BETTER,
                Comparison.INDIFFERENT,
            )


# ---------------------------------------------------------------------------
# structural validation of preferences


def test_dichotomous_validation():
    with pytest.raises(StructuralError):
        Dichotomous((), rising_map())
    with pytest.raises(StructuralError):
        Dichotomous((0,), rising_map())
    with pytest.raises(StructuralError):
        Dichotomous((A, AB), rising_map())  # not an antichain
    with pytest.raises(StructuralError):
        Dichotomous((A,), PwlMap.constant(0))  # WP map must be positive


def test_tabular_validation():
    with pytest.raises(StructuralError):
        Tabular.from_table(2, {0: PwlMap.constant(1)})  # empty bundle must be zero
    with pytest.raises(StructuralError):
        Tabular.from_table(2, {A: PwlMap((), ((F(1), F(-1, 2)),))})  # negative somewhere
    with pytest.raises(StructuralError):
        # free disposal: the pair must be worth at least the singleton
        Tabular.from_table(2, {A: PwlMap.constant(3), AB: PwlMap.constant(2)})
    ok = Tabular.from_table(2, {0: ZERO_MAP, A: PwlMap.constant(3), AB: PwlMap.constant(3)})
    assert ok.map_for(A) == PwlMap.constant(3)


# ---------------------------------------------------------------------------
# classification


def test_classify_negative_income_effect_pref():
    report = classify(either_bundle_pref(), num_objects=2)
    assert report.dichotomous
    assert not report.positive_income_effect  # slope 3 rises with t
    assert not report.quasilinear
    assert not report.single_minded
    assert report.unit_demand  # minimal bundles are singletons
    assert not report.heterogeneous_demand
    assert report.strict_decreasing_marginal_wp  # 2 + 2 > 2


def test_classify_quasilinear_dichotomous():
    pref = Dichotomous((AB,), PwlMap.constant(F(39, 10)))
    report = classify(pref, num_objects=2)
    assert report.dichotomous and report.single_minded
    assert report.quasilinear and report.positive_income_effect
    assert not report.unit_demand
    assert not report.strict_decreasing_marginal_wp  # 0 + 0 < 39/10 on the pair


def test_classify_unit_demand_tabular():
    grid = tuple(F(k) for k in range(-4, 6))  # inside the unclamped range
    report = classify(unit_demand_pref(), num_objects=2, grid=grid)
    assert not report.dichotomous
    assert not report.quasilinear
    assert report.positive_income_effect
    assert report.heterogeneous_demand  # 3 != 4 at zero
    assert report.strict_decreasing_marginal_wp  # 3 + 4 > 4
    assert report.unit_demand  # pair map is the exact pointwise max
    assert report.strict_positive_income_effect
    assert set(grid) <= set(report.grid)


def test_classify_strict_income_effect_fails_past_the_clamp():
    wide = tuple(F(k) for k in range(0, 21, 2))  # reaches the flat tails
    report = classify(unit_demand_pref(), num_objects=2, grid=wide)
    assert not report.strict_positive_income_effect


def test_classify_tabular_that_is_dichotomous():
    w = PwlMap.constant(2)
    pref = Tabular.from_table(2, {A: ZERO_MAP, B: w, AB: w})
    report = classify(pref)
    assert report.dichotomous and report.single_minded
    assert report.heterogeneous_demand  # singleton WPs 0 vs 2 at zero
    broken = Tabular.from_table(2, {A: ZERO_MAP, B: ZERO_MAP, AB: w})
    assert not classify(broken).unit_demand  # pair beats both singletons


def test_classify_records_breakpoints_within_grid_hull():
    report = classify(either_bundle_pref(), num_objects=2, grid=(F(-1), F(1)))
    assert F(-1, 2) in report.grid  # map kink inside the hull is certified too
    assert report.grid[0] == F(-1) and report.grid[-1] == F(1)


def test_classify_strict_income_effect_for_dichotomous_singletons():
    falling = PwlMap((F(3),), ((F(2), F(-1, 2)), (F(1, 2), F(0))))
    grid = tuple(F(k) for k in range(-2, 3))  # strictly falling region only
    # acceptable {a} vs unacceptable {b}: gap is w(t) itself
    one_sided = Dichotomous((A,), falling)
    assert classify(one_sided, num_objects=2, grid=grid).strict_positive_income_effect
    rising_one_sided = Dichotomous((A,), rising_map())
    assert not classify(rising_one_sided, num_objects=2, grid=grid).strict_positive_income_effect
    # both singletons acceptable: gaps vanish, the condition is vacuous
    symmetric = Dichotomous((A, B), rising_map())
    assert classify(symmetric, num_objects=2, grid=grid).strict_positive_income_effect


def test_classify_matches_on_builtin_economy():
    eco = negative_income_trio()
    flags = [classify(p, num_objects=2) for p in eco.preferences]
    assert [f.single_minded for f in flags] == [True, False, False]
    assert [f.positive_income_effect for f in flags] == [True, False, False]
