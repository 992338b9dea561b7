from __future__ import annotations

import random
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from hyperbinom.errors import (
    Divergent,
    DomainError,
    IrrationalResult,
    NotApplicable,
    PoleError,
    UnknownRule,
)
from hyperbinom.exact import GammaValue
from hyperbinom.hyper import PFQ, classify, direct_sum
from hyperbinom.rules import (
    PI2,
    RULES,
    ClosedValue,
    Rule,
    TransformExpr,
    apply_rule,
    check_rule,
    closed_7_4_4_31,
    closed_7_5_3_6,
    contiguous_7_2_3_25,
    contiguous_residual,
    eval_365,
    eval_413,
    get_rule,
    reduce_unit_7_2_3_17,
    rule_ids,
    shift_negative_lower_7_2_3_6,
    shrink_counterexample,
    split_two_balanced_7_2_3_20,
    sum_binomial_1f0,
    sum_gauss_second_half,
    sum_gauss_unit,
    sum_saalschutz,
    thomae_16_4_11,
    three_term_residual,
    transform_whipple_1_6,
    trig_half,
)
from hyperbinom.special import eval_pfq_numeric

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


def test_saalschutz_matches_direct_sum():
    a, b, c, n = HALF, THIRD, Fraction(2), 3
    series = PFQ((Fraction(-n), a, b), (c, 1 + a + b - c - n), 1)
    assert sum_saalschutz(series) == direct_sum(series)


def test_saalschutz_requires_balance():
    with pytest.raises(NotApplicable):
        sum_saalschutz(PFQ.from_literal("3F2(-2,1,1;2,2;1)"))


def test_gauss_unit_terminating_and_gamma_forms():
    assert sum_gauss_unit(PFQ.from_literal("2F1(-2,-2;1;1)")).to_fraction() == 6
    assert sum_gauss_unit(PFQ.from_literal("2F1(1,1;3;1)")).to_fraction() == 2
    with pytest.raises(Divergent):
        sum_gauss_unit(PFQ.from_literal("2F1(1,1;2;1)"))


def test_gauss_second_half():
    series = PFQ.from_literal("2F1(-2,3;1;1/2)")
    assert sum_gauss_second_half(series).to_fraction() == Fraction(-1, 2)
    assert direct_sum(series) == Fraction(-1, 2)


def test_gauss_second_half_rejects_a_pole_in_the_lower_parameter():
    # Gamma(-5) is infinite, so the gamma form cannot match the truncated sum
    series = PFQ.from_literal("2F1(-6,-5;-5;1/2)")
    assert direct_sum(series) == 0
    with pytest.raises(PoleError):
        sum_gauss_second_half(series)


def test_gauss_second_half_non_terminating():
    series = PFQ.from_literal("2F1(1,1;3/2;1/2)")
    assert sum_gauss_second_half(series) == GammaValue(HALF, 2)
    with mp.workdps(40):
        assert abs(eval_pfq_numeric(series, 30) - mp.pi / 2) < mpf(10) ** -25


def test_binomial_theorem():
    assert sum_binomial_1f0(PFQ.from_literal("1F0(1/2;;3/4)")) == 2
    assert sum_binomial_1f0(PFQ.from_literal("1F0(-3;;2)")) == -1
    with pytest.raises(IrrationalResult):
        sum_binomial_1f0(PFQ.from_literal("1F0(1/2;;1/2)"))
    with pytest.raises(Divergent):
        sum_binomial_1f0(PFQ.from_literal("1F0(1;;1)"))


def test_closed_form_with_finite_part():
    series = PFQ.from_literal("3F2(-2,-2,1;3,3;1)")
    value = closed_7_4_4_31(series)
    assert value.to_fraction() == Fraction(53, 36)
    assert direct_sum(series) == Fraction(53, 36)


def test_closed_form_4f3_with_reflected_lower_parameters():
    series = PFQ((1, -2, HALF, -1), (5, Fraction(5, 2), 4), 1)
    assert closed_7_5_3_6(series).to_fraction() == direct_sum(series)


def test_closed_form_rejects_wrong_shape():
    with pytest.raises(NotApplicable):
        closed_7_5_3_6(PFQ.from_literal("3F2(-2,1,1;2,2;1)"))


def test_whipple_preserves_the_sum():
    n, a1, a2, a3 = 2, HALF, THIRD, Fraction(1, 4)
    b1, b2 = Fraction(3, 2), Fraction(5, 3)
    s = b1 + b2 - a1 - a2 - a3
    series = PFQ((Fraction(-n), a1, a2, a3), (b1, b2, 1 - s - n), 1)
    expr = transform_whipple_1_6(series)
    assert expr.trace == ("whipple-1-6",)
    assert expr.evaluate_exact().to_fraction() == direct_sum(series)


def test_partial_fraction_split_preserves_the_sum():
    series = PFQ(
        (-3, HALF, Fraction(2, 3), Fraction(1, 5)), (Fraction(3, 2), Fraction(5, 3), 7), HALF
    )
    expr = split_two_balanced_7_2_3_20(series)
    assert len(expr.nodes) == 2
    assert expr.evaluate_exact().to_fraction() == direct_sum(series)


def test_shift_negative_lower_preserves_the_sum():
    series = PFQ((-3, HALF), (-1, THIRD), HALF, regularized=True)
    prefactor, shifted = shift_negative_lower_7_2_3_6(series)
    assert not shifted.regularized
    assert prefactor.to_fraction() * direct_sum(shifted) == direct_sum(series)


def test_reduce_unit_drops_the_one_two_pair():
    series = PFQ((-3, HALF, 1), (Fraction(5, 2), 2), 1)
    expr = reduce_unit_7_2_3_17(series)
    assert expr.nodes[0][1] == PFQ((-4, -HALF), (Fraction(3, 2),), 1)
    assert expr.evaluate_exact().to_fraction() == direct_sum(series)


def test_contiguous_relation():
    series = PFQ((HALF, 4, -2), (Fraction(5, 2), Fraction(7, 3)), THIRD)
    expr = contiguous_7_2_3_25(series, rho=HALF, sigma=3)
    assert expr.evaluate_exact().to_fraction() == direct_sum(series)
    source = PFQ((HALF, 3, -2), (Fraction(5, 2), 4), THIRD)
    assert contiguous_residual(source, rho=HALF, sigma=3) == 0


def test_three_term_relation():
    series = PFQ((HALF, 2, -3), (Fraction(5, 2), Fraction(7, 3)), 1)
    assert three_term_residual(series) == 0
    expr = apply_rule("dlmf-16-3-7", series, a1_index=0)
    assert expr.evaluate_exact().to_fraction() == direct_sum(series)


def test_thomae_prefers_a_terminating_target():
    prefactor, target = thomae_16_4_11(PFQ.from_literal("3F2(3,4,1;6,3;1)"))
    assert prefactor.to_fraction() == 5
    assert direct_sum(target) == 1


def test_thomae_rejects_a_lower_pole_inside_the_truncation():
    # direct summation stops before (-2)_k vanishes; the transformed pair does not
    series = PFQ.from_literal("3F2(-4,5,0;-5/2,-2;1)")
    assert direct_sum(series) == 1
    with pytest.raises((PoleError, NotApplicable)):
        apply_rule("dlmf-16-4-11", series)
    with pytest.raises((PoleError, NotApplicable)):
        thomae_16_4_11(series)


def test_numeric_closed_forms():
    with mp.workdps(45):
        assert abs(eval_365(1, 40) - 4 * mp.log(2)) < mpf(10) ** -35
        series = PFQ.from_literal("3F2(1/2,1,1;3/2,3/2;-1/2)")
        assert abs(eval_413(HALF, 40) - eval_pfq_numeric(series, 40)) < mpf(10) ** -35
    with pytest.raises(DomainError):
        eval_413(0, 30)


def test_closed_value_normalizes_pi_squared():
    assert ClosedValue.of(GammaValue(Fraction(2), 4)) == ClosedValue.atom(PI2, 2)
    with pytest.raises(IrrationalResult):
        ClosedValue.atom(PI2).to_fraction()


def test_reduce_trigamma():
    value = ClosedValue.atom(trig_half(0)).reduce_trigamma()
    assert value == ClosedValue.atom(PI2, HALF) - 4
    with mp.workdps(45):
        numeric = ClosedValue.atom(trig_half(1)).numeric(40)
        assert abs(numeric - mp.psi(1, mpf(5) / 2)) < mpf(10) ** -35


def test_registry():
    assert len(RULES) == 15
    assert "saalschutz" in rule_ids()
    assert get_rule("dlmf-16-4-11").citation == "DLMF 16.4.11"
    with pytest.raises(UnknownRule):
        get_rule("nosuch")
    with pytest.raises(UnknownRule):
        check_rule("nosuch", trials=1)


@pytest.mark.parametrize("rule_id", sorted(RULES))
def test_check_rule_small_sample(rule_id):
    checks = check_rule(rule_id, trials=8, seed=1, digits=30)
    assert len(checks) == 8
    assert [check.trial for check in checks] == list(range(8))
    assert all(check.status == "pass" for check in checks), [c for c in checks if not c.passed]


def test_check_rule_is_reproducible():
    first = check_rule("saalschutz", trials=5, seed=7)
    second = check_rule("saalschutz", trials=5, seed=7)
    assert [c.series for c in first] == [c.series for c in second]


@pytest.mark.slow
@pytest.mark.parametrize("rule_id", sorted(RULES))
def test_check_rule_full_sample(rule_id):
    checks = check_rule(rule_id)
    assert len(checks) == 200
    assert all(check.passed for check in checks)


@pytest.mark.parametrize("seed", [0, 1, 7, 42])
@pytest.mark.parametrize("rule_id", ["gauss-second-half", "gauss-unit", "dlmf-16-4-11"])
def test_pole_prone_rules_over_several_seeds(rule_id, seed):
    checks = check_rule(rule_id, trials=50, seed=seed, digits=30)
    assert all(check.status == "pass" for check in checks), [c for c in checks if not c.passed]


@pytest.mark.parametrize("rule_id", ["gauss-second-half", "gauss-unit"])
def test_gauss_samplers_include_non_terminating_series(rule_id):
    checks = check_rule(rule_id, trials=40, seed=3, digits=50)
    numeric = [check for check in checks if not check.exact]
    assert numeric
    assert any(not classify(check.series).terminating for check in numeric)
    assert all(check.passed for check in checks)


def _off_by_one(series: PFQ, **options: object) -> TransformExpr:
    bump = 1 if (classify(series).truncation or 0) >= 2 else 0
    return TransformExpr.constant(direct_sum(series) + bump)


def _draw_off_by_one(rng: random.Random) -> PFQ:
    return PFQ((Fraction(-rng.randint(2, 6)), Fraction(7, 3)), (Fraction(11, 2),), 1)


OFF_BY_ONE = Rule("off-by-one", "wrong from two terms on", _off_by_one, _draw_off_by_one)


def test_shrink_counterexample_reaches_a_local_minimum():
    series = PFQ((Fraction(-5), Fraction(7, 3)), (Fraction(11, 2),), 1)
    assert shrink_counterexample(OFF_BY_ONE, series) == PFQ((-2, 1), (1,), 0)


def test_shrink_counterexample_keeps_an_already_minimal_instance():
    series = PFQ((-2, 1), (1,), 0)
    assert shrink_counterexample(OFF_BY_ONE, series) == series


def test_failed_checks_carry_a_minimal_counterexample(monkeypatch):
    monkeypatch.setitem(RULES, OFF_BY_ONE.id, OFF_BY_ONE)
    checks = check_rule(OFF_BY_ONE.id, trials=3, seed=0)
    assert [check.status for check in checks] == ["fail"] * 3
    assert all(check.shrunk == PFQ((-2, 1), (1,), 0) for check in checks)
    assert all(check.series.arg == 1 for check in checks)


def test_passing_checks_are_not_shrunk():
    checks = check_rule("saalschutz", trials=3, seed=0)
    assert all(check.shrunk is None for check in checks)
