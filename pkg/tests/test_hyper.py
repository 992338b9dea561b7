from __future__ import annotations

from fractions import Fraction

import pytest

from hyperbinom.errors import (
    DomainError,
    IrrationalRoots,
    NotHypergeometric,
    NotTerminating,
    PoleError,
)
from hyperbinom.hyper import (
    PFQ,
    SumSpec,
    classify,
    direct_sum,
    naive_sum,
    rational_roots,
    recognize,
    recognize_ratio,
    reverse,
    split_tail,
    term_value,
)
from hyperbinom.termlang import parse_term_spec


def test_direct_sum_of_terminating_series():
    assert direct_sum(PFQ.from_literal("2F1(-2,-2;1;1)")) == 6
    assert direct_sum(PFQ.from_literal("1F0(1;;1/2)"), truncate_at=1) == Fraction(3, 2)


def test_direct_sum_needs_a_cut_off():
    with pytest.raises(NotTerminating):
        direct_sum(PFQ.from_literal("2F1(1,1;2;1/2)"))


def test_lower_pole_before_termination_is_rejected():
    with pytest.raises(PoleError):
        PFQ((1,), (-1,), 1)
    # terminating at the pole itself is admissible
    assert direct_sum(PFQ((-1,), (-1,), 1)) == 2


def test_regularized_series_skips_vanishing_head():
    series = PFQ((-3,), (-1,), 1, regularized=True)
    assert series.term(0) == 0
    assert series.term(1) == 0
    assert direct_sum(series) == series.term(2) + series.term(3)


def test_classify_saalschutzian_and_balance():
    info = classify(PFQ.from_literal("3F2(-4,1/2,1/2;3/2,-7/2;1)"))
    assert info.terminating
    assert info.truncation == 4
    assert info.saalschutzian
    assert classify(PFQ.from_literal("2F1(1,1;1;1)")).balance == -1


def test_normalized_cancels_pairs_but_keeps_truncating_ones():
    series = PFQ((Fraction(1, 2), -2, 3), (3, -2), 1).normalized()
    assert series.upper == (-2, Fraction(1, 2))
    assert series.lower == (-2,)


def test_reverse_preserves_the_sum():
    for source in (
        PFQ.from_literal("2F1(-2,1;3;1)"),
        PFQ.from_literal("3F2(1,-4,-4;6,6;1)"),
        PFQ.from_literal("2F1(-5,1/2;3/2;-1/3)"),
    ):
        prefactor, reversed_series = reverse(source)
        assert prefactor * direct_sum(reversed_series) == direct_sum(source)


def test_split_tail_shifts_parameters():
    series = PFQ.from_literal("1F0(1;;1/2)")
    full, prefactor, tail = split_tail(series, 1)
    assert full == series
    assert prefactor == Fraction(1, 4)
    assert tail == PFQ((3, 1), (3,), Fraction(1, 2))


def test_split_tail_rejects_negative_cut():
    with pytest.raises(DomainError):
        split_tail(PFQ.from_literal("1F0(1;;1/2)"), -1)


def test_term_value_and_naive_sum():
    spec = parse_term_spec("binom(n+k,k)/pow(2,k)")
    assert term_value(spec, 1, 2) == Fraction(3, 2)
    assert naive_sum(SumSpec(spec, 0, 3, n=3)) == 8


def test_sum_spec_rejects_empty_range():
    with pytest.raises(DomainError):
        SumSpec(parse_term_spec("1"), 5, 3)


def test_recognize_binomial_theorem_sum():
    found = recognize(SumSpec(parse_term_spec("binom(n+k,k)/pow(2,k)"), 0, 3, n=3))
    assert str(found.series) == "1F0(4;;1/2)"
    assert found.prefactor == 1
    assert found.truncate_at == 3
    assert found.total() == 8


def test_recognize_saalschutzian_convolution():
    spec = parse_term_spec("binom(2k,k)*binom(2(n-k),n-k)/(1+2k)")
    found = recognize(SumSpec(spec, 0, 1, n=1))
    series = found.series.normalized()
    assert found.prefactor == 2
    assert series.upper == (-1, Fraction(1, 2), Fraction(1, 2))
    assert series.lower == (Fraction(-1, 2), Fraction(3, 2))
    assert classify(series).saalschutzian
    assert found.total() == Fraction(8, 3)


def test_recognize_constant_summand():
    found = recognize(SumSpec(parse_term_spec("1"), 0, 1, n=1))
    assert found.total() == 2


def test_recognize_shifts_a_nonzero_start():
    spec = parse_term_spec("binom(n,k)")
    found = recognize(SumSpec(spec, 2, 5, n=5))
    assert found.total() == naive_sum(SumSpec(spec, 2, 5, n=5))


@pytest.mark.parametrize("n", range(0, 12))
def test_recognition_agrees_with_naive_sum_for_reciprocal_binomials(n):
    spec = parse_term_spec("binom(2k,k)/(pow(16,k)*(n-k+1)^2*binom(2(n-k+1),n-k+1))")
    sum_spec = SumSpec(spec, 0, n, n=n)
    assert recognize(sum_spec).total() == naive_sum(sum_spec)


def test_rational_roots_with_multiplicity():
    assert rational_roots([2, 5, 2]) == ([-2, Fraction(-1, 2)], 2)
    assert rational_roots([0, 0, 3]) == ([0, 0], 3)
    assert rational_roots([Fraction(1, 2), 1]) == ([Fraction(-1, 2)], 1)
    assert rational_roots([7]) == ([], 7)


def test_rational_roots_rejects_irreducible_factors():
    with pytest.raises(IrrationalRoots):
        rational_roots([1, 0, 1])
    # (k+1)(k^2-2): the linear factor splits off, the quadratic does not
    with pytest.raises(IrrationalRoots):
        rational_roots([-2, -2, 1, 1])
    with pytest.raises(NotHypergeometric):
        rational_roots([0, 0])


def test_recognize_ratio_matches_term_recognition():
    # binom(2k,k)/pow(8,k) has ratio (4k+2)/(8k+8)
    found = recognize_ratio([2, 4], [8, 8])
    expected = recognize(SumSpec(parse_term_spec("binom(2k,k)/pow(8,k)"), 0, None))
    assert found.series == expected.series
    assert str(found.series) == "1F0(1/2;;1/2)"
    assert found.truncate_at is None


def test_recognize_ratio_keeps_the_first_term():
    found = recognize_ratio([3, -1], [1, 1], first=2)
    assert str(found.series) == "1F0(-3;;-1)"
    assert found.truncate_at == 3
    assert found.total() == 16
