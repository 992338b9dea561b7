from __future__ import annotations

from fractions import Fraction

import pytest

from hyperbinom.errors import DomainError, IrrationalResult, PoleError
from hyperbinom.exact import (
    SQRT_PI,
    GammaValue,
    binomial,
    central_binomial_gamma,
    gamma_half_integer,
    gamma_quotient,
    generalized_binomial,
    is_half_integer,
    is_nonpositive_integer,
    pochhammer,
)


def test_pochhammer_basic_values():
    assert pochhammer(3, 2) == 12
    assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)
    assert pochhammer(7, 0) == 1
    assert pochhammer(-2, 3) == 0
    assert pochhammer(-2, 2) == 2


def test_pochhammer_negative_index():
    assert pochhammer(3, -1) == Fraction(1, 2)
    assert pochhammer(Fraction(1, 2), -1) == -2
    with pytest.raises(PoleError):
        pochhammer(1, -1)


def test_binomial_vanishes_outside_range():
    assert binomial(5, 2) == 10
    assert binomial(3, 5) == 0
    assert binomial(4, -1) == 0
    assert binomial(-1, 0) == 0


def test_generalized_binomial_rational_top():
    assert generalized_binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert generalized_binomial(5, 2) == 10
    assert generalized_binomial(Fraction(1, 2), -1) == 0


def test_parameter_predicates():
    assert is_nonpositive_integer(0)
    assert is_nonpositive_integer(Fraction(-3))
    assert not is_nonpositive_integer(Fraction(-1, 2))
    assert is_half_integer(Fraction(-7, 2))
    assert not is_half_integer(Fraction(1, 3))


def test_gamma_half_integer_lattice():
    assert gamma_half_integer(5) == GammaValue(Fraction(24))
    assert gamma_half_integer(Fraction(1, 2)) == SQRT_PI
    assert gamma_half_integer(Fraction(3, 2)) == GammaValue(Fraction(1, 2), 1)
    assert gamma_half_integer(Fraction(-1, 2)) == GammaValue(Fraction(-2), 1)


def test_gamma_half_integer_rejects_poles_and_other_arguments():
    with pytest.raises(PoleError):
        gamma_half_integer(0)
    with pytest.raises(DomainError):
        gamma_half_integer(Fraction(1, 3))


def test_gamma_quotient_cancels_integer_gaps():
    assert gamma_quotient([-2], [-4]).to_fraction() == 12
    assert gamma_quotient([Fraction(7, 2)], [Fraction(1, 2)]).to_fraction() == Fraction(15, 8)
    assert gamma_quotient([1], [0]).to_fraction() == 0


def test_gamma_quotient_keeps_leftover_sqrt_pi():
    value = gamma_quotient([Fraction(1, 2), Fraction(1, 2)], [1])
    assert value.sqrt_pi_exp == 2
    assert not value.is_rational
    with pytest.raises(IrrationalResult):
        value.to_fraction()


def test_central_binomial_gamma_matches_binomials():
    for k in range(25):
        assert central_binomial_gamma(k).to_fraction() == binomial(2 * k, k)


def test_gamma_value_arithmetic():
    product = SQRT_PI * SQRT_PI * 3
    assert product == GammaValue(Fraction(3), 2)
    assert (product / SQRT_PI) == GammaValue(Fraction(3), 1)
    assert GammaValue(Fraction(0), 3).sqrt_pi_exp == 0


def test_duplication_formula_on_the_half_integer_lattice():
    for j in range(1, 200):
        x = Fraction(j, 2)
        left = gamma_half_integer(x) * gamma_half_integer(x + Fraction(1, 2))
        right = Fraction(2) ** (1 - j) * SQRT_PI * gamma_half_integer(j)
        assert left == right, x


def test_reflection_formula_on_half_odd_arguments():
    for j in range(-100, 100):
        x = j + Fraction(1, 2)
        assert gamma_half_integer(x) * gamma_half_integer(1 - x) == GammaValue(
            Fraction(1 if j % 2 == 0 else -1), 2
        )


def test_gamma_recurrence_through_negative_arguments():
    for j in range(-100, 100):
        x = j + Fraction(1, 2)
        assert gamma_half_integer(x + 1) == gamma_half_integer(x) * x


def test_central_binomial_form_up_to_one_hundred():
    for k in range(101):
        assert central_binomial_gamma(k) == GammaValue(Fraction(binomial(2 * k, k)))
