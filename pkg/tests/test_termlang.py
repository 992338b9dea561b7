from __future__ import annotations

from fractions import Fraction

import pytest

from hyperbinom.errors import TermSyntaxError, UnknownSymbol
from hyperbinom.hyper import term_value
from hyperbinom.identities import IDENTITIES
from hyperbinom.termlang import (
    Binom,
    LinPow,
    Position,
    Pow,
    format_pfq,
    format_term_spec,
    parse_pfq_literal,
    parse_term_spec,
)


def test_parse_binomial_over_power():
    spec = parse_term_spec("binom(n+k,k)/pow(2,k)")
    assert spec.factors[0] == Pow(Fraction(1, 2))
    assert isinstance(spec.factors[1], Binom)
    assert format_term_spec(spec) == "pow(1/2,k)*binom(n+k,k)"


def test_parenthesized_product_moves_to_denominator():
    spec = parse_term_spec("pow(-1,k)*binom(2k,k)/(k*pow(4,k))")
    assert Pow(Fraction(-1, 4)) in spec.factors
    linear = [f for f in spec.factors if isinstance(f, LinPow)]
    assert len(linear) == 1
    assert linear[0].position is Position.DENOMINATOR


def test_powered_affine_and_implicit_coefficients():
    spec = parse_term_spec("binom(2(n-k+1),n-k+1)/(2k+1)^2")
    assert term_value(spec, 1, 2) == Fraction(6, 9)


@pytest.mark.parametrize("identity_id", sorted(IDENTITIES))
def test_identity_summands_print_and_reparse(identity_id):
    spec = IDENTITIES[identity_id].term
    assert parse_term_spec(format_term_spec(spec)) == spec


def test_syntax_error_reports_position():
    with pytest.raises(TermSyntaxError) as exc:
        parse_term_spec("binom(n,k")
    assert exc.value.position == 9


def test_unknown_symbol_is_rejected():
    with pytest.raises(UnknownSymbol):
        parse_term_spec("binom(x,k)")


def test_pow_exponent_must_be_the_index():
    with pytest.raises(TermSyntaxError):
        parse_term_spec("pow(2,n)")


def test_pfq_literal_round_trip():
    upper, lower, arg = parse_pfq_literal("3F2(1/2,1,1;3/2,3/2;-1/4)")
    assert upper == [Fraction(1, 2), 1, 1]
    assert lower == [Fraction(3, 2), Fraction(3, 2)]
    assert arg == Fraction(-1, 4)
    assert format_pfq(upper, lower, arg) == "3F2(1/2,1,1;3/2,3/2;-1/4)"


def test_pfq_literal_counts_must_match():
    with pytest.raises(TermSyntaxError):
        parse_pfq_literal("2F1(1,2,3;4;1)")
    with pytest.raises(TermSyntaxError):
        parse_pfq_literal("2F1(1,2;4)")
