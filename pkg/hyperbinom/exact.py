"""Exact rational arithmetic and the gamma calculus over half-integers.

Every scalar is a :class:`fractions.Fraction`. Gamma values at integer and half-odd arguments
are closed under multiplication as ``coeff * pi**(sqrt_pi_exp / 2)``, which is enough for the
duplication formula, the reflection formula and the central binomial coefficient.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from hyperbinom.errors import DomainError, IrrationalResult, PoleError

__all__ = [
    "SQRT_PI",
    "GammaValue",
    "Rational",
    "as_fraction",
    "binomial",
    "central_binomial_gamma",
    "gamma_half_integer",
    "gamma_quotient",
    "generalized_binomial",
    "is_half_integer",
    "is_nonpositive_integer",
    "pochhammer",
    "product",
]

Rational = Fraction | int


def as_fraction(value: Rational | str) -> Fraction:
    """Coerce ints, strings such as ``"-3/4"`` and Fractions to a reduced Fraction."""

    return value if isinstance(value, Fraction) else Fraction(value)


def is_nonpositive_integer(value: Rational) -> bool:
    value = as_fraction(value)
    return value.denominator == 1 and value <= 0


def is_half_integer(value: Rational) -> bool:
    """Return True when ``2 * value`` is an integer."""

    return (2 * as_fraction(value)).denominator == 1


def pochhammer(a: Rational, k: int) -> Fraction:
    """Rising factorial ``(a)_k = a (a+1) ... (a+k-1)``.

    Negative ``k`` follows ``(a)_{-j} = 1 / (a-j)_j``.

    Args:
        a: Base of the rising product.
        k: Number of factors.

    Returns:
        The exact product; ``pochhammer(a, 0) == 1``.

    Raises:
        PoleError: For negative ``k`` when ``(a-j)_j`` vanishes.
    """
    a = as_fraction(a)
    if k < 0:
        denominator = pochhammer(a + k, -k)
        if denominator == 0:
            raise PoleError(f"({a})_{k} has a vanishing denominator")
        return 1 / denominator
    if a.denominator == 1 and a > 0:
        # Integer bases reduce to a factorial quotient, which is much faster for large k.
        start = a.numerator
        return Fraction(math.factorial(start + k - 1) // math.factorial(start - 1))
    result = Fraction(1)
    for offset in range(k):
        result *= a + offset
        if result == 0:
            break
    return result


def binomial(n: int, k: int) -> Fraction:
    """Binomial coefficient ``C(n, k)`` with the vanishing convention outside ``0 <= k <= n``.

    Negative ``n`` is treated as out of range as well, so ``C(-1, 0) == 0``.
    """
    if k < 0 or n < 0 or k > n:
        return Fraction(0)
    return Fraction(math.comb(n, k))


def generalized_binomial(x: Rational, k: int) -> Fraction:
    """Binomial coefficient with rational top, ``(-1)^k (-x)_k / k!``; zero for ``k < 0``."""

    if k < 0:
        return Fraction(0)
    return (-1) ** k * pochhammer(-as_fraction(x), k) / math.factorial(k)


@dataclass(frozen=True, slots=True)
class GammaValue:
    """Exact number ``coeff * pi**(sqrt_pi_exp / 2)``.

    Zero is always stored with ``sqrt_pi_exp == 0`` so that equality is structural.
    """

    coeff: Fraction
    sqrt_pi_exp: int = 0

    def __post_init__(self) -> None:
        coeff = as_fraction(self.coeff)
        object.__setattr__(self, "coeff", coeff)
        if coeff == 0:
            object.__setattr__(self, "sqrt_pi_exp", 0)

    @classmethod
    def rational(cls, value: Rational) -> GammaValue:
        return cls(as_fraction(value), 0)

    @property
    def is_rational(self) -> bool:
        return self.sqrt_pi_exp == 0

    def to_fraction(self) -> Fraction:
        """Return the value as a Fraction.

        Raises:
            IrrationalResult: If a nonzero power of sqrt(pi) remains.
        """
        if self.sqrt_pi_exp != 0:
            raise IrrationalResult(f"{self} carries pi^({self.sqrt_pi_exp}/2)")
        return self.coeff

    def _coerce(self, other: GammaValue | Rational) -> GammaValue:
        if isinstance(other, GammaValue):
            return other
        return GammaValue.rational(other)

    def __mul__(self, other: GammaValue | Rational) -> GammaValue:
        other = self._coerce(other)
        return GammaValue(self.coeff * other.coeff, self.sqrt_pi_exp + other.sqrt_pi_exp)

    __rmul__ = __mul__

    def __truediv__(self, other: GammaValue | Rational) -> GammaValue:
        other = self._coerce(other)
        if other.coeff == 0:
            raise ZeroDivisionError("division by a zero GammaValue")
        return GammaValue(self.coeff / other.coeff, self.sqrt_pi_exp - other.sqrt_pi_exp)

    def __rtruediv__(self, other: Rational) -> GammaValue:
        return GammaValue.rational(other) / self

    def __pow__(self, exponent: int) -> GammaValue:
        if exponent < 0:
            return GammaValue.rational(1) / (self ** (-exponent))
        return GammaValue(self.coeff**exponent, self.sqrt_pi_exp * exponent)

    def __neg__(self) -> GammaValue:
        return GammaValue(-self.coeff, self.sqrt_pi_exp)

    def __str__(self) -> str:
        if self.sqrt_pi_exp == 0:
            return str(self.coeff)
        return f"{self.coeff}*pi^({self.sqrt_pi_exp}/2)"


SQRT_PI = GammaValue(Fraction(1), 1)


def _gamma_positive_half_odd(j: int) -> Fraction:
    """Coefficient c with Gamma(j + 1/2) = c * sqrt(pi), for j >= 0."""

    return Fraction(math.factorial(2 * j), 4**j * math.factorial(j))


def gamma_half_integer(x: Rational) -> GammaValue:
    """Exact Gamma function at an integer or half-odd argument.

    Negative half-odd arguments use the reflection formula
    ``Gamma(x) Gamma(1-x) = pi / sin(pi x)``.

    Raises:
        PoleError: When ``x`` is zero or a negative integer.
        DomainError: When ``2x`` is not an integer.
    """
    x = as_fraction(x)
    if not is_half_integer(x):
        raise DomainError(f"Gamma({x}) is outside the half-integer lattice")
    if x.denominator == 1:
        if x <= 0:
            raise PoleError(f"Gamma has a pole at {x}")
        return GammaValue(Fraction(math.factorial(x.numerator - 1)), 0)
    if x > 0:
        return GammaValue(_gamma_positive_half_odd(int(x - Fraction(1, 2))), 1)
    j = int(Fraction(1, 2) - x)
    # sin(pi x) = (-1)^j for x = 1/2 - j
    return GammaValue((-1) ** j / _gamma_positive_half_odd(j), 1)


def central_binomial_gamma(k: int) -> GammaValue:
    """Right-hand side of ``C(2k, k) = 2^{2k} Gamma(k+1/2) / (sqrt(pi) Gamma(k+1))``."""

    return (
        GammaValue.rational(4**k)
        * gamma_half_integer(Fraction(2 * k + 1, 2))
        / SQRT_PI
        / gamma_half_integer(k + 1)
    )


def gamma_quotient(
    numerators: Iterable[Rational], denominators: Iterable[Rational]
) -> GammaValue:
    """Evaluate ``prod Gamma(numerators) / prod Gamma(denominators)`` exactly.

    Arguments whose difference is an integer are cancelled into Pochhammer symbols first,
    which keeps the limit value when both sit on poles (``Gamma(-2)/Gamma(-4) = 12``). Any
    argument left over must be an integer or half-odd.

    Returns:
        The quotient as a GammaValue; zero when a leftover denominator argument is a pole.

    Raises:
        PoleError: When a leftover numerator argument is a pole, or a cancelled pair has a
            pole only in the numerator.
        DomainError: When a leftover argument is not a half-integer.
    """
    tops = [as_fraction(value) for value in numerators]
    bottoms = [as_fraction(value) for value in denominators]
    result = GammaValue.rational(1)

    while True:
        best: tuple[int, int, int] | None = None
        for i, top in enumerate(tops):
            for j, bottom in enumerate(bottoms):
                gap = top - bottom
                if gap.denominator == 1 and (best is None or abs(gap) < abs(best[2])):
                    best = (i, j, gap.numerator)
        if best is None:
            break
        i, j, gap = best
        top = tops.pop(i)
        bottom = bottoms.pop(j)
        if gap >= 0:
            result = result * pochhammer(bottom, gap)
        else:
            rising = pochhammer(top, -gap)
            if rising == 0:
                raise PoleError(f"Gamma({top}) / Gamma({bottom}) is infinite")
            result = result / rising

    for bottom in bottoms:
        if is_nonpositive_integer(bottom):
            return GammaValue.rational(0)
    for top in tops:
        result = result * gamma_half_integer(top)
    for bottom in bottoms:
        result = result / gamma_half_integer(bottom)
    return result


def product(values: Sequence[Rational]) -> Fraction:
    """Exact product of a sequence of rationals."""

    return Fraction(math.prod(as_fraction(value) for value in values))
