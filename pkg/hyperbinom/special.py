"""High-precision numerics on top of :mod:`mpmath`.

Every function takes the working precision as an explicit ``digits`` argument and evaluates
inside ``mp.workdps(digits + GUARD_DIGITS)``; nothing here changes the global precision.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpf

from hyperbinom.errors import (
    Divergent,
    DomainError,
    MaxTermsExceeded,
    NotAlternating,
)
from hyperbinom.exact import Rational, as_fraction
from hyperbinom.hyper import PFQ, classify, direct_sum

__all__ = [
    "GUARD_DIGITS",
    "AccelerationResult",
    "LI2_ARGUMENTS",
    "accelerate_alternating",
    "digamma",
    "eval_pfq_numeric",
    "li2",
    "li2_argument",
    "li2_five_term",
    "ln_s5",
    "lnsq_phi",
    "pi2_minus_trigamma_half",
    "series_terms",
    "to_mpf",
    "trigamma",
]

logger = logging.getLogger("hyper-binom")

GUARD_DIGITS = 15

Number = Rational | mpf


def to_mpf(value: Number | str) -> mpf:
    """Convert a Fraction, int, string or mpf at the current working precision."""

    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    return mpf(value)


def _epsilon(digits: int) -> mpf:
    return mpf(10) ** (-digits - 2)


def _lift(x: Rational, digits: int) -> tuple[mpf, int]:
    """Smallest shift ``x + L`` with ``x + L >= digits + 10``."""

    x = as_fraction(x)
    if x <= 0:
        raise DomainError(f"argument must be positive, got {x}")
    floor = math.floor(x)
    steps = max(0, digits + 10 - floor)
    return to_mpf(x), steps


def trigamma(x: Rational, digits: int) -> mpf:
    """Trigamma function ``psi'(x) = sum_k 1/(x+k)^2`` for rational ``x > 0``.

    The argument is lifted with ``psi'(x) = 1/x^2 + psi'(x+1)`` until it exceeds the precision
    in digits, then the Euler-Maclaurin expansion in Bernoulli numbers supplies the tail.

    Raises:
        DomainError: For ``x <= 0``.
    """
    with mp.workdps(digits + GUARD_DIGITS):
        y, steps = _lift(x, digits)
        total = mp.fsum(1 / (y + j) ** 2 for j in range(steps))
        y += steps
        eps = _epsilon(digits)
        tail = 1 / y + 1 / (2 * y**2)
        for k in itertools.count(1):
            term = mp.bernoulli(2 * k) / y ** (2 * k + 1)
            tail += term
            if abs(term) < eps:
                break
            if k > 4 * y:
                raise MaxTermsExceeded("trigamma tail expansion did not settle")
        return +(total + tail)


def digamma(x: Rational, digits: int) -> mpf:
    """Digamma function for rational ``x > 0``, by the same lift as :func:`trigamma`."""

    with mp.workdps(digits + GUARD_DIGITS):
        y, steps = _lift(x, digits)
        total = -mp.fsum(1 / (y + j) for j in range(steps))
        y += steps
        eps = _epsilon(digits)
        tail = mp.log(y) - 1 / (2 * y)
        for k in itertools.count(1):
            term = mp.bernoulli(2 * k) / (2 * k * y ** (2 * k))
            tail -= term
            if abs(term) < eps:
                break
            if k > 4 * y:
                raise MaxTermsExceeded("digamma tail expansion did not settle")
        return +(total + tail)


@lru_cache(maxsize=1024)
def pi2_minus_trigamma_half(n: int) -> Fraction:
    """Exact ``pi^2/2 - psi'(n + 3/2) = 4 * sum_{j=0}^{n} 1/(2j+1)^2``.

    Example:
        >>> pi2_minus_trigamma_half(2)
        Fraction(1036, 225)
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    return 4 * sum((Fraction(1, (2 * j + 1) ** 2) for j in range(n + 1)), Fraction(0))


def _li2_series(y: mpf, eps: mpf) -> mpf:
    # 0 <= y <= 1/2, so the tail after a term is at most twice that term
    total = mpf(0)
    power = mpf(1)
    for k in itertools.count(1):
        power *= y
        term = power / k**2
        total += term
        if term < eps:
            return total
    raise AssertionError("unreachable")


def li2(x: Number, digits: int) -> mpf:
    """Dilogarithm ``Li2(x) = sum_{k>=1} x^k / k^2`` for ``-1 <= x <= 1``.

    Arguments above 1/2 use ``Li2(x) + Li2(1-x) = pi^2/6 - ln(x) ln(1-x)``; negative ones use
    ``Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2``, so the series only runs on ``[0, 1/2]``.

    Raises:
        DomainError: Outside ``[-1, 1]``.
    """
    with mp.workdps(digits + GUARD_DIGITS):
        value = to_mpf(x)
        if value < -1 or value > 1:
            raise DomainError(f"li2 is evaluated on [-1, 1] only, got {value}")
        eps = _epsilon(digits) / 4
        if value == 0:
            return mpf(0)
        if value == 1:
            return mp.pi**2 / 6
        if value < 0:
            reflected = value / (value - 1)
            return -_li2_series(reflected, eps) - mp.log(1 - value) ** 2 / 2
        if value > mpf(1) / 2:
            return (
                mp.pi**2 / 6
                - mp.log(value) * mp.log(1 - value)
                - _li2_series(1 - value, eps)
            )
        return _li2_series(value, eps)


def li2_five_term(x: Number, y: Number, digits: int) -> mpf:
    """Residual ``|LHS - RHS|`` of the five-term dilogarithm relation

    ``Li2(x) - Li2(y) = Li2(y(1-x)/(x(1-y))) - Li2(y/x) - Li2((1-x)/(1-y))
    + pi^2/6 - ln(x) ln((1-x)/(1-y))``.

    Raises:
        DomainError: Unless ``0 < x < 1`` and every dilogarithm argument lies in ``[-1, 1]``.
    """
    with mp.workdps(digits + GUARD_DIGITS):
        x, y = to_mpf(x), to_mpf(y)
        if not 0 < x < 1 or y >= 1:
            raise DomainError(f"five-term relation needs 0 < x < 1 and y < 1, got {x}, {y}")
        ratio = (1 - x) / (1 - y)
        arguments = (y * ratio / x, y / x, ratio)
        if any(abs(argument) > 1 for argument in arguments):
            raise DomainError(f"dilogarithm argument outside [-1, 1] for x={x}, y={y}")
        inner = digits + GUARD_DIGITS
        lhs = li2(x, inner) - li2(y, inner)
        rhs = (
            li2(arguments[0], inner)
            - li2(arguments[1], inner)
            - li2(arguments[2], inner)
            + mp.pi**2 / 6
            - mp.log(x) * mp.log(ratio)
        )
        return abs(lhs - rhs)


def ln_s5(digits: int) -> mpf:
    """``ln(2(sqrt(2) - 1))``."""

    with mp.workdps(digits + GUARD_DIGITS):
        return mp.log(2 * (mp.sqrt(2) - 1))


def lnsq_phi(digits: int) -> mpf:
    """``ln^2((sqrt(5) - 1)/2)``."""

    with mp.workdps(digits + GUARD_DIGITS):
        return mp.log((mp.sqrt(5) - 1) / 2) ** 2


LI2_ARGUMENTS: dict[str, Callable[[], mpf]] = {
    "sqrt5-2": lambda: mp.sqrt(5) - 2,
    "2-sqrt5": lambda: 2 - mp.sqrt(5),
    "(1-sqrt5)/2": lambda: (1 - mp.sqrt(5)) / 2,
    "(sqrt5-1)/2": lambda: (mp.sqrt(5) - 1) / 2,
    "-1": lambda: mpf(-1),
}


def li2_argument(tag: str, digits: int) -> mpf:
    """Numeric value of a named dilogarithm argument such as ``"sqrt5-2"``."""

    try:
        build = LI2_ARGUMENTS[tag]
    except KeyError:
        raise DomainError(f"unknown dilogarithm argument tag {tag!r}") from None
    with mp.workdps(digits + GUARD_DIGITS):
        return build()


@dataclass(frozen=True)
class AccelerationResult:
    """Accelerated value of an alternating series with a raw bracketing pair.

    ``bracket`` holds the partial sums ``S_N`` and ``S_{N+1}`` (first ``N+1`` and ``N+2``
    terms); for alternating terms of decreasing size the true sum lies between them.
    """

    value: mpf
    bracket: tuple[mpf, mpf]
    bracket_at: int
    terms_used: int

    @property
    def lower(self) -> mpf:
        return min(self.bracket)

    @property
    def upper(self) -> mpf:
        return max(self.bracket)

    def encloses(self, value: mpf) -> bool:
        return self.lower <= value <= self.upper


def accelerate_alternating(
    terms: Iterable[Number], digits: int, *, bracket_at: int | None = None
) -> AccelerationResult:
    """Sum an alternating series with the Cohen-Rodriguez Villegas-Zagier weights.

    Args:
        terms: Signed terms ``t_0, t_1, ...``; consecutive terms must have opposite signs.
        digits: Target precision in decimal digits.
        bracket_at: Index ``N`` of the raw partial-sum bracket; defaults to the number of
            terms the acceleration consumes.

    Returns:
        The accelerated sum together with the bracketing pair ``(S_N, S_{N+1})``.

    Raises:
        NotAlternating: If two consecutive inspected terms share a sign or one vanishes.

    Example:
        >>> terms = (Fraction((-1) ** k, k + 1) for k in itertools.count())
        >>> result = accelerate_alternating(terms, 30)
        >>> mp.nstr(result.value, 10)
        '0.6931471806'
    """
    with mp.workdps(digits + GUARD_DIGITS):
        count = int(1.31 * digits) + 10
        bracket_at = count if bracket_at is None else bracket_at
        needed = max(count, bracket_at + 2)
        values = [to_mpf(term) for term in itertools.islice(iter(terms), needed)]
        if len(values) < needed:
            total = mp.fsum(values)
            return AccelerationResult(total, (total, total), len(values), len(values))
        for index, (current, following) in enumerate(itertools.pairwise(values)):
            if current == 0 or mp.sign(current) == mp.sign(following):
                raise NotAlternating(f"terms {index} and {index + 1} break the sign pattern")

        lead = mp.sign(values[0])
        d = (3 + mp.sqrt(8)) ** count
        d = (d + 1 / d) / 2
        b = mpf(-1)
        c = -d
        s = mpf(0)
        for k in range(count):
            c = b - c
            s += c * abs(values[k])
            b = (k + count) * (k - count) * b / ((k + mpf(1) / 2) * (k + 1))
        partial = mp.fsum(values[: bracket_at + 1])
        bracket = (partial, partial + values[bracket_at + 1])
        logger.debug("Accelerated %d terms; bracket at N=%d", count, bracket_at)
        return AccelerationResult(lead * s / d, bracket, bracket_at, count)


def series_terms(series: PFQ, start: int) -> Iterator[mpf]:
    """Terms ``t_start, t_start+1, ...`` of a series in floating point."""

    current = to_mpf(series.term(start))
    upper = [to_mpf(a) for a in series.upper]
    if series.regularized:
        gap = series.regular_index
        lower = [to_mpf(b) for b in series.lower if b != -gap]
    else:
        gap = None
        lower = [to_mpf(b) for b in series.lower]
    arg = to_mpf(series.arg)
    for k in itertools.count(start):
        yield current
        numerator = mp.fprod(a + k for a in upper) * arg
        denominator = mp.fprod(b + k for b in lower) * (k + 1)
        if gap is not None:
            denominator *= k - gap
        current = current * numerator / denominator


def _settled_index(series: PFQ) -> int:
    """First index from which every shifted parameter is positive."""

    parameters = list(series.upper) + list(series.lower)
    lowest = min(parameters, default=Fraction(1))
    start = series.regular_index + 1 if series.regularized else 0
    return max(start, math.floor(-lowest) + 1 if lowest <= 0 else 0)


def eval_pfq_numeric(series: PFQ, digits: int, max_terms: int = 200_000) -> mpf:
    """Numeric value of a series at ``digits`` precision.

    Terminating series are summed exactly. Inside the unit disc the partial sum stops once a
    geometric bound on the tail drops below the target; at ``-1`` the alternating tail is
    accelerated; at ``1`` with positive balance :func:`mpmath.hyper` is used.

    Raises:
        Divergent: When the series does not converge at its argument.
        MaxTermsExceeded: When ``max_terms`` terms do not reach the precision.
    """
    info = classify(series)
    with mp.workdps(digits + GUARD_DIGITS):
        if info.terminating:
            return to_mpf(direct_sum(series))
        if series.p > series.q + 1 and series.arg != 0:
            raise Divergent(f"{series} has radius of convergence 0")
        z = abs(series.arg)
        eps = _epsilon(digits)
        if z < 1 or series.p <= series.q:
            start = _settled_index(series)
            total = mp.fsum(to_mpf(series.term(k)) for k in range(start))
            generator = series_terms(series, start)
            previous = None
            for index, term in enumerate(generator):
                total += term
                if previous not in (None, 0) and term != 0:
                    ratio = abs(term / previous)
                    bound = max(ratio, to_mpf(z)) if series.p == series.q + 1 else ratio
                    if bound < 1 and abs(term) * bound / (1 - bound) < eps * max(1, abs(total)):
                        return +total
                if index > max_terms:
                    raise MaxTermsExceeded(f"{series} needs more than {max_terms} terms")
                previous = term
        if series.p != series.q + 1:
            raise Divergent(f"{series} does not converge at |z| = {z}")
        if series.arg == -1 and info.balance > -1:
            start = _settled_index(series)
            head = mp.fsum(to_mpf(series.term(k)) for k in range(start))
            tail = accelerate_alternating(series_terms(series, start), digits + GUARD_DIGITS)
            return +(head + tail.value)
        if series.arg == 1 and info.balance > 0 and not series.regularized:
            upper = [to_mpf(a) for a in series.upper]
            lower = [to_mpf(b) for b in series.lower]
            return +mp.hyper(upper, lower, 1)
    raise Divergent(f"{series} does not converge at its argument")
