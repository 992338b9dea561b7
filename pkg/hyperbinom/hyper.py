"""Concrete pFq series: recognition from binomial sums, classification and series surgery.

A :class:`PFQ` is the series ``sum_k prod (a)_k / prod (b)_k * z^k / k!`` with rational
parameters. :func:`recognize` reads one off the consecutive-term ratio of a summand at fixed
parameter values; :func:`reverse` and :func:`split_tail` reorder or cut it, and
:func:`direct_sum` is the exact oracle every other module is checked against.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction

from hyperbinom.errors import (
    DivisionByZero,
    DomainError,
    Divergent,
    IrrationalRoots,
    NotApplicable,
    NotHypergeometric,
    NotTerminating,
    PoleError,
)
from hyperbinom.exact import (
    Rational,
    as_fraction,
    binomial,
    generalized_binomial,
    is_nonpositive_integer,
    pochhammer,
    product,
)
from hyperbinom.termlang import (
    Affine,
    Binom,
    Const,
    Position,
    Pow,
    TermSpec,
    format_pfq,
    format_term_spec,
    parse_pfq_literal,
    parse_term_spec,
)

__all__ = [
    "Classification",
    "PFQ",
    "Recognized",
    "SumSpec",
    "classify",
    "direct_sum",
    "format_term_spec",
    "naive_sum",
    "parse_term_spec",
    "rational_roots",
    "recognize",
    "recognize_ratio",
    "reverse",
    "split_tail",
    "term_value",
]

logger = logging.getLogger("hyper-binom")


def _fractions(values: Iterable[Rational]) -> tuple[Fraction, ...]:
    return tuple(as_fraction(value) for value in values)


def _truncation(upper: Sequence[Fraction]) -> int | None:
    candidates = [-value.numerator for value in upper if is_nonpositive_integer(value)]
    return min(candidates) if candidates else None


@dataclass(frozen=True, slots=True)
class PFQ:
    """A generalized hypergeometric series with rational parameters.

    ``regularized`` series carry exactly one nonpositive-integer lower parameter ``-M`` and are
    divided by ``Gamma(-M)``: the terms ``k <= M`` vanish and the remaining ones use
    ``1 / Gamma(k - M)`` in place of ``1 / (-M)_k``.

    A plain series may still list a lower ``-M`` when it terminates at ``N <= M``; the sum
    stops before the vanishing denominator is reached.

    Raises:
        PoleError: When the lower parameters are inadmissible for the chosen kind.
    """

    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]
    arg: Fraction
    regularized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "upper", _fractions(self.upper))
        object.__setattr__(self, "lower", _fractions(self.lower))
        object.__setattr__(self, "arg", as_fraction(self.arg))
        poles = [value for value in self.lower if is_nonpositive_integer(value)]
        if self.regularized:
            if len(poles) != 1:
                raise PoleError(
                    f"a regularized series needs exactly one nonpositive-integer lower "
                    f"parameter, got {len(poles)}"
                )
            return
        if not poles:
            return
        truncation = _truncation(self.upper)
        deepest = min(-value.numerator for value in poles)
        if truncation is None or truncation > deepest:
            raise PoleError(
                f"lower parameter {-deepest} is reached before the series terminates"
            )

    @classmethod
    def from_literal(cls, text: str) -> PFQ:
        """Build a series from text such as ``"3F2(1/2,1,1;3/2,3/2;-1/4)"``."""

        upper, lower, arg = parse_pfq_literal(text)
        return cls(tuple(upper), tuple(lower), arg)

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    @property
    def regular_index(self) -> int:
        """``M`` for the lower parameter ``-M`` of a regularized series."""

        if not self.regularized:
            raise NotApplicable("series is not regularized")
        return next(-b.numerator for b in self.lower if is_nonpositive_integer(b))

    def _regular_lower(self) -> list[Fraction]:
        lower = list(self.lower)
        lower.remove(Fraction(-self.regular_index))
        return lower

    def term(self, k: int) -> Fraction:
        """Exact value of the ``k``-th term."""

        if k < 0:
            return Fraction(0)
        numerator = product([pochhammer(a, k) for a in self.upper]) * self.arg**k
        if numerator == 0:
            return Fraction(0)
        if self.regularized:
            gap = self.regular_index
            if k <= gap:
                return Fraction(0)
            denominator = product([pochhammer(b, k) for b in self._regular_lower()])
            denominator *= math.factorial(k) * math.factorial(k - gap - 1)
        else:
            denominator = product([pochhammer(b, k) for b in self.lower]) * math.factorial(k)
        if denominator == 0:
            raise PoleError(f"term {k} of {self} has a vanishing denominator")
        return numerator / denominator

    def with_parameters(
        self, upper: Iterable[Rational], lower: Iterable[Rational], **changes: object
    ) -> PFQ:
        return replace(self, upper=_fractions(upper), lower=_fractions(lower), **changes)

    def normalized(self) -> PFQ:
        """Cancel equal upper/lower pairs and sort both lists.

        Pairs on a nonpositive integer are kept, since they carry the truncation.
        """
        upper = Counter(self.upper)
        lower = Counter(self.lower)
        for value in list(upper):
            if is_nonpositive_integer(value):
                continue
            shared = min(upper[value], lower.get(value, 0))
            if shared:
                upper[value] -= shared
                lower[value] -= shared
        return self.with_parameters(sorted(upper.elements()), sorted(lower.elements()))

    def __str__(self) -> str:
        text = format_pfq(self.upper, self.lower, self.arg)
        return f"{text} regularized" if self.regularized else text


@dataclass(frozen=True, slots=True)
class Classification:
    terminating: bool
    truncation: int | None
    balance: Fraction
    saalschutzian: bool


def classify(series: PFQ) -> Classification:
    """Classify a series by termination and balance.

    Example:
        >>> classify(PFQ.from_literal("3F2(-4,1/2,1/2;3/2,-7/2;1)")).saalschutzian
        True
    """
    truncation = _truncation(series.upper)
    balance = sum(series.lower, Fraction(0)) - sum(series.upper, Fraction(0))
    terminating = truncation is not None
    return Classification(
        terminating=terminating,
        truncation=truncation,
        balance=balance,
        saalschutzian=terminating and series.arg == 1 and balance == 1,
    )


def direct_sum(series: PFQ, truncate_at: int | None = None) -> Fraction:
    """Sum the series exactly for ``k = 0 .. N``.

    ``N`` is ``truncate_at`` or the natural truncation, whichever is smaller.

    Raises:
        NotTerminating: When the series does not terminate and no cut-off is given.
    """
    natural = _truncation(series.upper)
    limit = truncate_at
    if natural is not None:
        limit = natural if limit is None else min(limit, natural)
    if limit is None:
        raise NotTerminating(f"{series} does not terminate")

    if series.regularized:
        gap = series.regular_index
        start = gap + 1
        lower = series._regular_lower()
    else:
        gap = None
        start = 0
        lower = list(series.lower)
    if limit < start:
        return Fraction(0)

    current = series.term(start)
    total = Fraction(0)
    for k in range(start, limit + 1):
        total += current
        if current == 0 or k == limit:
            break
        numerator = product([a + k for a in series.upper]) * series.arg
        denominator = product([b + k for b in lower]) * (k + 1)
        if gap is not None:
            denominator *= k - gap
        if denominator == 0:
            raise PoleError(f"term {k + 1} of {series} has a vanishing denominator")
        current = current * numerator / denominator
    return total


def reverse(series: PFQ) -> tuple[Fraction, PFQ]:
    """Sum a terminating series in the opposite order.

    Returns:
        ``(t_N, reversed)`` with ``t_N * direct_sum(reversed) == direct_sum(series)``.

    Raises:
        NotTerminating: If there is no truncation point.
        NotApplicable: For regularized series.
        DomainError: When the argument is zero.
    """
    if series.regularized:
        raise NotApplicable("cannot reverse a regularized series")
    truncation = _truncation(series.upper)
    if truncation is None:
        raise NotTerminating(f"{series} does not terminate")
    if series.arg == 0:
        raise DomainError("cannot reverse a series at argument 0")
    if truncation == 0:
        return Fraction(1), series

    rest = list(series.upper)
    rest.remove(Fraction(-truncation))
    upper = [1 - b - truncation for b in series.lower] + [Fraction(-truncation)]
    lower = [1 - a - truncation for a in rest]
    sign = -1 if (series.p + series.q + 1) % 2 else 1
    reversed_series = PFQ(tuple(upper), tuple(lower), sign / series.arg)
    return series.term(truncation), reversed_series


def split_tail(series: PFQ, cut: int) -> tuple[PFQ, Fraction, PFQ]:
    """Split a convergent series after term ``cut``.

    ``sum_{k<=cut} t_k == direct_sum(full) - tail_prefactor * direct_sum(tail)`` where
    ``tail_prefactor = t_{cut+1}`` and the tail parameters are the originals moved by
    ``cut + 1`` with an added pair ``1 / (cut + 2)``.

    Raises:
        Divergent: When the series does not converge at its argument.
    """
    if series.regularized:
        raise NotApplicable("cannot split a regularized series")
    if cut < 0:
        raise DomainError(f"cut must be nonnegative, got {cut}")
    info = classify(series)
    converges = (
        info.terminating
        or abs(series.arg) < 1
        or (series.arg == 1 and series.p == series.q + 1 and info.balance > 0)
        or (series.arg == -1 and series.p == series.q + 1 and info.balance > -1)
    )
    if not converges:
        raise Divergent(f"{series} does not converge")
    shift = cut + 1
    tail = PFQ(
        tuple(a + shift for a in series.upper) + (Fraction(1),),
        tuple(b + shift for b in series.lower) + (Fraction(cut + 2),),
        series.arg,
    )
    return series, series.term(shift), tail


@dataclass(frozen=True, slots=True)
class SumSpec:
    """``sum_{k=start}^{end} term(k)`` at concrete parameter values; ``end=None`` is infinity."""

    term: TermSpec
    start: int = 0
    end: int | None = None
    n: int = 0
    m: int = 0

    def __post_init__(self) -> None:
        if self.end is not None and self.start > self.end:
            raise DomainError(f"empty summation range {self.start}..{self.end}")

    @property
    def length(self) -> int | None:
        """Last index after shifting the range to start at 0."""

        return None if self.end is None else self.end - self.start


def term_value(spec: TermSpec, k: int, n: int, m: int = 0) -> Fraction:
    """Exact value of a summand.

    Out-of-range binomials vanish; a zero denominator raises :class:`DivisionByZero`.

    Example:
        >>> term_value(parse_term_spec("binom(n+k,k)/pow(2,k)"), 1, 2)
        Fraction(3, 2)
    """
    numerator = Fraction(1)
    denominator = Fraction(1)
    for factor in spec.factors:
        if isinstance(factor, Const):
            numerator *= factor.value
            continue
        if isinstance(factor, Pow):
            if factor.base == 0 and k < 0:
                raise DivisionByZero("pow(0,k) at negative k")
            numerator *= factor.base**k
            continue
        if isinstance(factor, Binom):
            value = _binomial_value(factor, k, n, m)
        else:
            value = factor.lin.at(n=n, m=m, k=k) ** factor.exponent
        if factor.position is Position.NUMERATOR:
            numerator *= value
        else:
            denominator *= value
    if denominator == 0:
        raise DivisionByZero(f"{format_term_spec(spec)} has a zero denominator at k={k}")
    return numerator / denominator


def _binomial_value(factor: Binom, k: int, n: int, m: int) -> Fraction:
    top = factor.top.at(n=n, m=m, k=k)
    bottom = factor.bottom.at(n=n, m=m, k=k)
    if bottom.denominator != 1:
        raise DomainError(f"binomial with non-integer lower entry {bottom}")
    if top.denominator == 1:
        return binomial(top.numerator, bottom.numerator)
    return generalized_binomial(top, bottom.numerator)


def naive_sum(spec: SumSpec) -> Fraction:
    """Term-by-term sum of a finite SumSpec."""

    if spec.end is None:
        raise NotTerminating("cannot sum an infinite range term by term")
    return sum(
        (term_value(spec.term, k, spec.n, spec.m) for k in range(spec.start, spec.end + 1)),
        Fraction(0),
    )


@dataclass(frozen=True, slots=True)
class Recognized:
    """Result of :func:`recognize`: ``prefactor * series`` summed up to ``truncate_at``."""

    prefactor: Fraction
    series: PFQ
    truncate_at: int | None
    reversed: bool = False
    trace: tuple[str, ...] = field(default_factory=tuple)

    def total(self) -> Fraction:
        return self.prefactor * direct_sum(self.series, self.truncate_at)


@dataclass(slots=True)
class _Ratio:
    upper: list[Fraction] = field(default_factory=list)
    lower: list[Fraction] = field(default_factory=list)
    scalar: Fraction = Fraction(1)

    def add(self, roots: Iterable[Fraction], scalar: Fraction, position: Position) -> None:
        if position is Position.NUMERATOR:
            self.upper.extend(roots)
            self.scalar *= scalar
        else:
            self.lower.extend(roots)
            self.scalar /= scalar

    def gamma(self, argument: Affine, position: Position) -> None:
        """Ratio ``Gamma(beta (k+1) + c) / Gamma(beta k + c)`` for ``argument = beta k + c``."""

        beta, c = argument.k, argument.const
        if beta == 0:
            return
        if beta.denominator != 1:
            raise NotHypergeometric(f"Gamma({argument}) has a non-integer slope in k")
        step = beta.numerator
        if step > 0:
            roots = [(c + i) / step for i in range(step)]
            self.add(roots, Fraction(step) ** step, position)
            return
        width = -step
        roots = [(i - c) / width for i in range(1, width + 1)]
        self.add(roots, Fraction(-width) ** width, position.flipped())

    def cancelled(self) -> tuple[list[Fraction], list[Fraction]]:
        upper = Counter(self.upper)
        lower = Counter(self.lower)
        shared = upper & lower
        return sorted((upper - shared).elements()), sorted((lower - shared).elements())


def _ratio(term: TermSpec, n: int, m: int) -> _Ratio:
    ratio = _Ratio()
    for factor in term.factors:
        if isinstance(factor, Const):
            continue
        if isinstance(factor, Pow):
            if factor.base == 0:
                raise NotHypergeometric("pow(0,k) has no term ratio")
            ratio.scalar *= factor.base
            continue
        if isinstance(factor, Binom):
            top = factor.top.bind(n=n, m=m)
            bottom = factor.bottom.bind(n=n, m=m)
            one = Affine.constant(1)
            ratio.gamma(top + one, factor.position)
            ratio.gamma(bottom + one, factor.position.flipped())
            ratio.gamma(top - bottom + one, factor.position.flipped())
            continue
        lin = factor.lin.bind(n=n, m=m)
        if lin.k == 0:
            continue
        beta, c = lin.k, lin.const
        after, before = (c + beta) / beta, c / beta
        power = factor.exponent
        ratio.add([after] * power, Fraction(1), factor.position)
        ratio.add([before] * power, Fraction(1), factor.position.flipped())
    return ratio


def _series_from_ratio(
    term: TermSpec, n: int, m: int
) -> tuple[list[Fraction], list[Fraction], Fraction]:
    return _unit_convention(_ratio(term, n, m))


def _unit_convention(ratio: _Ratio) -> tuple[list[Fraction], list[Fraction], Fraction]:
    upper, lower = ratio.cancelled()
    if Fraction(1) in lower:
        lower.remove(Fraction(1))
    else:
        upper.append(Fraction(1))
        upper.sort()
    return upper, lower, ratio.scalar


def _recognize_from_zero(term: TermSpec, length: int | None, n: int, m: int) -> Recognized:
    upper, lower, arg = _series_from_ratio(term, n, m)
    first = term_value(term, 0, n, m)
    if first != 0:
        series = PFQ(tuple(upper), tuple(lower), arg)
        return Recognized(first, series, length)
    poles = [b for b in lower if is_nonpositive_integer(b)]
    if len(poles) != 1:
        raise NotHypergeometric(
            "the first term vanishes and the ratio has no single nonpositive lower parameter"
        )
    series = PFQ(tuple(upper), tuple(lower), arg, regularized=True)
    index = series.regular_index + 1
    leading = term_value(term, index, n, m)
    if leading == 0:
        raise NotHypergeometric(f"term {index} vanishes as well")
    return Recognized(leading / series.term(index), series, length)


def recognize(spec: SumSpec) -> Recognized:
    """Read a sum as ``prefactor * pFq`` from its consecutive-term ratio.

    The summation range is moved to start at 0. When the natural series would hit a
    vanishing lower parameter before terminating, a finite sum is read in reverse order.

    Example:
        >>> found = recognize(SumSpec(parse_term_spec("binom(n+k,k)/pow(2,k)"), 0, 3, n=3))
        >>> str(found.series), found.total()
        ('1F0(4;;1/2)', Fraction(8, 1))

    Raises:
        NotHypergeometric: When the term ratio is not a rational function of ``k``.
    """
    term = spec.term.shifted(1, spec.start) if spec.start else spec.term
    length = spec.length
    try:
        found = _recognize_from_zero(term, length, spec.n, spec.m)
    except PoleError:
        if length is None:
            raise
        logger.debug("Natural series is inadmissible; reading the sum in reverse")
        found = replace(
            _recognize_from_zero(term.shifted(-1, length), length, spec.n, spec.m),
            reversed=True,
        )
    logger.debug(
        "Recognized %s as %s * %s", format_term_spec(spec.term), found.prefactor, found.series
    )
    return found


def _cleared(coefficients: Sequence[Rational]) -> list[int]:
    values = [as_fraction(c) for c in coefficients]
    while values and values[-1] == 0:
        values.pop()
    if not values:
        raise NotHypergeometric("the term ratio has a zero polynomial")
    scale = math.lcm(*(v.denominator for v in values))
    ints = [int(v * scale) for v in values]
    common = math.gcd(*ints)
    return [c // common for c in ints]


def _divisors(value: int) -> list[int]:
    value = abs(value)
    small = [d for d in range(1, math.isqrt(value) + 1) if value % d == 0]
    return sorted({*small, *(value // d for d in small)})


def _horner(coefficients: Sequence[Rational], x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(coefficients):
        total = total * x + c
    return total


def rational_roots(coefficients: Sequence[Rational]) -> tuple[list[Fraction], Fraction]:
    """Split ``sum_i c_i k^i`` into ``lead * prod (k - r)`` over the rationals.

    Roots are searched with the rational-root theorem on the integer-cleared polynomial and
    returned with multiplicity, in the order they are found.

    Example:
        >>> rational_roots([2, 5, 2])
        ([Fraction(-2, 1), Fraction(-1, 2)], Fraction(2, 1))

    Raises:
        NotHypergeometric: For the zero polynomial.
        IrrationalRoots: When an irreducible factor of degree two or more remains.
    """
    poly = _cleared(coefficients)
    lead = next(as_fraction(c) for c in reversed(coefficients) if c != 0)
    roots: list[Fraction] = []
    while len(poly) > 1:
        if poly[0] == 0:
            roots.append(Fraction(0))
            poly = poly[1:]
            continue
        root = next(
            (
                Fraction(sign * p, q)
                for q in _divisors(poly[-1])
                for p in _divisors(poly[0])
                for sign in (1, -1)
                if _horner(poly, Fraction(sign * p, q)) == 0
            ),
            None,
        )
        if root is None:
            raise IrrationalRoots(f"no rational root of the degree-{len(poly) - 1} factor {poly}")
        roots.append(root)
        quotient: list[Fraction] = []
        carry = Fraction(0)
        for c in reversed(poly[1:]):
            carry = carry * root + c
            quotient.append(carry)
        poly = _cleared(list(reversed(quotient)))
    return roots, lead


def recognize_ratio(
    numerator: Sequence[Rational], denominator: Sequence[Rational], first: Rational = 1
) -> Recognized:
    """Read ``first * pFq`` off a term ratio ``P(k) / Q(k)`` given by coefficient lists.

    ``numerator[i]`` and ``denominator[i]`` are the coefficients of ``k^i``. Each rational root
    ``r`` of ``P`` becomes an upper parameter ``-r``, each root of ``Q`` a lower one, and the
    leading-coefficient quotient is the argument; the ``(k+1)`` convention of :func:`recognize`
    applies.

    Example:
        >>> str(recognize_ratio([4, 1], [2, 2]).series)
        '1F0(4;;1/2)'

    Raises:
        IrrationalRoots: When either polynomial does not split into rational linear factors.
    """
    ratio = _Ratio()
    top, top_lead = rational_roots(numerator)
    bottom, bottom_lead = rational_roots(denominator)
    ratio.add([-r for r in top], top_lead, Position.NUMERATOR)
    ratio.add([-r for r in bottom], bottom_lead, Position.DENOMINATOR)
    upper, lower, arg = _unit_convention(ratio)
    series = PFQ(tuple(upper), tuple(lower), arg)
    logger.debug("Ratio %s / %s read as %s", list(numerator), list(denominator), series)
    return Recognized(as_fraction(first), series, _truncation(series.upper))
