"""Summation theorems and transformations for concrete pFq series.

Each rule is a plain function that either evaluates a series in closed form or rewrites it
as a :class:`TransformExpr`. The :data:`RULES` registry pairs every function with a matcher
and a sampler of admissible random instances so :func:`check_rule` can compare it against
:func:`hyperbinom.hyper.direct_sum` (or the numeric evaluator when no exact value exists).
"""

from __future__ import annotations

import itertools
import logging
import math
import random
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, replace
from enum import StrEnum
from fractions import Fraction

from mpmath import mp, mpf

from hyperbinom.errors import (
    Divergent,
    DomainError,
    HyperBinomError,
    IrrationalResult,
    MaxTermsExceeded,
    NotApplicable,
    NotTerminating,
    PoleError,
    RootNotFound,
    UnknownRule,
)
from hyperbinom.exact import (
    SQRT_PI,
    GammaValue,
    Rational,
    as_fraction,
    gamma_quotient,
    is_nonpositive_integer,
    pochhammer,
    product,
)
from hyperbinom.hyper import PFQ, classify, direct_sum
from hyperbinom.special import (
    GUARD_DIGITS,
    eval_pfq_numeric,
    li2,
    li2_argument,
    ln_s5,
    lnsq_phi,
    pi2_minus_trigamma_half,
    to_mpf,
    trigamma,
)

__all__ = [
    "RULES",
    "LN_S5",
    "LNSQ_PHI",
    "PI2",
    "Atom",
    "AtomKind",
    "ClosedValue",
    "Rule",
    "RuleCheck",
    "TransformExpr",
    "apply_rule",
    "check_rule",
    "closed_7_4_4_31",
    "closed_7_5_3_6",
    "contiguous_7_2_3_25",
    "contiguous_residual",
    "eval_365",
    "eval_413",
    "get_rule",
    "li2_atom",
    "reduce_unit_7_2_3_17",
    "rule_ids",
    "shrink_counterexample",
    "shift_negative_lower_7_2_3_6",
    "split_two_balanced_7_2_3_20",
    "sum_binomial_1f0",
    "sum_gauss_second_half",
    "sum_gauss_unit",
    "sum_saalschutz",
    "thomae_16_4_11",
    "three_term_16_3_7",
    "three_term_residual",
    "trig_half",
    "transform_whipple_1_6",
]

logger = logging.getLogger("hyper-binom")

ONE = Fraction(1)


class AtomKind(StrEnum):
    PI2 = "pi^2"
    TRIG_HALF = "trigamma"
    LN_S5 = "ln(2(sqrt2-1))"
    LNSQ_PHI = "ln^2((sqrt5-1)/2)"
    LI2 = "Li2"
    PI_POWER = "pi"


@dataclass(frozen=True, order=True, slots=True)
class Atom:
    """A transcendental constant a ClosedValue can carry.

    ``index`` is ``n`` in ``psi'(n + 3/2)`` for TRIG_HALF and the exponent ``e`` of
    ``pi^(e/2)`` for PI_POWER; ``tag`` names the dilogarithm argument for LI2.
    """

    kind: AtomKind
    index: int = 0
    tag: str = ""

    def numeric(self, digits: int) -> mpf:
        with mp.workdps(digits + GUARD_DIGITS):
            match self.kind:
                case AtomKind.PI2:
                    return mp.pi**2
                case AtomKind.TRIG_HALF:
                    return trigamma(Fraction(2 * self.index + 3, 2), digits)
                case AtomKind.LN_S5:
                    return ln_s5(digits)
                case AtomKind.LNSQ_PHI:
                    return lnsq_phi(digits)
                case AtomKind.LI2:
                    return li2(li2_argument(self.tag, digits), digits)
                case AtomKind.PI_POWER:
                    return mp.pi ** (mpf(self.index) / 2)
        raise DomainError(f"unknown atom {self}")

    def __str__(self) -> str:
        match self.kind:
            case AtomKind.TRIG_HALF:
                return f"psi'({self.index}+3/2)"
            case AtomKind.LI2:
                return f"Li2({self.tag})"
            case AtomKind.PI_POWER:
                return f"pi^({self.index}/2)"
        return str(self.kind)


PI2 = Atom(AtomKind.PI2)
LN_S5 = Atom(AtomKind.LN_S5)
LNSQ_PHI = Atom(AtomKind.LNSQ_PHI)


def trig_half(n: int) -> Atom:
    return Atom(AtomKind.TRIG_HALF, index=n)


def li2_atom(tag: str) -> Atom:
    return Atom(AtomKind.LI2, tag=tag)


@dataclass(frozen=True, slots=True)
class ClosedValue:
    """Exact value ``rational * pi^(sqrt_pi_exp/2) + sum coeff * atom``.

    The atom part is a finite vector over :class:`Atom`; ``pi^2`` always lives in the PI2
    coordinate and other leftover powers of ``sqrt(pi)`` in PI_POWER coordinates, so equal
    values compare equal.
    """

    rational: Fraction = Fraction(0)
    sqrt_pi_exp: int = 0
    atoms: tuple[tuple[Atom, Fraction], ...] = ()

    @classmethod
    def build(
        cls, powers: Mapping[int, Fraction], atoms: Mapping[Atom, Fraction] | None = None
    ) -> ClosedValue:
        merged_powers: dict[int, Fraction] = {}
        merged_atoms: dict[Atom, Fraction] = {}
        for exponent, coeff in powers.items():
            merged_powers[exponent] = merged_powers.get(exponent, Fraction(0)) + coeff
        for atom, coeff in (atoms or {}).items():
            if atom.kind is AtomKind.PI_POWER:
                merged_powers[atom.index] = merged_powers.get(atom.index, Fraction(0)) + coeff
            else:
                merged_atoms[atom] = merged_atoms.get(atom, Fraction(0)) + coeff
        if 4 in merged_powers:
            merged_atoms[PI2] = merged_atoms.get(PI2, Fraction(0)) + merged_powers.pop(4)
        live = {e: c for e, c in merged_powers.items() if c != 0}
        main_exp = 0 if 0 in live or not live else min(live)
        rational = live.pop(main_exp, Fraction(0))
        for exponent, coeff in live.items():
            atom = Atom(AtomKind.PI_POWER, index=exponent)
            merged_atoms[atom] = merged_atoms.get(atom, Fraction(0)) + coeff
        vector = tuple(sorted((a, c) for a, c in merged_atoms.items() if c != 0))
        return cls(as_fraction(rational), main_exp if rational != 0 else 0, vector)

    @classmethod
    def of(cls, value: ClosedValue | GammaValue | Rational) -> ClosedValue:
        if isinstance(value, ClosedValue):
            return value
        if isinstance(value, GammaValue):
            return cls.build({value.sqrt_pi_exp: value.coeff})
        return cls.build({0: as_fraction(value)})

    @classmethod
    def atom(cls, atom: Atom, coeff: Rational = 1) -> ClosedValue:
        return cls.build({}, {atom: as_fraction(coeff)})

    @property
    def atom_coeffs(self) -> dict[Atom, Fraction]:
        return dict(self.atoms)

    @property
    def is_rational(self) -> bool:
        return not self.atoms and self.sqrt_pi_exp == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise IrrationalResult(f"{self} is not rational")
        return self.rational

    def to_gamma(self) -> GammaValue:
        if self.atoms:
            raise IrrationalResult(f"{self} is not a single power of sqrt(pi)")
        return GammaValue(self.rational, self.sqrt_pi_exp)

    def _parts(self) -> tuple[dict[int, Fraction], dict[Atom, Fraction]]:
        return {self.sqrt_pi_exp: self.rational}, dict(self.atoms)

    def __add__(self, other: ClosedValue | GammaValue | Rational) -> ClosedValue:
        other = ClosedValue.of(other)
        powers, atoms = self._parts()
        extra_powers, extra_atoms = other._parts()
        for exponent, coeff in extra_powers.items():
            powers[exponent] = powers.get(exponent, Fraction(0)) + coeff
        for atom, coeff in extra_atoms.items():
            atoms[atom] = atoms.get(atom, Fraction(0)) + coeff
        return ClosedValue.build(powers, atoms)

    __radd__ = __add__

    def __neg__(self) -> ClosedValue:
        return self * -1

    def __sub__(self, other: ClosedValue | GammaValue | Rational) -> ClosedValue:
        return self + (-ClosedValue.of(other))

    def __rsub__(self, other: Rational) -> ClosedValue:
        return ClosedValue.of(other) - self

    def __mul__(self, other: ClosedValue | GammaValue | Rational) -> ClosedValue:
        other = ClosedValue.of(other)
        if other.atoms and self.atoms:
            raise DomainError("products of transcendental atoms are not represented")
        if other.atoms:
            return other * self
        if other.sqrt_pi_exp and self.atoms:
            raise DomainError("cannot scale transcendental atoms by a power of pi")
        factor = other.rational
        powers = {self.sqrt_pi_exp + other.sqrt_pi_exp: self.rational * factor}
        return ClosedValue.build(powers, {a: c * factor for a, c in self.atoms})

    __rmul__ = __mul__

    def __truediv__(self, other: GammaValue | Rational) -> ClosedValue:
        value = ClosedValue.of(other).to_gamma()
        if value.coeff == 0:
            raise ZeroDivisionError("division of a ClosedValue by zero")
        return self * GammaValue(1 / value.coeff, -value.sqrt_pi_exp)

    def reduce_trigamma(self) -> ClosedValue:
        """Rewrite ``psi'(n + 3/2)`` as ``pi^2/2 - 4 sum_{j<=n} 1/(2j+1)^2``."""

        powers, atoms = self._parts()
        for atom in [a for a in atoms if a.kind is AtomKind.TRIG_HALF]:
            coeff = atoms.pop(atom)
            atoms[PI2] = atoms.get(PI2, Fraction(0)) + coeff / 2
            powers[0] = powers.get(0, Fraction(0)) - coeff * pi2_minus_trigamma_half(atom.index)
        return ClosedValue.build(powers, atoms)

    def numeric(self, digits: int) -> mpf:
        with mp.workdps(digits + GUARD_DIGITS):
            total = to_mpf(self.rational) * mp.pi ** (mpf(self.sqrt_pi_exp) / 2)
            for atom, coeff in self.atoms:
                total += to_mpf(coeff) * atom.numeric(digits)
            return +total

    def __str__(self) -> str:
        parts = []
        if self.rational != 0 or not self.atoms:
            main = str(self.rational)
            if self.sqrt_pi_exp:
                main += f"*pi^({self.sqrt_pi_exp}/2)"
            parts.append(main)
        parts.extend(f"{coeff}*{atom}" for atom, coeff in self.atoms)
        return " + ".join(parts)


ZERO = ClosedValue()


@dataclass(frozen=True)
class TransformExpr:
    """``sum scale_i * series_i + addend`` with an optional purely numeric summand."""

    nodes: tuple[tuple[ClosedValue, PFQ], ...] = ()
    addend: ClosedValue = ZERO
    numeric_term: Callable[[int], mpf] | None = None
    trace: tuple[str, ...] = ()

    @classmethod
    def single(
        cls, series: PFQ, scale: ClosedValue | GammaValue | Rational = 1
    ) -> TransformExpr:
        return cls(((ClosedValue.of(scale), series),))

    @classmethod
    def constant(
        cls, value: ClosedValue | GammaValue | Rational, rule_id: str = ""
    ) -> TransformExpr:
        return cls((), ClosedValue.of(value), None, (rule_id,) if rule_id else ())

    def scaled(self, factor: ClosedValue | GammaValue | Rational) -> TransformExpr:
        factor = ClosedValue.of(factor)
        numeric = self.numeric_term
        if numeric is not None:
            inner = numeric
            numeric = lambda digits: factor.numeric(digits) * inner(digits)  # noqa: E731
        return TransformExpr(
            tuple((factor * scale, series) for scale, series in self.nodes),
            factor * self.addend,
            numeric,
            self.trace,
        )

    def __add__(self, other: TransformExpr) -> TransformExpr:
        numeric = self.numeric_term
        if other.numeric_term is not None:
            if numeric is None:
                numeric = other.numeric_term
            else:
                left, right = numeric, other.numeric_term
                numeric = lambda digits: left(digits) + right(digits)  # noqa: E731
        return TransformExpr(
            self.nodes + other.nodes,
            self.addend + other.addend,
            numeric,
            self.trace + tuple(step for step in other.trace if step not in self.trace),
        )

    def with_trace(self, *steps: str) -> TransformExpr:
        return TransformExpr(self.nodes, self.addend, self.numeric_term, self.trace + steps)

    def substitute(self, index: int, expr: TransformExpr) -> TransformExpr:
        """Replace node ``index`` by ``expr`` (scaled by that node's coefficient)."""

        scale, _ = self.nodes[index]
        remaining = self.nodes[:index] + self.nodes[index + 1 :]
        rest = TransformExpr(remaining, self.addend, self.numeric_term, self.trace)
        return rest + expr.scaled(scale)

    def evaluate_exact(self) -> ClosedValue:
        """Exact value; every node must terminate.

        Raises:
            NotTerminating: For a non-terminating node.
            IrrationalResult: When a numeric-only summand is present.
        """
        if self.numeric_term is not None:
            raise IrrationalResult("expression carries a numeric-only summand")
        total = self.addend
        for scale, series in self.nodes:
            total = total + scale * direct_sum(series)
        return total

    def evaluate_numeric(self, digits: int) -> mpf:
        with mp.workdps(digits + GUARD_DIGITS):
            total = self.addend.numeric(digits)
            for scale, series in self.nodes:
                total += scale.numeric(digits) * eval_pfq_numeric(series, digits)
            if self.numeric_term is not None:
                total += self.numeric_term(digits)
            return +total

    def __str__(self) -> str:
        parts = [f"({scale})*{series}" for scale, series in self.nodes]
        if self.addend != ZERO or not parts:
            parts.append(f"({self.addend})")
        if self.numeric_term is not None:
            parts.append("<numeric>")
        return " + ".join(parts)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise NotApplicable(message)


def _shape(series: PFQ, p: int, q: int, arg: Rational | None = None) -> None:
    _require(series.p == p and series.q == q, f"expected a {p}F{q}, got {series}")
    _require(not series.regularized, "rule does not act on regularized series")
    if arg is not None:
        _require(series.arg == arg, f"expected argument {arg}, got {series.arg}")


def _split_terminating(series: PFQ) -> tuple[int, list[Fraction]]:
    """Return ``n`` and the remaining upper parameters for the terminating ``-n``."""

    truncation = classify(series).truncation
    _require(truncation is not None, f"{series} does not terminate")
    rest = list(series.upper)
    rest.remove(Fraction(-truncation))
    return truncation, rest


def _without(values: Sequence[Fraction], *drop: Fraction) -> list[Fraction]:
    remaining = list(values)
    for value in drop:
        if value not in remaining:
            raise NotApplicable(f"parameter {value} not present in {list(values)}")
        remaining.remove(value)
    return remaining


# Saalschutz and Gauss type summations


def sum_saalschutz(series: PFQ) -> Fraction:
    """Saalschutz's theorem for a terminating one-balanced 3F2 at unit argument.

    ``3F2(-n, a, b; c, 1+a+b-c-n; 1) = (c-a)_n (c-b)_n / ((c)_n (c-a-b)_n)``.

    Raises:
        NotApplicable: Unless the series is Saalschutzian.
        PoleError: When both labelings of ``c`` give a vanishing denominator.
    """
    _shape(series, 3, 2, 1)
    _require(classify(series).saalschutzian, f"{series} is not Saalschutzian")
    n, (a, b) = _split_terminating(series)
    for c in dict.fromkeys(series.lower):
        denominator = pochhammer(c, n) * pochhammer(c - a - b, n)
        if denominator != 0:
            return pochhammer(c - a, n) * pochhammer(c - b, n) / denominator
    raise PoleError(f"Saalschutz denominator vanishes for {series}")


def sum_gauss_unit(series: PFQ) -> GammaValue:
    """Gauss's sum ``2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))``.

    Terminating series use Chu-Vandermonde, ``(c-b)_n / (c)_n``.

    Raises:
        Divergent: When the series does not terminate and ``c - a - b <= 0``.
    """
    _shape(series, 2, 1, 1)
    (c,) = series.lower
    info = classify(series)
    if info.terminating:
        n, (b,) = _split_terminating(series)
        denominator = pochhammer(c, n)
        if denominator == 0:
            raise PoleError(f"(c)_n vanishes for {series}")
        return GammaValue.rational(pochhammer(c - b, n) / denominator)
    if info.balance <= 0:
        raise Divergent(f"{series} diverges: c - a - b = {info.balance}")
    a, b = series.upper
    return gamma_quotient([c, c - a - b], [c - a, c - b])


def sum_gauss_second_half(series: PFQ) -> GammaValue:
    """Gauss's second theorem ``2F1(a, b; (a+b+1)/2; 1/2)``.

    ``= sqrt(pi) Gamma((a+b+1)/2) / (Gamma((a+1)/2) Gamma((b+1)/2))``.

    Raises:
        PoleError: When ``(a+b+1)/2`` is a nonpositive integer.
    """
    _shape(series, 2, 1, Fraction(1, 2))
    a, b = series.upper
    (c,) = series.lower
    _require(c == (a + b + 1) / 2, f"lower parameter of {series} is not (a+b+1)/2")
    if is_nonpositive_integer(c):
        raise PoleError(f"Gamma({c}) is infinite; the truncated sum of {series} is not its limit")
    return SQRT_PI * gamma_quotient([c], [(a + 1) / 2, (b + 1) / 2])


def _exact_root(value: int, degree: int) -> int | None:
    if value < 0:
        return None
    low, high = 0, 1 << (value.bit_length() // degree + 1)
    while low < high:
        middle = (low + high) // 2
        if middle**degree < value:
            low = middle + 1
        else:
            high = middle
    return low if low**degree == value else None


def sum_binomial_1f0(series: PFQ) -> Fraction:
    """Binomial theorem ``1F0(a;;z) = (1-z)^(-a)``.

    Raises:
        Divergent: When ``|z| >= 1`` and the series does not terminate.
        IrrationalResult: When the power is not rational.
    """
    _shape(series, 1, 0)
    (a,) = series.upper
    z = series.arg
    if z == 0:
        return Fraction(1)
    if not is_nonpositive_integer(a) and abs(z) >= 1:
        raise Divergent(f"{series} diverges at |z| >= 1")
    base = 1 - z
    if a.denominator == 1:
        return base ** (-a.numerator)
    numerator = _exact_root(base.numerator, a.denominator)
    denominator = _exact_root(base.denominator, a.denominator)
    if numerator is None or denominator is None:
        raise IrrationalResult(f"(1 - {z})^(-{a}) is irrational")
    return Fraction(numerator, denominator) ** (-a.numerator)


# Table entries


def _match_p7536(series: PFQ) -> tuple[Fraction, Fraction, Fraction]:
    _require(series.arg == 1 and not series.regularized, "expected a unit-argument series")
    lower = sorted(series.lower)
    if series.p == 4 and series.q == 3:
        for index, value in enumerate(series.upper):
            if value != 1:
                continue
            rest = list(series.upper[:index] + series.upper[index + 1 :])
            if sorted(3 - x for x in rest) == lower:
                return rest[0], rest[1], rest[2]
    if series.p == 3 and series.q == 2:
        for index, value in enumerate(series.upper):
            if value != 2:
                continue
            rest = list(series.upper[:index] + series.upper[index + 1 :])
            if sorted(3 - x for x in rest) == lower:
                return rest[0], rest[1], Fraction(2)
    raise NotApplicable(f"{series} is not 4F3(1,a,b,c;3-a,3-b,3-c;1)")


def closed_7_5_3_6(series: PFQ) -> ClosedValue:
    """``4F3(1, a, b, c; 3-a, 3-b, 3-c; 1)`` in closed form (also its 3F2 collapse at c = 2).

    The value is ``G / (2(a-1)(b-1)(c-1)) - (2-a)(2-b)(2-c) / (2(a-1)(b-1)(c-1))`` with
    ``G = Gamma[3-a, 3-b, 3-c, 4-a-b-c; 3-a-b, 3-a-c, 3-b-c]``.
    """
    a, b, c = _match_p7536(series)
    info = classify(series)
    if not info.terminating and info.balance <= 0:
        raise Divergent(f"{series} diverges")
    scale = 2 * (a - 1) * (b - 1) * (c - 1)
    if scale == 0:
        raise PoleError(f"a parameter equals 1 in {series}")
    gammas = gamma_quotient(
        [3 - a, 3 - b, 3 - c, 4 - a - b - c], [3 - a - b, 3 - a - c, 3 - b - c]
    )
    return ClosedValue.of(gammas / scale) - (2 - a) * (2 - b) * (2 - c) / scale


def _match_p74431(series: PFQ) -> tuple[Fraction, Fraction, int]:
    _shape(series, 3, 2, 1)
    for index, value in enumerate(series.upper):
        if value != 1:
            continue
        a, b = series.upper[:index] + series.upper[index + 1 :]
        for first, second in itertools.permutations(series.lower):
            m = -first - a
            if m.denominator == 1 and m >= -1 and -second - b == m:
                return a, b, m.numerator
    raise NotApplicable(f"{series} is not 3F2(a,b,1;-m-a,-m-b;1)")


def closed_7_4_4_31(series: PFQ) -> ClosedValue:
    """``3F2(a, b, 1; -m-a, -m-b; 1)`` for an integer ``m >= -1``.

    Half the finite sum ``sum_{k<=m+1} (a)_k (b)_k / ((-a-m)_k (-b-m)_k)`` plus
    ``2^(2m-1) sqrt(pi) / ((1+m+2a)_m (1+m+2b)_m)`` times
    ``Gamma[1-a, 1-b, -a-b-m-1/2; -a-b-m, 1/2-a-m, 1/2-b-m]``.
    """
    a, b, m = _match_p74431(series)
    head = Fraction(0)
    for k in range(m + 2):
        denominator = pochhammer(-a - m, k) * pochhammer(-b - m, k)
        if denominator == 0:
            raise PoleError(f"finite part of {series} has a vanishing denominator")
        head += pochhammer(a, k) * pochhammer(b, k) / denominator
    shifts = pochhammer(1 + m + 2 * a, m) * pochhammer(1 + m + 2 * b, m)
    if shifts == 0:
        raise PoleError(f"(1+m+2a)_m (1+m+2b)_m vanishes for {series}")
    gammas = gamma_quotient(
        [1 - a, 1 - b, -a - b - m - Fraction(1, 2)],
        [-a - b - m, Fraction(1, 2) - a - m, Fraction(1, 2) - b - m],
    )
    tail = GammaValue.rational(Fraction(2) ** (2 * m - 1) / shifts) * SQRT_PI * gammas
    return ClosedValue.of(head / 2) + tail


def transform_whipple_1_6(series: PFQ) -> TransformExpr:
    """Whipple's transformation of a terminating balanced-type 4F3 at unit argument.

    With ``s = b1 + b2 - a1 - a2 - a3`` and ``b3 = 1 - s - n``::

        4F3(-n, a1, a2, a3; b1, b2, b3; 1)
          = (a1+s)_n (a2+s)_n (a3)_n / ((b1)_n (b2)_n (s)_n)
            * 4F3(b1-a3, b2-a3, s, -n; a1+s, a2+s, 1-a3-n; 1)
    """
    _shape(series, 4, 3, 1)
    n, rest = _split_terminating(series)
    failure: Exception = NotApplicable(f"no lower parameter of {series} equals 1-s-n")
    for b3_index in range(3):
        b1, b2 = [b for i, b in enumerate(series.lower) if i != b3_index]
        b3 = series.lower[b3_index]
        for a3_index in (2, 1, 0):
            a1, a2 = [a for i, a in enumerate(rest) if i != a3_index]
            a3 = rest[a3_index]
            s = b1 + b2 - a1 - a2 - a3
            if b3 != 1 - s - n:
                continue
            denominator = pochhammer(b1, n) * pochhammer(b2, n) * pochhammer(s, n)
            if denominator == 0:
                failure = PoleError(f"(b1)_n (b2)_n (s)_n vanishes for {series}")
                continue
            try:
                target = PFQ(
                    (b1 - a3, b2 - a3, s, Fraction(-n)), (a1 + s, a2 + s, 1 - a3 - n), 1
                )
            except PoleError as exc:
                failure = exc
                continue
            scale = pochhammer(a1 + s, n) * pochhammer(a2 + s, n) * pochhammer(a3, n)
            return TransformExpr.single(target, scale / denominator).with_trace("whipple-1-6")
    raise failure


def _find_pair(series: PFQ) -> tuple[Fraction, Fraction]:
    for rho, sigma in itertools.combinations(series.upper, 2):
        if rho == sigma:
            continue
        try:
            _without(series.lower, rho + 1, sigma + 1)
        except NotApplicable:
            continue
        return rho, sigma
    raise NotApplicable(f"{series} has no upper pair rho, sigma with rho+1, sigma+1 below")


def split_two_balanced_7_2_3_20(
    series: PFQ, *, rho: Rational | None = None, sigma: Rational | None = None
) -> TransformExpr:
    """Partial-fraction split of a series with upper ``rho, sigma`` and lower ``rho+1, sigma+1``.

    ``F = sigma/(sigma-rho) F[rho; rho+1] - rho/(sigma-rho) F[sigma; sigma+1]`` where each
    series on the right keeps only one of the two pairs.
    """
    _require(not series.regularized, "rule does not act on regularized series")
    if rho is None or sigma is None:
        rho, sigma = _find_pair(series)
    rho, sigma = as_fraction(rho), as_fraction(sigma)
    _require(rho != sigma, "rho and sigma must differ")
    _without(series.upper, rho, sigma)
    _without(series.lower, rho + 1, sigma + 1)
    keep_rho = series.with_parameters(
        _without(series.upper, sigma), _without(series.lower, sigma + 1)
    )
    keep_sigma = series.with_parameters(
        _without(series.upper, rho), _without(series.lower, rho + 1)
    )
    gap = sigma - rho
    return (
        TransformExpr.single(keep_rho, sigma / gap)
        + TransformExpr.single(keep_sigma, -rho / gap)
    ).with_trace("split-p72320")


def shift_negative_lower_7_2_3_6(series: PFQ) -> tuple[ClosedValue, PFQ]:
    """Remove the vanishing leading terms of a regularized series.

    With lower ``-M`` the result is ``z^(M+1) prod (a)_{M+1} / ((M+1)! prod (b)_{M+1})`` times
    the plain series with every parameter moved by ``M+1`` and an extra lower ``M+2``.
    """
    _require(series.regularized, "expected a regularized series")
    gap = series.regular_index
    lower = _without(series.lower, Fraction(-gap))
    step = gap + 1
    prefactor = (
        series.arg**step
        * product([pochhammer(a, step) for a in series.upper])
        / (math.factorial(step) * product([pochhammer(b, step) for b in lower]))
    )
    shifted = PFQ(
        tuple(a + step for a in series.upper),
        tuple(b + step for b in lower) + (Fraction(gap + 2),),
        series.arg,
    )
    return ClosedValue.of(prefactor), shifted


def reduce_unit_7_2_3_17(series: PFQ) -> TransformExpr:
    """Drop an upper 1 against a lower 2 at unit argument.

    ``F(a, 1; b, 2; 1) = prod(b-1)/prod(a-1) * [F(a-1; b-1; 1) - 1]``.

    Raises:
        PoleError: When another upper parameter equals 1.
    """
    _require(not series.regularized and series.arg == 1, "expected a unit-argument series")
    upper = _without(series.upper, ONE)
    lower = _without(series.lower, Fraction(2))
    if ONE in upper:
        raise PoleError(f"a second upper parameter equals 1 in {series}")
    scale = product([b - 1 for b in lower]) / product([a - 1 for a in upper])
    reduced = PFQ(tuple(a - 1 for a in upper), tuple(b - 1 for b in lower), 1)
    expr = TransformExpr(((ClosedValue.of(scale), reduced),), ClosedValue.of(-scale))
    return expr.with_trace("reduce-p72317")


def _contiguous_members(
    series: PFQ, rho: Rational | None, sigma: Rational | None
) -> tuple[Fraction, Fraction, list[Fraction]]:
    _require(not series.regularized, "rule does not act on regularized series")
    _require(series.p >= 2, f"{series} has fewer than two upper parameters")
    rho = series.upper[0] if rho is None else as_fraction(rho)
    sigma = series.upper[1] - 1 if sigma is None else as_fraction(sigma)
    rest = _without(series.upper, rho, sigma + 1)
    return rho, sigma, rest


def contiguous_7_2_3_25(
    series: PFQ, *, rho: Rational | None = None, sigma: Rational | None = None
) -> TransformExpr:
    """Contiguous relation ``sigma F(sigma+1) - rho F(rho+1) = (sigma - rho) F``.

    The series holds ``rho`` and ``sigma + 1`` among its upper parameters and is rewritten as
    ``(rho/sigma) F(rho+1, sigma) + ((sigma-rho)/sigma) F(rho, sigma)``. By default ``rho`` is
    the first upper parameter and ``sigma + 1`` the second.
    """
    rho, sigma, rest = _contiguous_members(series, rho, sigma)
    if sigma == 0:
        raise PoleError("sigma = 0 in the contiguous relation")
    raised = series.with_parameters([rho + 1, sigma, *rest], series.lower)
    plain = series.with_parameters([rho, sigma, *rest], series.lower)
    return (
        TransformExpr.single(raised, rho / sigma)
        + TransformExpr.single(plain, (sigma - rho) / sigma)
    ).with_trace("contig-p72325")


def contiguous_residual(series: PFQ, *, rho: Rational, sigma: Rational) -> Fraction:
    """``sigma F(sigma+1) - rho F(rho+1) - (sigma-rho) F`` for ``F`` holding ``rho, sigma``."""

    rho, sigma = as_fraction(rho), as_fraction(sigma)
    rest = _without(series.upper, rho, sigma)
    lower = series.lower
    values = [
        direct_sum(series.with_parameters(upper, lower))
        for upper in ([rho, sigma + 1, *rest], [rho + 1, sigma, *rest], [rho, sigma, *rest])
    ]
    return sigma * values[0] - rho * values[1] - (sigma - rho) * values[2]


def three_term_16_3_7(
    series: PFQ, a1_index: int = 0
) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients of ``cplus F(a1+1) + c0 F(a1) + cminus F(a1-1) = 0`` for a 3F2 at 1.

    ``a1`` is ``series.upper[a1_index]``; the other uppers are ``a2, a3`` in order.
    """
    _shape(series, 3, 2, 1)
    a1 = series.upper[a1_index]
    a2, a3 = [a for i, a in enumerate(series.upper) if i != a1_index]
    b1, b2 = series.lower
    cplus = a1 * (b1 + b2 - a1 - a2 - a3 - 1)
    c0 = (2 * a1 - b1) * (2 * a1 - b2) + a1 - a1**2 - (a1 - a2) * (a1 - a3)
    cminus = -(a1 - b1) * (a1 - b2)
    return cplus, c0, cminus


def _replace_upper(series: PFQ, index: int, value: Fraction) -> PFQ:
    upper = list(series.upper)
    upper[index] = value
    return series.with_parameters(upper, series.lower)


def three_term_residual(series: PFQ, a1_index: int = 0) -> Fraction:
    cplus, c0, cminus = three_term_16_3_7(series, a1_index)
    a1 = series.upper[a1_index]
    return (
        cplus * direct_sum(_replace_upper(series, a1_index, a1 + 1))
        + c0 * direct_sum(series)
        + cminus * direct_sum(_replace_upper(series, a1_index, a1 - 1))
    )


def _three_term_rewrite(series: PFQ, a1_index: int = 0) -> TransformExpr:
    """Express ``F(a1+1)`` through ``F(a1)`` and ``F(a1-1)``; ``a1 + 1`` is ``upper[a1_index]``."""

    lowered = _replace_upper(series, a1_index, series.upper[a1_index] - 1)
    cplus, c0, cminus = three_term_16_3_7(lowered, a1_index)
    if cplus == 0:
        raise PoleError(f"leading three-term coefficient vanishes for {series}")
    a1 = lowered.upper[a1_index]
    return (
        TransformExpr.single(lowered, -c0 / cplus)
        + TransformExpr.single(_replace_upper(lowered, a1_index, a1 - 1), -cminus / cplus)
    ).with_trace("dlmf-16-3-7")


def _thomae_candidate(
    series: PFQ, a_index: int, d_index: int
) -> tuple[GammaValue, PFQ]:
    a = series.upper[a_index]
    b, c = [x for i, x in enumerate(series.upper) if i != a_index]
    d = series.lower[d_index]
    e = series.lower[1 - d_index]
    # a truncated sum past a pole of (d)_k or (e)_k is not the analytic value
    for lower in (d, e, d + e - b - c):
        if is_nonpositive_integer(lower):
            raise PoleError(f"lower parameter {lower} of the 16.4.11 pair for {series}")
    prefactor = gamma_quotient([e, d + e - a - b - c], [e - a, d + e - b - c])
    target = PFQ((a, d - b, d - c), (d, d + e - b - c), 1)
    return prefactor, target


def thomae_16_4_11(
    series: PFQ, *, a_index: int | None = None, d_index: int | None = None
) -> tuple[GammaValue, PFQ]:
    """``3F2(a,b,c;d,e;1) = Gamma[e, s; e-a, d+e-b-c] * 3F2(a, d-b, d-c; d, d+e-b-c; 1)``.

    Without explicit labels the search prefers ``a = 1`` and a terminating target.

    Raises:
        PoleError: When a lower parameter of the source or of every target is a nonpositive
            integer, or the gamma prefactor is infinite.
        Divergent: When the source diverges.
    """
    _shape(series, 3, 2, 1)
    info = classify(series)
    if not info.terminating and info.balance <= 0:
        raise Divergent(f"{series} diverges")
    if a_index is not None and d_index is not None:
        return _thomae_candidate(series, a_index, d_index)
    a_order = sorted(range(3), key=lambda i: (series.upper[i] != 1, i))
    d_order = [d_index] if d_index is not None else [0, 1]
    candidates = [
        (i, j) for i in ([a_index] if a_index is not None else a_order) for j in d_order
    ]
    fallback: tuple[GammaValue, PFQ] | None = None
    failure: Exception = NotApplicable(f"no admissible labeling for {series}")
    for i, j in candidates:
        try:
            prefactor, target = _thomae_candidate(series, i, j)
        except (PoleError, DomainError) as exc:
            failure = exc
            continue
        target_info = classify(target)
        if target_info.terminating:
            return prefactor, target
        if fallback is None and target_info.balance > 0:
            fallback = prefactor, target
    if fallback is not None:
        return fallback
    raise failure


# Closed forms with transcendental values


def eval_365(z: Rational, digits: int) -> mpf:
    """``3F2(1, 1, 3/2; 2, 2; z) = (4/z) ln(2(1 - sqrt(1-z))/z)`` for ``z <= 1``, ``z != 0``."""

    z = as_fraction(z)
    if z == 0 or z > 1:
        raise DomainError(f"closed form needs z <= 1 and z != 0, got {z}")
    with mp.workdps(digits + GUARD_DIGITS):
        x = to_mpf(z)
        return 4 / x * mp.log(2 * (1 - mp.sqrt(1 - x)) / x)


def eval_413(z: Rational, digits: int) -> mpf:
    """``3F2(1/2, 1, 1; 3/2, 3/2; -z)`` for ``z > 0`` through the dilogarithm.

    The value is ``(1-x^2)/(2x) [Li2(x) - Li2(-x)]`` where ``x`` in ``(0, 1)`` solves
    ``z (1-x^2)^2 = 4x^2``.

    Raises:
        DomainError: For ``z <= 0``.
        RootNotFound: If the root leaves ``(0, 1)``.
    """
    z = as_fraction(z)
    if z <= 0:
        raise DomainError(f"closed form needs z > 0, got {z}")
    with mp.workdps(digits + GUARD_DIGITS):
        w = to_mpf(z)
        root = mp.sqrt(w)
        x = (mp.sqrt(1 + w) - 1) / root
        if not 0 < x < 1 or abs(w * (1 - x**2) ** 2 - 4 * x**2) > mpf(10) ** (-digits):
            raise RootNotFound(f"no root of z(1-x^2)^2 = 4x^2 in (0, 1) for z={z}")
        return (1 - x**2) / (2 * x) * (li2(x, digits) - li2(-x, digits))


def _match_365(series: PFQ) -> Fraction:
    _shape(series, 3, 2)
    _require(
        sorted(series.upper) == [1, 1, Fraction(3, 2)] and sorted(series.lower) == [2, 2],
        f"{series} is not 3F2(1,1,3/2;2,2;z)",
    )
    return series.arg


def _match_413(series: PFQ) -> Fraction:
    _shape(series, 3, 2)
    _require(
        sorted(series.upper) == [Fraction(1, 2), 1, 1]
        and sorted(series.lower) == [Fraction(3, 2), Fraction(3, 2)],
        f"{series} is not 3F2(1/2,1,1;3/2,3/2;z)",
    )
    return -series.arg


# Registry


@dataclass(frozen=True)
class Rule:
    id: str
    citation: str
    apply: Callable[..., TransformExpr]
    sample: Callable[[random.Random], PFQ]
    numeric: bool = False

    def applies(self, series: PFQ) -> bool:
        try:
            self.apply(series)
        except NotApplicable:
            return False
        except (PoleError, Divergent, DomainError, IrrationalResult):
            return True
        return True


def _small(rng: random.Random, span: int = 12) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice((1, 2, 3, 4)))


def _half_odd(rng: random.Random) -> Fraction:
    return Fraction(2 * rng.randint(-5, 4) + 1, 2)


def _half_step(rng: random.Random) -> Fraction:
    """A half-integer in ``(0, 6]`` or a negative half-odd value."""

    value = Fraction(rng.randint(-7, 12), 2)
    return value if value > 0 or value.denominator == 2 else Fraction(1, 2)


def _sample_saalschutz(rng: random.Random) -> PFQ:
    n = rng.randint(0, 6)
    a, b, c = _small(rng), _small(rng), _small(rng)
    return PFQ((Fraction(-n), a, b), (c, 1 + a + b - c - n), 1)


def _sample_gauss_unit(rng: random.Random) -> PFQ:
    if rng.random() < 0.5:
        return PFQ((Fraction(-rng.randint(0, 6)), _small(rng)), (_small(rng),), 1)
    # half-integer parameters keep the gamma quotient exact
    a, b = (_half_step(rng) for _ in range(2))
    c = a + b + Fraction(rng.randint(1, 8), 2)
    return PFQ((a, b), (c,), 1)


def _sample_gauss_second_half(rng: random.Random) -> PFQ:
    if rng.random() < 0.5:
        a = Fraction(-rng.randint(0, 6))
        b = Fraction(rng.randint(-6, 6))
    else:
        a = Fraction(rng.randint(1, 8))
        b = Fraction(rng.randint(1, 8))
    c = (a + b + 1) / 2
    if is_nonpositive_integer(c):
        raise PoleError(f"lower parameter {c} is a pole")
    return PFQ((a, b), (c,), Fraction(1, 2))


def _sample_1f0(rng: random.Random) -> PFQ:
    if rng.random() < 0.5:
        return PFQ((Fraction(-rng.randint(0, 6)),), (), _small(rng, 6))
    z = Fraction(rng.randint(-9, 9), 10)
    return PFQ((Fraction(rng.randint(-6, 6)),), (), z)


def _sample_p7536(rng: random.Random) -> PFQ:
    a = Fraction(-rng.randint(0, 5))
    b = _small(rng)
    c = Fraction(rng.choice([x for x in range(-4, 7) if x != 1]))
    return PFQ((ONE, a, b, c), (3 - a, 3 - b, 3 - c), 1)


def _sample_p74431(rng: random.Random) -> PFQ:
    n = rng.randint(1, 5)
    a = Fraction(-n)
    b = _half_odd(rng)
    m = rng.randint(-1, n - 1)
    return PFQ((a, b, ONE), (-m - a, -m - b), 1)


def _sample_whipple(rng: random.Random) -> PFQ:
    n = rng.randint(0, 5)
    a1, a2, a3, b1, b2 = (_small(rng) for _ in range(5))
    s = b1 + b2 - a1 - a2 - a3
    return PFQ((Fraction(-n), a1, a2, a3), (b1, b2, 1 - s - n), 1)


def _sample_split(rng: random.Random) -> PFQ:
    n = rng.randint(0, 5)
    rho, sigma = _small(rng), _small(rng)
    return PFQ(
        (Fraction(-n), rho, sigma, _small(rng)), (rho + 1, sigma + 1, _small(rng)), _small(rng, 4)
    )


def _sample_shift(rng: random.Random) -> PFQ:
    gap = rng.randint(0, 3)
    n = rng.randint(gap + 1, 6)
    return PFQ(
        (Fraction(-n), _small(rng)), (Fraction(-gap), _small(rng)), _small(rng, 4), regularized=True
    )


def _sample_reduce(rng: random.Random) -> PFQ:
    return PFQ((Fraction(-rng.randint(0, 5)), _small(rng), ONE), (_small(rng), Fraction(2)), 1)


def _sample_contiguous(rng: random.Random) -> PFQ:
    rho, sigma = _small(rng), _small(rng)
    return PFQ(
        (rho, sigma + 1, Fraction(-rng.randint(0, 5))), (_small(rng), _small(rng)), _small(rng, 4)
    )


def _sample_three_term(rng: random.Random) -> PFQ:
    return PFQ(
        (_small(rng), _small(rng), Fraction(-rng.randint(0, 5))), (_small(rng), _small(rng)), 1
    )


def _sample_thomae(rng: random.Random) -> PFQ:
    lower = (_small(rng), _small(rng))
    if any(is_nonpositive_integer(b) for b in lower):
        raise PoleError(f"lower parameters {lower} include a pole")
    return PFQ((Fraction(-rng.randint(0, 5)), _small(rng), _small(rng)), lower, 1)


def _sample_365(rng: random.Random) -> PFQ:
    z = Fraction(rng.choice([x for x in range(-10, 11) if x]), 10)
    return PFQ((ONE, ONE, Fraction(3, 2)), (Fraction(2), Fraction(2)), z)


def _sample_413(rng: random.Random) -> PFQ:
    z = Fraction(rng.randint(1, 10), 10)
    return PFQ((Fraction(1, 2), ONE, ONE), (Fraction(3, 2), Fraction(3, 2)), -z)


def _as_expr(
    evaluate: Callable[[PFQ], ClosedValue | GammaValue | Rational], rule_id: str
) -> Callable[..., TransformExpr]:
    def apply(series: PFQ, **_options: object) -> TransformExpr:
        return TransformExpr.constant(evaluate(series), rule_id)

    return apply


def _apply_shift(series: PFQ, **_options: object) -> TransformExpr:
    prefactor, shifted = shift_negative_lower_7_2_3_6(series)
    return TransformExpr.single(shifted, prefactor).with_trace("shift-p7236")


def _apply_thomae(series: PFQ, **options: int) -> TransformExpr:
    prefactor, target = thomae_16_4_11(series, **options)
    return TransformExpr.single(target, prefactor).with_trace("dlmf-16-4-11")


def _apply_365(series: PFQ, **_options: object) -> TransformExpr:
    z = _match_365(series)
    return TransformExpr(numeric_term=lambda digits: eval_365(z, digits), trace=("eval-p741365",))


def _apply_413(series: PFQ, **_options: object) -> TransformExpr:
    z = _match_413(series)
    return TransformExpr(numeric_term=lambda digits: eval_413(z, digits), trace=("eval-p74313",))


RULES: dict[str, Rule] = {
    rule.id: rule
    for rule in (
        Rule("saalschutz", "Saalschutz summation", _as_expr(sum_saalschutz, "saalschutz"),
             _sample_saalschutz),
        Rule("gauss-unit", "Gauss summation at z = 1 (Chu-Vandermonde)",
             _as_expr(sum_gauss_unit, "gauss-unit"), _sample_gauss_unit),
        Rule("gauss-second-half", "Gauss second summation, Prudnikov et al. 7.3.7(5)",
             _as_expr(sum_gauss_second_half, "gauss-second-half"), _sample_gauss_second_half),
        Rule("binom-1f0", "Binomial theorem", _as_expr(sum_binomial_1f0, "binom-1f0"),
             _sample_1f0),
        Rule("p7536", "Prudnikov et al. 7.5.3(6)", _as_expr(closed_7_5_3_6, "p7536"),
             _sample_p7536),
        Rule("p74431", "Prudnikov et al. 7.4.4(31)", _as_expr(closed_7_4_4_31, "p74431"),
             _sample_p74431),
        Rule("whipple-1-6", "Whipple transformation of a terminating 4F3",
             lambda series, **_: transform_whipple_1_6(series), _sample_whipple),
        Rule("split-p72320", "Prudnikov et al. 7.2.3(20)", split_two_balanced_7_2_3_20,
             _sample_split),
        Rule("shift-p7236", "Prudnikov et al. 7.2.3(6)", _apply_shift, _sample_shift),
        Rule("reduce-p72317", "Prudnikov et al. 7.2.3(17)",
             lambda series, **_: reduce_unit_7_2_3_17(series), _sample_reduce),
        Rule("contig-p72325", "Prudnikov et al. 7.2.3(25)", contiguous_7_2_3_25,
             _sample_contiguous),
        Rule("dlmf-16-3-7", "DLMF 16.3.7", _three_term_rewrite, _sample_three_term),
        Rule("dlmf-16-4-11", "DLMF 16.4.11", _apply_thomae, _sample_thomae),
        Rule("eval-p741365", "Prudnikov et al. 7.4.1(365)", _apply_365, _sample_365,
             numeric=True),
        Rule("eval-p74313", "Prudnikov et al. 7.4.3(13)", _apply_413, _sample_413,
             numeric=True),
    )
}


def get_rule(rule_id: str) -> Rule:
    try:
        return RULES[rule_id]
    except KeyError:
        raise UnknownRule(rule_id) from None


@dataclass(frozen=True)
class RuleCheck:
    """Outcome of one randomized oracle trial."""

    rule_id: str
    trial: int
    series: PFQ | None
    lhs: Fraction | mpf | None
    rhs: Fraction | mpf | None
    passed: bool
    abs_diff: mpf | None = None
    exact: bool = True
    error: str | None = None
    shrunk: PFQ | None = None

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        return "pass" if self.passed else "fail"


_RESAMPLE = (
    PoleError,
    NotApplicable,
    DomainError,
    Divergent,
    MaxTermsExceeded,
    ZeroDivisionError,
)


def _compare(
    rule: Rule, trial: int, series: PFQ, expr: TransformExpr, digits: int
) -> RuleCheck:
    if not rule.numeric and classify(series).terminating:
        try:
            rhs_value = expr.evaluate_exact()
        except (NotTerminating, IrrationalResult):
            rhs_value = None
        if rhs_value is not None and rhs_value.is_rational:
            lhs = direct_sum(series)
            rhs = rhs_value.to_fraction()
            diff = to_mpf(abs(lhs - rhs))
            return RuleCheck(rule.id, trial, series, lhs, rhs, lhs == rhs, diff)
    tolerance = mpf(10) ** (-(digits - 10))
    lhs = eval_pfq_numeric(series, digits)
    rhs = expr.evaluate_numeric(digits)
    diff = abs(lhs - rhs)
    return RuleCheck(rule.id, trial, series, lhs, rhs, diff <= tolerance, diff, exact=False)


def _trial(rule: Rule, rng: random.Random, trial: int, digits: int, attempts: int) -> RuleCheck:
    for _ in range(attempts):
        try:
            series = rule.sample(rng)
            return _compare(rule, trial, series, rule.apply(series), digits)
        except _RESAMPLE:
            continue
    raise NotApplicable(f"no admissible instance for {rule.id} after {attempts} draws")


def _size(value: Fraction) -> int:
    return abs(value.numerator) + value.denominator


def _simpler(value: Fraction) -> list[Fraction]:
    options = {Fraction(0), Fraction(1), Fraction(-1), Fraction(math.trunc(value))}
    if abs(value) >= 1:
        options.add(value - (1 if value > 0 else -1))
    return sorted((v for v in options if _size(v) < _size(value)), key=lambda v: (_size(v), v))


def _neighbours(series: PFQ) -> Iterator[tuple[list[Fraction], list[Fraction], Fraction]]:
    upper, lower, arg = list(series.upper), list(series.lower), series.arg
    for i, value in enumerate(upper):
        for option in _simpler(value):
            yield upper[:i] + [option] + upper[i + 1 :], lower, arg
    for j, value in enumerate(lower):
        for option in _simpler(value):
            yield upper, lower[:j] + [option] + lower[j + 1 :], arg
    for option in _simpler(arg):
        yield upper, lower, option


def _still_fails(rule: Rule, series: PFQ, digits: int) -> bool:
    try:
        return not _compare(rule, 0, series, rule.apply(series), digits).passed
    except (HyperBinomError, ZeroDivisionError):
        return False


def shrink_counterexample(rule: Rule, series: PFQ, digits: int = 50, steps: int = 200) -> PFQ:
    """Greedily simplify a failing instance while the rule keeps failing on it.

    Each step replaces one parameter or the argument by a smaller rational (``0``, ``+-1``, its
    integer part or one step towards zero) and keeps the first replacement that still fails.
    The result is a local minimum: no single replacement of that kind fails any more.
    """
    current = series
    for _ in range(steps):
        for upper, lower, arg in _neighbours(current):
            try:
                candidate = current.with_parameters(upper, lower, arg=arg)
            except HyperBinomError:
                continue
            if _still_fails(rule, candidate, digits):
                current = candidate
                break
        else:
            break
    return current


def check_rule(
    rule_id: str, trials: int = 200, seed: int = 0, digits: int = 50, attempts: int = 200
) -> list[RuleCheck]:
    """Compare a rule against direct summation on random admissible instances.

    Instances that hit a pole, leave the rule's domain or diverge are redrawn. Exact comparison
    is used when the source terminates and the rule value is rational; otherwise both sides are
    evaluated at ``digits`` and must agree within ``10^-(digits-10)``.

    A failing instance is passed through :func:`shrink_counterexample`; the result is stored on
    ``RuleCheck.shrunk``.

    Args:
        rule_id: Registered rule id.
        trials: Number of admissible instances to check.
        seed: Seed of the private ``random.Random`` instance.
        digits: Working precision of the numeric comparison.
        attempts: Redraws allowed per trial before it is recorded as an error.

    Returns:
        One :class:`RuleCheck` per trial, in trial order.

    Raises:
        UnknownRule: For an unregistered id.
    """
    rule = get_rule(rule_id)
    rng = random.Random(seed)
    checks: list[RuleCheck] = []
    for trial in range(trials):
        try:
            check = _trial(rule, rng, trial, digits, attempts)
        except HyperBinomError as exc:
            logger.error("Rule %s trial %d raised %s", rule_id, trial, exc)
            check = RuleCheck(rule_id, trial, None, None, None, False, error=str(exc))
        if check.status == "fail":
            logger.warning(
                "Rule %s failed on %s: %s != %s", rule_id, check.series, check.lhs, check.rhs
            )
            check = replace(check, shrunk=shrink_counterexample(rule, check.series, digits))
            logger.warning("Rule %s minimal counterexample: %s", rule_id, check.shrunk)
        checks.append(check)
    logger.debug("Rule %s: %d/%d trials passed", rule_id, sum(c.passed for c in checks), trials)
    return checks


def apply_rule(rule_id: str, series: PFQ, **options: object) -> TransformExpr:
    """Apply a registered rule by id."""

    return get_rule(rule_id).apply(series, **options)


def rule_ids() -> Iterable[str]:
    return RULES.keys()
