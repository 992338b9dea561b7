"""Identities S0-S9, the lemmas of their proofs, and grid verification.

Every identity pairs a summand written in the term language with a closed-form right-hand
side. Exact entries compare reduced Fractions; ``S5`` and ``S9`` carry transcendental
constants and are compared numerically. Lemma entries replay the rule chains that prove the
identities and record the rule ids they pass through, so a failing step is named in the
report instead of hidden inside a final mismatch.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from functools import cached_property, partial

from mpmath import mp, mpf
from tqdm import tqdm

from hyperbinom.errors import (
    HyperBinomError,
    NotApplicable,
    OutOfDomain,
    UnknownIdentity,
    UnknownLemma,
)
from hyperbinom.exact import SQRT_PI, binomial, gamma_quotient, pochhammer
from hyperbinom.hyper import (
    PFQ,
    SumSpec,
    direct_sum,
    naive_sum,
    recognize,
    reverse,
    split_tail,
)
from hyperbinom.rules import (
    LN_S5,
    LNSQ_PHI,
    PI2,
    ClosedValue,
    TransformExpr,
    apply_rule,
    closed_7_4_4_31,
    closed_7_5_3_6,
    contiguous_7_2_3_25,
    eval_413,
    li2_atom,
    reduce_unit_7_2_3_17,
    shift_negative_lower_7_2_3_6,
    split_two_balanced_7_2_3_20,
    thomae_16_4_11,
    three_term_residual,
    transform_whipple_1_6,
    trig_half,
)
from hyperbinom.special import (
    GUARD_DIGITS,
    accelerate_alternating,
    eval_pfq_numeric,
    li2,
    li2_argument,
    li2_five_term,
    series_terms,
    to_mpf,
)
from hyperbinom.termlang import TermSpec, parse_term_spec

__all__ = [
    "IDENTITIES",
    "LEMMAS",
    "TABLE_ENTRY",
    "GridConfig",
    "IdentityEntry",
    "LemmaEntry",
    "Mode",
    "Status",
    "VerificationReport",
    "catalan",
    "get_identity",
    "get_lemma",
    "lah",
    "verify_all",
    "verify_identity",
    "verify_lemma",
]

logger = logging.getLogger("hyper-binom")

Params = dict[str, int | str]
Value = Fraction | mpf

HALF = Fraction(1, 2)
S5_BRACKET_AT = 10_000


class Mode(StrEnum):
    EXACT = "exact"
    NUMERIC = "numeric"


class Status(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


def lah(n: int, k: int) -> Fraction:
    """Unsigned Lah number ``C(n-1, k-1) n!/k!``; ``L(0, 0) = 1``."""

    if n == 0 and k == 0:
        return Fraction(1)
    if k <= 0 or k > n:
        return Fraction(0)
    return binomial(n - 1, k - 1) * Fraction(math.factorial(n), math.factorial(k))


def catalan(n: int) -> Fraction:
    """``Gamma(2n+1) / (Gamma(n+2) Gamma(n+1))``."""

    return gamma_quotient([2 * n + 1], [n + 2, n + 1]).to_fraction()


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one identity or lemma at one parameter point."""

    id: str
    params: Params
    mode: Mode
    lhs: Value | None
    rhs: Value | None
    status: Status
    abs_diff: mpf | None = None
    tolerance: mpf | None = None
    trace: tuple[str, ...] = ()
    message: str | None = None
    digits: int | None = None
    bracket: tuple[mpf, mpf] | None = None
    informational: bool = False

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_dict(self) -> dict[str, object]:
        record: dict[str, object] = {
            "id": self.id,
            "params": dict(self.params),
            "mode": str(self.mode),
            "lhs": _render(self.lhs, self.digits),
            "rhs": _render(self.rhs, self.digits),
            "status": str(self.status),
        }
        if self.abs_diff is not None:
            record["abs_diff"] = mp.nstr(self.abs_diff, 5)
        if self.tolerance is not None:
            record["tolerance"] = mp.nstr(self.tolerance, 3)
        if self.bracket is not None:
            record["bracket"] = [_render(value, self.digits) for value in self.bracket]
        if self.trace:
            record["trace"] = list(self.trace)
        if self.message:
            record["message"] = self.message
        if self.informational:
            record["informational"] = True
        return record


def _render(value: Value | None, digits: int | None) -> str | None:
    if value is None:
        return None
    if isinstance(value, Fraction):
        return str(value)
    return mp.nstr(value, digits or 20)


@dataclass(frozen=True)
class _Sides:
    """Both sides of a check plus named intermediate values that must agree pairwise."""

    lhs: Value
    rhs: Value
    trace: tuple[str, ...] = ()
    checkpoints: tuple[tuple[str, Value, Value], ...] = ()
    bracket: tuple[mpf, mpf] | None = None
    failed_steps: tuple[str, ...] = ()


def _tolerance_exponent(digits: int, tolerance_digits: int | None) -> int:
    exponent = digits - 10
    return exponent if tolerance_digits is None else min(tolerance_digits, exponent)


def _judge(
    check_id: str,
    params: Params,
    sides: _Sides,
    digits: int,
    *,
    tolerance_digits: int | None = None,
    informational: bool = False,
) -> VerificationReport:
    values = [sides.lhs, sides.rhs]
    values.extend(v for _, a, b in sides.checkpoints for v in (a, b))
    failed = list(sides.failed_steps)
    if all(isinstance(value, Fraction) for value in values):
        failed.extend(name for name, a, b in sides.checkpoints if a != b)
        passed = sides.lhs == sides.rhs and not failed
        return VerificationReport(
            check_id,
            params,
            Mode.EXACT,
            sides.lhs,
            sides.rhs,
            Status.PASS if passed else Status.FAIL,
            trace=sides.trace,
            message=f"step {', '.join(failed)} disagrees" if failed else None,
            digits=digits,
            informational=informational,
        )

    with mp.workdps(digits + GUARD_DIGITS):
        tolerance = mpf(10) ** -_tolerance_exponent(digits, tolerance_digits)

        def close(a: Value, b: Value) -> bool:
            return abs(to_mpf(a) - to_mpf(b)) <= tolerance * max(1, abs(to_mpf(b)))

        lhs, rhs = to_mpf(sides.lhs), to_mpf(sides.rhs)
        diff = abs(lhs - rhs)
        failed.extend(name for name, a, b in sides.checkpoints if not close(a, b))
        if sides.bracket is not None and not min(sides.bracket) <= rhs <= max(sides.bracket):
            failed.append("bracket")
        passed = close(lhs, rhs) and not failed
    return VerificationReport(
        check_id,
        params,
        Mode.NUMERIC,
        lhs,
        rhs,
        Status.PASS if passed else Status.FAIL,
        abs_diff=diff,
        tolerance=tolerance,
        trace=sides.trace,
        message=f"step {', '.join(failed)} disagrees" if failed else None,
        digits=digits,
        bracket=sides.bracket,
        informational=informational,
    )


def _checked_params(
    check_id: str, names: Sequence[str], params: Mapping[str, int | str]
) -> Params:
    missing = [name for name in names if name not in params]
    extra = [name for name in params if name not in names]
    if missing or extra:
        expected = ", ".join(names) or "no parameters"
        raise OutOfDomain(f"{check_id} takes {expected}; got {', '.join(params) or 'none'}")
    return {name: params[name] for name in names}


# Identity registry


@dataclass(frozen=True)
class IdentityEntry:
    """One identity: summand text, summation bounds and closed-form right-hand side.

    ``column`` names the parameter that the term language reads as ``m``. ``scale`` multiplies
    the summed summand; ``lhs`` replaces the summand sum for exact verification.
    """

    id: str
    title: str
    summand: str
    parameters: tuple[str, ...]
    bounds: Callable[[Params], tuple[int, int | None]]
    rhs: Callable[[Params], ClosedValue]
    domain: Callable[[Params], bool]
    defaults: Mapping[str, Sequence[int]] = field(default_factory=dict)
    mode: Mode = Mode.EXACT
    column: str = "m"
    scale: Callable[[Params], Fraction] | None = None
    lhs: Callable[[Params], Fraction] | None = None
    numeric_lhs: Callable[[Params, int], tuple[mpf, tuple[mpf, mpf] | None]] | None = None
    outside_domain: Callable[[Params], bool] | None = None
    digits: int = 50
    tolerance_digits: int | None = None

    @cached_property
    def term(self) -> TermSpec:
        return parse_term_spec(self.summand)

    def sum_spec(self, params: Params) -> SumSpec:
        start, end = self.bounds(params)
        return SumSpec(
            self.term, start, end, n=int(params.get("n", 0)), m=int(params.get(self.column, 0))
        )

    def summed(self, params: Params) -> Fraction:
        """``scale * sum`` of the summand over its finite range."""

        total = naive_sum(self.sum_spec(params))
        return total if self.scale is None else self.scale(params) * total

    def exact_lhs(self, params: Params) -> Fraction:
        return self.lhs(params) if self.lhs is not None else self.summed(params)


def _n(params: Params) -> int:
    return int(params["n"])


def _s0_rhs(params: Params) -> ClosedValue:
    n = _n(params)
    return ClosedValue.of(16**n * gamma_quotient([n + 1, n + 1], [2 * n + 2]))


def _trigamma_weight(n: int) -> Fraction:
    """``Gamma(2n+2) / (2^(4n+3) Gamma(n+1) Gamma(n+2))``."""

    return gamma_quotient([2 * n + 2], [n + 1, n + 2]).to_fraction() / 2 ** (4 * n + 3)


def _pi2_minus_trigamma(n: int) -> ClosedValue:
    """``pi^2/2 - psi'(n + 3/2)`` with the trigamma kept symbolic."""

    return ClosedValue.atom(PI2, HALF) - ClosedValue.atom(trig_half(n))


def _s1_rhs(params: Params) -> ClosedValue:
    n = _n(params)
    return _trigamma_weight(n) * _pi2_minus_trigamma(n)


def _s3_rhs(params: Params) -> ClosedValue:
    n = _n(params)
    return Fraction(3, 2 * n + 3) * _s1_rhs(params)


def _s4_rhs(params: Params) -> ClosedValue:
    n, m = _n(params), int(params["m"])
    value = 4 ** (n - m) * Fraction(2 * n + 1, 2 * n - 2 * m + 1) * binomial(2 * n - m, m)
    return ClosedValue.of(value)


def _lah_sum(params: Params) -> Fraction:
    n, k = _n(params), int(params["k"])
    return sum(
        (lah(j, k) * pochhammer(k + j + 2, n - j) for j in range(n + 1)), Fraction(0)
    )


def _s6_scale(params: Params) -> Fraction:
    n, k = _n(params), int(params["k"])
    return Fraction(math.factorial(n + k + 1), math.factorial(k) * math.factorial(k + 1))


def _s5_series() -> tuple[Fraction, PFQ]:
    found = recognize(IDENTITIES["S5"].sum_spec({}))
    return found.prefactor, found.series


def _s5_lhs(params: Params, digits: int) -> tuple[mpf, tuple[mpf, mpf]]:
    prefactor, series = _s5_series()
    with mp.workdps(digits + GUARD_DIGITS):
        result = accelerate_alternating(
            series_terms(series, 0), digits, bracket_at=S5_BRACKET_AT
        )
        scale = to_mpf(prefactor)
        low, high = sorted((scale * result.bracket[0], scale * result.bracket[1]))
        return scale * result.value, (low, high)


def _s9_lhs(params: Params, digits: int) -> tuple[mpf, None]:
    found = recognize(IDENTITIES["S9"].sum_spec({}))
    with mp.workdps(digits + GUARD_DIGITS):
        return to_mpf(found.prefactor) * eval_pfq_numeric(found.series, digits), None


def _whole_range(params: Params) -> tuple[int, int | None]:
    return 0, _n(params)


IDENTITIES: dict[str, IdentityEntry] = {
    entry.id: entry
    for entry in (
        IdentityEntry(
            "S0",
            "central binomial convolution over odd denominators",
            "binom(2k,k)*binom(2(n-k),n-k)/(1+2k)",
            ("n",),
            _whole_range,
            _s0_rhs,
            lambda p: _n(p) >= 0,
            {"n": range(0, 301)},
        ),
        IdentityEntry(
            "S1",
            "reciprocal central binomials with a squared weight",
            "binom(2k,k)/(pow(16,k)*(n-k+1)^2*binom(2(n-k+1),n-k+1))",
            ("n",),
            _whole_range,
            _s1_rhs,
            lambda p: _n(p) >= 0,
            {"n": range(0, 301)},
        ),
        IdentityEntry(
            "S2",
            "reciprocal central binomials with an odd weight",
            "binom(2k,k)/(pow(16,k)*(2k+1)*(n-k+1)*binom(2(n-k+1),n-k+1))",
            ("n",),
            _whole_range,
            _s1_rhs,
            lambda p: _n(p) >= 0,
            {"n": range(0, 301)},
        ),
        IdentityEntry(
            "S3",
            "reciprocal central binomials with a mixed weight",
            "binom(2k,k)/(pow(16,k)*(2k+1)*(n-k+1)^2*binom(2(n-k+1),n-k+1))",
            ("n",),
            _whole_range,
            _s3_rhs,
            lambda p: _n(p) >= 0,
            {"n": range(0, 301)},
        ),
        IdentityEntry(
            "S4",
            "even-index binomials against a second binomial",
            "binom(2n+1,2k)*binom(k,m)",
            ("n", "m"),
            _whole_range,
            _s4_rhs,
            lambda p: 2 <= int(p["m"]) <= _n(p),
            {"n": range(0, 201), "m": range(0, 201)},
            outside_domain=lambda p: int(p["m"]) in (0, 1) and int(p["m"]) <= _n(p),
        ),
        IdentityEntry(
            "S5",
            "alternating central binomials over k 4^k",
            "pow(-1,k)*binom(2k,k)/(k*pow(4,k))",
            (),
            lambda p: (1, None),
            lambda p: ClosedValue.atom(LN_S5, 2),
            lambda p: True,
            mode=Mode.NUMERIC,
            numeric_lhs=_s5_lhs,
            digits=128,
            tolerance_digits=25,
        ),
        IdentityEntry(
            "S6",
            "Lah numbers against rising factorials (summand form for k >= 1)",
            "binom(k-1,m-1)/binom(m+k+1,k)",
            ("n", "k"),
            lambda p: (int(p["k"]), _n(p)),
            lambda p: ClosedValue.of(lah(_n(p) + 1, int(p["k"]) + 1)),
            lambda p: 0 <= int(p["k"]) <= _n(p),
            {"n": range(0, 81), "k": range(0, 81)},
            column="k",
            scale=_s6_scale,
            lhs=_lah_sum,
        ),
        IdentityEntry(
            "S7",
            "squared binomials weighted by k^2/n^2",
            "binom(2n,n-k)*binom(2n,n-k)*k^2/n^2",
            ("n",),
            lambda p: (1, _n(p)),
            lambda p: ClosedValue.of(catalan(2 * _n(p) - 1)),
            lambda p: _n(p) >= 1,
            {"n": range(1, 151)},
        ),
        IdentityEntry(
            "S8",
            "binomials over powers of two",
            "binom(n+k,k)/pow(2,k)",
            ("n",),
            _whole_range,
            lambda p: ClosedValue.of(2 ** _n(p)),
            lambda p: _n(p) >= 0,
            {"n": range(0, 301)},
        ),
        IdentityEntry(
            "S9",
            "alternating reciprocal central binomials over odd squares",
            "pow(-1,k)/((2k+1)^2*binom(2k,k))",
            (),
            lambda p: (0, None),
            lambda p: ClosedValue.atom(PI2, Fraction(1, 6)) - ClosedValue.atom(LNSQ_PHI, 3),
            lambda p: True,
            mode=Mode.NUMERIC,
            numeric_lhs=_s9_lhs,
            digits=60,
            tolerance_digits=30,
        ),
    )
}


def get_identity(identity_id: str) -> IdentityEntry:
    try:
        return IDENTITIES[identity_id]
    except KeyError:
        raise UnknownIdentity(identity_id) from None


# Series shared by the lemmas


def _f32(n: int) -> PFQ:
    """The terminating 4F3 the reciprocal central-binomial sums reduce to."""

    return PFQ((-n, 1, 1, 1), (2, Fraction(3, 2), HALF - n), 1)


def _f34(n: int) -> PFQ:
    return PFQ((-n, 1, 1, -HALF - n), (Fraction(3, 2), HALF - n, HALF - n), 1)


def _f71(n: int, first: int) -> PFQ:
    return PFQ((first, 1 - n, 1 - n), (n + 2, n + 2), 1)


def _f81(n: int) -> PFQ:
    return PFQ((2, 2, 1 - n, 1 - n), (1, n + 2, n + 2), 1)


def _f87(n: int) -> PFQ:
    return PFQ((-n, -n, 1), (n + 1, n + 1), 1)


TABLE_ENTRY: tuple[PFQ, ClosedValue] = (
    PFQ((HALF, 1, 1), (Fraction(3, 2), Fraction(3, 2)), Fraction(-1, 4)),
    ClosedValue.atom(PI2, Fraction(1, 6)) - ClosedValue.atom(LNSQ_PHI, 3),
)


def _close(series: PFQ, rule_id: str, normalize: bool = True) -> Fraction:
    if normalize:
        series = series.normalized()
    return apply_rule(rule_id, series).evaluate_exact().to_fraction()


def _resolve(expr: TransformExpr, known: Callable[[PFQ], Fraction]) -> Fraction:
    total = expr.addend.to_fraction()
    for scale, series in expr.nodes:
        total += scale.to_fraction() * known(series)
    return total


def _lookup(table: Mapping[PFQ, Fraction]) -> Callable[[PFQ], Fraction]:
    normalized = {series.normalized(): value for series, value in table.items()}

    def known(series: PFQ) -> Fraction:
        try:
            return normalized[series.normalized()]
        except KeyError:
            raise NotApplicable(f"no closed value on record for {series}") from None

    return known


def _whipple_value(series: PFQ) -> Fraction:
    return transform_whipple_1_6(series).evaluate_exact().to_fraction()


def _v32(n: int) -> ClosedValue:
    return Fraction(2 * n + 1, 4 * (n + 1)) * _pi2_minus_trigamma(n)


def _f1_value(n: int) -> Fraction:
    """``3F2(1, 1-n, 1-n; n+2, n+2; 1)`` by reversal, a split and two closed sums."""

    source = _f71(n, 1)
    if n == 1:
        # the series is the single term 1
        return direct_sum(source)
    prefactor, reversed_series = reverse(source)
    pair = Fraction(1 - n)
    upper = list(reversed_series.upper)
    lower = list(reversed_series.lower)
    upper.remove(pair)
    lower.remove(pair)
    full, tail_prefactor, tail = split_tail(PFQ(upper, lower, 1), n - 1)
    return prefactor * (_close(full, "gauss-unit") - tail_prefactor * _close(tail, "p74431"))


# Lemma evaluators


def _lemma_3_2(params: Params, digits: int) -> _Sides:
    n = _n(params)
    source = direct_sum(_f32(n))
    return _Sides(
        source,
        _v32(n).reduce_trigamma().to_fraction(),
        ("whipple-1-6", "trigamma-reduction"),
        (("whipple-1-6", _whipple_value(_f32(n)), source),),
    )


def _lemma_3_4(params: Params, digits: int) -> _Sides:
    n = _n(params)
    source = direct_sum(_f34(n))
    closed = (2 * n + 1) * _v32(n)
    return _Sides(
        source,
        closed.reduce_trigamma().to_fraction(),
        ("aux-induction", "whipple-1-6", "trigamma-reduction"),
        (("aux-induction", (2 * n + 1) * _whipple_value(_f32(n)), source),),
    )


def _lemma_aux(params: Params, digits: int) -> _Sides:
    n = _n(params)
    return _Sides(direct_sum(_f34(n)), (2 * n + 1) * direct_sum(_f32(n)), ("aux-induction",))


def _lemma_8_2(params: Params, digits: int) -> _Sides:
    n = _n(params)
    expr = contiguous_7_2_3_25(_f81(n), rho=2, sigma=1)
    displayed = 2 * direct_sum(_f71(n, 3)) - direct_sum(_f71(n, 2))
    rhs = expr.evaluate_exact().to_fraction()
    return _Sides(direct_sum(_f81(n)), rhs, expr.trace, (("display", displayed, rhs),))


def _lemma_8_3(params: Params, digits: int) -> _Sides:
    n = _n(params)
    collapsed = PFQ((1, 1 - n, 1 - n, 2), (n + 2, n + 2, 1), 1)
    rhs = Fraction((n + 1) ** 2, 4 * n)
    lhs = direct_sum(_f71(n, 2))
    return _Sides(
        lhs,
        rhs,
        ("p7536",),
        (
            ("p7536", closed_7_5_3_6(collapsed).to_fraction(), rhs),
            ("collapse", direct_sum(collapsed), lhs),
        ),
    )


def _lemma_8_4(params: Params, digits: int) -> _Sides:
    n = _n(params)
    rhs = Fraction(n**2, 2 * (4 * n - 1)) * direct_sum(_f71(n, 1)) - Fraction(
        (n + 1) ** 2 * (1 - 6 * n), 8 * n * (4 * n - 1)
    )
    return _Sides(
        direct_sum(_f71(n, 3)),
        rhs,
        ("dlmf-16-3-7", "p7536"),
        (("dlmf-16-3-7", three_term_residual(_f71(n, 2)), Fraction(0)),),
    )


def _lemma_8_5(params: Params, digits: int) -> _Sides:
    n = _n(params)
    rhs = Fraction(n**2, 4 * n - 1) * direct_sum(_f71(n, 1)) + Fraction(
        (n + 1) ** 2, 2 * (4 * n - 1)
    )
    return _Sides(direct_sum(_f81(n)), rhs, ("contig-p72325", "p7536", "dlmf-16-3-7"))


def _lemma_8_6(params: Params, digits: int) -> _Sides:
    n = _n(params)
    lhs = direct_sum(_f71(n, 1))
    head = gamma_quotient([n, n, n + 2, n + 2, 4 * n + 1], [2 * n + 1] * 4).to_fraction()
    weight = gamma_quotient([n, n, n + 2, n + 2], [n + 1] * 4).to_fraction()
    rhs = head - weight * direct_sum(_f87(n))
    trace = ("reverse", "split", "gauss-unit", "p74431")
    if n == 1:
        return _Sides(lhs, rhs, trace)
    return _Sides(lhs, rhs, trace, (("reverse-split", _f1_value(n), lhs),))


def _lemma_8_7(params: Params, digits: int) -> _Sides:
    n = _n(params)
    rhs = HALF + HALF * gamma_quotient([n + 1] * 4 + [4 * n + 1], [2 * n + 1] * 4).to_fraction()
    binomial_form = HALF + HALF * binomial(4 * n, 2 * n) / binomial(2 * n, n) ** 2
    return _Sides(
        direct_sum(_f87(n)),
        rhs,
        ("p74431",),
        (
            ("p74431", closed_7_4_4_31(_f87(n)).to_fraction(), rhs),
            ("binomial-form", binomial_form, rhs),
        ),
    )


def _dilog_difference() -> ClosedValue:
    return ClosedValue.atom(li2_atom("sqrt5-2")) - ClosedValue.atom(li2_atom("2-sqrt5"))


def _lemma_10_3(params: Params, digits: int) -> _Sides:
    series, _ = TABLE_ENTRY
    lhs = eval_pfq_numeric(series, digits)
    return _Sides(
        lhs,
        (2 * _dilog_difference()).numeric(digits),
        ("eval-p74313",),
        (("eval-p74313", eval_413(Fraction(1, 4), digits), lhs),),
    )


def _lemma_10_4(params: Params, digits: int) -> _Sides:
    closed = ClosedValue.atom(PI2, Fraction(1, 12)) - ClosedValue.atom(LNSQ_PHI, Fraction(3, 2))
    lhs = _dilog_difference().numeric(digits)
    special = (
        ClosedValue.atom(li2_atom("(1-sqrt5)/2"))
        - ClosedValue.atom(li2_atom("(sqrt5-1)/2"))
        - ClosedValue.atom(li2_atom("-1"))
        + ClosedValue.atom(PI2, Fraction(1, 6))
        - ClosedValue.atom(LNSQ_PHI, 3)
    )
    residual = li2_five_term(
        li2_argument("sqrt5-2", digits), li2_argument("2-sqrt5", digits), digits
    )
    return _Sides(
        lhs,
        closed.numeric(digits),
        ("five-term", "li2-values"),
        (("five-term", residual, mpf(0)), ("li2-values", special.numeric(digits), lhs)),
    )


def _lemma_table_entry(params: Params, digits: int) -> _Sides:
    series, closed = TABLE_ENTRY
    return _Sides(
        eval_pfq_numeric(series, digits),
        closed.numeric(digits),
        ("eval-p74313", "five-term", "li2-values"),
    )


LI2_VALUES: dict[str, ClosedValue] = {
    "(1-sqrt5)/2": ClosedValue.atom(PI2, Fraction(-1, 15)) + ClosedValue.atom(LNSQ_PHI, HALF),
    "(sqrt5-1)/2": ClosedValue.atom(PI2, Fraction(1, 10)) - ClosedValue.atom(LNSQ_PHI),
    "-1": ClosedValue.atom(PI2, Fraction(-1, 12)),
}


def _lemma_li2_values(params: Params, digits: int) -> _Sides:
    tag = str(params["x"])
    if tag not in LI2_VALUES:
        raise OutOfDomain(f"no tabulated dilogarithm value at {tag!r}")
    return _Sides(
        li2(li2_argument(tag, digits), digits), LI2_VALUES[tag].numeric(digits), ("li2-values",)
    )


def _identity_sum(identity_id: str, params: Params) -> tuple[Fraction, Fraction, PFQ]:
    """Oracle sum, recognized prefactor and series of an exact identity."""

    entry = IDENTITIES[identity_id]
    found = recognize(entry.sum_spec(params))
    return entry.exact_lhs(params), found.prefactor, found.series


def _chain_s0(params: Params, digits: int) -> _Sides:
    lhs, prefactor, series = _identity_sum("S0", params)
    return _Sides(lhs, prefactor * _close(series, "saalschutz"), ("recognize", "saalschutz"))


def _chain_s1(params: Params, digits: int) -> _Sides:
    n = _n(params)
    lhs, prefactor, series = _identity_sum("S1", params)
    rhs = prefactor * _whipple_value(series)
    closed = prefactor * _v32(n).reduce_trigamma().to_fraction()
    return _Sides(
        lhs,
        rhs,
        ("recognize", "reverse", "whipple-1-6", "trigamma-reduction"),
        (
            ("recognize", direct_sum(series), direct_sum(_f32(n))),
            ("trigamma-reduction", closed, rhs),
        ),
    )


def _chain_s2(params: Params, digits: int) -> _Sides:
    n = _n(params)
    lhs, prefactor, series = _identity_sum("S2", params)
    rhs = prefactor * (2 * n + 1) * _whipple_value(_f32(n))
    return _Sides(
        lhs,
        rhs,
        ("recognize", "reverse", "aux-induction", "whipple-1-6"),
        (("recognize", direct_sum(series), direct_sum(_f34(n))),),
    )


def _chain_s3(params: Params, digits: int) -> _Sides:
    n = _n(params)
    lhs, prefactor, series = _identity_sum("S3", params)
    expr = split_two_balanced_7_2_3_20(series, rho=1, sigma=-HALF - n)
    known = _lookup(
        {_f32(n): _whipple_value(_f32(n)), _f34(n): (2 * n + 1) * _whipple_value(_f32(n))}
    )
    rhs = prefactor * _resolve(expr, known)
    closed = Fraction(3 * (2 * n + 1) ** 2, 4 * (2 * n + 3) * (n + 1)) * _pi2_minus_trigamma(n)
    return _Sides(
        lhs,
        rhs,
        ("recognize", "reverse", "split-p72320", "aux-induction", "whipple-1-6"),
        (("trigamma-reduction", prefactor * closed.reduce_trigamma().to_fraction(), rhs),),
    )


def _chain_s4(params: Params, digits: int) -> _Sides:
    entry = IDENTITIES["S4"]
    found = recognize(entry.sum_spec(params))
    step, shifted = shift_negative_lower_7_2_3_6(found.series)
    rhs = found.prefactor * step.to_fraction() * _close(shifted, "gauss-unit")
    return _Sides(entry.exact_lhs(params), rhs, ("recognize", "shift-p7236", "gauss-unit"))


def _chain_s5(params: Params, digits: int) -> _Sides:
    lhs, bracket = _s5_lhs(params, digits)
    prefactor, series = _s5_series()
    with mp.workdps(digits + GUARD_DIGITS):
        rhs = to_mpf(prefactor) * apply_rule("eval-p741365", series).evaluate_numeric(digits)
    closed = ClosedValue.atom(LN_S5, 2).numeric(digits)
    return _Sides(
        lhs, rhs, ("recognize", "eval-p741365"), (("closed-form", rhs, closed),), bracket
    )


def _chain_s6(params: Params, digits: int) -> _Sides:
    n, k = _n(params), int(params["k"])
    entry = IDENTITIES["S6"]
    weight = pochhammer(k + 2, n) / pochhammer(k + 2, k)
    full, tail_prefactor, tail = split_tail(PFQ((k, k + 1), (2 * k + 2,), 1), n - k)
    thomae_prefactor, target = thomae_16_4_11(tail)
    reduced = reduce_unit_7_2_3_17(target)
    tail_value = thomae_prefactor.to_fraction() * _resolve(
        reduced, lambda series: _close(series, "gauss-unit")
    )
    rhs = weight * (_close(full, "gauss-unit") - tail_prefactor * tail_value)
    found = recognize(entry.sum_spec(params))
    return _Sides(
        entry.exact_lhs(params),
        rhs,
        ("split", "gauss-unit", "dlmf-16-4-11", "reduce-p72317", "gauss-unit"),
        (
            ("recognize", entry.scale(params) * found.total(), entry.exact_lhs(params)),
            ("lah", rhs, lah(n + 1, k + 1)),
        ),
    )


def _chain_s7(params: Params, digits: int) -> _Sides:
    n = _n(params)
    lhs, prefactor, series = _identity_sum("S7", params)
    second = Fraction((n + 1) ** 2, 4 * n)
    third = _resolve(
        apply_rule("dlmf-16-3-7", _f71(n, 3), a1_index=0),
        _lookup({_f71(n, 2): second, _f71(n, 1): _f1_value(n)}),
    )
    expr = contiguous_7_2_3_25(series, rho=2, sigma=1)
    rhs = prefactor * _resolve(expr, _lookup({_f71(n, 3): third, _f71(n, 2): second}))
    return _Sides(
        lhs,
        rhs,
        (
            "recognize",
            "contig-p72325",
            "p7536",
            "dlmf-16-3-7",
            "reverse",
            "split",
            "gauss-unit",
            "p74431",
        ),
        (("recognize", direct_sum(series), direct_sum(_f81(n))),),
    )


def _chain_s8(params: Params, digits: int) -> _Sides:
    n = _n(params)
    entry = IDENTITIES["S8"]
    found = recognize(entry.sum_spec(params))
    full, tail_prefactor, tail = split_tail(found.series, n)
    # at n = 0 the tail 2F1(2, 1; 2; 1/2) must keep its cancelling pair to stay a 2F1
    rhs = found.prefactor * (
        _close(full, "binom-1f0")
        - tail_prefactor * _close(tail, "gauss-second-half", normalize=False)
    )
    displayed = 2 ** (n + 1) - (
        gamma_quotient([2 * n + 2], [n + 1, n + Fraction(3, 2)]) * SQRT_PI
    ).to_fraction() / 2 ** (n + 1)
    return _Sides(
        entry.exact_lhs(params),
        rhs,
        ("recognize", "split", "binom-1f0", "gauss-second-half"),
        (("display", displayed, rhs),),
    )


@dataclass(frozen=True)
class LemmaEntry:
    """A lemma or proof chain checked at concrete parameters."""

    id: str
    title: str
    parameters: tuple[str, ...]
    evaluate: Callable[[Params, int], _Sides]
    domain: Callable[[Params], bool] = lambda params: True
    defaults: Mapping[str, Sequence[int | str]] = field(default_factory=dict)
    digits: int = 50


def _from(lowest: int) -> Callable[[Params], bool]:
    return lambda params: _n(params) >= lowest


_LEMMA_N = range(0, 101)

LEMMAS: dict[str, LemmaEntry] = {
    entry.id: entry
    for entry in (
        LemmaEntry("3.2", "4F3 through Whipple and the trigamma", ("n",), _lemma_3_2,
                   _from(0), {"n": _LEMMA_N}),
        LemmaEntry("3.4", "second 4F3 through the auxiliary induction", ("n",), _lemma_3_4,
                   _from(0), {"n": _LEMMA_N}),
        LemmaEntry("aux-induction", "ratio of the two reciprocal-binomial 4F3s", ("n",),
                   _lemma_aux, _from(0), {"n": _LEMMA_N}),
        LemmaEntry("8.2", "contiguous split of the squared-binomial 4F3", ("n",), _lemma_8_2,
                   _from(1), {"n": range(1, 101)}),
        LemmaEntry("8.3", "3F2 with a = 2 in closed form", ("n",), _lemma_8_3, _from(1),
                   {"n": range(1, 101)}),
        LemmaEntry("8.4", "three-term step from a = 1 to a = 3", ("n",), _lemma_8_4,
                   _from(1), {"n": range(1, 101)}),
        LemmaEntry("8.5", "squared-binomial 4F3 through the a = 1 series", ("n",), _lemma_8_5,
                   _from(1), {"n": range(1, 101)}),
        LemmaEntry("8.6", "a = 1 series by reversal and splitting", ("n",), _lemma_8_6,
                   _from(1), {"n": range(1, 101)}),
        LemmaEntry("8.7", "closed form of 3F2(-n, -n, 1; n+1, n+1; 1)", ("n",), _lemma_8_7,
                   _from(0), {"n": _LEMMA_N}),
        LemmaEntry("10.3", "table 3F2 at -1/4 through dilogarithms", (), _lemma_10_3,
                   digits=60),
        LemmaEntry("10.4", "dilogarithm difference at sqrt5 - 2", (), _lemma_10_4, digits=60),
        LemmaEntry("table-entry", "3F2(1/2, 1, 1; 3/2, 3/2; -1/4) closed form", (),
                   _lemma_table_entry, digits=60),
        LemmaEntry("li2-values", "tabulated dilogarithm values", ("x",), _lemma_li2_values,
                   lambda params: str(params["x"]) in LI2_VALUES, {"x": tuple(LI2_VALUES)},
                   digits=60),
        LemmaEntry("S0-chain", "S0 via Saalschutz", ("n",), _chain_s0, _from(1),
                   {"n": range(1, 101)}),
        LemmaEntry("S1-chain", "S1 via reversal and Whipple", ("n",), _chain_s1, _from(1),
                   {"n": range(1, 101)}),
        LemmaEntry("S2-chain", "S2 via the auxiliary induction", ("n",), _chain_s2, _from(1),
                   {"n": range(1, 101)}),
        LemmaEntry("S3-chain", "S3 via the two-pair split", ("n",), _chain_s3, _from(1),
                   {"n": range(1, 101)}),
        LemmaEntry("S4-chain", "S4 via the regularized shift", ("n", "m"), _chain_s4,
                   lambda p: 2 <= int(p["m"]) <= _n(p),
                   {"n": range(0, 41), "m": range(0, 41)}),
        LemmaEntry("S5-chain", "S5 via the logarithmic 3F2", (), _chain_s5, digits=128),
        LemmaEntry("S6-chain", "S6 via split, Thomae and unit reduction", ("n", "k"),
                   _chain_s6, lambda p: 1 <= int(p["k"]) <= _n(p),
                   {"n": range(0, 41), "k": range(0, 41)}),
        LemmaEntry("S7-chain", "S7 via contiguity and the three-term relation", ("n",),
                   _chain_s7, _from(1), {"n": range(1, 101)}),
        LemmaEntry("S8-chain", "S8 via the binomial theorem and Gauss", ("n",), _chain_s8,
                   _from(0), {"n": _LEMMA_N}),
    )
}


def get_lemma(lemma_id: str) -> LemmaEntry:
    try:
        return LEMMAS[lemma_id]
    except KeyError:
        raise UnknownLemma(lemma_id) from None


# Verification entry points


def verify_lemma(
    lemma_id: str, *, digits: int | None = None, **params: int | str
) -> VerificationReport:
    """Check one lemma or proof chain at concrete parameters.

    Raises:
        UnknownLemma: For an unregistered id.
        OutOfDomain: For missing, extra or out-of-domain parameters.
    """
    lemma = get_lemma(lemma_id)
    values = _checked_params(lemma_id, lemma.parameters, params)
    if not lemma.domain(values):
        raise OutOfDomain(f"{lemma_id} is not stated at {values}")
    digits = digits or lemma.digits
    return _judge(lemma_id, values, lemma.evaluate(values, digits), digits)


def _identity_sides(entry: IdentityEntry, params: Params, mode: Mode, digits: int) -> _Sides:
    closed = entry.rhs(params)
    if entry.numeric_lhs is not None:
        lhs, bracket = entry.numeric_lhs(params, digits)
        return _Sides(lhs, closed.numeric(digits), bracket=bracket)
    lhs = entry.exact_lhs(params)
    if mode is Mode.EXACT:
        return _Sides(lhs, closed.reduce_trigamma().to_fraction())
    return _Sides(lhs, closed.numeric(digits))


def verify_identity(
    identity_id: str,
    *,
    mode: Mode | str | None = None,
    digits: int | None = None,
    chain: bool = False,
    **params: int | str,
) -> VerificationReport:
    """Compare both sides of an identity at one parameter point.

    Points outside the stated domain are refused unless the entry declares them
    with ``outside_domain`` (``S4`` at ``m`` in {0, 1}); those results are flagged informational.

    Args:
        identity_id: ``"S0"`` through ``"S9"``.
        mode: ``exact`` or ``numeric``; defaults to the entry's own mode.
        digits: Working precision for numeric comparisons.
        chain: Also replay the proof chain and attach its rule trace.
        **params: Parameter values, e.g. ``n=3`` or ``n=5, m=2``.

    Returns:
        The verification report.

    Raises:
        UnknownIdentity: For an unregistered id.
        OutOfDomain: For bad parameters or an exact request on a numeric-only entry.

    Example:
        >>> verify_identity("S8", n=4).status
        <Status.PASS: 'pass'>
    """
    entry = get_identity(identity_id)
    values = _checked_params(identity_id, entry.parameters, params)
    informational = False
    if not entry.domain(values):
        if entry.outside_domain is None or not entry.outside_domain(values):
            raise OutOfDomain(f"{identity_id} is not stated at {values}")
        informational = True
        logger.warning("%s at %s lies outside its stated domain", identity_id, values)
    mode = entry.mode if mode is None else Mode(mode)
    if mode is Mode.EXACT and entry.mode is Mode.NUMERIC:
        raise OutOfDomain(f"{identity_id} has no exact right-hand side")
    digits = digits or entry.digits
    sides = _identity_sides(entry, values, mode, digits)

    lemma_id = f"{identity_id}-chain"
    if chain and lemma_id in LEMMAS and LEMMAS[lemma_id].domain(values):
        replay = verify_lemma(lemma_id, digits=digits, **values)
        failed = () if replay.passed else ("chain",)
        sides = _Sides(
            sides.lhs, sides.rhs, replay.trace, sides.checkpoints, sides.bracket, failed
        )
    elif chain:
        logger.debug("No chain replay for %s at %s", identity_id, values)
    return _judge(
        identity_id,
        values,
        sides,
        digits,
        tolerance_digits=entry.tolerance_digits,
        informational=informational,
    )


@dataclass(frozen=True)
class GridConfig:
    """Which checks :func:`verify_all` runs and over which parameter ranges.

    ``ranges`` maps a parameter name to an inclusive ``(low, high)`` pair and replaces the
    entry defaults wherever that parameter occurs.
    """

    identities: tuple[str, ...] = field(default_factory=lambda: tuple(IDENTITIES))
    lemmas: tuple[str, ...] = field(default_factory=lambda: tuple(LEMMAS))
    ranges: Mapping[str, tuple[int, int]] = field(default_factory=dict)
    mode: Mode | None = None
    digits: int | None = None
    chain: bool = False
    outside_domain: bool = False
    jobs: int = 1

    def __post_init__(self) -> None:
        for name, (low, high) in self.ranges.items():
            if low > high:
                raise OutOfDomain(f"empty range for {name}: {low}..{high}")
        if self.jobs < 1:
            raise OutOfDomain(f"jobs must be positive, got {self.jobs}")
        for identity_id in self.identities:
            get_identity(identity_id)
        for lemma_id in self.lemmas:
            get_lemma(lemma_id)


def _grid(
    parameters: Sequence[str],
    defaults: Mapping[str, Sequence[int | str]],
    ranges: Mapping[str, tuple[int, int]],
) -> Iterator[Params]:
    axes = [
        range(ranges[name][0], ranges[name][1] + 1) if name in ranges else defaults[name]
        for name in parameters
    ]
    for combination in itertools.product(*axes):
        yield dict(zip(parameters, combination))


_Task = tuple[str, str, Params]


def _tasks(config: GridConfig) -> list[_Task]:
    tasks: list[_Task] = []
    for identity_id in config.identities:
        entry = IDENTITIES[identity_id]
        for params in _grid(entry.parameters, entry.defaults, config.ranges):
            extra = (
                config.outside_domain
                and entry.outside_domain is not None
                and entry.outside_domain(params)
            )
            if entry.domain(params) or extra:
                tasks.append(("identity", identity_id, params))
    for lemma_id in config.lemmas:
        lemma = LEMMAS[lemma_id]
        for params in _grid(lemma.parameters, lemma.defaults, config.ranges):
            if lemma.domain(params):
                tasks.append(("lemma", lemma_id, params))
    return tasks


def _run_task(
    task: _Task, *, mode: Mode | None, digits: int | None, chain: bool
) -> VerificationReport:
    kind, check_id, params = task
    try:
        if kind == "identity":
            numeric_only = IDENTITIES[check_id].mode is Mode.NUMERIC
            return verify_identity(
                check_id,
                mode=None if numeric_only else mode,
                digits=digits,
                chain=chain,
                **params,
            )
        return verify_lemma(check_id, digits=digits, **params)
    except (HyperBinomError, ArithmeticError) as exc:
        logger.error("Check %s at %s failed: %s", check_id, params, exc)
        return VerificationReport(
            check_id, params, mode or Mode.EXACT, None, None, Status.ERROR, message=str(exc)
        )


def verify_all(
    config: GridConfig | None = None, *, enable_progress: bool = True
) -> list[VerificationReport]:
    """Run every selected identity and lemma over its grid.

    Reports come back in task order (registry order, then parameters ascending) whatever
    the number of worker processes. A point that raises is recorded with status ``error``
    and the run continues.
    """
    config = config or GridConfig()
    tasks = _tasks(config)
    logger.info("Verifying %d checks with %d job(s)", len(tasks), config.jobs)
    run = partial(_run_task, mode=config.mode, digits=config.digits, chain=config.chain)

    def progress(reports: Iterable[VerificationReport]) -> Iterable[VerificationReport]:
        if enable_progress and len(tasks) > 1:
            return tqdm(reports, total=len(tasks), desc="Verifying")
        return reports

    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            chunk = max(1, len(tasks) // (config.jobs * 8))
            reports = list(progress(executor.map(run, tasks, chunksize=chunk)))
    else:
        reports = list(progress(map(run, tasks)))

    failures = [report for report in reports if not report.passed]
    for report in failures:
        if report.status is Status.FAIL:
            logger.warning("%s failed at %s: %s", report.id, report.params, report.message or "")
    logger.info("%d/%d checks passed", len(reports) - len(failures), len(reports))
    return reports
