"""Term language for binomial summands and pFq literals.

Grammar (whitespace insignificant, division binds per factor)::

    term    := factor (('*' | '/') factor)*
    factor  := 'binom' '(' affine ',' affine ')'
             | 'pow' '(' rational ',' 'k' ')'
             | affine ['^' integer]
             | '(' term ')'
    affine  := integer-linear combination of n, m, k and integers, e.g. ``2(n-k)+1``

``k`` is the summation index; ``n`` and ``m`` are the instance parameters.

Example:
    >>> spec = parse_term_spec("binom(2k,k)*binom(2(n-k),n-k)/(1+2k)")
    >>> format_term_spec(spec)
    'binom(2k,k)*binom(2n-2k,n-k)/(2k+1)'
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from enum import StrEnum
from fractions import Fraction

from hyperbinom.errors import DivisionByZero, TermSyntaxError, UnknownSymbol

__all__ = [
    "Affine",
    "Binom",
    "Const",
    "Factor",
    "LinPow",
    "Position",
    "Pow",
    "TermSpec",
    "format_pfq",
    "format_term_spec",
    "parse_pfq_literal",
    "parse_term_spec",
]

_SYMBOLS = ("n", "m", "k")
_KEYWORDS = ("binom", "pow")


@dataclass(frozen=True, slots=True)
class Affine:
    """``n_coeff*n + m_coeff*m + k_coeff*k + const`` with rational coefficients."""

    n: Fraction = Fraction(0)
    m: Fraction = Fraction(0)
    k: Fraction = Fraction(0)
    const: Fraction = Fraction(0)

    @classmethod
    def symbol(cls, name: str) -> Affine:
        return cls(**{name: Fraction(1)})

    @classmethod
    def constant(cls, value: Fraction | int) -> Affine:
        return cls(const=Fraction(value))

    def __add__(self, other: Affine) -> Affine:
        return Affine(
            self.n + other.n, self.m + other.m, self.k + other.k, self.const + other.const
        )

    def __sub__(self, other: Affine) -> Affine:
        return self + other.scale(-1)

    def scale(self, factor: Fraction | int) -> Affine:
        return Affine(self.n * factor, self.m * factor, self.k * factor, self.const * factor)

    @property
    def is_constant(self) -> bool:
        return self.n == 0 and self.m == 0 and self.k == 0

    def at(self, *, n: int, m: int = 0, k: int = 0) -> Fraction:
        """Evaluate at concrete parameter values and index."""

        return self.n * n + self.m * m + self.k * k + self.const

    def bind(self, *, n: int, m: int = 0) -> Affine:
        """Substitute the instance parameters, leaving only ``k`` free."""

        return Affine(k=self.k, const=self.n * n + self.m * m + self.const)

    def substitute_index(self, scale: int, offset: int) -> Affine:
        """Replace ``k`` by ``scale*k + offset``."""

        return Affine(self.n, self.m, self.k * scale, self.const + self.k * offset)

    def __str__(self) -> str:
        parts: list[str] = []
        for name in ("n", "m", "k"):
            coeff = getattr(self, name)
            if coeff == 0:
                continue
            if coeff == 1:
                text = name
            elif coeff == -1:
                text = f"-{name}"
            else:
                text = f"{coeff}{name}"
            parts.append(text)
        if self.const != 0 or not parts:
            parts.append(str(self.const))
        text = parts[0]
        for part in parts[1:]:
            text += part if part.startswith("-") else f"+{part}"
        return text


class Position(StrEnum):
    NUMERATOR = "numerator"
    DENOMINATOR = "denominator"

    def flipped(self) -> Position:
        return Position.DENOMINATOR if self is Position.NUMERATOR else Position.NUMERATOR


@dataclass(frozen=True, slots=True)
class Binom:
    top: Affine
    bottom: Affine
    position: Position = Position.NUMERATOR


@dataclass(frozen=True, slots=True)
class Pow:
    """``base ** k``."""

    base: Fraction


@dataclass(frozen=True, slots=True)
class LinPow:
    lin: Affine
    exponent: int = 1
    position: Position = Position.NUMERATOR


@dataclass(frozen=True, slots=True)
class Const:
    value: Fraction


Factor = Binom | Pow | LinPow | Const


def _rank(factor: Factor) -> tuple[int, int]:
    if isinstance(factor, Const):
        return (0, 0)
    if isinstance(factor, Pow):
        return (1, 0)
    return (2, 0 if factor.position is Position.NUMERATOR else 1)


@dataclass(frozen=True, slots=True)
class TermSpec:
    """A summand as an ordered product of factor records.

    Build instances with :meth:`of`, which folds constants and ``pow`` bases and puts the
    factors in canonical order so that printing and re-parsing is the identity.
    """

    factors: tuple[Factor, ...] = field(default_factory=tuple)

    @classmethod
    def of(cls, factors: Iterable[Factor]) -> TermSpec:
        constant = Fraction(1)
        base = Fraction(1)
        rest: list[Factor] = []
        for factor in factors:
            if isinstance(factor, Const):
                constant *= factor.value
            elif isinstance(factor, Pow):
                base *= factor.base
            elif isinstance(factor, LinPow):
                if factor.exponent == 0:
                    continue
                if factor.exponent < 0:
                    factor = LinPow(factor.lin, -factor.exponent, factor.position.flipped())
                if factor.lin.is_constant:
                    value = factor.lin.const**factor.exponent
                    if factor.position is Position.DENOMINATOR:
                        if value == 0:
                            raise DivisionByZero("constant factor 0 in a denominator")
                        value = 1 / value
                    constant *= value
                    continue
                rest.append(factor)
            else:
                rest.append(factor)
        ordered: list[Factor] = []
        if constant != 1 or (base == 1 and not rest):
            ordered.append(Const(constant))
        if base != 1:
            ordered.append(Pow(base))
        ordered.extend(sorted(rest, key=_rank))
        return cls(tuple(ordered))

    def shifted(self, scale: int, offset: int) -> TermSpec:
        """Return the spec with the index ``k`` replaced by ``scale*k + offset``.

        A reflected ``pow`` base contributes a constant ``base**offset``.
        """
        factors: list[Factor] = []
        for factor in self.factors:
            if isinstance(factor, Binom):
                factors.append(
                    replace(
                        factor,
                        top=factor.top.substitute_index(scale, offset),
                        bottom=factor.bottom.substitute_index(scale, offset),
                    )
                )
            elif isinstance(factor, LinPow):
                factors.append(replace(factor, lin=factor.lin.substitute_index(scale, offset)))
            elif isinstance(factor, Pow):
                factors.append(Const(factor.base**offset))
                factors.append(Pow(factor.base if scale == 1 else 1 / factor.base))
            else:
                factors.append(factor)
        return TermSpec.of(factors)


def _format_factor(factor: Factor) -> str:
    if isinstance(factor, Binom):
        return f"binom({factor.top},{factor.bottom})"
    if isinstance(factor, Pow):
        return f"pow({factor.base},k)"
    if isinstance(factor, LinPow):
        suffix = f"^{factor.exponent}" if factor.exponent != 1 else ""
        return f"({factor.lin}){suffix}"
    return str(factor.value)


def format_term_spec(spec: TermSpec) -> str:
    """Print a TermSpec in the canonical term language form."""

    numerator = [
        _format_factor(f)
        for f in spec.factors
        if not isinstance(f, (Binom, LinPow)) or f.position is Position.NUMERATOR
    ]
    denominator = [
        _format_factor(f)
        for f in spec.factors
        if isinstance(f, (Binom, LinPow)) and f.position is Position.DENOMINATOR
    ]
    text = "*".join(numerator) if numerator else "1"
    return text + "".join(f"/{item}" for item in denominator)


_TOKEN = re.compile(r"\s*(?:(?P<number>\d+)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    index = 0
    while index < len(text):
        if text[index].isspace():
            index += 1
            continue
        match = _TOKEN.match(text, index)
        if match is None:
            raise TermSyntaxError(f"unexpected character {text[index]!r}", index)
        kind = match.lastgroup or "op"
        start = match.start(kind)
        tokens.append(_Token(kind, match.group(kind), start))
        index = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> _Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, text: str) -> _Token:
        if self.current.text != text or self.current.kind == "end":
            found = self.current.text or "end of input"
            raise TermSyntaxError(f"expected {text!r}, found {found!r}", self.current.position)
        return self.advance()

    def fail(self, message: str) -> TermSyntaxError:
        return TermSyntaxError(message, self.current.position)

    def check_ident(self, token: _Token) -> None:
        if token.kind == "ident" and token.text not in _SYMBOLS + _KEYWORDS:
            raise UnknownSymbol(f"unknown symbol {token.text!r}", token.position)

    # term := factor (('*' | '/') factor)*
    def term(self) -> list[Factor]:
        factors = self.factor(Position.NUMERATOR)
        while self.current.text in ("*", "/") and self.current.kind == "op":
            operator = self.advance().text
            position = Position.NUMERATOR if operator == "*" else Position.DENOMINATOR
            factors.extend(self.factor(position))
        return factors

    def factor(self, position: Position) -> list[Factor]:
        token = self.current
        self.check_ident(token)
        if token.kind == "ident" and token.text == "binom":
            self.advance()
            self.expect("(")
            top = self.affine()
            self.expect(",")
            bottom = self.affine()
            self.expect(")")
            return [Binom(top, bottom, position)]
        if token.kind == "ident" and token.text == "pow":
            self.advance()
            self.expect("(")
            base = self.rational()
            self.expect(",")
            index = self.current
            if index.text != "k":
                self.check_ident(index)
                raise self.fail("pow exponent must be the index k")
            self.advance()
            self.expect(")")
            if position is Position.DENOMINATOR:
                if base == 0:
                    raise DivisionByZero("pow(0,k) in a denominator")
                base = 1 / base
            return [Pow(base)]
        if token.text == "(":
            saved = self.index
            try:
                return [self.powered_affine(position)]
            except TermSyntaxError:
                self.index = saved
            self.advance()
            inner = self.term()
            self.expect(")")
            if position is Position.NUMERATOR:
                return inner
            return [_flip(factor) for factor in inner]
        if token.kind in ("number", "ident") or token.text in ("+", "-"):
            return [self.powered_affine(position)]
        raise self.fail(f"unexpected {token.text or 'end of input'!r}")

    def powered_affine(self, position: Position) -> LinPow:
        lin = self.affine()
        exponent = 1
        if self.current.text == "^":
            self.advance()
            exponent = self.integer()
        if self.current.kind != "end" and self.current.text not in ("*", "/", ")", ","):
            raise self.fail(f"unexpected {self.current.text!r} after factor")
        return LinPow(lin, exponent, position)

    def integer(self) -> int:
        sign = 1
        if self.current.text in ("+", "-"):
            sign = -1 if self.advance().text == "-" else 1
        if self.current.kind != "number":
            raise self.fail("expected an integer")
        return sign * int(self.advance().text)

    def rational(self) -> Fraction:
        numerator = self.integer()
        if self.current.text == "/":
            self.advance()
            denominator = self.integer()
            if denominator == 0:
                raise self.fail("zero denominator in rational literal")
            return Fraction(numerator, denominator)
        return Fraction(numerator)

    # affine := ['+'|'-'] aterm (('+'|'-') aterm)*
    def affine(self) -> Affine:
        sign = 1
        if self.current.text in ("+", "-"):
            sign = -1 if self.advance().text == "-" else 1
        result = self.aterm().scale(sign)
        while self.current.text in ("+", "-") and self.current.kind == "op":
            sign = -1 if self.advance().text == "-" else 1
            result = result + self.aterm().scale(sign)
        return result

    def aterm(self) -> Affine:
        token = self.current
        self.check_ident(token)
        if token.kind == "number":
            self.advance()
            coeff = int(token.text)
            following = self.current
            if following.kind == "ident" and following.text in _SYMBOLS:
                self.advance()
                return Affine.symbol(following.text).scale(coeff)
            if following.text == "(":
                return self.parenthesized_affine().scale(coeff)
            if following.text == "*":
                after = self.peek()
                if after.kind == "ident" and after.text in _SYMBOLS:
                    self.advance()
                    self.advance()
                    return Affine.symbol(after.text).scale(coeff)
                if after.text == "(":
                    saved = self.index
                    self.advance()
                    try:
                        return self.parenthesized_affine().scale(coeff)
                    except TermSyntaxError:
                        self.index = saved
            return Affine.constant(coeff)
        if token.kind == "ident" and token.text in _SYMBOLS:
            self.advance()
            return Affine.symbol(token.text)
        if token.text == "(":
            return self.parenthesized_affine()
        raise self.fail(f"expected an affine expression, found {token.text or 'end of input'!r}")

    def parenthesized_affine(self) -> Affine:
        self.expect("(")
        inner = self.affine()
        self.expect(")")
        return inner


def _flip(factor: Factor) -> Factor:
    if isinstance(factor, (Binom, LinPow)):
        return replace(factor, position=factor.position.flipped())
    if isinstance(factor, Pow):
        if factor.base == 0:
            raise DivisionByZero("pow(0,k) in a denominator")
        return Pow(1 / factor.base)
    if factor.value == 0:
        raise DivisionByZero("constant factor 0 in a denominator")
    return Const(1 / factor.value)


def parse_term_spec(text: str) -> TermSpec:
    """Parse term language text into a canonical TermSpec.

    Raises:
        TermSyntaxError: With the offending character position.
        UnknownSymbol: For identifiers other than ``n``, ``m``, ``k``, ``binom``, ``pow``.
    """
    parser = _Parser(text)
    factors = parser.term()
    if parser.current.kind != "end":
        raise parser.fail(f"unexpected {parser.current.text!r}")
    return TermSpec.of(factors)


_PFQ_LITERAL = re.compile(r"^\s*(\d+)\s*F\s*(\d+)\s*\((.*)\)\s*$", re.DOTALL)


def _parse_rational_list(text: str, offset: int) -> list[Fraction]:
    items = [item.strip() for item in text.split(",")]
    if items == [""]:
        return []
    values: list[Fraction] = []
    for item in items:
        try:
            values.append(Fraction(item))
        except (ValueError, ZeroDivisionError):
            raise TermSyntaxError(f"invalid rational {item!r}", offset) from None
    return values


def parse_pfq_literal(text: str) -> tuple[list[Fraction], list[Fraction], Fraction]:
    """Split ``"pFq(a1,...;b1,...;z)"`` into upper parameters, lower parameters and argument.

    Raises:
        TermSyntaxError: When the literal is malformed or the counts disagree with p and q.
    """
    match = _PFQ_LITERAL.match(text)
    if match is None:
        raise TermSyntaxError("expected a literal of the form pFq(a,...;b,...;z)", 0)
    p, q = int(match.group(1)), int(match.group(2))
    body_start = match.start(3)
    parts = match.group(3).split(";")
    if len(parts) != 3:
        raise TermSyntaxError("expected two ';' separators", body_start)
    upper = _parse_rational_list(parts[0], body_start)
    lower = _parse_rational_list(parts[1], body_start + len(parts[0]) + 1)
    arg_offset = body_start + len(parts[0]) + len(parts[1]) + 2
    argument = _parse_rational_list(parts[2], arg_offset)
    if len(argument) != 1:
        raise TermSyntaxError("expected exactly one argument", arg_offset)
    if len(upper) != p or len(lower) != q:
        raise TermSyntaxError(
            f"{p}F{q} literal lists {len(upper)} upper and {len(lower)} lower parameters",
            body_start,
        )
    return upper, lower, argument[0]


def format_pfq(upper: Iterable[Fraction], lower: Iterable[Fraction], arg: Fraction) -> str:
    """Inverse of :func:`parse_pfq_literal`."""

    upper, lower = list(upper), list(lower)
    return (
        f"{len(upper)}F{len(lower)}("
        f"{','.join(map(str, upper))};{','.join(map(str, lower))};{arg})"
    )
