"""Exception hierarchy shared by every hyper-binom module.

Library code raises these; only the command-line front end turns them into exit codes.
"""

from __future__ import annotations

__all__ = [
    "Divergent",
    "DivisionByZero",
    "DomainError",
    "HyperBinomError",
    "IrrationalResult",
    "IrrationalRoots",
    "MaxTermsExceeded",
    "NotAlternating",
    "NotApplicable",
    "NotHypergeometric",
    "NotTerminating",
    "OutOfDomain",
    "PoleError",
    "RootNotFound",
    "TermSyntaxError",
    "UnknownIdentity",
    "UnknownLemma",
    "UnknownRule",
    "UnknownSymbol",
]


class HyperBinomError(Exception):
    """Base class for all errors raised by hyper-binom."""


class PoleError(HyperBinomError):
    """A gamma function or Pochhammer symbol in a denominator vanishes."""


class DivisionByZero(HyperBinomError, ZeroDivisionError):
    """A summand factor evaluates to zero in a denominator."""


class NotHypergeometric(HyperBinomError):
    """The consecutive-term ratio is not a rational function of the index."""


class IrrationalRoots(HyperBinomError):
    """A term-ratio polynomial does not split into rational linear factors."""


class NotTerminating(HyperBinomError):
    """An exact sum was requested for a series with no truncation point."""


class Divergent(HyperBinomError):
    """The series does not converge at its argument."""


class MaxTermsExceeded(HyperBinomError):
    """A numeric summation hit its term budget before reaching the target precision."""


class NotApplicable(HyperBinomError):
    """A rule was asked to act on a series outside its admissible shape."""


class IrrationalResult(HyperBinomError):
    """An exact rational result was requested but the value is irrational."""


class DomainError(HyperBinomError, ValueError):
    """An argument lies outside the domain of a function."""


class RootNotFound(HyperBinomError):
    """An auxiliary equation has no root in the required interval."""


class NotAlternating(HyperBinomError):
    """A sequence handed to the alternating accelerator breaks the sign pattern."""


class TermSyntaxError(HyperBinomError):
    """The term language text does not match the grammar.

    Attributes:
        position: Zero-based character offset where parsing failed.
    """

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownSymbol(TermSyntaxError):
    """The term language text uses an identifier that is not defined."""


class UnknownIdentity(HyperBinomError, KeyError):
    """No identity is registered under the requested id."""


class UnknownLemma(HyperBinomError, KeyError):
    """No lemma is registered under the requested id."""


class UnknownRule(HyperBinomError, KeyError):
    """No rule is registered under the requested id."""


class OutOfDomain(HyperBinomError, ValueError):
    """Identity parameters fall outside the entry's declared domain."""
