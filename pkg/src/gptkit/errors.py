"""Exception types with stable, machine-readable error codes.

Every error raised by the toolkit derives from :class:`GptError` and
carries a ``code`` attribute.  The CLI maps any :class:`GptError` to exit
status 2 and prints the code alongside the message; verification suites
embed the code when serializing failed trials.
"""

from __future__ import annotations


class GptError(Exception):
    """Base class for all toolkit errors."""

    code = "gpt-error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class InvalidDimension(GptError):
    code = "invalid-dimension"


class UnsupportedComposite(GptError):
    code = "unsupported-composite"


class IncompatibleSystems(GptError):
    code = "incompatible-systems"


class NotAComposite(GptError):
    code = "not-a-composite"


class NotNormalized(GptError):
    code = "not-normalized"


class NotCopurifications(GptError):
    code = "not-copurifications"


class ZeroState(GptError):
    code = "zero-state"


class InvalidState(GptError):
    code = "invalid-state"


class InvalidEffect(GptError):
    code = "invalid-effect"


class InvalidObservable(GptError):
    code = "invalid-observable"


class NotPure(GptError):
    code = "not-pure"


class NotMaximal(GptError):
    code = "not-maximal"


class DomainError(GptError):
    code = "domain-error"


class InvalidDistribution(GptError):
    code = "invalid-distribution"


class EffectNotCertain(GptError):
    code = "effect-not-certain"


class Unsupported(GptError):
    code = "unsupported"


class NotATest(GptError):
    code = "not-a-test"


class TriangularityFailed(GptError):
    code = "triangularity-failed"


class NotReversible(GptError):
    code = "not-reversible"


class InvalidOrder(GptError):
    code = "invalid-order"


class NotComparable(GptError):
    code = "not-comparable"


class InapplicableFunction(GptError):
    code = "inapplicable-function"


class EnergyOutOfRange(GptError):
    code = "energy-out-of-range"


class NotInvertible(GptError):
    code = "not-invertible"


class InvalidTemperature(GptError):
    code = "invalid-temperature"


class UnknownSuite(GptError):
    code = "unknown-suite"


class SchemaError(GptError):
    code = "schema-error"
