"""Exception types raised by combagg.

Everything a caller can trigger with bad input derives from ``InputError``;
the CLI maps those to exit code 2.
"""


class InputError(ValueError):
    """Base class for invalid-input errors."""


class NonPositiveEntry(InputError):
    pass


class DuplicatePair(InputError):
    pass


class DisconnectedGraph(InputError):
    pass


class BadGradeCount(InputError):
    pass


class IncompleteMatrix(InputError):
    pass


class IncompleteRaterMatrix(IncompleteMatrix):
    pass


class NonPositiveWeight(InputError):
    pass


class NTooLarge(InputError):
    pass


class EdgeNotInMask(InputError):
    pass


class KindMismatch(InputError):
    pass


class GaugeMismatch(InputError):
    pass


class BadConfig(InputError):
    pass


class BadGrid(InputError):
    pass


class BadGroupSize(InputError):
    pass


class SchemaError(InputError):
    pass


class FractionParseError(SchemaError):
    pass


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (a bug, not bad input)."""
