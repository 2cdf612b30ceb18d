"""Exception hierarchy.

Every numerical failure derives from :class:`NumericalError` so callers (the
CLI in particular) can map a whole family onto one exit code.
"""


class PhononBlockadeError(Exception):
    """Base class for all package errors."""

    code = "Error"


class InvalidParameter(PhononBlockadeError, ValueError):
    code = "InvalidParameter"


class InvalidState(PhononBlockadeError, ValueError):
    code = "InvalidState"


class DimensionMismatch(PhononBlockadeError, ValueError):
    code = "DimensionMismatch"


class NotHermitian(PhononBlockadeError, ValueError):
    code = "NotHermitian"


class SpecError(PhononBlockadeError, ValueError):
    code = "SpecError"


class UnsupportedShape(PhononBlockadeError, ValueError):
    code = "UnsupportedShape"


class IoFailure(PhononBlockadeError, OSError):
    code = "IoFailure"


class NumericalError(PhononBlockadeError, ArithmeticError):
    code = "NumericalError"


class SingularSystem(NumericalError):
    code = "SingularSystem"


class DegenerateDenominator(NumericalError):
    code = "DegenerateDenominator"


class NegativeDenominator(NumericalError):
    code = "NegativeDenominator"


class NonConvergence(NumericalError):
    code = "NonConvergence"


class NonPositive(NumericalError):
    code = "NonPositive"


class StepSizeUnderflow(NumericalError):
    code = "StepSizeUnderflow"


class TruncationExplosion(NumericalError):
    code = "TruncationExplosion"


class InsufficientOccupation(NumericalError):
    code = "InsufficientOccupation"
