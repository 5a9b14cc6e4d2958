"""Exception hierarchy.

Precondition failures carry a ``precondition`` label so that reports and the
command line can name the violated assumption instead of crashing.
"""


class BlenderError(Exception):
    """Base class for every error raised by this package."""


class IntervalError(BlenderError, ArithmeticError):
    pass


class DivisionByZeroInterval(IntervalError):
    pass


class SqrtOfNegativeInterval(IntervalError):
    pass


class EmptyIntervalError(IntervalError):
    pass


class PreconditionError(BlenderError, ValueError):
    precondition = "precondition"

    def __init__(self, message=None):
        super().__init__(message or self.precondition)


class InvalidXi(PreconditionError):
    precondition = "xi > 1"


class DegenerateXi(InvalidXi):
    precondition = "xi != 1"


class LegsUndefined(PreconditionError):
    precondition = "mu < -4"


class ComplexFixedPoints(PreconditionError):
    precondition = "1 - 4 mu >= 0"


class PlanarRequiresUnperturbed(PreconditionError):
    precondition = "kappa = eta = 0"


class ZeroVector(BlenderError, ValueError):
    pass


class ConeViolationAfterIteration(BlenderError):
    pass


class NoLegInBetween(BlenderError):
    pass


class NotInBetween(BlenderError):
    pass


class NoPositiveEpsilon(BlenderError):
    pass
