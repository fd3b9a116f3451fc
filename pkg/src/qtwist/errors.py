"""Exception types raised by qtwist."""


class QTwistError(Exception):
    """Base class for all qtwist errors."""


class NotInvertible(QTwistError, ZeroDivisionError):
    """A series (or series matrix) with singular constant term was inverted."""


class NoRealSqrt(QTwistError, ValueError):
    """Square root requested of a series whose constant term is not positive."""


class NegativeFactorial(QTwistError, ValueError):
    pass


class DegenerateKernel(QTwistError, ArithmeticError):
    """A highest-weight kernel did not have dimension one.

    Signals an implementation fault, never a user error.
    """


class DimensionMismatch(QTwistError, ValueError):
    pass


class MissingBlockFactor(QTwistError, KeyError):
    pass


class DegreeCapExceeded(QTwistError, ValueError):
    """Polynomial degree above the configured per-computation cap."""
