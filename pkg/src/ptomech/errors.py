"""Exception hierarchy.

Two families: :class:`InputError` for bad parameters or specs (the caller
can fix these) and :class:`NumericalError` for failures inside a numerical
routine. The CLI maps them to exit codes 1 and 2.
"""


class PtomechError(Exception):
    """Base class for all package errors."""


class InputError(PtomechError, ValueError):
    pass


class NumericalError(PtomechError, ArithmeticError):
    pass


class DomainError(InputError):
    """A parameter violates its physical domain."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"invalid value for {field!r}")


class SpecError(InputError):
    pass


class UnknownPreset(InputError):
    pass


class SingularDecoupling(NumericalError):
    """``i*delta + kappa/2`` vanishes, so the gain cavity cannot be eliminated."""


class NoConvergence(NumericalError):
    pass


class EigenFailure(NumericalError):
    pass


class StepSizeUnderflow(NumericalError):
    def __init__(self, t_reached, message=None):
        self.t_reached = t_reached
        self.trajectory = None
        super().__init__(message or f"step size underflow at t = {t_reached!r}")


class TooShort(InputError):
    pass


class NotHurwitz(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


class NonPhysical(NumericalError):
    pass
