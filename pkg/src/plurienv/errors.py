"""Exception types shared across the package."""


class PlurienvError(Exception):
    """Base class for package errors."""


class DomainError(PlurienvError, ValueError):
    """A point or parameter lies outside the admissible domain."""


class DimensionMismatch(PlurienvError, ValueError):
    pass


class NonDifferentiableError(PlurienvError, ArithmeticError):
    """Raised when a Hessian is requested where an expression has a kink or pole."""


class SingularCenterError(PlurienvError):
    """The disc center lies in the singular set of the current."""

    def __init__(self, msg="disc centered in sing(omega)"):
        super().__init__(msg)


class InfeasibleDiscError(PlurienvError):
    """The disc cannot be evaluated reliably (repeated singular boundary hits)."""


class OracleIllPosedError(PlurienvError):
    """The obstacle is -inf on too many grid nodes."""


class OptimizerExhaustedError(PlurienvError):
    """No feasible disc was found within the evaluation budget."""
