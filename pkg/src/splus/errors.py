"""Exception types raised by the library."""


class SPlusError(Exception):
    """Base class for all library errors."""


class ContractError(SPlusError, ValueError):
    """An operation was called with arguments violating its contract."""


class SingularSeriesError(ContractError):
    """Reciprocal requested for a series with vanishing constant term."""


class NormalizationError(ContractError):
    """Logarithm requested for a series whose constant term is not 1."""


class MixedModeError(ContractError):
    """Exact and floating-point series were combined."""


class InvariantError(ContractError):
    """A b-sequence with a negative entry, or another broken invariant."""


class DomainError(ContractError):
    """A scalar parameter (gamma, lambda, radius) is out of range."""


class PreconditionError(ContractError):
    """The input function does not belong to the class an operation requires."""


class UnknownCatalogError(ContractError, KeyError):
    pass


class PoleProximityError(SPlusError, ArithmeticError):
    """z/f(z) (or f') is numerically zero at an evaluation point."""


class GridTooLargeError(SPlusError):
    """An exhaustive grid would exceed the configured evaluation cap."""

    def __init__(self, evaluations, cap, suggested_step):
        self.evaluations = evaluations
        self.cap = cap
        self.suggested_step = suggested_step
        super().__init__(
            f"grid needs {evaluations:,} evaluations (cap {cap:,}); "
            f"try grid_step >= {suggested_step:g}"
        )
