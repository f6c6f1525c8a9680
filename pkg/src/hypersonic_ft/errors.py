"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class HypersonicError(Exception):
    """Base class of all errors raised by the package."""


class DomainError(HypersonicError, ValueError):
    """A state lies outside the admissible set (e.g. non-positive density)."""


class CavitationError(DomainError):
    """The Bernoulli closure has no real solution: ``1 - tau2 * B <= 0``."""


class DegeneracyError(HypersonicError, ArithmeticError):
    """Loss of strict hyperbolicity (non-positive discriminant or denominator)."""

    def __init__(self, message: str, value: float) -> None:
        super().__init__(f"{message} (offending value {value!r})")
        self.value = value


class StrengthError(HypersonicError, ValueError):
    """A wave strength lies outside the configured window ``(delta0, 1/delta0)``."""


class CurveDomainError(HypersonicError, ArithmeticError):
    """A wave-curve root could not be bracketed on the admissible branch."""


class IntegrationError(HypersonicError, ArithmeticError):
    """The adaptive integrator for a rarefaction curve failed to converge."""


class InvalidShockError(HypersonicError, ValueError):
    """Rankine-Hugoniot conditions are violated beyond tolerance."""


class SolverError(HypersonicError, ArithmeticError):
    """A Riemann solve failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_iterate: object = None) -> None:
        super().__init__(message)
        self.last_iterate = last_iterate


class BoundarySolverError(SolverError):
    """The boundary Riemann problem could not be bracketed."""


class BlowupError(HypersonicError, RuntimeError):
    """Front tracking produced more fronts than the configured cap."""


class SchedulingError(HypersonicError, RuntimeError):
    """A collision could not be resolved into a well-ordered event."""


class ConfigError(HypersonicError, ValueError):
    """An experiment configuration is invalid; the message names the field."""


class CellError(HypersonicError):
    """A sweep cell failed; the message identifies the cell and the original error."""

    def __init__(self, cell: str, cause: BaseException) -> None:
        super().__init__(f"cell {cell}: {type(cause).__name__}: {cause}")
        self.cell = cell
        self.cause = cause
