"""Exception hierarchy shared by the numerical pipelines and the CLI."""

from __future__ import annotations

from typing import Iterable, Sequence


class ThresholdLabError(Exception):
    """Root of every error raised deliberately by thresholdlab."""


class InvalidArgumentError(ThresholdLabError, ValueError):
    """A caller supplied an argument outside the documented domain."""


class ConfigError(ThresholdLabError, ValueError):
    """Experiment configuration failed validation."""

    def __init__(self, message: str, field_paths: Iterable[str] = ()) -> None:
        self.field_paths = tuple(field_paths)
        if self.field_paths:
            message = f"{message} [{', '.join(self.field_paths)}]"
        super().__init__(message)


class OrthonormalityError(ThresholdLabError, ValueError):
    """Tabulated transverse modes are not orthonormal within tolerance."""

    def __init__(self, pair: tuple[int, int], value: float, tol: float) -> None:
        self.pair = pair
        self.value = value
        super().__init__(
            f"Gram entry for modes {pair[0]} and {pair[1]} is {value:.3e} (tolerance {tol:.1e})"
        )


class DomainError(ThresholdLabError, ValueError):
    """Potential support or requested region falls outside the computational domain."""


class GridQualityError(ThresholdLabError, ValueError):
    """Stretched grid violates resolution or smoothness requirements."""


class AccuracyError(ThresholdLabError, RuntimeError):
    """Quadrature did not reach the requested accuracy within its refinement cap."""

    def __init__(self, message: str, estimates: Sequence[complex]) -> None:
        self.estimates = tuple(estimates)
        super().__init__(f"{message}; last estimates {self.estimates}")


class NumericalFailureError(ThresholdLabError, RuntimeError):
    """A factorization or eigenvalue iteration broke down."""


class IterationLimitError(NumericalFailureError):
    """Iterative eigensolver stopped before meeting its residual tolerance."""

    def __init__(self, message: str, best_residual: float) -> None:
        self.best_residual = best_residual
        super().__init__(f"{message}; best residual {best_residual:.3e}")


class OutputError(ThresholdLabError, OSError):
    """Result files could not be written."""


__all__ = [
    "AccuracyError",
    "ConfigError",
    "DomainError",
    "GridQualityError",
    "InvalidArgumentError",
    "IterationLimitError",
    "NumericalFailureError",
    "OrthonormalityError",
    "OutputError",
    "ThresholdLabError",
]
