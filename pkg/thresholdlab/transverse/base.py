"""Abstract base for transverse cross-section models."""

from __future__ import annotations

import abc
from typing import Optional

import numpy as np
from scipy import sparse

from thresholdlab.core.errors import DomainError, InvalidArgumentError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import Geometry, ThresholdGroup, TransverseSpectrum

LOGGER = get_logger(__name__)


class TransverseModel(abc.ABC):
    """Defines the interface the spectral and solver layers use for a cross-section."""

    name: str = "generic"
    geometry: Geometry

    @abc.abstractmethod
    def spectrum(self, m: int) -> TransverseSpectrum:
        """Return the first ``m`` transverse eigenpairs."""

    def transverse_nodes(self, n1: int, m: int) -> np.ndarray:
        """Interior nodes of the uniform transverse grid used by the direct solver."""

        raise DomainError(f"The {self.name} model has no finite-difference discretization")

    def transverse_operator(self, n1: int, m: int) -> sparse.csr_matrix:
        """Tridiagonal ``-d^2/dx1^2`` (plus any confining term) on :meth:`transverse_nodes`."""

        nodes = self.transverse_nodes(n1, m)
        h = float(nodes[1] - nodes[0])
        main = np.full(n1, 2.0 / h**2) + self.confinement(nodes)
        off = np.full(n1 - 1, -1.0 / h**2)
        return sparse.diags([off, main, off], [-1, 0, 1], format="csr")

    def confinement(self, x1: np.ndarray) -> np.ndarray:
        """Potential term of the transverse operator; zero unless the model traps."""

        return np.zeros_like(x1)

    def discrete_threshold(self, p: int, n1: int, m: int) -> float:
        """Eigenvalue ``p`` of :meth:`transverse_operator`."""

        from scipy.linalg import eigvalsh_tridiagonal

        operator = self.transverse_operator(n1, m)
        values = eigvalsh_tridiagonal(
            operator.diagonal(), operator.diagonal(1), select="i", select_range=(p - 1, p - 1)
        )
        return float(values[0])


def group_thresholds(spectrum: TransverseSpectrum, tol: Optional[float] = None) -> list[ThresholdGroup]:
    """Partition mode indices into maximal runs of equal eigenvalues.

    Neighbours are chained when they differ by at most ``tol``; without ``tol`` the
    band is ``1e-9*max(1, |Lambda|)``.
    """

    if tol is not None and tol <= 0:
        raise InvalidArgumentError(f"Grouping tolerance must be positive, got {tol}")

    values = spectrum.eigenvalues
    groups: list[ThresholdGroup] = []
    start = 0
    for idx in range(1, len(values) + 1):
        if idx < len(values):
            band = tol if tol is not None else 1e-9 * max(1.0, abs(values[idx - 1]))
            if abs(values[idx] - values[idx - 1]) <= band:
                continue
        groups.append(
            ThresholdGroup(
                start=start + 1,
                multiplicity=idx - start,
                value=float(values[start]),
                is_bottom=start == 0,
            )
        )
        start = idx
    LOGGER.debug("Grouped thresholds", extra={"groups": len(groups), "modes": spectrum.count})
    return groups


def group_at(spectrum: TransverseSpectrum, p: int, tol: Optional[float] = None) -> ThresholdGroup:
    """Return the threshold group starting at mode ``p``."""

    for group in group_thresholds(spectrum, tol):
        if group.start == p:
            return group
        if p in group.indices:
            raise InvalidArgumentError(
                f"Mode {p} lies inside the group starting at {group.start}; use p={group.start}"
            )
    raise InvalidArgumentError(f"Threshold index {p} outside 1..{spectrum.count}")


__all__ = ["TransverseModel", "group_at", "group_thresholds"]
