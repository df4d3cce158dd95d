"""Small dense eigenvalue utilities: QR eigenvalues, Durand-Kerner roots, clustering."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from thresholdlab.core.errors import InvalidArgumentError, NumericalFailureError
from thresholdlab.core.logger import get_logger

LOGGER = get_logger(__name__)


def qr_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues by Hessenberg reduction followed by shifted QR iteration (LAPACK)."""

    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidArgumentError(f"Expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NumericalFailureError("Matrix contains non-finite entries")
    hess = scipy.linalg.hessenberg(matrix)
    try:
        values = scipy.linalg.eigvals(hess, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"QR iteration did not converge: {exc}") from exc
    return values


def durand_kerner(coefficients: Sequence[complex], tol: float = 1e-14, max_iter: int = 1000) -> np.ndarray:
    """Roots of a polynomial given highest-degree coefficient first.

    Simultaneous Weierstrass iteration followed by two Newton polishing steps.
    """

    coeffs = np.asarray(coefficients, dtype=complex)
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        raise InvalidArgumentError("Zero polynomial has no well-defined roots")
    coeffs = coeffs[nz[0] :] / coeffs[nz[0]]
    degree = coeffs.size - 1
    if degree == 0:
        return np.empty(0, dtype=complex)

    radius = 1.0 + float(np.max(np.abs(coeffs[1:])))
    roots = radius * (0.4 + 0.9j) ** np.arange(degree)
    for _ in range(max_iter):
        diffs = roots[:, None] - roots[None, :]
        np.fill_diagonal(diffs, 1.0)
        step = np.polyval(coeffs, roots) / np.prod(diffs, axis=1)
        roots = roots - step
        if np.max(np.abs(step)) <= tol * (1.0 + np.max(np.abs(roots))):
            break
    else:
        raise NumericalFailureError(f"Durand-Kerner did not converge in {max_iter} iterations")

    derivative = np.polyder(coeffs)
    for _ in range(2):
        slope = np.polyval(derivative, roots)
        safe = np.abs(slope) > 0
        roots[safe] -= np.polyval(coeffs, roots[safe]) / slope[safe]
    return roots


def characteristic_roots(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues as roots of the characteristic polynomial (small matrices only)."""

    return durand_kerner(np.poly(np.asarray(matrix, dtype=complex)))


def cluster_values(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Single-linkage clusters of complex numbers closer than ``tol``, sorted by centre."""

    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return []
    adjacency = csr_matrix(np.abs(values[:, None] - values[None, :]) <= tol)
    count, labels = connected_components(adjacency, directed=False)
    clusters = [np.flatnonzero(labels == label) for label in range(count)]
    clusters.sort(key=lambda idx: (round(float(values[idx].mean().real), 12), float(values[idx].mean().imag)))
    return clusters


def inverse_iteration(matrix: np.ndarray, mu: complex, iterations: int = 4) -> np.ndarray:
    """Unit eigenvector for a simple eigenvalue ``mu``, largest component real positive."""

    matrix = np.asarray(matrix, dtype=complex)
    n = matrix.shape[0]
    offset = 1e-10 * (1.0 + np.linalg.norm(matrix, 2)) * (1.0 + 1.0j)
    lu = scipy.linalg.lu_factor(matrix - (mu + offset) * np.eye(n))
    vector = np.ones(n, dtype=complex) + 0.1j * np.arange(n)
    for _ in range(iterations):
        vector = scipy.linalg.lu_solve(lu, vector)
        norm = np.linalg.norm(vector)
        if not np.isfinite(norm) or norm == 0.0:
            raise NumericalFailureError(f"Inverse iteration broke down near mu={mu}")
        vector /= norm
    pivot = vector[int(np.argmax(np.abs(vector)))]
    return vector * (abs(pivot) / pivot)


def match_values(reference: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Permutation of ``candidates`` minimizing the total distance to ``reference``."""

    reference = np.asarray(reference, dtype=complex)
    candidates = np.asarray(candidates, dtype=complex)
    cost = np.abs(reference[:, None] - candidates[None, :])
    rows, cols = linear_sum_assignment(cost)
    order = np.empty(reference.size, dtype=int)
    order[rows] = cols
    return candidates[order]


def multiset_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest pairwise distance after optimal matching of two equally sized multisets."""

    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        raise InvalidArgumentError(f"Multisets differ in size: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - match_values(a, b))))


__all__ = [
    "characteristic_roots",
    "cluster_values",
    "durand_kerner",
    "inverse_iteration",
    "match_values",
    "multiset_distance",
    "qr_eigenvalues",
]
