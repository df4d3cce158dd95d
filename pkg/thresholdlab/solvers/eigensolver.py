"""Shift-invert Arnoldi on a banded LU for eigenvalues near a complex target."""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigs

from thresholdlab.core.errors import InvalidArgumentError, IterationLimitError, NumericalFailureError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import EigenResult

from .banded import BandedLU
from .operator import DiscreteOperator

LOGGER = get_logger(__name__)

SHIFT_PERTURBATION = 1e-6j
MAX_SHIFT_RETRIES = 3
REFINE_STEPS = 8


def factorize_shifted(operator: DiscreteOperator, target: complex) -> tuple[BandedLU, complex]:
    """LU of ``A - shift``; a singular shift is nudged by ``1e-6 i`` up to three times."""

    shift = complex(target)
    identity = sparse.identity(operator.dimension, format="csr")
    attempt = 0
    while True:
        try:
            lu = BandedLU(operator.matrix - shift * identity, operator.bandwidth, operator.bandwidth)
            return lu, shift
        except NumericalFailureError as exc:
            attempt += 1
            if attempt > MAX_SHIFT_RETRIES:
                raise NumericalFailureError(
                    f"Shifted LU failed after {MAX_SHIFT_RETRIES} perturbations of {target}"
                ) from exc
            LOGGER.warning(
                "Shifted LU broke down, perturbing shift", extra={"shift": shift, "attempt": attempt}
            )
            shift += SHIFT_PERTURBATION


def tail_fraction(vector: np.ndarray, operator: DiscreteOperator, fraction: float = 0.2) -> float:
    """Share of ``|psi|^2`` on axial nodes with ``|x2| >= (1 - fraction) x0``."""

    grid = operator.grid
    density = np.abs(np.asarray(vector).reshape(grid.n2, grid.n1)) ** 2
    axial = density.sum(axis=1)
    outer = np.abs(grid.x2_nodes) >= (1.0 - fraction) * grid.x0
    total = float(axial.sum())
    return float(axial[outer].sum() / total) if total > 0 else 0.0


def _residual(matrix: sparse.csr_matrix, lam: complex, vector: np.ndarray) -> float:
    return float(np.linalg.norm(matrix @ vector - lam * vector) / np.linalg.norm(vector))


def _refine(
    matrix: sparse.csr_matrix, lu: BandedLU, lam: complex, vector: np.ndarray, tol: float
) -> tuple[complex, np.ndarray, float]:
    """Inverse iteration with the existing factorization and Rayleigh-quotient updates."""

    best = (lam, vector, _residual(matrix, lam, vector))
    for _ in range(REFINE_STEPS):
        if best[2] <= tol:
            break
        vector = lu.solve(best[1])
        vector /= np.linalg.norm(vector)
        lam = complex(np.vdot(vector, matrix @ vector))
        residual = _residual(matrix, lam, vector)
        if residual < best[2]:
            best = (lam, vector, residual)
    return best


def solve_near(
    operator: DiscreteOperator,
    target: complex,
    count: int = 4,
    tol: float = 1e-9,
    ncv: int = 40,
    restarts: int = 5,
    threshold_shift: float = 0.0,
) -> list[EigenResult]:
    """The ``count`` eigenpairs closest to ``target`` with residual at most ``tol``.

    ``threshold_shift`` is added to each eigenvalue to form ``EigenResult.lam``; the raw
    discrete value is kept in ``raw_lam``.
    """

    if count < 1:
        raise InvalidArgumentError(f"count must be >= 1, got {count}")
    n = operator.dimension
    k = min(count, n - 2)
    lu, shift = factorize_shifted(operator, target)
    inverse = LinearOperator((n, n), matvec=lu.solve, dtype=complex)
    subspace = min(n, max(ncv, 2 * k + 1))
    start = np.ones(n, dtype=complex)

    try:
        nu, vectors = eigs(
            inverse, k=k, which="LM", ncv=subspace, maxiter=restarts * subspace, tol=tol * 1e-3, v0=start
        )
    except ArpackNoConvergence as exc:
        nu, vectors = exc.eigenvalues, exc.eigenvectors
        LOGGER.warning("Arnoldi stopped early, refining partial pairs", extra={"converged": len(nu)})
        if len(nu) == 0:
            raise IterationLimitError("Arnoldi produced no converged eigenpair", float("inf")) from exc
    except ArpackError as exc:
        raise NumericalFailureError(f"Arnoldi failed: {exc}") from exc

    matrix = operator.matrix
    results: list[EigenResult] = []
    best_residual = float("inf")
    for value, vector in zip(nu, vectors.T):
        if value == 0:
            continue
        guess = shift + 1.0 / complex(value)
        lam, vector, residual = _refine(matrix, lu, guess, vector / np.linalg.norm(vector), tol)
        best_residual = min(best_residual, residual)
        if residual > tol:
            LOGGER.debug("Discarding unconverged pair", extra={"lam": lam, "residual": residual})
            continue
        pivot = vector[int(np.argmax(np.abs(vector)))]
        vector = vector * (abs(pivot) / pivot)
        results.append(
            EigenResult(
                lam=lam + threshold_shift,
                eigenvector=vector,
                residual=residual,
                tail_mass=tail_fraction(vector, operator),
                raw_lam=lam,
                threshold_shift=threshold_shift,
            )
        )
    if not results:
        raise IterationLimitError(f"No eigenpair near {target} met tolerance {tol:.1e}", best_residual)

    results.sort(key=lambda res: (abs(res.raw_lam - target), res.raw_lam.real, res.raw_lam.imag))
    LOGGER.info(
        "Shift-invert solve finished",
        extra={
            "target": target,
            "found": len(results),
            "nearest": results[0].lam,
            "residual": results[0].residual,
        },
    )
    return results


__all__ = [
    "MAX_SHIFT_RETRIES",
    "SHIFT_PERTURBATION",
    "factorize_shifted",
    "solve_near",
    "tail_fraction",
]
