"""Direct search for the eigenvalue a prediction announces, and localization metrics."""

from __future__ import annotations

from typing import Optional, Union

import numpy as np

from thresholdlab.core.config import SolverConfig
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import (
    AbsenceReport,
    EigenResult,
    FarBoundary,
    PerturbationPair,
    SpectralPrediction,
    ThresholdGroup,
)
from thresholdlab.spectral.potentials import support_box
from thresholdlab.transverse.base import TransverseModel

from .eigensolver import solve_near
from .grid import QuasiGrid, build_quasi_grid
from .operator import DiscreteOperator, assemble_operator

LOGGER = get_logger(__name__)

MAX_TAIL_MASS = 0.05
WINDOW_FLOOR = 1e-6

Outcome = Union[EigenResult, AbsenceReport]


def choose_far_bc(eps: float, solver: SolverConfig) -> FarBoundary:
    """Neumann ends for small ``eps`` (slowly decaying tails), Dirichlet otherwise."""

    if solver.far_bc != "auto":
        return solver.far_bc
    return "neumann" if eps < solver.neumann_below else "dirichlet"


def acceptance_window(eps: float) -> float:
    return max(10.0 * eps**3, WINDOW_FLOOR)


def direct_operator(
    model: TransverseModel,
    pair: PerturbationPair,
    eps: float,
    m: int,
    solver: SolverConfig,
    far_bc: Optional[FarBoundary] = None,
) -> DiscreteOperator:
    box = support_box(pair)
    halfwidth = 0.0 if box.empty else max(abs(box.x2[0]), abs(box.x2[1]))
    grid = build_quasi_grid(
        solver.n1,
        solver.n2,
        solver.x0,
        solver.sigma,
        far_bc=far_bc or choose_far_bc(eps, solver),
        x1_nodes=model.transverse_nodes(solver.n1, m),
        support_halfwidth=halfwidth,
        min_cells_per_unit=solver.min_cells_per_unit,
        max_step_ratio=solver.max_step_ratio,
    )
    return assemble_operator(model, pair, eps, grid, m)


def threshold_shift(model: TransverseModel, group: ThresholdGroup, n1: int, m: int) -> float:
    """``Lambda_p - Lambda_p^h``: moves discrete eigenvalues onto the exact threshold scale."""

    return group.value - model.discrete_threshold(group.start, n1, m)


def in_continuum(lam: complex, group: ThresholdGroup, margin: float) -> bool:
    """True when ``lam`` lies on the essential spectrum ``[Lambda_1, inf)`` of a bottom threshold."""

    return group.is_bottom and complex(lam).real >= group.value - margin


def find_emergent_state(
    model: TransverseModel,
    pair: PerturbationPair,
    eps: float,
    group: ThresholdGroup,
    prediction: SpectralPrediction,
    solver: Optional[SolverConfig] = None,
    m: int = 8,
    target: Optional[complex] = None,
) -> Outcome:
    """Eigenpair matching ``prediction`` at ``eps``, or an absence report listing nearby candidates."""

    solver = solver or SolverConfig()
    lam_pred = complex(prediction.lam(eps) if target is None else target)
    operator = direct_operator(model, pair, eps, m, solver)
    shift = threshold_shift(model, group, solver.n1, m)
    results = solve_near(
        operator,
        lam_pred - shift,
        count=solver.count,
        tol=solver.tol,
        ncv=solver.ncv,
        restarts=solver.restarts,
        threshold_shift=shift,
    )
    window = acceptance_window(eps)
    bound = [r for r in results if not in_continuum(r.lam, group, solver.tol)]
    continuum = len(results) - len(bound)
    accepted = [r for r in bound if abs(r.lam - lam_pred) < window and r.tail_mass < MAX_TAIL_MASS]
    if accepted:
        best = min(accepted, key=lambda r: abs(r.lam - lam_pred))
        LOGGER.info(
            "Emergent state found",
            extra={"eps": eps, "lam": best.lam, "predicted": lam_pred, "tail_mass": best.tail_mass},
        )
        return best

    nearest = results[0]
    reason = (
        f"nearest candidate {nearest.lam:.6g} misses by {abs(nearest.lam - lam_pred):.2e}"
        f" (window {window:.1e}) with tail mass {nearest.tail_mass:.3f}"
    )
    if continuum:
        reason += f"; {continuum} candidate(s) at or above threshold {group.value:g} rejected as continuum"
    LOGGER.warning(
        "No eigenvalue accepted near prediction",
        extra={"eps": eps, "predicted": lam_pred, "reason": reason, "continuum": continuum},
    )
    return AbsenceReport(
        target=lam_pred,
        window=window,
        candidates=tuple(r.lam for r in results),
        reason=reason,
    )


def verify_absence(
    model: TransverseModel,
    pair: PerturbationPair,
    eps: float,
    group: ThresholdGroup,
    prediction: SpectralPrediction,
    solver: Optional[SolverConfig] = None,
    m: int = 8,
) -> Outcome:
    """Confirms that no discrete eigenvalue sits where a resonance is predicted."""

    outcome = find_emergent_state(model, pair, eps, group, prediction, solver, m)
    if isinstance(outcome, EigenResult):
        LOGGER.warning(
            "Eigenvalue found where a resonance was predicted",
            extra={"eps": eps, "lam": outcome.lam, "cluster": prediction.pole.cluster},
        )
    return outcome


def localization_report(result: EigenResult, grid: QuasiGrid) -> dict[str, float]:
    """Tail mass and an exponential decay rate fitted on the outer half of the axial domain."""

    values = np.asarray(result.eigenvector).reshape(grid.n2, grid.n1) / np.sqrt(grid.cell_weights)[:, None]
    transverse_norm = np.sqrt(np.sum(np.abs(values) ** 2, axis=1) * grid.h1)
    distance = np.abs(grid.x2_nodes)
    window = (distance >= 0.5 * grid.x0) & (distance <= 0.95 * grid.x0) & (transverse_norm > 0)
    rate = float("nan")
    if np.count_nonzero(window) >= 2:
        slope, _ = np.polyfit(distance[window], np.log(transverse_norm[window]), 1)
        rate = float(-slope)
    return {"tail_mass": float(result.tail_mass), "decay_rate_estimate": rate}


__all__ = [
    "MAX_TAIL_MASS",
    "Outcome",
    "acceptance_window",
    "choose_far_bc",
    "direct_operator",
    "find_emergent_state",
    "in_continuum",
    "localization_report",
    "threshold_shift",
    "verify_absence",
]
