"""Five-point finite-difference operator ``-Laplace (+ trap) + eps V1 + eps^2 V2``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import sparse

from thresholdlab.core.errors import DomainError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import PerturbationPair
from thresholdlab.spectral.potentials import evaluate_potential, support_box
from thresholdlab.transverse.base import TransverseModel

from .grid import QuasiGrid

LOGGER = get_logger(__name__)


@dataclass(slots=True)
class DiscreteOperator:
    """Complex matrix of bandwidth ``n1`` with unknowns ordered ``x1`` fastest."""

    matrix: sparse.csr_matrix = field(repr=False)
    grid: QuasiGrid = field(repr=False)
    eps: float
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def bandwidth(self) -> int:
        return self.grid.n1

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])


def axial_stiffness(grid: QuasiGrid) -> sparse.csr_matrix:
    """Symmetric matrix with ``(K u)_i = (u_i - u_{i-1})/h_- + (u_i - u_{i+1})/h_+``.

    At a Neumann end only the inner flux remains, which equals the mirror-ghost stencil.
    """

    steps = grid.axial_steps
    inv = 1.0 / steps
    if grid.far_bc == "dirichlet":
        main = inv[:-1] + inv[1:]
        off = -inv[1:-1]
    else:
        main = np.zeros(grid.n2)
        main[:-1] += inv
        main[1:] += inv
        off = -inv
    return sparse.diags([off, main, off], [-1, 0, 1], format="csr")


def axial_second_difference(grid: QuasiGrid) -> sparse.csr_matrix:
    """Non-uniform three-point ``-d^2/dx2^2``; exact on quadratics at interior nodes."""

    return sparse.diags(1.0 / grid.cell_weights) @ axial_stiffness(grid)


def axial_operator(grid: QuasiGrid) -> sparse.csr_matrix:
    """``W^-1/2 K W^-1/2``: the symmetric form of :func:`axial_second_difference`."""

    scale = sparse.diags(1.0 / np.sqrt(grid.cell_weights))
    return (scale @ axial_stiffness(grid) @ scale).tocsr()


def _check_support(model: TransverseModel, pair: PerturbationPair, grid: QuasiGrid) -> None:
    box = support_box(pair)
    if box.empty:
        return
    x1_lo = grid.x1_nodes[0] - grid.h1
    x1_hi = grid.x1_nodes[-1] + grid.h1
    if box.x2[0] < -grid.x0 or box.x2[1] > grid.x0 or box.x1[0] < x1_lo - 1e-12 or box.x1[1] > x1_hi + 1e-12:
        raise DomainError(
            f"Potential support x1={box.x1}, x2={box.x2} exceeds the {model.name} domain"
            f" x1=({x1_lo:.4g}, {x1_hi:.4g}), x2=(-{grid.x0}, {grid.x0})"
        )


def assemble_operator(
    model: TransverseModel,
    pair: PerturbationPair,
    eps: float,
    grid: QuasiGrid,
    m: int,
) -> DiscreteOperator:
    """``kron(A2, I) + kron(I, T1) + diag(eps V1 + eps^2 V2)`` on ``grid``."""

    if model.geometry == "manufactured":
        raise DomainError("Tabulated transverse modes have no finite-difference operator")
    _check_support(model, pair, grid)

    transverse = model.transverse_operator(grid.n1, m)
    laplace = sparse.kron(axial_operator(grid), sparse.identity(grid.n1)) + sparse.kron(
        sparse.identity(grid.n2), transverse
    )
    x1, x2 = np.meshgrid(grid.x1_nodes, grid.x2_nodes)
    potential = eps * evaluate_potential(pair.v1, x1, x2)
    if pair.v2 is not None:
        potential = potential + eps**2 * evaluate_potential(pair.v2, x1, x2)
    matrix = (laplace + sparse.diags(potential.ravel())).astype(complex).tocsr()
    LOGGER.info(
        "Assembled operator",
        extra={"model": model.name, "eps": eps, "dimension": grid.size, "far_bc": grid.far_bc},
    )
    return DiscreteOperator(
        matrix=matrix,
        grid=grid,
        eps=eps,
        metadata={"model": model.name, "potential": type(pair.v1).__name__, "m": m},
    )


__all__ = [
    "DiscreteOperator",
    "assemble_operator",
    "axial_operator",
    "axial_second_difference",
    "axial_stiffness",
]
