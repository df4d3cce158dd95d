"""Quasi-equidistant axial grids stretched by a sinh map."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from thresholdlab.core.errors import DomainError, GridQualityError, InvalidArgumentError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import FarBoundary

LOGGER = get_logger(__name__)

MIN_POINTS = 16


@dataclass(frozen=True, slots=True, eq=False)
class QuasiGrid:
    """Tensor grid: uniform transverse nodes times a stretched symmetric axial grid.

    ``x2_nodes`` are the axial unknowns. With Dirichlet ends the points ``+-x0`` carry the
    zero boundary value and are not unknowns; with Neumann ends they are.
    """

    x1_nodes: np.ndarray = field(repr=False)
    x2_nodes: np.ndarray = field(repr=False)
    far_bc: FarBoundary
    x0: float
    sigma: float

    @property
    def n1(self) -> int:
        return int(self.x1_nodes.size)

    @property
    def n2(self) -> int:
        return int(self.x2_nodes.size)

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    @property
    def h1(self) -> float:
        return float(self.x1_nodes[1] - self.x1_nodes[0])

    @property
    def axial_points(self) -> np.ndarray:
        """Unknowns plus the Dirichlet end points when present."""

        if self.far_bc == "dirichlet":
            return np.concatenate(([-self.x0], self.x2_nodes, [self.x0]))
        return self.x2_nodes

    @property
    def axial_steps(self) -> np.ndarray:
        return np.diff(self.axial_points)

    @property
    def cell_weights(self) -> np.ndarray:
        """Dual-cell lengths of the axial unknowns; half cells at Neumann ends."""

        steps = self.axial_steps
        if self.far_bc == "dirichlet":
            return 0.5 * (steps[:-1] + steps[1:])
        weights = np.empty(self.n2)
        weights[1:-1] = 0.5 * (steps[:-1] + steps[1:])
        weights[0] = 0.5 * steps[0]
        weights[-1] = 0.5 * steps[-1]
        return weights


def stretched_points(count: int, x0: float, sigma: float) -> np.ndarray:
    """``x0 * sinh(sigma t) / sinh(sigma)`` on ``count`` uniform ``t`` in ``[-1, 1]``, exactly odd."""

    t = np.linspace(-1.0, 1.0, count)
    t = 0.5 * (t - t[::-1])
    x = x0 * np.sinh(sigma * t) / math.sinh(sigma)
    return 0.5 * (x - x[::-1])


def step_ratios(points: np.ndarray) -> np.ndarray:
    steps = np.diff(points)
    return np.maximum(steps[1:] / steps[:-1], steps[:-1] / steps[1:])


def build_quasi_grid(
    n1: int,
    n2: int,
    x0: float,
    sigma: float,
    far_bc: FarBoundary = "dirichlet",
    x1_nodes: Optional[np.ndarray] = None,
    support_halfwidth: float = 0.0,
    min_cells_per_unit: float = 16.0,
    max_step_ratio: float = 1.25,
) -> QuasiGrid:
    """Validated quasi-equidistant grid; ``x1_nodes`` defaults to the strip ``(0, pi)``."""

    if n1 < MIN_POINTS or n2 < MIN_POINTS:
        raise InvalidArgumentError(f"Grid needs n1, n2 >= {MIN_POINTS}, got {n1}, {n2}")
    if sigma <= 0 or x0 <= 0:
        raise InvalidArgumentError(f"Stretching sigma and half-length x0 must be positive, got {sigma}, {x0}")
    if far_bc not in ("dirichlet", "neumann"):
        raise InvalidArgumentError(f"Unknown far boundary condition {far_bc!r}")
    if x0 <= support_halfwidth:
        raise DomainError(f"Axial half-length {x0} does not exceed the potential support {support_halfwidth}")

    if x1_nodes is None:
        h = math.pi / (n1 + 1)
        x1_nodes = h * np.arange(1, n1 + 1, dtype=float)
    x1_nodes = np.asarray(x1_nodes, dtype=float)
    if x1_nodes.size != n1:
        raise InvalidArgumentError(f"Expected {n1} transverse nodes, got {x1_nodes.size}")

    if far_bc == "dirichlet":
        points = stretched_points(n2 + 2, x0, sigma)
        x2_nodes = points[1:-1]
    else:
        points = stretched_points(n2, x0, sigma)
        x2_nodes = points

    ratio = float(step_ratios(points).max())
    if ratio > max_step_ratio:
        raise GridQualityError(
            f"Axial step ratio {ratio:.3f} exceeds {max_step_ratio}; increase n2 or decrease sigma"
        )
    steps = np.diff(points)
    mids = 0.5 * (points[1:] + points[:-1])
    central = steps[np.abs(mids) <= max(support_halfwidth, steps.min())]
    coarsest = float(central.max()) if central.size else float(steps.min())
    if coarsest > 1.0 / min_cells_per_unit:
        raise GridQualityError(
            f"Central axial step {coarsest:.4f} resolves fewer than {min_cells_per_unit} cells per unit;"
            " increase n2, decrease x0 or decrease sigma"
        )

    grid = QuasiGrid(
        x1_nodes=x1_nodes,
        x2_nodes=np.ascontiguousarray(x2_nodes),
        far_bc=far_bc,
        x0=x0,
        sigma=sigma,
    )
    LOGGER.debug(
        "Built quasi grid",
        extra={"n1": n1, "n2": n2, "x0": x0, "sigma": sigma, "far_bc": far_bc, "step_ratio": ratio},
    )
    return grid


__all__ = ["MIN_POINTS", "QuasiGrid", "build_quasi_grid", "step_ratios", "stretched_points"]
