"""Evaluation, symmetry checks and support boxes of perturbing potentials."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from thresholdlab.core.config import ExperimentConfig, PotentialConfig
from thresholdlab.core.errors import InvalidArgumentError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import (
    BoxPotential,
    GridPotential,
    PerturbationPair,
    PotentialSpec,
    SupportBox,
    TrigSeriesPotential,
)

LOGGER = get_logger(__name__)


def _trig_values(V: TrigSeriesPotential, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    w1 = np.zeros(np.broadcast(x1, x2).shape)
    w2 = np.zeros_like(w1)
    for j, coeff in enumerate(V.a, start=1):
        if coeff:
            w1 = w1 - coeff * np.sin(j * x1) * np.cos(x2 / 2.0)
    for j, coeff in enumerate(V.b, start=1):
        if coeff:
            w2 = w2 + coeff * np.sin(j * x1) * np.sin(x2)
    inside = (np.abs(x2) <= V.support_halfwidth) & (x1 >= 0.0) & (x1 <= math.pi)
    return np.where(inside, w1 + 1j * w2, 0.0)


def _grid_values(V: GridPotential, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    points = np.stack(np.broadcast_arrays(x1, x2), axis=-1)
    values = np.asarray(V.values, dtype=complex)
    parts = []
    for component in (values.real, values.imag):
        interpolant = RegularGridInterpolator(
            (V.x1, V.x2), component, method="linear", bounds_error=False, fill_value=0.0
        )
        parts.append(interpolant(points))
    return parts[0] + 1j * parts[1]


def _box_values(V: BoxPotential, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    inside = (
        (x1 >= V.x1_range[0]) & (x1 <= V.x1_range[1]) & (x2 >= V.x2_range[0]) & (x2 <= V.x2_range[1])
    )
    return np.where(inside, complex(V.amplitude), 0.0 + 0.0j)


def evaluate_potential(V: Optional[PotentialSpec], x1, x2):
    """Complex potential values at ``(x1, x2)``; arrays broadcast, scalars return ``complex``.

    Values are exactly zero outside the support box.
    """

    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if V is None:
        values = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
    elif isinstance(V, TrigSeriesPotential):
        values = _trig_values(V, x1, x2)
    elif isinstance(V, GridPotential):
        values = _grid_values(V, x1, x2)
    elif isinstance(V, BoxPotential):
        values = _box_values(V, x1, x2)
    else:
        raise TypeError(f"Unsupported potential type {type(V).__name__}")
    values = np.asarray(values, dtype=complex)
    if values.ndim == 0:
        return complex(values)
    return values


def potential_support(V: Optional[PotentialSpec]) -> SupportBox:
    """Declared support rectangle of a single potential."""

    if V is None:
        return SupportBox(x1=(0.0, 0.0), x2=(0.0, 0.0))
    if isinstance(V, TrigSeriesPotential):
        h = V.support_halfwidth
        return SupportBox(x1=(0.0, math.pi), x2=(-h, h))
    if isinstance(V, GridPotential):
        return SupportBox(
            x1=(float(V.x1[0]), float(V.x1[-1])), x2=(float(V.x2[0]), float(V.x2[-1]))
        )
    if isinstance(V, BoxPotential):
        return SupportBox(x1=tuple(V.x1_range), x2=tuple(V.x2_range))
    raise TypeError(f"Unsupported potential type {type(V).__name__}")


def support_box(pair: PerturbationPair) -> SupportBox:
    """Smallest rectangle outside which both potentials vanish."""

    return potential_support(pair.v1).union(potential_support(pair.v2))


def axial_breakpoints(V: Optional[PotentialSpec]) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates where ``V`` may lose smoothness, per axis, inside its support."""

    box = potential_support(V)
    if isinstance(V, GridPotential):
        return np.asarray(V.x1, dtype=float), np.asarray(V.x2, dtype=float)
    return np.array(box.x1), np.array(box.x2)


def check_pt_symmetry(
    V: Optional[PotentialSpec], tol: float = 1e-12, samples: int = 41
) -> tuple[bool, float]:
    """Test ``V(x1, -x2) = conj(V(x1, x2))`` on a sample grid covering the support.

    Returns the verdict and the largest violation found.
    """

    if tol <= 0:
        raise InvalidArgumentError(f"PT tolerance must be positive, got {tol}")
    box = potential_support(V)
    if box.empty:
        return True, 0.0
    reach = max(abs(box.x2[0]), abs(box.x2[1]))
    x1 = np.linspace(box.x1[0], box.x1[1], samples)
    x2 = np.linspace(-reach, reach, 2 * samples + 1)
    g1, g2 = np.meshgrid(x1, x2, indexing="ij")
    violation = float(np.max(np.abs(evaluate_potential(V, g1, -g2) - np.conj(evaluate_potential(V, g1, g2)))))
    verdict = violation <= tol
    LOGGER.debug("PT symmetry check", extra={"violation": violation, "verdict": verdict})
    return verdict, violation


def scaled_potential(V: PotentialSpec, factor: float) -> PotentialSpec:
    """Return ``factor * V`` in the same representation."""

    if isinstance(V, TrigSeriesPotential):
        return TrigSeriesPotential(
            a=tuple(factor * c for c in V.a), b=tuple(factor * c for c in V.b), support_halfwidth=V.support_halfwidth
        )
    if isinstance(V, GridPotential):
        return GridPotential(x1=V.x1, x2=V.x2, values=factor * np.asarray(V.values, dtype=complex))
    if isinstance(V, BoxPotential):
        return BoxPotential(amplitude=factor * complex(V.amplitude), x1_range=V.x1_range, x2_range=V.x2_range)
    raise TypeError(f"Unsupported potential type {type(V).__name__}")


def potential_from_config(cfg: PotentialConfig) -> PotentialSpec:
    """Build a potential from its configuration block."""

    if cfg.form == "trig":
        return TrigSeriesPotential(a=tuple(cfg.a), b=tuple(cfg.b), support_halfwidth=cfg.support_halfwidth)
    if cfg.form == "box":
        assert cfg.x1_range is not None and cfg.x2_range is not None
        return BoxPotential(amplitude=cfg.amplitude_complex, x1_range=cfg.x1_range, x2_range=cfg.x2_range)
    assert cfg.file is not None
    with np.load(cfg.file) as data:
        x1 = np.asarray(data["x1"], dtype=float)
        x2 = np.asarray(data["x2"], dtype=float)
        values = np.asarray(data["values"], dtype=complex)
    if values.shape != (x1.size, x2.size):
        raise InvalidArgumentError(
            f"Grid potential {cfg.file} has values {values.shape} for axes ({x1.size}, {x2.size})"
        )
    return GridPotential(x1=x1, x2=x2, values=values)


def pair_from_config(config: ExperimentConfig) -> PerturbationPair:
    v2 = potential_from_config(config.potential2) if config.potential2 is not None else None
    return PerturbationPair(v1=potential_from_config(config.potential), v2=v2)


__all__ = [
    "axial_breakpoints",
    "check_pt_symmetry",
    "evaluate_potential",
    "pair_from_config",
    "potential_from_config",
    "potential_support",
    "scaled_potential",
    "support_box",
]
