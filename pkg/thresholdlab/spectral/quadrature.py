"""Panelized Gauss-Legendre rules in one and two dimensions."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from thresholdlab.core.errors import AccuracyError, InvalidArgumentError
from thresholdlab.core.logger import get_logger

LOGGER = get_logger(__name__)


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[-1, 1]``; exact for polynomials of degree ``2*order - 1``."""

    if order < 1:
        raise InvalidArgumentError(f"Gauss-Legendre order must be positive, got {order}")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_edges(a: float, b: float, panels: int, breaks: Optional[Iterable[float]] = None) -> np.ndarray:
    """Uniform panel edges on ``[a, b]`` merged with interior ``breaks``."""

    edges = np.linspace(a, b, panels + 1)
    if breaks is not None:
        inner = [float(x) for x in breaks if a < x < b]
        edges = np.union1d(edges, inner)
    return edges


def panel_rule(
    a: float,
    b: float,
    panels: int = 1,
    order: int = 32,
    breaks: Optional[Iterable[float]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on ``[a, b]`` split into uniform panels and at ``breaks``."""

    if not b > a:
        return np.empty(0), np.empty(0)
    edges = panel_edges(a, b, panels, breaks)
    nodes, weights = gauss_legendre(order)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    return (mid + half * nodes).ravel(), (half * weights).ravel()


def tensor_integral(
    func: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x1_interval: tuple[float, float],
    x2_interval: tuple[float, float],
    panels: int,
    order: int,
    breaks1: Optional[Iterable[float]] = None,
    breaks2: Optional[Iterable[float]] = None,
) -> complex:
    """Integrate ``func(x1, x2)`` over a rectangle with a tensor-product rule."""

    n1, w1 = panel_rule(*x1_interval, panels=panels, order=order, breaks=breaks1)
    n2, w2 = panel_rule(*x2_interval, panels=panels, order=order, breaks=breaks2)
    if n1.size == 0 or n2.size == 0:
        return 0j
    values = func(n1[:, None], n2[None, :])
    return complex(w1 @ values @ w2)


def adaptive_tensor_integral(
    func: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x1_interval: tuple[float, float],
    x2_interval: tuple[float, float],
    order: int = 32,
    panels: int = 1,
    max_panels: int = 64,
    tol: float = 1e-10,
    breaks1: Optional[Iterable[float]] = None,
    breaks2: Optional[Iterable[float]] = None,
) -> tuple[complex, float]:
    """Double the panel count until successive estimates agree to ``tol*(1+|I|)``.

    Returns the refined value and the error estimate.
    """

    b1 = None if breaks1 is None else list(breaks1)
    b2 = None if breaks2 is None else list(breaks2)
    estimates = [tensor_integral(func, x1_interval, x2_interval, panels, order, b1, b2)]
    count = panels
    while 2 * count <= max_panels:
        count *= 2
        estimates.append(tensor_integral(func, x1_interval, x2_interval, count, order, b1, b2))
        error = abs(estimates[-1] - estimates[-2])
        if error <= tol * (1.0 + abs(estimates[-1])):
            return estimates[-1], error
    raise AccuracyError(f"Quadrature did not converge with {count} panels", estimates[-2:])


__all__ = [
    "adaptive_tensor_integral",
    "gauss_legendre",
    "panel_edges",
    "panel_rule",
    "tensor_integral",
]
