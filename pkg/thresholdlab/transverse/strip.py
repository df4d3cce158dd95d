"""Dirichlet strip cross-section (0, pi) with sine modes."""

from __future__ import annotations

import math

import numpy as np

from thresholdlab.core.errors import InvalidArgumentError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import TransverseMode, TransverseSpectrum

from .base import TransverseModel

LOGGER = get_logger(__name__)

_NORM = math.sqrt(2.0 / math.pi)


def _sine_mode(j: int):
    def _evaluate(x: np.ndarray) -> np.ndarray:
        inside = (x >= 0.0) & (x <= math.pi)
        return np.where(inside, _NORM * np.sin(j * x), 0.0)

    return _evaluate


def build_strip_spectrum(m: int) -> TransverseSpectrum:
    """Modes ``sqrt(2/pi) sin(j x1)`` with eigenvalues ``j**2``."""

    if m < 1:
        raise InvalidArgumentError(f"Strip spectrum needs m >= 1, got {m}")
    modes = tuple(
        TransverseMode(index=j, eigenvalue=float(j * j), eigenfunction=_sine_mode(j), kind="strip_sine")
        for j in range(1, m + 1)
    )
    return TransverseSpectrum(modes=modes, geometry="interval_0_pi", domain=(0.0, math.pi))


class StripModel(TransverseModel):
    """Waveguide ``(0, pi) x R`` with Dirichlet walls."""

    name = "strip"
    geometry = "interval_0_pi"

    def spectrum(self, m: int) -> TransverseSpectrum:
        return build_strip_spectrum(m)

    def transverse_nodes(self, n1: int, m: int) -> np.ndarray:
        h = math.pi / (n1 + 1)
        return h * np.arange(1, n1 + 1, dtype=float)

    def discrete_threshold(self, p: int, n1: int, m: int) -> float:
        h = math.pi / (n1 + 1)
        return (2.0 / h * math.sin(p * h / 2.0)) ** 2


__all__ = ["StripModel", "build_strip_spectrum"]
