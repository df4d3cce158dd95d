"""Harmonic-trap cross-section ``-d^2/dx1^2 + x1^2`` on the real line."""

from __future__ import annotations

import math

import numpy as np

from thresholdlab.core.errors import InvalidArgumentError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import TransverseMode, TransverseSpectrum

from .base import TransverseModel

LOGGER = get_logger(__name__)


def hermite_polynomial(n: int, t: np.ndarray | float) -> np.ndarray:
    """Physicists' Hermite polynomial by ``H_{k+1} = 2t H_k - 2k H_{k-1}``."""

    t = np.asarray(t, dtype=float)
    prev, cur = np.zeros_like(t), np.ones_like(t)
    for k in range(n):
        prev, cur = cur, 2.0 * t * cur - 2.0 * k * prev
    return cur


def hermite_function(p: int, t: np.ndarray | float) -> np.ndarray:
    """Normalized ``exp(-t^2/2) H_p(t) / sqrt(2^p p! sqrt(pi))`` for 0-based ``p``.

    The recurrence carries the normalized functions directly, so no factorials appear.
    """

    t = np.asarray(t, dtype=float)
    prev = np.zeros_like(t)
    cur = math.pi ** -0.25 * np.exp(-0.5 * t * t)
    for n in range(p):
        prev, cur = cur, math.sqrt(2.0 / (n + 1)) * t * cur - math.sqrt(n / (n + 1)) * prev
    return cur


def _hermite_mode(p: int):
    def _evaluate(x: np.ndarray) -> np.ndarray:
        return hermite_function(p, x)

    return _evaluate


def build_oscillator_spectrum(m: int) -> TransverseSpectrum:
    """Modes with 1-based index ``j`` carry ``Lambda_j = 2j - 1``."""

    if m < 1:
        raise InvalidArgumentError(f"Oscillator spectrum needs m >= 1, got {m}")
    modes = tuple(
        TransverseMode(
            index=p + 1, eigenvalue=float(2 * p + 1), eigenfunction=_hermite_mode(p), kind="hermite_gauss"
        )
        for p in range(m)
    )
    return TransverseSpectrum(modes=modes, geometry="real_line_trap", domain=(-math.inf, math.inf))


def truncation_halfwidth(m: int) -> float:
    """Transverse half-width ``max(8, 2 sqrt(Lambda_m))`` for the finite-difference grid."""

    return max(8.0, 2.0 * math.sqrt(2 * m - 1))


class OscillatorModel(TransverseModel):
    """Waveguide ``R x R`` with a quadratic transverse trap."""

    name = "oscillator"
    geometry = "real_line_trap"

    def spectrum(self, m: int) -> TransverseSpectrum:
        return build_oscillator_spectrum(m)

    def transverse_nodes(self, n1: int, m: int) -> np.ndarray:
        half = truncation_halfwidth(m)
        h = 2.0 * half / (n1 + 1)
        return -half + h * np.arange(1, n1 + 1, dtype=float)

    def confinement(self, x1: np.ndarray) -> np.ndarray:
        return x1 * x1


__all__ = [
    "OscillatorModel",
    "build_oscillator_spectrum",
    "hermite_function",
    "hermite_polynomial",
    "truncation_halfwidth",
]
