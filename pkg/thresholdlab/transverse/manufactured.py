"""User-supplied tabulated transverse modes, interpolated by natural cubic splines."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from thresholdlab.core.errors import InvalidArgumentError, OrthonormalityError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import TransverseMode, TransverseSpectrum

from .base import TransverseModel

LOGGER = get_logger(__name__)

TabulatedFunction = tuple[np.ndarray, np.ndarray]


def _spline_mode(spline: CubicSpline, lo: float, hi: float):
    def _evaluate(x: np.ndarray) -> np.ndarray:
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, spline(np.clip(x, lo, hi)), 0.0)

    return _evaluate


def spline_gram(x: np.ndarray, splines: Sequence[CubicSpline]) -> np.ndarray:
    """Exact Gram matrix of piecewise-cubic interpolants.

    Products of cubics are degree six per interval, which 4-point Gauss-Legendre
    integrates exactly.
    """

    nodes, weights = np.polynomial.legendre.leggauss(4)
    left, right = x[:-1, None], x[1:, None]
    half = 0.5 * (right - left)
    points = (left + right) / 2.0 + half * nodes[None, :]
    w = (half * weights[None, :]).ravel()
    values = np.stack([spline(points.ravel()) for spline in splines])
    return (values * w) @ values.T


def build_manufactured_spectrum(
    modes: Sequence[tuple[float, TabulatedFunction]], tol: float = 1e-8
) -> TransverseSpectrum:
    """Spectrum from ``(Lambda, (x, samples))`` pairs sharing one sample grid."""

    if not modes:
        raise InvalidArgumentError("Manufactured spectrum needs at least one mode")
    x_ref = np.asarray(modes[0][1][0], dtype=float)
    if x_ref.ndim != 1 or x_ref.size < 4 or np.any(np.diff(x_ref) <= 0):
        raise InvalidArgumentError("Sample grid must be strictly increasing with at least 4 points")

    eigenvalues = [float(lam) for lam, _ in modes]
    if any(b < a for a, b in zip(eigenvalues, eigenvalues[1:])):
        raise InvalidArgumentError(f"Manufactured eigenvalues must be non-decreasing: {eigenvalues}")

    splines = []
    for index, (_, (x, samples)) in enumerate(modes, start=1):
        x = np.asarray(x, dtype=float)
        if x.shape != x_ref.shape or not np.array_equal(x, x_ref):
            raise InvalidArgumentError(f"Mode {index} is sampled on a different grid")
        splines.append(CubicSpline(x_ref, np.asarray(samples, dtype=float), bc_type="natural"))

    gram = spline_gram(x_ref, splines)
    deviation = np.abs(gram - np.eye(len(splines)))
    worst = np.unravel_index(int(np.argmax(deviation)), deviation.shape)
    if deviation[worst] > tol:
        raise OrthonormalityError((int(worst[0]) + 1, int(worst[1]) + 1), float(gram[worst]), tol)

    lo, hi = float(x_ref[0]), float(x_ref[-1])
    built = tuple(
        TransverseMode(index=j, eigenvalue=lam, eigenfunction=_spline_mode(spline, lo, hi), kind="tabulated")
        for j, (lam, spline) in enumerate(zip(eigenvalues, splines), start=1)
    )
    LOGGER.info(
        "Built manufactured spectrum",
        extra={"modes": len(built), "max_gram_deviation": float(deviation[worst])},
    )
    return TransverseSpectrum(modes=built, geometry="manufactured", domain=(lo, hi))


def load_mode_table(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a comma separated table whose header is ``x`` followed by one column per mode."""

    with path.open("r", encoding="utf-8") as handle:
        header = [name.strip() for name in handle.readline().split(",")]
    if not header or header[0] != "x":
        raise InvalidArgumentError(f"Mode table {path} must start with an 'x' column")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(header):
        raise InvalidArgumentError(f"Mode table {path} has {data.shape[1]} columns for {len(header)} names")
    return data[:, 0], data[:, 1:].T


class ManufacturedModel(TransverseModel):
    """Tabulated modes loaded from a file; analytic-only, no direct discretization."""

    name = "manufactured"
    geometry = "manufactured"

    def __init__(self, path: Path, eigenvalues: Sequence[float], tol: float = 1e-8) -> None:
        self.path = path
        self.eigenvalues = [float(v) for v in eigenvalues]
        self.tol = tol

    def spectrum(self, m: int) -> TransverseSpectrum:
        x, columns = load_mode_table(self.path)
        if len(columns) != len(self.eigenvalues):
            raise InvalidArgumentError(
                f"{len(columns)} tabulated modes but {len(self.eigenvalues)} eigenvalues configured"
            )
        count = min(m, len(columns))
        pairs = [(self.eigenvalues[j], (x, columns[j])) for j in range(count)]
        return build_manufactured_spectrum(pairs, self.tol)


__all__ = ["ManufacturedModel", "build_manufactured_spectrum", "load_mode_table", "spline_gram"]
