"""Mode overlaps, axial profiles and the threshold matrices M1 and M2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from thresholdlab.core.config import GreensConfig, QuadratureConfig
from thresholdlab.core.errors import InvalidArgumentError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import (
    PerturbationPair,
    PotentialSpec,
    ThresholdGroup,
    ThresholdMatrices,
    TransverseMode,
    TransverseSpectrum,
)

from .potentials import axial_breakpoints, evaluate_potential, potential_support
from .quadrature import adaptive_tensor_integral, gauss_legendre, panel_rule

LOGGER = get_logger(__name__)

Regime = Literal["oscillatory", "linear", "decaying"]

# Evaluation points per potential call; bounds temporary arrays to a few tens of MB.
_CHUNK_POINTS = 1 << 21
# Distances from the diagonal, in units of the fastest decay length, where inner rules split.
_GRADING = (1.0, 4.0, 16.0, 64.0)


@dataclass(frozen=True, slots=True)
class AxialKernel:
    """One-dimensional kernel of the threshold Green operator for a single mode."""

    regime: Regime
    kappa: float
    tau: int = 1

    def __call__(self, distance: np.ndarray) -> np.ndarray:
        d = np.asarray(distance, dtype=float)
        if self.regime == "linear":
            return (-0.5 * d).astype(complex)
        if self.regime == "decaying":
            return (np.exp(-self.kappa * d) / (2.0 * self.kappa)).astype(complex)
        k0 = -1j * self.kappa
        return np.exp(-self.tau * k0 * d) / (2.0 * self.tau * k0)


@dataclass(frozen=True, slots=True)
class AxialProfile:
    """``U_j^(t)(x2) = int psi_j V1 psi_t dx1`` tabulated on axial Gauss nodes."""

    mode: int
    threshold_mode: int
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray


def axial_kernel(mode: int, lam_s: float, group: ThresholdGroup, tau: int) -> AxialKernel:
    """Regime of mode ``mode`` relative to the threshold group."""

    if tau not in (-1, 1):
        raise InvalidArgumentError(f"Branch tau must be +1 or -1, got {tau}")
    if mode in group.indices:
        return AxialKernel("linear", 0.0, tau)
    if mode < group.start:
        return AxialKernel("oscillatory", math.sqrt(group.value - lam_s), tau)
    return AxialKernel("decaying", math.sqrt(lam_s - group.value), tau)


def _x1_interval(spectrum: TransverseSpectrum, V: Optional[PotentialSpec]) -> tuple[float, float]:
    box = potential_support(V)
    lo = max(box.x1[0], spectrum.domain[0])
    hi = min(box.x1[1], spectrum.domain[1])
    return lo, hi


def mode_matrix_element(
    mode_i: TransverseMode,
    mode_j: TransverseMode,
    V: Optional[PotentialSpec],
    spectrum: TransverseSpectrum,
    settings: Optional[QuadratureConfig] = None,
) -> complex:
    """``int psi_i V psi_j dx`` over the support of ``V`` by adaptive tensor Gauss-Legendre."""

    settings = settings or QuadratureConfig()
    box = potential_support(V)
    x1_interval = _x1_interval(spectrum, V)
    if V is None or box.empty or x1_interval[1] <= x1_interval[0]:
        return 0j
    breaks1, breaks2 = axial_breakpoints(V)

    def integrand(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        return (mode_i(x1) * mode_j(x1)) * evaluate_potential(V, x1, x2)

    value, error = adaptive_tensor_integral(
        integrand,
        x1_interval,
        box.x2,
        order=settings.order,
        panels=settings.panels,
        max_panels=settings.max_panels,
        tol=settings.tolerance,
        breaks1=breaks1,
        breaks2=breaks2,
    )
    LOGGER.debug(
        "Mode matrix element",
        extra={"i": mode_i.index, "j": mode_j.index, "value": value, "error": error},
    )
    return value


def build_M1(
    spectrum: TransverseSpectrum,
    group: ThresholdGroup,
    V1: PotentialSpec,
    settings: Optional[QuadratureConfig] = None,
) -> np.ndarray:
    """``M1[i, j] = -1/2 int psi_{i+p-1} V1 psi_{j+p-1}``."""

    _require_modes(spectrum, group.start + group.multiplicity - 1)
    n = group.multiplicity
    m1 = np.zeros((n, n), dtype=complex)
    for a, i in enumerate(group.indices):
        for b, j in enumerate(group.indices):
            m1[a, b] = -0.5 * mode_matrix_element(spectrum.mode(i), spectrum.mode(j), V1, spectrum, settings)
    LOGGER.info("Built M1", extra={"p": group.start, "n": n, "trace": complex(np.trace(m1))})
    return m1


class ProfileEvaluator:
    """Evaluates ``U_s^(t)`` for ``s = 1..jmax`` and threshold modes ``t`` at any axial points."""

    def __init__(
        self,
        spectrum: TransverseSpectrum,
        group: ThresholdGroup,
        V1: PotentialSpec,
        jmax: int,
        settings: Optional[QuadratureConfig] = None,
    ) -> None:
        settings = settings or QuadratureConfig()
        _require_modes(spectrum, max(jmax, group.start + group.multiplicity - 1))
        self.V1 = V1
        self.jmax = jmax
        lo, hi = _x1_interval(spectrum, V1)
        panels = max(settings.panels, math.ceil(jmax / 4))
        breaks1, _ = axial_breakpoints(V1)
        self.x1, w1 = panel_rule(lo, hi, panels=panels, order=settings.order, breaks=breaks1)
        self.weighted_modes = np.stack([spectrum.mode(s)(self.x1) for s in range(1, jmax + 1)]) * w1
        self.threshold_modes = np.stack([spectrum.mode(t)(self.x1) for t in group.indices])

    def __call__(self, x2: np.ndarray) -> np.ndarray:
        """Array of shape ``(jmax, n) + x2.shape``."""

        x2 = np.asarray(x2, dtype=float)
        flat = x2.ravel()
        n = self.threshold_modes.shape[0]
        out = np.empty((self.jmax, n, flat.size), dtype=complex)
        step = max(1, _CHUNK_POINTS // max(1, self.x1.size))
        for start in range(0, flat.size, step):
            block = flat[start : start + step]
            values = evaluate_potential(self.V1, self.x1[:, None], block[None, :])
            for t in range(n):
                out[:, t, start : start + step] = self.weighted_modes @ (self.threshold_modes[t][:, None] * values)
        return out.reshape((self.jmax, n) + x2.shape)


def axial_rule(V1: PotentialSpec, settings: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule over the axial support of ``V1``."""

    box = potential_support(V1)
    _, breaks2 = axial_breakpoints(V1)
    return panel_rule(*box.x2, panels=settings.panels, order=settings.order, breaks=breaks2)


def axial_profiles(
    spectrum: TransverseSpectrum,
    group: ThresholdGroup,
    V1: PotentialSpec,
    jmax: int,
    settings: Optional[QuadratureConfig] = None,
) -> list[AxialProfile]:
    """Profiles ``U_j^(t)`` for ``j = 1..jmax`` and each threshold mode ``t``, ordered by ``(j, t)``."""

    settings = settings or QuadratureConfig()
    if jmax < spectrum.count and spectrum.geometry != "manufactured":
        raise InvalidArgumentError(f"jmax={jmax} must cover the {spectrum.count} spectrum modes")
    nodes, weights = axial_rule(V1, settings)
    values = ProfileEvaluator(spectrum, group, V1, jmax, settings)(nodes)
    return [
        AxialProfile(mode=j, threshold_mode=t, nodes=nodes, weights=weights, values=values[j - 1, a])
        for j in range(1, jmax + 1)
        for a, t in enumerate(group.indices)
    ]


def _inner_rule(
    outer: np.ndarray, lo: float, hi: float, rate: float, order: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per outer node, a rule on ``[lo, hi]`` split at the node and graded towards it."""

    length = hi - lo
    offsets = np.array([0.0] + [g / rate for g in _GRADING if g / rate < length] + [length])
    gl_nodes, gl_weights = gauss_legendre(order)
    pieces_lo, pieces_hi = [], []
    for near, far in zip(offsets[:-1], offsets[1:]):
        pieces_lo.append(np.clip(outer - far, lo, hi))
        pieces_hi.append(np.clip(outer - near, lo, hi))
        pieces_lo.append(np.clip(outer + near, lo, hi))
        pieces_hi.append(np.clip(outer + far, lo, hi))
    a = np.stack(pieces_lo, axis=1)[:, :, None]
    b = np.stack(pieces_hi, axis=1)[:, :, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * gl_nodes).reshape(outer.size, -1)
    weights = (half * gl_weights).reshape(outer.size, -1)
    return nodes, weights


def _tail_estimate(
    norms: np.ndarray,
    spectrum: TransverseSpectrum,
    group: ThresholdGroup,
    jmax: int,
    diameter: float,
) -> float:
    """Bound on the dropped ``s > jmax`` terms: max of a geometric and a power-law extrapolation."""

    first_decaying = group.start + group.multiplicity
    if spectrum.geometry == "manufactured" and jmax >= spectrum.count:
        return 0.0
    if jmax < first_decaying or norms.size == 0:
        return float("inf")
    lam = spectrum.eigenvalues[:jmax]
    spacing = lam[-1] - lam[-2] if jmax >= 2 else 1.0
    extra = np.arange(1, 257)
    kappa_last = math.sqrt(max(lam[-1] - group.value, 0.0))
    kappa_next = np.sqrt(np.maximum(lam[-1] + spacing * extra - group.value, 0.0))
    geometric = float(norms[-1] * np.sum(np.exp(-(kappa_next - kappa_last) * diameter)))

    s = np.arange(1, jmax + 1)
    window = (s >= max(first_decaying, jmax // 2)) & (norms > 1e-14 * max(norms.max(), 1e-300))
    power = 0.0
    if np.count_nonzero(window) >= 3:
        slope, intercept = np.polyfit(np.log(s[window]), np.log(norms[window]), 1)
        if slope < -1.0:
            power = float(math.exp(intercept) * jmax ** (slope + 1.0) / (-slope - 1.0))
        else:
            power = float("inf")
    return max(geometric, power)


def build_M2(
    spectrum: TransverseSpectrum,
    group: ThresholdGroup,
    pair: PerturbationPair,
    tau: int,
    jmax: int,
    settings: Optional[QuadratureConfig] = None,
    greens: Optional[GreensConfig] = None,
) -> tuple[np.ndarray, float]:
    """``M2 = 1/2 [V2 overlaps - sum_s D_s]`` with the mode-sum Green operator truncated at ``jmax``.

    Returns the matrix and an estimate of the truncated tail.
    """

    settings = settings or QuadratureConfig()
    greens = greens or GreensConfig()
    if tau not in (-1, 1):
        raise InvalidArgumentError(f"Branch tau must be +1 or -1, got {tau}")
    if jmax < group.start + group.multiplicity - 1:
        raise InvalidArgumentError(f"jmax={jmax} does not reach the threshold group at p={group.start}")

    n = group.multiplicity
    overlap = np.zeros((n, n), dtype=complex)
    if pair.v2 is not None:
        for a, i in enumerate(group.indices):
            for b, j in enumerate(group.indices):
                overlap[a, b] = mode_matrix_element(spectrum.mode(i), spectrum.mode(j), pair.v2, spectrum, settings)

    box = potential_support(pair.v1)
    d_terms = np.zeros((jmax, n, n), dtype=complex)
    if not box.empty:
        d_terms = _mode_sum(spectrum, group, pair.v1, tau, jmax, settings)

    m2 = 0.5 * (overlap - d_terms.sum(axis=0))
    norms = np.abs(d_terms).reshape(jmax, -1).max(axis=1)
    tail = _tail_estimate(norms, spectrum, group, jmax, box.diameter)
    tail = max(tail, settings.tolerance * float(np.abs(m2).max(initial=0.0)))
    if tail > greens.tail_tolerance:
        LOGGER.warning(
            "Mode sum truncation may be inaccurate",
            extra={"jmax": jmax, "tail_estimate": tail, "tolerance": greens.tail_tolerance},
        )
    LOGGER.info("Built M2", extra={"p": group.start, "tau": tau, "jmax": jmax, "tail_estimate": tail})
    return m2, tail


def _mode_sum(
    spectrum: TransverseSpectrum,
    group: ThresholdGroup,
    V1: PotentialSpec,
    tau: int,
    jmax: int,
    settings: QuadratureConfig,
) -> np.ndarray:
    """``D_s[i, j] = double integral of kernel_s(|x2 - t2|) U_s^(i)(x2) U_s^(j)(t2)``."""

    lam = spectrum.eigenvalues
    kernels = [axial_kernel(s, float(lam[s - 1]), group, tau) for s in range(1, jmax + 1)]
    rate = max([k.kappa for k in kernels if k.regime == "decaying"], default=1.0)
    rate = max(rate, 1.0)

    evaluator = ProfileEvaluator(spectrum, group, V1, jmax, settings)
    lo, hi = potential_support(V1).x2
    outer, outer_w = axial_rule(V1, settings)
    u_outer = evaluator(outer)
    inner, inner_w = _inner_rule(outer, lo, hi, rate, settings.order)

    n = group.multiplicity
    d_terms = np.zeros((jmax, n, n), dtype=complex)
    rows_per_chunk = max(1, _CHUNK_POINTS // max(1, inner.shape[1] * evaluator.x1.size))
    for start in range(0, outer.size, rows_per_chunk):
        rows = slice(start, start + rows_per_chunk)
        u_inner = evaluator(inner[rows])
        distance = np.abs(outer[rows, None] - inner[rows])
        weighted = np.stack([kernel(distance) for kernel in kernels]) * inner_w[rows]
        convolved = np.einsum("sri,stri->str", weighted, u_inner)
        d_terms += np.einsum("sir,sjr,r->sij", u_outer[:, :, rows], convolved, outer_w[rows])
    return d_terms


def threshold_matrices(
    spectrum: TransverseSpectrum,
    group: ThresholdGroup,
    pair: PerturbationPair,
    jmax: int,
    settings: Optional[QuadratureConfig] = None,
    greens: Optional[GreensConfig] = None,
) -> ThresholdMatrices:
    """M1 and both branches of M2 for one threshold group; p = 1 reuses a single M2."""

    m1 = build_M1(spectrum, group, pair.v1, settings)
    m2: dict[int, np.ndarray] = {}
    tails: dict[int, float] = {}
    for tau in (1, -1):
        if group.is_bottom and 1 in m2:
            m2[tau], tails[tau] = m2[1], tails[1]
            continue
        m2[tau], tails[tau] = build_M2(spectrum, group, pair, tau, jmax, settings, greens)
    return ThresholdMatrices(group=group, m1=m1, m2=m2, jmax=jmax, tail_estimate=tails)


def _require_modes(spectrum: TransverseSpectrum, count: int) -> None:
    if spectrum.count < count:
        raise InvalidArgumentError(f"Spectrum has {spectrum.count} modes, {count} required")


__all__ = [
    "AxialKernel",
    "AxialProfile",
    "ProfileEvaluator",
    "axial_kernel",
    "axial_profiles",
    "axial_rule",
    "build_M1",
    "build_M2",
    "mode_matrix_element",
    "threshold_matrices",
]
