"""Pole expansions of the continued resolvent near a threshold and their refinements."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Literal, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from thresholdlab.core.config import QuadratureConfig
from thresholdlab.core.errors import InvalidArgumentError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import (
    EigenCluster,
    PoleExpansion,
    PotentialSpec,
    QData,
    RadiatingCoefficients,
    ThresholdGroup,
    ThresholdMatrices,
    TransverseSpectrum,
)

from .linalg import characteristic_roots, cluster_values, inverse_iteration, match_values, qr_eigenvalues
from .overlaps import ProfileEvaluator, axial_rule

LOGGER = get_logger(__name__)

EigenMethod = Literal["qr", "durand-kerner"]

MAX_GROUP_SIZE = 8

CASE_Q_ZERO = "q_identically_zero"
CASE_REGULAR = "regular"
CASE_REGULAR_BRANCH = "regular_branch"
CASE_FRACTIONAL = "fractional"
CASE_Q_DEGENERATE = "q_vanishes_to_order_q"

_Q_ZERO_REL = 1e-13
_Q_DERIVATIVE_REL = 1e-10


def cluster_tolerance(m1: np.ndarray, scale: float = 1e-8) -> float:
    return scale * (1.0 + float(np.linalg.norm(m1, 2)))


def _eigenvalues(matrix: np.ndarray, method: EigenMethod) -> np.ndarray:
    if method == "durand-kerner":
        if matrix.shape[0] > 4:
            raise InvalidArgumentError("Durand-Kerner path is limited to n <= 4")
        return characteristic_roots(matrix)
    return qr_eigenvalues(matrix)


def decompose_M1(
    m1: np.ndarray,
    cluster_tol: Optional[float] = None,
    method: EigenMethod = "qr",
    scale: float = 1e-8,
) -> list[EigenCluster]:
    """Cluster the eigenvalues of ``M1``; simple clusters carry an eigenvector."""

    m1 = np.atleast_2d(np.asarray(m1, dtype=complex))
    n = m1.shape[0]
    if n > MAX_GROUP_SIZE:
        raise InvalidArgumentError(f"Threshold multiplicity {n} exceeds {MAX_GROUP_SIZE}")
    tol = cluster_tolerance(m1, scale) if cluster_tol is None else cluster_tol
    if tol <= 0:
        raise InvalidArgumentError(f"Cluster tolerance must be positive, got {tol}")

    values = _eigenvalues(m1, method)
    clusters = []
    for idx in cluster_values(values, tol):
        members = values[idx]
        mu = complex(members.mean())
        vector = inverse_iteration(m1, mu) if idx.size == 1 else None
        clusters.append(
            EigenCluster(mu=mu, multiplicity=int(idx.size), members=tuple(complex(v) for v in members), eigenvector=vector)
        )
    LOGGER.info(
        "Decomposed M1",
        extra={"n": n, "clusters": len(clusters), "multiplicities": [c.multiplicity for c in clusters]},
    )
    return clusters


def _sampling_circle(m1: np.ndarray) -> tuple[complex, float]:
    n = m1.shape[0]
    return complex(np.trace(m1)) / n, 1.0 + 2.0 * float(np.linalg.norm(m1, 2))


def _q_samples(m1: np.ndarray, m2: np.ndarray) -> tuple[np.ndarray, Polynomial, complex, float]:
    """``Q`` on ``n`` points of a circle enclosing the spectrum of ``M1``, plus its expansion in ``(z - c)/R``."""

    n = m1.shape[0]
    centre, radius = _sampling_circle(m1)
    z = centre + radius * np.exp(2j * np.pi * np.arange(n) / n)
    eye = np.eye(n)
    samples = np.empty(n, dtype=complex)
    for k, zk in enumerate(z):
        shifted = zk * eye - m1
        samples[k] = np.linalg.det(shifted) * np.trace(np.linalg.solve(shifted, m2))
    return samples, Polynomial(np.fft.fft(samples) / n), centre, radius


def q_polynomial(m1: np.ndarray, m2: np.ndarray) -> Polynomial:
    """``Q(z) = d/d eps det(zE - M1 + eps M2)`` at ``eps = 0`` as a polynomial in ``z``."""

    m1 = np.atleast_2d(np.asarray(m1, dtype=complex))
    m2 = np.atleast_2d(np.asarray(m2, dtype=complex))
    _, in_w, centre, radius = _q_samples(m1, m2)
    return in_w(Polynomial([-centre / radius, 1.0 / radius]))


def compute_Q_r_gamma(
    clusters: Sequence[EigenCluster],
    m1: np.ndarray,
    m2: np.ndarray,
    i: int,
) -> QData:
    """Vanishing order ``r`` of ``Q`` at cluster ``i`` (0-based) and the normalized coefficient ``gamma``."""

    m1 = np.atleast_2d(np.asarray(m1, dtype=complex))
    m2 = np.atleast_2d(np.asarray(m2, dtype=complex))
    if m1.shape != m2.shape:
        raise InvalidArgumentError(f"M1 {m1.shape} and M2 {m2.shape} differ in shape")
    if not 0 <= i < len(clusters):
        raise InvalidArgumentError(f"Cluster index {i} outside 0..{len(clusters) - 1}")
    n = m1.shape[0]
    samples, in_w, centre, radius = _q_samples(m1, m2)
    coefficients = in_w(Polynomial([-centre / radius, 1.0 / radius])).coef

    scale = (1.0 + float(np.linalg.norm(m2, 2))) * (1.0 + radius) ** (n - 1)
    if np.all(np.abs(samples) < _Q_ZERO_REL * scale):
        return QData(identically_zero=True, coefficients=tuple(complex(c) for c in coefficients))

    cluster = clusters[i]
    w_mu = (cluster.mu - centre) / radius
    floor = _Q_DERIVATIVE_REL * float(np.max(np.abs(in_w.coef)))
    order = None
    for r in range(cluster.multiplicity):
        if abs(in_w.deriv(r)(w_mu)) / math.factorial(r) > floor:
            order = r
            break
    if order is None:
        LOGGER.warning(
            "Q vanishes to the full cluster order",
            extra={"cluster": i, "mu": cluster.mu, "q": cluster.multiplicity},
        )
        return QData(identically_zero=False, coefficients=tuple(complex(c) for c in coefficients))

    derivative = complex(in_w.deriv(order)(w_mu)) / radius**order
    separation = complex(1.0)
    for j, other in enumerate(clusters):
        if j != i:
            separation *= (cluster.mu - other.mu) ** other.multiplicity
    gamma = derivative / (math.factorial(order) * separation)
    LOGGER.debug("Computed Q data", extra={"cluster": i, "r": order, "gamma": gamma})
    return QData(identically_zero=False, r=order, gamma=gamma, coefficients=tuple(complex(c) for c in coefficients))


def _principal_root(value: complex, degree: int) -> complex:
    # +0.0 imaginary part keeps negative reals on the upper side of the cut
    value = complex(value)
    if value.imag == 0.0:
        value = complex(value.real, 0.0)
    return complex(np.power(value, 1.0 / degree))


def pole_expansions(
    clusters: Sequence[EigenCluster], qdata: Sequence[QData], tau: int
) -> list[PoleExpansion]:
    """Asymptotic series of all poles of branch ``tau``; cluster and branch indices are 1-based."""

    if tau not in (-1, 1):
        raise InvalidArgumentError(f"Branch tau must be +1 or -1, got {tau}")
    if len(clusters) != len(qdata):
        raise InvalidArgumentError("Need one QData record per cluster")

    poles: list[PoleExpansion] = []
    for ci, (cluster, data) in enumerate(zip(clusters, qdata), start=1):
        q = cluster.multiplicity
        common = dict(tau=tau, cluster=ci, mu=cluster.mu, q=q, q_identically_zero=data.identically_zero)
        if data.identically_zero:
            poles.extend(
                PoleExpansion(branch=j, remainder_order=1 + Fraction(2, q), case=CASE_Q_ZERO, **common)
                for j in range(1, q + 1)
            )
            continue
        if data.r is None or data.gamma is None:
            poles.extend(
                PoleExpansion(branch=j, remainder_order=1 + Fraction(1, q), case=CASE_Q_DEGENERATE, **common)
                for j in range(1, q + 1)
            )
            continue
        r, gamma = data.r, data.gamma
        if 2 * r >= q:
            poles.extend(
                PoleExpansion(
                    branch=j, remainder_order=1 + Fraction(1, r), r=r, gamma=gamma, case=CASE_REGULAR, **common
                )
                for j in range(1, q + 1)
            )
            continue
        for j in range(1, r + 1):
            poles.append(
                PoleExpansion(
                    branch=j, remainder_order=1 + Fraction(1, r), r=r, gamma=gamma, case=CASE_REGULAR_BRANCH, **common
                )
            )
        degree = q - r
        root = _principal_root(-gamma, degree)
        for j in range(r + 1, q + 1):
            poles.append(
                PoleExpansion(
                    branch=j,
                    remainder_order=1 + Fraction(2, degree),
                    correction=root * complex(np.exp(2j * np.pi * (j - r) / degree)),
                    correction_exponent=1 + Fraction(1, degree),
                    r=r,
                    gamma=gamma,
                    case=CASE_FRACTIONAL,
                    **common,
                )
            )
    LOGGER.debug("Built pole expansions", extra={"tau": tau, "poles": len(poles)})
    return poles


def matrix_pole_refine(
    m1: np.ndarray, m2: np.ndarray, eps: float, method: EigenMethod = "qr"
) -> np.ndarray:
    """``k = eps * z`` for the ``n`` roots of ``det(zE - M1 + eps M2)``."""

    m1 = np.atleast_2d(np.asarray(m1, dtype=complex))
    m2 = np.atleast_2d(np.asarray(m2, dtype=complex))
    return eps * _eigenvalues(m1 - eps * m2, method)


def match_refined(poles: Sequence[PoleExpansion], refined: np.ndarray, eps: float) -> np.ndarray:
    """Refined ``k`` values reordered to pair one-to-one with ``poles``."""

    series = np.array([pole.evaluate(eps) for pole in poles], dtype=complex)
    return match_values(series, refined)


def lambda_of_k(lam_p: float, k: complex) -> complex:
    return complex(lam_p - k * k)


def lambda_series_coefficients(pole: PoleExpansion, lam_p: float) -> list[tuple[Fraction, complex]]:
    """``(exponent, coefficient)`` terms of ``Lambda_p - k(eps)**2`` for the k-series in use."""

    terms: dict[Fraction, complex] = {Fraction(0): complex(lam_p)}
    k_terms = pole.series_terms()
    for ea, ca in k_terms:
        for eb, cb in k_terms:
            terms[ea + eb] = terms.get(ea + eb, 0j) - ca * cb
    return sorted(terms.items())


def threshold_poles(
    matrices: ThresholdMatrices,
    scale: float = 1e-8,
    method: EigenMethod = "qr",
) -> tuple[list[EigenCluster], dict[int, list[PoleExpansion]]]:
    """Clusters of ``M1`` and the pole expansions of every branch needed for the group."""

    clusters = decompose_M1(matrices.m1, method=method, scale=scale)
    taus = (1,) if matrices.group.is_bottom else (1, -1)
    poles: dict[int, list[PoleExpansion]] = {}
    for tau in taus:
        m2 = matrices.m2[tau]
        qdata = [compute_Q_r_gamma(clusters, matrices.m1, m2, i) for i in range(len(clusters))]
        poles[tau] = pole_expansions(clusters, qdata, tau)
    return clusters, poles


def radiating_coupling(
    spectrum: TransverseSpectrum,
    group: ThresholdGroup,
    V1: PotentialSpec,
    e: np.ndarray,
    settings: Optional[QuadratureConfig] = None,
    tol: float = 1e-10,
) -> RadiatingCoefficients:
    """Far-field couplings ``sum_t e_t int exp(-/+ i kappa_s x2) psi_s V1 psi_{t+p-1}`` for ``s < p``."""

    settings = settings or QuadratureConfig()
    if group.is_bottom:
        raise InvalidArgumentError("Radiating coupling needs an internal threshold (p > 1)")
    e = np.asarray(e, dtype=complex).ravel()
    if e.size != group.multiplicity:
        raise InvalidArgumentError(f"Eigenvector has {e.size} entries, group has {group.multiplicity} modes")
    if not np.any(np.abs(e) > 0):
        raise InvalidArgumentError("Eigenvector must be non-zero")

    channels = tuple(range(1, group.start))
    nodes, weights = axial_rule(V1, settings)
    profiles = ProfileEvaluator(spectrum, group, V1, len(channels), settings)(nodes)
    combined = np.einsum("stx,t->sx", profiles, e)
    kappa = np.sqrt(group.value - spectrum.eigenvalues[: len(channels)])
    phase = np.exp(1j * kappa[:, None] * nodes[None, :])
    plus = (combined * np.conj(phase)) @ weights
    minus = (combined * phase) @ weights
    nonzero = bool(np.any(np.abs(plus) > tol) or np.any(np.abs(minus) > tol))
    LOGGER.debug("Radiating coupling", extra={"p": group.start, "any_nonzero": nonzero})
    return RadiatingCoefficients(
        channels=channels,
        plus=tuple(complex(v) for v in plus),
        minus=tuple(complex(v) for v in minus),
        any_nonzero=nonzero,
    )


def pt_sign_condition(
    spectrum: TransverseSpectrum,
    group: ThresholdGroup,
    V1: PotentialSpec,
    settings: Optional[QuadratureConfig] = None,
) -> float:
    """Signed sum deciding the embedded-eigenvalue case for PT-symmetric ``V1`` at a simple threshold.

    Returns ``sum_{s<p} (A_s**2 - B_s**2) / kappa_s`` with ``A_s = int Re U_s cos(kappa_s x2)``
    and ``B_s = int Im U_s sin(kappa_s x2)``; a negative value gives eigenvalues on both branches.
    """

    settings = settings or QuadratureConfig()
    if group.is_bottom or group.multiplicity != 1:
        raise InvalidArgumentError("Sign condition applies to simple internal thresholds only")
    channels = group.start - 1
    nodes, weights = axial_rule(V1, settings)
    profiles = ProfileEvaluator(spectrum, group, V1, channels, settings)(nodes)[:, 0, :]
    kappa = np.sqrt(group.value - spectrum.eigenvalues[:channels])
    a = (profiles.real * np.cos(kappa[:, None] * nodes)) @ weights
    b = (profiles.imag * np.sin(kappa[:, None] * nodes)) @ weights
    value = float(np.sum((a**2 - b**2) / kappa))
    LOGGER.info("PT sign condition", extra={"p": group.start, "value": value})
    return value


def square_well_kappa(depth: float, halfwidth: float, xtol: float = 1e-14) -> float:
    """Decay rate of the even bound state of ``-u'' - depth * chi_[-h, h] u = -kappa**2 u``."""

    if depth <= 0 or halfwidth <= 0:
        raise InvalidArgumentError(f"Depth and half-width must be positive, got {depth}, {halfwidth}")
    if math.sqrt(depth) * halfwidth >= math.pi / 2:
        raise InvalidArgumentError("Only wells with a single even bound state are supported")

    def mismatch(kappa: float) -> float:
        q = math.sqrt(depth - kappa * kappa)
        return q * math.tan(q * halfwidth) - kappa

    top = math.sqrt(depth)
    return float(brentq(mismatch, 0.0, top * (1.0 - 1e-15), xtol=xtol, rtol=4 * np.finfo(float).eps))


__all__ = [
    "CASE_FRACTIONAL",
    "CASE_Q_DEGENERATE",
    "CASE_Q_ZERO",
    "CASE_REGULAR",
    "CASE_REGULAR_BRANCH",
    "EigenMethod",
    "cluster_tolerance",
    "compute_Q_r_gamma",
    "decompose_M1",
    "lambda_of_k",
    "lambda_series_coefficients",
    "match_refined",
    "matrix_pole_refine",
    "pole_expansions",
    "pt_sign_condition",
    "q_polynomial",
    "radiating_coupling",
    "square_well_kappa",
    "threshold_poles",
]
