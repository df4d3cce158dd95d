"""Common dataclasses shared by the transverse, spectral, solver and service layers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Literal, Optional, Union

import numpy as np

ModeKind = Literal["strip_sine", "hermite_gauss", "tabulated"]
Geometry = Literal["interval_0_pi", "real_line_trap", "manufactured"]
PredictionKind = Literal["eigenvalue", "resonance", "undetermined"]
FarBoundary = Literal["dirichlet", "neumann"]


@dataclass(frozen=True, slots=True)
class TransverseMode:
    """One transverse eigenpair; ``index`` is 1-based."""

    index: int
    eigenvalue: float
    eigenfunction: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    kind: ModeKind

    def __call__(self, x: np.ndarray | float) -> np.ndarray:
        return self.eigenfunction(np.asarray(x, dtype=float))


@dataclass(frozen=True, slots=True)
class TransverseSpectrum:
    """Ordered transverse eigenpairs of a cross-section model."""

    modes: tuple[TransverseMode, ...]
    geometry: Geometry
    domain: tuple[float, float]

    @property
    def count(self) -> int:
        return len(self.modes)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([mode.eigenvalue for mode in self.modes], dtype=float)

    def mode(self, index: int) -> TransverseMode:
        """Return the mode with 1-based ``index``."""

        if not 1 <= index <= self.count:
            raise IndexError(f"Mode index {index} outside 1..{self.count}")
        return self.modes[index - 1]


@dataclass(frozen=True, slots=True)
class ThresholdGroup:
    """Run of transverse eigenvalues equal to ``value`` starting at 1-based ``start``."""

    start: int
    multiplicity: int
    value: float
    is_bottom: bool

    @property
    def indices(self) -> range:
        return range(self.start, self.start + self.multiplicity)


@dataclass(frozen=True, slots=True)
class SupportBox:
    """Axis-aligned rectangle ``x1 x x2`` outside of which a potential vanishes."""

    x1: tuple[float, float]
    x2: tuple[float, float]

    @property
    def empty(self) -> bool:
        return self.x1[1] <= self.x1[0] or self.x2[1] <= self.x2[0]

    @property
    def diameter(self) -> float:
        return math.hypot(self.x1[1] - self.x1[0], self.x2[1] - self.x2[0])

    def union(self, other: "SupportBox") -> "SupportBox":
        if other.empty:
            return self
        if self.empty:
            return other
        return SupportBox(
            x1=(min(self.x1[0], other.x1[0]), max(self.x1[1], other.x1[1])),
            x2=(min(self.x2[0], other.x2[0]), max(self.x2[1], other.x2[1])),
        )


@dataclass(frozen=True, slots=True)
class TrigSeriesPotential:
    """``-sum a_j sin(j x1) cos(x2/2) + i sum b_j sin(j x1) sin(x2)`` on ``|x2| <= halfwidth``."""

    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()
    support_halfwidth: float = math.pi
    form: Literal["trig"] = "trig"


@dataclass(frozen=True, slots=True, eq=False)
class GridPotential:
    """Complex samples on a rectangular grid, interpolated bilinearly."""

    x1: np.ndarray = field(repr=False)
    x2: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    form: Literal["grid"] = "grid"


@dataclass(frozen=True, slots=True)
class BoxPotential:
    """Constant complex ``amplitude`` on a closed box, zero elsewhere."""

    amplitude: complex
    x1_range: tuple[float, float]
    x2_range: tuple[float, float]
    form: Literal["box"] = "box"


PotentialSpec = Union[TrigSeriesPotential, GridPotential, BoxPotential]


@dataclass(frozen=True, slots=True)
class PerturbationPair:
    """Potentials entering ``eps*V1 + eps**2*V2``; ``v2=None`` means zero."""

    v1: PotentialSpec
    v2: Optional[PotentialSpec] = None


@dataclass(slots=True)
class ThresholdMatrices:
    """First and second order threshold matrices of one group."""

    group: ThresholdGroup
    m1: np.ndarray
    m2: dict[int, np.ndarray]
    jmax: int
    tail_estimate: dict[int, float]


@dataclass(frozen=True, slots=True)
class EigenCluster:
    """Cluster of numerically coincident eigenvalues of ``M1``."""

    mu: complex
    multiplicity: int
    members: tuple[complex, ...]
    eigenvector: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True, slots=True)
class QData:
    """Data extracted from ``Q(z) = trace(adj(zE - M1) M2)`` at one cluster."""

    identically_zero: bool
    r: Optional[int] = None
    gamma: Optional[complex] = None
    coefficients: tuple[complex, ...] = ()


@dataclass(frozen=True, slots=True)
class PoleExpansion:
    """Asymptotic series ``k(eps) = eps*mu + correction*eps**correction_exponent + O(eps**remainder_order)``."""

    tau: int
    cluster: int
    branch: int
    mu: complex
    q: int
    remainder_order: Fraction
    correction: Optional[complex] = None
    correction_exponent: Optional[Fraction] = None
    r: Optional[int] = None
    gamma: Optional[complex] = None
    q_identically_zero: bool = False
    case: str = ""

    def leading(self, eps: float) -> complex:
        return eps * self.mu

    def evaluate(self, eps: float) -> complex:
        k = self.leading(eps)
        if self.correction is not None and self.correction_exponent is not None:
            k += self.correction * eps ** float(self.correction_exponent)
        return complex(k)

    def series_terms(self) -> list[tuple[Fraction, complex]]:
        """``(exponent, coefficient)`` pairs of the k-series actually used."""

        terms = [(Fraction(1), complex(self.mu))]
        if self.correction is not None and self.correction_exponent is not None:
            terms.append((self.correction_exponent, complex(self.correction)))
        return terms


@dataclass(frozen=True, slots=True)
class SpectralPrediction:
    """Classification of one pole together with its lambda series."""

    kind: PredictionKind
    pole: PoleExpansion
    threshold: float
    justification: str
    conditions: dict[str, float | bool | str] = field(default_factory=dict)

    def k(self, eps: float) -> complex:
        return self.pole.evaluate(eps)

    def lam(self, eps: float) -> complex:
        return self.threshold - self.k(eps) ** 2

    def lam_leading(self, eps: float) -> complex:
        return self.threshold - self.pole.leading(eps) ** 2


@dataclass(frozen=True, slots=True)
class RadiatingCoefficients:
    """Leading far-field couplings into the open channels ``s < p``."""

    channels: tuple[int, ...]
    plus: tuple[complex, ...]
    minus: tuple[complex, ...]
    any_nonzero: bool


@dataclass(slots=True)
class EigenResult:
    """Residual-verified eigenpair of the discretized operator."""

    lam: complex
    eigenvector: np.ndarray = field(repr=False)
    residual: float
    tail_mass: float
    raw_lam: complex = 0j
    threshold_shift: float = 0.0


@dataclass(frozen=True, slots=True)
class AbsenceReport:
    """No eigenvalue accepted near ``target``; nearest candidates listed."""

    target: complex
    window: float
    candidates: tuple[complex, ...]
    reason: str


@dataclass(slots=True)
class ComparisonRow:
    """One line of the asymptotic-versus-direct comparison table."""

    eps: float
    tau: int
    cluster: int
    branch: int
    kind: str
    lam_asym1: Optional[complex] = None
    lam_asym2: Optional[complex] = None
    lam_refined: Optional[complex] = None
    lam_direct: Optional[complex] = None
    residual: Optional[float] = None
    tail_mass: Optional[float] = None
    runtime_ms: Optional[float] = None
    note: str = ""
    error: str = ""

    @property
    def sort_key(self) -> tuple[float, int, int, int]:
        return (self.eps, self.tau, self.cluster, self.branch)


__all__ = [
    "AbsenceReport",
    "BoxPotential",
    "ComparisonRow",
    "EigenCluster",
    "EigenResult",
    "FarBoundary",
    "Geometry",
    "GridPotential",
    "ModeKind",
    "PerturbationPair",
    "PoleExpansion",
    "PotentialSpec",
    "PredictionKind",
    "QData",
    "RadiatingCoefficients",
    "SpectralPrediction",
    "SupportBox",
    "ThresholdGroup",
    "ThresholdMatrices",
    "TransverseMode",
    "TransverseSpectrum",
    "TrigSeriesPotential",
]
