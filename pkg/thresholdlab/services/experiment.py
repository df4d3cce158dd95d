"""Experiment orchestration: threshold analysis once, then an epsilon sweep on a worker pool."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from thresholdlab.core.config import ExperimentConfig
from thresholdlab.core.errors import ConfigError, ThresholdLabError
from thresholdlab.core.events import GLOBAL_BUS, SWEEP_FINISHED, SWEEP_POINT, SWEEP_STARTED, EventBus
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import (
    AbsenceReport,
    ComparisonRow,
    EigenCluster,
    PerturbationPair,
    RadiatingCoefficients,
    SpectralPrediction,
    ThresholdGroup,
    ThresholdMatrices,
    TransverseSpectrum,
)
from thresholdlab.core.utils import timed
from thresholdlab.solvers.emergent import find_emergent_state, verify_absence
from thresholdlab.spectral.asymptotics import (
    lambda_of_k,
    match_refined,
    matrix_pole_refine,
    pt_sign_condition,
    radiating_coupling,
    threshold_poles,
)
from thresholdlab.spectral.classify import classify_poles, prediction_record
from thresholdlab.spectral.overlaps import threshold_matrices
from thresholdlab.spectral.potentials import check_pt_symmetry, pair_from_config
from thresholdlab.transverse import ManufacturedModel, OscillatorModel, StripModel, TransverseModel
from thresholdlab.transverse.base import group_at

LOGGER = get_logger(__name__)


def build_model(config: ExperimentConfig) -> TransverseModel:
    if config.model == "strip":
        return StripModel()
    if config.model == "oscillator":
        return OscillatorModel()
    if config.modes.file is None or not config.modes.eigenvalues:
        raise ConfigError(
            "manufactured models need a mode table and eigenvalues", ["modes.file", "modes.eigenvalues"]
        )
    return ManufacturedModel(config.modes.file, config.modes.eigenvalues)


def spectrum_size(config: ExperimentConfig) -> int:
    """Modes needed: the configured count, extended to the Green mode-sum cut-off."""

    if config.model == "manufactured":
        if not config.modes.eigenvalues:
            raise ConfigError("manufactured models need eigenvalues", ["modes.eigenvalues"])
        return len(config.modes.eigenvalues)
    return max(config.modes.count, config.greens.jmax)


@dataclass(slots=True)
class ThresholdAnalysis:
    """Everything the sweep needs that does not depend on ``eps``."""

    spectrum: TransverseSpectrum
    group: ThresholdGroup
    pair: PerturbationPair
    matrices: ThresholdMatrices
    clusters: list[EigenCluster]
    predictions: dict[int, list[SpectralPrediction]]
    couplings: dict[int, RadiatingCoefficients] = field(default_factory=dict)
    checks: dict[str, Any] = field(default_factory=dict)


@dataclass(slots=True)
class ExperimentResult:
    rows: list[ComparisonRow]
    summary: dict[str, Any]
    analysis: ThresholdAnalysis

    @property
    def failed_rows(self) -> list[ComparisonRow]:
        return [row for row in self.rows if row.error]


def _complex_pair(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


def _matrix_payload(matrix: np.ndarray) -> list[list[list[float]]]:
    return [[_complex_pair(complex(v)) for v in row] for row in np.asarray(matrix)]


class ExperimentRunner:
    """Runs the asymptotic and direct pipelines of one configuration."""

    def __init__(self, config: ExperimentConfig, bus: Optional[EventBus] = None) -> None:
        self.config = config
        self.bus = bus or GLOBAL_BUS
        self.model = build_model(config)
        self._analysis: Optional[ThresholdAnalysis] = None

    def analyze(self) -> ThresholdAnalysis:
        """Threshold matrices, pole expansions and classifications (cached)."""

        if self._analysis is not None:
            return self._analysis
        config = self.config
        spectrum = self.model.spectrum(spectrum_size(config))
        scale = max(1.0, float(np.abs(spectrum.eigenvalues).max()))
        group = group_at(spectrum, config.threshold, config.modes.grouping_tol * scale)
        pair = pair_from_config(config)
        jmax = spectrum.count if config.model == "manufactured" else config.greens.jmax

        with timed() as watch:
            matrices = threshold_matrices(spectrum, group, pair, jmax, config.quadrature, config.greens)
            clusters, poles = threshold_poles(matrices, scale=config.clustering.scale)
        couplings: dict[int, RadiatingCoefficients] = {}
        if not group.is_bottom:
            for index, cluster in enumerate(clusters, start=1):
                if cluster.eigenvector is not None:
                    couplings[index] = radiating_coupling(
                        spectrum, group, pair.v1, cluster.eigenvector, config.quadrature
                    )
        predictions = {
            tau: classify_poles(branch, group.value, group.is_bottom, couplings, config.clustering.zero_band)
            for tau, branch in poles.items()
        }
        checks = self._symmetry_checks(spectrum, group, pair, matrices)
        checks["analysis_ms"] = watch.elapsed_ms
        LOGGER.info(
            "Threshold analysis complete",
            extra={
                "p": group.start,
                "n": group.multiplicity,
                "kinds": [pred.kind for preds in predictions.values() for pred in preds],
                "elapsed_ms": round(watch.elapsed_ms, 1),
            },
        )
        self._analysis = ThresholdAnalysis(
            spectrum=spectrum,
            group=group,
            pair=pair,
            matrices=matrices,
            clusters=clusters,
            predictions=predictions,
            couplings=couplings,
            checks=checks,
        )
        return self._analysis

    def _symmetry_checks(
        self,
        spectrum: TransverseSpectrum,
        group: ThresholdGroup,
        pair: PerturbationPair,
        matrices: ThresholdMatrices,
    ) -> dict[str, Any]:
        pt_v1, violation = check_pt_symmetry(pair.v1)
        pt_v2, _ = check_pt_symmetry(pair.v2) if pair.v2 is not None else (True, 0.0)
        checks: dict[str, Any] = {"pt_symmetric": bool(pt_v1 and pt_v2), "pt_violation": violation}
        if not checks["pt_symmetric"]:
            return checks
        checks["m1_imag_residue"] = float(np.abs(matrices.m1.imag).max())
        checks["m2_conjugation_residue"] = float(np.abs(matrices.m2[1] - np.conj(matrices.m2[-1])).max())
        if not group.is_bottom and group.multiplicity == 1:
            checks["pt_sign_condition"] = pt_sign_condition(spectrum, group, pair.v1, self.config.quadrature)
        return checks

    def _point_rows(self, eps: float) -> list[ComparisonRow]:
        analysis = self.analyze()
        pipelines = self.config.pipelines
        rows: list[ComparisonRow] = []
        for tau, predictions in analysis.predictions.items():
            refined = match_refined(
                [pred.pole for pred in predictions],
                matrix_pole_refine(analysis.matrices.m1, analysis.matrices.m2[tau], eps),
                eps,
            )
            for prediction, k_refined in zip(predictions, refined):
                with timed() as watch:
                    row = self._row(eps, tau, prediction, complex(k_refined))
                row.runtime_ms = watch.elapsed_ms
                if not pipelines.asymptotics:
                    row.lam_asym1 = row.lam_asym2 = row.lam_refined = None
                rows.append(row)
        return rows

    def _row(self, eps: float, tau: int, prediction: SpectralPrediction, k_refined: complex) -> ComparisonRow:
        analysis = self.analyze()
        pole = prediction.pole
        lam_refined = lambda_of_k(analysis.group.value, k_refined)
        row = ComparisonRow(
            eps=eps,
            tau=tau,
            cluster=pole.cluster,
            branch=pole.branch,
            kind=prediction.kind,
            lam_asym1=prediction.lam_leading(eps),
            lam_asym2=prediction.lam(eps),
            lam_refined=lam_refined,
        )
        pipelines = self.config.pipelines
        solve = pipelines.direct and prediction.kind == "eigenvalue"
        check_absence = (
            pipelines.direct
            and pipelines.verify_absence
            and prediction.kind == "resonance"
            and analysis.group.is_bottom
        )
        if not (solve or check_absence):
            return row
        try:
            if solve:
                outcome = find_emergent_state(
                    self.model,
                    analysis.pair,
                    eps,
                    analysis.group,
                    prediction,
                    self.config.solver,
                    self.config.modes.count,
                    target=lam_refined,
                )
            else:
                outcome = verify_absence(
                    self.model,
                    analysis.pair,
                    eps,
                    analysis.group,
                    prediction,
                    self.config.solver,
                    self.config.modes.count,
                )
        except ThresholdLabError as exc:
            LOGGER.error("Direct solve failed", extra={"eps": eps, "tau": tau, "error": str(exc)})
            row.error = f"{type(exc).__name__}: {exc}"
            return row

        if isinstance(outcome, AbsenceReport):
            row.note = ("absence confirmed: " if check_absence else "no match: ") + outcome.reason
            return row
        row.lam_direct = outcome.lam
        row.residual = outcome.residual
        row.tail_mass = outcome.tail_mass
        if check_absence:
            row.note = "eigenvalue found where a resonance was predicted"
        return row

    def run(self) -> ExperimentResult:
        analysis = self.analyze()
        eps_values = self.config.eps_values
        self.bus.publish(SWEEP_STARTED, self.config.name, len(eps_values))
        rows: list[ComparisonRow] = []
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            futures = {eps: pool.submit(self._point_rows, eps) for eps in eps_values}
            for eps in eps_values:
                point_rows = futures[eps].result()
                rows.extend(point_rows)
                self.bus.publish(SWEEP_POINT, eps, point_rows)
        rows.sort(key=lambda row: row.sort_key)
        result = ExperimentResult(rows=rows, summary=self.summary(analysis, rows), analysis=analysis)
        self.bus.publish(SWEEP_FINISHED, result)
        LOGGER.info(
            "Sweep finished",
            extra={"config_name": self.config.name, "rows": len(rows), "failed": len(result.failed_rows)},
        )
        return result

    def summary(self, analysis: ThresholdAnalysis, rows: list[ComparisonRow]) -> dict[str, Any]:
        """Machine-readable description of the threshold, its poles and the sweep."""

        group = analysis.group
        matrices = analysis.matrices
        return {
            "name": self.config.name,
            "model": self.config.model,
            "threshold": {
                "p": group.start,
                "multiplicity": group.multiplicity,
                "value": group.value,
                "is_bottom": group.is_bottom,
            },
            "jmax": matrices.jmax,
            "m1": _matrix_payload(matrices.m1),
            "m2": {str(tau): _matrix_payload(m2) for tau, m2 in sorted(matrices.m2.items())},
            "tail_estimate": {str(tau): tail for tau, tail in sorted(matrices.tail_estimate.items())},
            "clusters": [
                {
                    "mu": _complex_pair(c.mu),
                    "q": c.multiplicity,
                    "members": [_complex_pair(m) for m in c.members],
                }
                for c in analysis.clusters
            ],
            "poles": [
                prediction_record(pred)
                for tau in sorted(analysis.predictions)
                for pred in analysis.predictions[tau]
            ],
            "couplings": {
                str(index): {
                    "channels": list(c.channels),
                    "plus": [_complex_pair(v) for v in c.plus],
                    "minus": [_complex_pair(v) for v in c.minus],
                    "any_nonzero": c.any_nonzero,
                }
                for index, c in sorted(analysis.couplings.items())
            },
            "checks": analysis.checks,
            "eps": self.config.eps_values,
            "rows": len(rows),
            "failed_rows": sum(1 for row in rows if row.error),
            "runtime_ms": [row.runtime_ms for row in rows],
        }


def run_experiment(config: ExperimentConfig, bus: Optional[EventBus] = None) -> ExperimentResult:
    """Analyze the threshold and sweep all configured ``eps`` values."""

    return ExperimentRunner(config, bus).run()


__all__ = [
    "ExperimentResult",
    "ExperimentRunner",
    "ThresholdAnalysis",
    "build_model",
    "run_experiment",
    "spectrum_size",
]
