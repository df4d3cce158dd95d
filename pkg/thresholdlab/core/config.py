"""Experiment configuration loading and validation utilities."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .logger import get_logger

LOGGER = get_logger(__name__)

DEFAULT_CONFIG = Path("configs/default.yaml")


class LoggingConfig(BaseModel):
    """Runtime logging configuration."""

    level: str = Field("INFO", description="Default logging level.")
    log_dir: Optional[Path] = Field(Path("logs"), description="Directory for rotating log files.")
    rotate_megabytes: int = Field(10, ge=1, description="Maximum log file size before rotation.")
    rotate_backups: int = Field(5, ge=1, description="Number of rotated log files to retain.")


class ModesConfig(BaseModel):
    """Transverse spectrum block."""

    count: int = Field(8, ge=1, description="Number of transverse modes m exposed by the spectrum.")
    file: Optional[Path] = Field(None, description="Columnar table of manufactured modes.")
    eigenvalues: Optional[list[float]] = Field(None, description="Eigenvalues of manufactured modes.")
    grouping_tol: float = Field(1e-9, gt=0.0, description="Relative threshold grouping tolerance.")


class PotentialConfig(BaseModel):
    """One perturbing potential."""

    form: Literal["trig", "grid", "box"] = "trig"
    a: list[float] = Field(default_factory=list, description="Coefficients of the real part W1.")
    b: list[float] = Field(default_factory=list, description="Coefficients of the imaginary part W2.")
    support_halfwidth: float = Field(math.pi, gt=0.0)
    amplitude: Optional[tuple[float, float]] = Field(None, description="Box amplitude as [re, im].")
    x1_range: Optional[tuple[float, float]] = None
    x2_range: Optional[tuple[float, float]] = None
    file: Optional[Path] = Field(None, description="npz file with x1, x2, values arrays.")

    @field_validator("amplitude", mode="before")
    @classmethod
    def _parse_amplitude(cls, value: Any) -> Any:
        if isinstance(value, (int, float)):
            return (float(value), 0.0)
        return value

    @model_validator(mode="after")
    def _check_form(self) -> "PotentialConfig":
        if self.form == "box":
            if self.amplitude is None or self.x1_range is None or self.x2_range is None:
                raise ValueError("box potentials need amplitude, x1_range and x2_range")
            for name, (lo, hi) in (("x1_range", self.x1_range), ("x2_range", self.x2_range)):
                if not lo < hi:
                    raise ValueError(f"{name} must be increasing, got ({lo}, {hi})")
        if self.form == "grid" and self.file is None:
            raise ValueError("grid potentials need a file")
        return self

    @property
    def amplitude_complex(self) -> complex:
        re, im = self.amplitude or (0.0, 0.0)
        return complex(re, im)


class EpsilonConfig(BaseModel):
    """Sweep values; explicit ``values`` take precedence over the range."""

    values: Optional[list[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    step: Optional[float] = Field(None, gt=0.0)

    @model_validator(mode="after")
    def _check_sweep(self) -> "EpsilonConfig":
        if self.values is None and None in (self.start, self.stop, self.step):
            if any(v is not None for v in (self.start, self.stop, self.step)):
                raise ValueError("an epsilon range needs start, stop and step")
        for value in self.resolve():
            if value <= 0:
                raise ValueError(f"epsilon values must be positive, got {value}")
        return self

    def resolve(self) -> list[float]:
        """Sorted, de-duplicated sweep values."""

        if self.values is not None:
            return sorted(set(float(v) for v in self.values))
        if self.start is None or self.stop is None or self.step is None:
            return []
        count = int(round((self.stop - self.start) / self.step)) + 1
        return sorted(set(round(self.start + i * self.step, 12) for i in range(max(count, 0))))


class PipelineConfig(BaseModel):
    asymptotics: bool = True
    direct: bool = True
    verify_absence: bool = False


class QuadratureConfig(BaseModel):
    """Panelized Gauss-Legendre settings."""

    order: int = Field(32, ge=2, le=128, description="Gauss-Legendre nodes per panel.")
    panels: int = Field(4, ge=1, description="Initial panels per support interval.")
    max_panels: int = Field(64, ge=1, description="Refinement cap for adaptive integrals.")
    tolerance: float = Field(1e-10, gt=0.0, description="Relative accuracy target.")


class GreensConfig(BaseModel):
    jmax: int = Field(64, ge=1, description="Modes kept in the Green operator mode sum.")
    tail_tolerance: float = Field(1e-8, gt=0.0, description="Tail estimate triggering a warning.")


class ClusteringConfig(BaseModel):
    scale: float = Field(1e-8, gt=0.0, description="M1 eigenvalue cluster tolerance factor.")
    zero_band: float = Field(1e-10, gt=0.0, description="Relative band for sign tests.")


class SolverConfig(BaseModel):
    """Direct finite-difference eigensolver knobs."""

    n1: int = Field(64, ge=16, description="Transverse interior points.")
    n2: int = Field(1500, ge=16, description="Axial unknowns.")
    x0: float = Field(400.0, gt=0.0, description="Axial half-length of the truncated domain.")
    sigma: float = Field(5.0, gt=0.0, description="Stretching strength of the sinh map.")
    far_bc: Literal["auto", "dirichlet", "neumann"] = "auto"
    neumann_below: float = Field(0.2, ge=0.0, description="Use Neumann ends for eps below this.")
    tol: float = Field(1e-9, gt=0.0, description="Residual tolerance for accepted eigenpairs.")
    count: int = Field(4, ge=1, description="Eigenvalues requested near each target.")
    ncv: int = Field(40, ge=4, description="Arnoldi subspace dimension.")
    restarts: int = Field(5, ge=1, description="Implicit restarts allowed.")
    min_cells_per_unit: float = Field(16.0, gt=0.0)
    max_step_ratio: float = Field(1.25, gt=1.0)


class OutputConfig(BaseModel):
    directory: Path = Field(Path("results"), description="Directory receiving all outputs.")
    svg: bool = True
    timing_in_csv: bool = False


class ExperimentConfig(BaseModel):
    """Root configuration model for one threshold experiment."""

    name: str = "experiment"
    model: Literal["strip", "oscillator", "manufactured"] = "strip"
    modes: ModesConfig = Field(default_factory=ModesConfig)
    threshold: int = Field(1, ge=1, description="1-based index p of the threshold.")
    potential: PotentialConfig = Field(default_factory=PotentialConfig)
    potential2: Optional[PotentialConfig] = None
    epsilon: EpsilonConfig = Field(default_factory=EpsilonConfig)
    pipelines: PipelineConfig = Field(default_factory=PipelineConfig)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    greens: GreensConfig = Field(default_factory=GreensConfig)
    clustering: ClusteringConfig = Field(default_factory=ClusteringConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    workers: int = Field(4, ge=1, description="Bounded worker pool size for sweeps.")

    @model_validator(mode="after")
    def _check_threshold(self) -> "ExperimentConfig":
        if self.model == "manufactured":
            if self.modes.file is None or not self.modes.eigenvalues:
                raise ValueError("manufactured models need modes.file and modes.eigenvalues")
            if self.threshold > len(self.modes.eigenvalues):
                raise ValueError(
                    f"threshold {self.threshold} exceeds the {len(self.modes.eigenvalues)} manufactured modes"
                )
        elif self.threshold > self.modes.count:
            raise ValueError(f"threshold {self.threshold} exceeds modes.count={self.modes.count}")
        return self

    @property
    def eps_values(self) -> list[float]:
        return self.epsilon.resolve()

    def resolve_paths(self, base: Path) -> "ExperimentConfig":
        """Anchor relative file references at ``base`` (the config file directory)."""

        def _anchor(path: Optional[Path]) -> Optional[Path]:
            if path is None or path.is_absolute():
                return path
            return base / path

        self.modes.file = _anchor(self.modes.file)
        self.output.directory = _anchor(self.output.directory) or self.output.directory
        self.potential.file = _anchor(self.potential.file)
        if self.potential2 is not None:
            self.potential2.file = _anchor(self.potential2.file)
        return self


def _load_yaml(path: Path) -> Dict[str, Any]:
    with path.open("r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration file {path} must contain a mapping at the root level.")
    return data


def load_config(
    path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None
) -> ExperimentConfig:
    """Load an experiment configuration from disk and apply overrides.

    Args:
        path: Optional path to a YAML configuration file. When ``None`` the
            ``configs/default.yaml`` file will be used.
        overrides: Optional mapping of configuration overrides. Nested values are
            merged on top of the parsed YAML.

    Returns:
        A fully validated :class:`ExperimentConfig` instance.

    Raises:
        ConfigError: when the file is malformed or validation fails; the error
            carries the dotted path of every offending field.
    """

    if path is None:
        path = DEFAULT_CONFIG

    LOGGER.debug("Loading configuration", extra={"path": str(path)})

    config_dict: Dict[str, Any] = {}
    if path.exists():
        try:
            config_dict = _load_yaml(path)
        except yaml.YAMLError as exc:
            raise ConfigError(f"Configuration file {path} is not valid YAML: {exc}") from exc
    else:
        LOGGER.warning("Configuration file not found, falling back to defaults", extra={"path": str(path)})

    if overrides:
        config_dict = _deep_merge(config_dict, overrides)

    try:
        config = ExperimentConfig.model_validate(config_dict)
    except ValidationError as exc:
        paths = [".".join(str(part) for part in err["loc"]) or "<root>" for err in exc.errors()]
        LOGGER.error("Configuration validation failed", extra={"fields": paths})
        raise ConfigError(f"Configuration {path} failed validation: {exc}", paths) from exc

    return config.resolve_paths(path.parent)


def _deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    result = dict(base)
    for key, value in overrides.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value
    return result


__all__ = [
    "ClusteringConfig",
    "EpsilonConfig",
    "ExperimentConfig",
    "GreensConfig",
    "LoggingConfig",
    "ModesConfig",
    "OutputConfig",
    "PipelineConfig",
    "PotentialConfig",
    "QuadratureConfig",
    "SolverConfig",
    "load_config",
]
