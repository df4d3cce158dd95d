"""Command line front end for threshold experiments."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, Optional

from rich.console import Console
from rich.table import Table

from thresholdlab.core.config import ExperimentConfig, load_config
from thresholdlab.core.errors import ConfigError, ThresholdLabError
from thresholdlab.core.events import GLOBAL_BUS, SWEEP_FINISHED, SWEEP_POINT, SWEEP_STARTED
from thresholdlab.core.logger import configure_logging, get_logger
from thresholdlab.core.types import ComparisonRow
from thresholdlab.core.utils import install_excepthook
from thresholdlab.services.experiment import ExperimentResult, run_experiment
from thresholdlab.services.reporting import emit_outputs
from thresholdlab.transverse import ManufacturedModel, OscillatorModel, StripModel
from thresholdlab.transverse.base import TransverseModel, group_thresholds

LOGGER = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CONSOLE = Console()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thresholdlab", description="Threshold eigenvalue and resonance experiments")
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="Run an epsilon sweep and write comparison outputs")
    run.add_argument("config", type=Path, help="Experiment YAML file")
    run.add_argument("--out", type=Path, default=None, help="Output directory")
    run.add_argument("--only", choices=["asymptotics", "direct"], default=None)
    run.add_argument("--eps-override", default=None, metavar="LIST", help="Comma separated epsilon values")

    modes = sub.add_parser("modes", help="Print the transverse spectrum and its threshold groups")
    modes.add_argument("model", choices=["strip", "oscillator", "manufactured"])
    modes.add_argument("-m", type=int, default=8, dest="count", help="Number of modes")
    modes.add_argument("--file", type=Path, default=None, help="Mode table of a manufactured model")
    modes.add_argument("--eigenvalues", default=None, help="Comma separated manufactured eigenvalues")

    check = sub.add_parser("check", help="Validate a configuration without running it")
    check.add_argument("config", type=Path)

    return parser


def _parse_floats(text: str, option: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"{option} expects comma separated numbers, got {text!r}", [option]) from exc


def run_overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Config overrides implied by ``run`` options."""

    overrides: dict[str, Any] = {}
    if args.out is not None:
        overrides["output"] = {"directory": str(args.out.resolve())}
    if args.only == "asymptotics":
        overrides["pipelines"] = {"asymptotics": True, "direct": False}
    elif args.only == "direct":
        overrides["pipelines"] = {"asymptotics": False, "direct": True}
    if args.eps_override is not None:
        overrides["epsilon"] = {"values": _parse_floats(args.eps_override, "--eps-override")}
    return overrides


def _load(path: Path, overrides: Optional[dict[str, Any]] = None) -> ExperimentConfig:
    if not path.exists():
        raise ConfigError(f"Configuration file {path} not found", ["config"])
    return load_config(path, overrides)


def _configure(config: ExperimentConfig) -> None:
    configure_logging(
        level=config.logging.level,
        log_dir=config.logging.log_dir,
        rotate_megabytes=config.logging.rotate_megabytes,
        rotate_backups=config.logging.rotate_backups,
    )
    if config.logging.level.upper() == "DEBUG":
        install_excepthook()


def _format_complex(value: Optional[complex]) -> str:
    if value is None:
        return "-"
    return f"{value.real:.8f}{value.imag:+.2e}i"


def _rows_table(rows: list[ComparisonRow]) -> Table:
    table = Table(title="Threshold poles")
    for column in ("eps", "tau", "pole", "kind", "asym1", "asym2", "refined", "direct", "note"):
        table.add_column(column)
    for row in rows:
        table.add_row(
            f"{row.eps:g}",
            f"{row.tau:+d}",
            f"{row.cluster}.{row.branch}",
            row.kind,
            _format_complex(row.lam_asym1),
            _format_complex(row.lam_asym2),
            _format_complex(row.lam_refined),
            _format_complex(row.lam_direct),
            row.error or row.note,
        )
    return table


def _on_started(name: str, count: int) -> None:
    CONSOLE.print(f"[bold]{name}[/bold]: sweeping {count} epsilon values")


def _on_point(eps: float, rows: list[ComparisonRow]) -> None:
    failed = sum(1 for row in rows if row.error)
    CONSOLE.print(f"  eps={eps:g}: {len(rows)} poles" + (f", {failed} failed" if failed else ""))


def _on_finished(result: ExperimentResult) -> None:
    CONSOLE.print(f"Finished with {len(result.rows)} rows")


def cmd_run(args: argparse.Namespace) -> int:
    config = _load(args.config, run_overrides(args))
    _configure(config)
    handlers = {SWEEP_STARTED: _on_started, SWEEP_POINT: _on_point, SWEEP_FINISHED: _on_finished}
    with GLOBAL_BUS.listening(handlers):
        result = run_experiment(config)
    written = emit_outputs(
        result.rows,
        result.summary,
        config.output.directory,
        name=config.name,
        svg=config.output.svg,
        timing=config.output.timing_in_csv,
    )
    if result.rows:
        CONSOLE.print(_rows_table(result.rows))
    CONSOLE.print(f"Wrote {len(written)} files to {config.output.directory}")
    if result.failed_rows:
        LOGGER.error("Some sweep points failed", extra={"failed": len(result.failed_rows)})
        return EXIT_NUMERICAL
    return EXIT_OK


def _modes_model(args: argparse.Namespace) -> TransverseModel:
    if args.model == "strip":
        return StripModel()
    if args.model == "oscillator":
        return OscillatorModel()
    if args.file is None or args.eigenvalues is None:
        raise ConfigError("manufactured modes need --file and --eigenvalues", ["--file", "--eigenvalues"])
    return ManufacturedModel(args.file, _parse_floats(args.eigenvalues, "--eigenvalues"))


def cmd_modes(args: argparse.Namespace) -> int:
    spectrum = _modes_model(args).spectrum(args.count)
    groups = {index: group for group in group_thresholds(spectrum) for index in group.indices}
    table = Table(title=f"{args.model} transverse spectrum")
    for column in ("j", "Lambda_j", "threshold p", "multiplicity"):
        table.add_column(column, justify="right")
    for mode in spectrum.modes:
        group = groups[mode.index]
        table.add_row(str(mode.index), f"{mode.eigenvalue:.10g}", str(group.start), str(group.multiplicity))
    CONSOLE.print(table)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    config = _load(args.config)
    CONSOLE.print(
        f"{args.config}: valid ({config.model}, p={config.threshold}, {len(config.eps_values)} epsilon values)"
    )
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {"run": cmd_run, "modes": cmd_modes, "check": cmd_check}
    if args.command not in commands:
        parser.print_help()
        return 1
    try:
        return commands[args.command](args)
    except ConfigError as exc:
        CONSOLE.print(f"[red]Configuration error:[/red] {exc}")
        return EXIT_CONFIG
    except ThresholdLabError as exc:
        LOGGER.error("Run failed", extra={"error": str(exc)})
        CONSOLE.print(f"[red]Failed:[/red] {exc}")
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
