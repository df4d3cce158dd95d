"""Comparison tables, classification summaries and figure data on disk."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from thresholdlab.core.errors import OutputError
from thresholdlab.core.logger import get_logger
from thresholdlab.core.types import ComparisonRow

from .svgplot import Series, write_line_plot

LOGGER = get_logger(__name__)

LAMBDA_FIELDS = ("lam_asym1", "lam_asym2", "lam_refined", "lam_direct")
METHOD_LABELS = {"lam_asym1": "asym1", "lam_asym2": "asym2", "lam_refined": "refined", "lam_direct": "direct"}


def comparison_columns(timing: bool = False) -> list[str]:
    """Fixed header of ``comparison.csv``; ``runtime_ms`` only when timing is requested."""

    columns = ["eps", "tau", "cluster", "branch", "kind"]
    for name in LAMBDA_FIELDS:
        columns += [f"re_{name}", f"im_{name}"]
    columns += ["residual", "tail_mass"]
    if timing:
        columns.append("runtime_ms")
    return columns + ["note", "error"]


def _real(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _parse_real(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def _row_record(row: ComparisonRow, timing: bool) -> list[str]:
    record = [repr(float(row.eps)), str(row.tau), str(row.cluster), str(row.branch), row.kind]
    for name in LAMBDA_FIELDS:
        value = getattr(row, name)
        if value is None:
            record += ["", ""]
        else:
            record += [_real(value.real), _real(value.imag)]
    record += [_real(row.residual), _real(row.tail_mass)]
    if timing:
        record.append(_real(row.runtime_ms))
    return record + [row.note, row.error]


def _open_for_write(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OutputError(f"Cannot write {path}: {exc}") from exc


def write_comparison_csv(rows: Sequence[ComparisonRow], path: Path, timing: bool = False) -> Path:
    with _open_for_write(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(comparison_columns(timing))
        for row in rows:
            writer.writerow(_row_record(row, timing))
    LOGGER.info("Saved comparison table", extra={"path": str(path), "rows": len(rows)})
    return path


def read_comparison_csv(path: Path) -> list[ComparisonRow]:
    """Parse a file written by :func:`write_comparison_csv`."""

    rows: list[ComparisonRow] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        for record in csv.DictReader(handle):
            row = ComparisonRow(
                eps=float(record["eps"]),
                tau=int(record["tau"]),
                cluster=int(record["cluster"]),
                branch=int(record["branch"]),
                kind=record["kind"],
                residual=_parse_real(record["residual"]),
                tail_mass=_parse_real(record["tail_mass"]),
                runtime_ms=_parse_real(record.get("runtime_ms", "")),
                note=record["note"],
                error=record["error"],
            )
            for name in LAMBDA_FIELDS:
                re, im = record[f"re_{name}"], record[f"im_{name}"]
                if re != "":
                    setattr(row, name, complex(float(re), float(im)))
            rows.append(row)
    return rows


def _json_ready(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_summary_json(summary: dict[str, Any], path: Path) -> Path:
    with _open_for_write(path) as handle:
        json.dump(_json_ready(summary), handle, indent=2, sort_keys=True)
        handle.write("\n")
    LOGGER.info("Saved summary", extra={"path": str(path)})
    return path


def _tau_tag(tau: int) -> str:
    return f"{tau:+d}"


def write_fig_data(rows: Sequence[ComparisonRow], path: Path) -> Path:
    """``eps`` against real and imaginary parts of every method, one line per pole and ``eps``."""

    header = ["eps", "tau", "cluster", "branch"]
    for name in LAMBDA_FIELDS:
        header += [f"re_{METHOD_LABELS[name]}", f"im_{METHOD_LABELS[name]}"]
    with _open_for_write(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            record = [repr(float(row.eps)), _tau_tag(row.tau), str(row.cluster), str(row.branch)]
            for name in LAMBDA_FIELDS:
                value = getattr(row, name)
                record += ["", ""] if value is None else [_real(value.real), _real(value.imag)]
            writer.writerow(record)
    LOGGER.info("Saved figure data", extra={"path": str(path)})
    return path


def _series(rows: Iterable[ComparisonRow], part: str) -> list[Series]:
    grouped: dict[tuple[str, int, int, int], list[tuple[float, float]]] = {}
    for row in rows:
        for name in LAMBDA_FIELDS:
            value = getattr(row, name)
            if value is None:
                continue
            key = (name, row.tau, row.cluster, row.branch)
            grouped.setdefault(key, []).append((row.eps, value.real if part == "re" else value.imag))
    series = []
    ordered = sorted(grouped.items(), key=lambda item: item[0][1:] + (item[0][0],))
    for (name, tau, cluster, branch), points in ordered:
        label = f"{METHOD_LABELS[name]} tau={_tau_tag(tau)} c{cluster}b{branch}"
        points.sort()
        series.append(Series(label=label, x=[p[0] for p in points], y=[p[1] for p in points]))
    return series


def emit_outputs(
    rows: Sequence[ComparisonRow],
    summary: dict[str, Any],
    directory: Path,
    name: str = "experiment",
    svg: bool = True,
    timing: bool = False,
) -> list[Path]:
    """Writes ``comparison.csv``, ``summary.json``, ``fig_data_<name>.csv`` and optional SVG plots."""

    written = [
        write_comparison_csv(rows, directory / "comparison.csv", timing),
        write_summary_json(summary, directory / "summary.json"),
        write_fig_data(rows, directory / f"fig_data_{name}.csv"),
    ]
    if svg and rows:
        for part, axis in (("re", "Re lambda"), ("im", "Im lambda")):
            path = directory / f"plot_{part}.svg"
            try:
                write_line_plot(
                    path, _series(rows, part), x_label="eps", y_label=axis, title=f"{name}: {axis}"
                )
            except OSError as exc:
                raise OutputError(f"Cannot write {path}: {exc}") from exc
            written.append(path)
    return written


__all__ = [
    "comparison_columns",
    "emit_outputs",
    "read_comparison_csv",
    "write_comparison_csv",
    "write_fig_data",
    "write_summary_json",
]
