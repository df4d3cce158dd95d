import json

import pytest

from thresholdlab.core.errors import OutputError
from thresholdlab.core.types import ComparisonRow
from thresholdlab.services.reporting import (
    comparison_columns,
    emit_outputs,
    read_comparison_csv,
    write_comparison_csv,
    write_fig_data,
    write_summary_json,
)
from thresholdlab.services.svgplot import Series, render_line_plot


def _rows():
    return [
        ComparisonRow(
            eps=0.1,
            tau=1,
            cluster=1,
            branch=1,
            kind="eigenvalue",
            lam_asym1=0.99 + 0.0j,
            lam_asym2=0.99885 + 0.0j,
            lam_refined=0.998851 - 1e-12j,
            lam_direct=0.9988512 + 0.0j,
            residual=1e-11,
            tail_mass=1e-5,
            runtime_ms=12.5,
        ),
        ComparisonRow(eps=0.2, tau=-1, cluster=1, branch=2, kind="resonance", lam_asym2=3.9 + 0.01j, note="skip"),
    ]


def test_comparison_csv_round_trip(tmp_path):
    path = write_comparison_csv(_rows(), tmp_path / "comparison.csv")
    rows = read_comparison_csv(path)
    assert len(rows) == 2
    assert rows[0].lam_refined == 0.998851 - 1e-12j
    assert rows[0].lam_direct == 0.9988512
    assert rows[0].residual == 1e-11
    assert rows[1].lam_direct is None
    assert rows[1].tail_mass is None
    assert rows[1].note == "skip"
    assert "0.99885,0.0" in path.read_text()


def test_runtime_column_only_when_timing(tmp_path):
    assert "runtime_ms" not in comparison_columns()
    assert comparison_columns(timing=True)[-3] == "runtime_ms"
    plain = write_comparison_csv(_rows(), tmp_path / "plain.csv")
    timed = write_comparison_csv(_rows(), tmp_path / "timed.csv", timing=True)
    assert "runtime_ms" not in plain.read_text().splitlines()[0]
    assert read_comparison_csv(plain)[0].runtime_ms is None
    assert read_comparison_csv(timed)[0].runtime_ms == 12.5


def test_missing_values_are_empty_cells(tmp_path):
    path = write_comparison_csv(_rows()[1:], tmp_path / "comparison.csv")
    record = path.read_text().splitlines()[1].split(",")
    columns = comparison_columns()
    assert record[columns.index("re_lam_direct")] == ""
    assert record[columns.index("residual")] == ""


def test_summary_json_encodes_infinity_and_complex(tmp_path):
    path = write_summary_json({"tail": float("inf"), "mu": 1.0 - 2.0j, "poles": [{"q": 2}]}, tmp_path / "s.json")
    data = json.loads(path.read_text())
    assert data["tail"] == "inf"
    assert data["mu"] == [1.0, -2.0]
    assert data["poles"] == [{"q": 2}]


def test_fig_data_tags_tau_with_sign(tmp_path):
    path = write_fig_data(_rows(), tmp_path / "fig_data_demo.csv")
    lines = path.read_text().splitlines()
    assert lines[0].startswith("eps,tau,cluster,branch,re_asym1,im_asym1")
    assert lines[1].split(",")[1] == "+1"
    assert lines[2].split(",")[1] == "-1"


def test_emit_outputs_file_set(tmp_path):
    with_svg = emit_outputs(_rows(), {"rows": 2}, tmp_path / "a", name="demo")
    assert sorted(p.name for p in with_svg) == [
        "comparison.csv",
        "fig_data_demo.csv",
        "plot_im.svg",
        "plot_re.svg",
        "summary.json",
    ]
    assert all(p.exists() for p in with_svg)
    without = emit_outputs(_rows(), {"rows": 2}, tmp_path / "b", name="demo", svg=False)
    assert len(without) == 3


def test_unwritable_directory_raises_output_error(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    with pytest.raises(OutputError):
        emit_outputs(_rows(), {}, blocker, svg=False)


def test_svg_has_one_polyline_per_series_and_escapes_labels():
    series = [
        Series(label="asym2 <tau=+1>", x=[0.1, 0.2], y=[1.0, 0.9]),
        Series(label="direct & more", x=[0.1, 0.2], y=[1.0, float("nan")]),
    ]
    svg = render_line_plot(series, x_label="eps", y_label="Re lambda", title="demo")
    assert svg.count("<polyline") == 2
    assert "&lt;tau=+1&gt;" in svg
    assert "direct &amp; more" in svg
    assert svg.startswith("<svg")
