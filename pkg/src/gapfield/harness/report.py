"""Deterministic report files: csv rows, full json, and log-log plot series.

CSV schema ``gapfield-sweep-csv/1``: one header line with the columns of
``CSV_COLUMNS`` in order, then one line per row sorted by decreasing delta.
Missing values are empty fields; floats use ``repr`` so they round-trip.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from ..errors import ConfigError
from .sweep import CSV_COLUMNS, SweepReport

CSV_SCHEMA = "gapfield-sweep-csv/1"
FORMATS = ("csv", "json", "plotdata")
PLOT_SERIES = ("max_grad", "dT", "G1", "G2", "minus_c12", "R_delta", "energy", "g_derived", "g_paper",
               "pred_grad_derived", "bound_lower", "bound_upper")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(report: SweepReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow([_cell(row.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def render_json(report: SweepReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_plotdata(report: SweepReport) -> str:
    lines = ["# gapfield plot data: x = delta, both axes logarithmic",
             f"# config {report.metadata.get('config_hash', '')}"]
    for name in PLOT_SERIES:
        lines.append("")
        lines.append(f"# series {name}")
        for row in report.rows:
            if row.get("error") is not None:
                continue
            y = -row["c12"] if name == "minus_c12" and row.get("c12") is not None else row.get(name)
            if y is None or y <= 0:
                continue
            lines.append(f"{row['delta']!r} {float(y)!r}")
    return "\n".join(lines) + "\n"


_RENDER = {"csv": (render_csv, "sweep.csv"), "json": (render_json, "sweep.json"),
           "plotdata": (render_plotdata, "sweep.plot.dat")}


def emit_report(report: SweepReport, fmt: str, out_dir) -> Path:
    """Write the report in ``fmt`` under ``out_dir`` and return the file path."""
    if fmt not in _RENDER:
        raise ConfigError(f"unknown report format {fmt!r}; choose from {FORMATS}", key_path="--format")
    render, name = _RENDER[fmt]
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        path = out / name
        path.write_text(render(report))
    except OSError as exc:
        raise ConfigError(f"cannot write report to {out}: {exc}", key_path="--out") from exc
    return path


def load_report(path) -> SweepReport:
    return SweepReport.from_dict(json.loads(Path(path).read_text()))


def empty_report() -> SweepReport:
    return SweepReport((), {}, {"value": None, "error": None, "status": "empty"}, {},
                       {"columns": list(CSV_COLUMNS)})
