"""Configuration loading, gap sweeps, report emission and the command line."""
from .config import RunPlan, load_config, plan_from_dict
from .report import emit_report, empty_report, load_report, render_csv, render_json, render_plotdata
from .sweep import CSV_COLUMNS, SweepReport, run_sweep
from .verify import CheckResult, run_invariant_suite

__all__ = [
    "CSV_COLUMNS", "CheckResult", "RunPlan", "SweepReport", "emit_report", "empty_report",
    "load_config", "load_report", "plan_from_dict", "render_csv", "render_json", "render_plotdata",
    "run_invariant_suite", "run_sweep",
]
