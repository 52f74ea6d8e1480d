from __future__ import annotations

import csv
import io
import json

import pytest
from conftest import benchmark_document

from gapfield.errors import ConfigError, SweepError
from gapfield.harness import (
    CSV_COLUMNS,
    emit_report,
    empty_report,
    load_config,
    load_report,
    plan_from_dict,
    render_csv,
    render_json,
    render_plotdata,
    run_invariant_suite,
    run_sweep,
)
from gapfield.harness.cli import main

SMALL = [1e-1, 5e-2, 2e-2, 1e-2]


def small_document(**sweep):
    return benchmark_document(SMALL, level=1, workers=2, **sweep)


@pytest.fixture(scope="module")
def small_report():
    return run_sweep(plan_from_dict(small_document()))


@pytest.fixture()
def config_file(tmp_path):
    def write(doc, name="plan.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return write


# -- configuration ---------------------------------------------------------------


def test_minimal_config_defaults():
    plan = plan_from_dict({"particles": [{"kind": "circle", "radius": 1, "center": [0, -1.1]},
                                         {"kind": "circle", "radius": 1, "center": [0, 1.1]}]})
    assert plan.level == 2 and plan.mode == "derived" and plan.workers == 1
    assert plan.neck_width is None and plan.pair == (0, 1)
    assert plan.boundary.kind == "linear_y"
    assert plan.config.outer.radius == 10.0


def test_overlap_names_pair():
    doc = small_document()
    doc["particles"][1]["center"] = [0.0, 0.5]
    with pytest.raises(Exception, match="particles 0 and 1 overlap"):
        plan_from_dict(doc)


def test_unknown_key_path():
    doc = small_document()
    doc["sweep"]["deltaa"] = [1e-2]
    with pytest.raises(ConfigError) as info:
        plan_from_dict(doc)
    assert info.value.key_path == "sweep.deltaa"


def test_gap_override_and_missing_file(tmp_path):
    doc = small_document()
    doc["gap"] = {"delta": 0.25}
    from gapfield.geometry import closest_gap

    assert closest_gap(plan_from_dict(doc).config, 0, 1).delta == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_d3_plan_is_analytic_only():
    plan = plan_from_dict({"dim": 3, "analytic_gap": {"delta": 1e-3, "radii_1": [1, 2]}})
    assert plan.analytic_gap.dim == 3 and plan.analytic_gap.neck_width is not None
    with pytest.raises(ConfigError):
        plan_from_dict({"dim": 3, "analytic_gap": {"delta": 1e-3, "radii_1": [1]}})


# -- sweeps ------------------------------------------------------------------------


def test_sweep_rules():
    with pytest.raises(ConfigError, match="at least 4"):
        run_sweep(plan_from_dict(benchmark_document(SMALL[:3], level=1)))
    with pytest.raises(ConfigError, match="decreasing"):
        plan_from_dict(benchmark_document([1e-1, 1e-2, 2e-2, 1e-3], level=1))
    with pytest.raises(SweepError):
        run_sweep(plan_from_dict(benchmark_document([1e-6, 5e-7, 2e-7, 1e-7], level=1)))


def test_constant_data_sweep():
    doc = small_document()
    doc["boundary_data"] = {"kind": "constant", "value": 2.0}
    rep = run_sweep(plan_from_dict(doc))
    assert rep.R_o["value"] == 0.0
    for r in rep.rows:
        assert abs(r["dT"]) < 1e-9 and r["max_grad"] < 1e-8
        assert r["ratio_drop"] is None and r["ratio_grad"] is None
    assert rep.fits["max_grad"]["status"] == "undefined"
    assert rep.fits["dT"]["status"] == "undefined"
    assert rep.fits["G1"]["status"] == "ok"


def test_sweep_report_contents(small_report):
    assert [r["delta"] for r in small_report.rows] == SMALL
    assert small_report.failures == ()
    assert small_report.metadata["columns"] == list(CSV_COLUMNS)
    for r in small_report.rows:
        # the form minimum and the floating energy agree
        assert r["energy_form"] == pytest.approx(r["energy"], rel=1e-7)
        assert r["c12"] == pytest.approx(r["c12_reverse"], rel=1e-8)


# -- reports ------------------------------------------------------------------------


def test_empty_report_csv_is_header_only():
    text = render_csv(empty_report())
    assert text == ",".join(CSV_COLUMNS) + "\n"


def test_csv_layout(small_report):
    rows = list(csv.reader(io.StringIO(render_csv(small_report))))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 1 + len(SMALL)
    k = CSV_COLUMNS.index("delta")
    assert [float(r[k]) for r in rows[1:]] == SMALL


def test_json_round_trip(small_report, tmp_path):
    path = emit_report(small_report, "json", tmp_path)
    back = load_report(path)
    assert back.to_dict() == json.loads(render_json(small_report))
    assert render_json(back) == render_json(small_report)


def test_reports_are_deterministic(small_report):
    again = run_sweep(plan_from_dict(small_document()))
    for render in (render_csv, render_json, render_plotdata):
        assert render(again) == render(small_report)


def test_plotdata_series(small_report):
    text = render_plotdata(small_report)
    assert "# series max_grad" in text and "# series minus_c12" in text
    block = text.split("# series G1\n")[1].split("\n\n")[0].splitlines()
    assert len(block) == len(SMALL)
    assert float(block[0].split()[1]) == small_report.rows[0]["G1"]


def test_unwritable_output(small_report, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ConfigError):
        emit_report(small_report, "csv", blocker / "sub")
    with pytest.raises(ConfigError):
        emit_report(small_report, "xml", tmp_path)


def test_invariant_suite_passes():
    results = run_invariant_suite(seed=3)
    assert results and all(r.passed for r in results), [r.line() for r in results if not r.passed]


# -- command line -------------------------------------------------------------------


def test_cli_solve(config_file, capsys):
    doc = small_document()
    doc["gap"] = {"delta": 0.05}
    assert main(["solve", "--config", config_file(doc), "--level", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["potentials"][1] == pytest.approx(-out["potentials"][0], abs=1e-10)
    assert out["delta"] == pytest.approx(0.05) and out["argmax_in_neck"]
    assert max(abs(f) for f in out["fluxes"]) < 1e-8


def test_cli_solve_unresolvable(config_file, capsys):
    doc = small_document()
    doc["gap"] = {"delta": 1e-9}
    assert main(["solve", "--config", config_file(doc), "--level", "1"]) == 2
    assert "RefineFurtherError" in capsys.readouterr().err


def test_cli_sweep(config_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["sweep", "--config", config_file(small_document()), "--format", "csv", "--out", str(out)]) == 0
    assert (out / "sweep.csv").read_text().startswith("delta,")
    bad = benchmark_document([1e-6, 5e-7, 2e-7, 1e-7], level=1)
    assert main(["sweep", "--config", config_file(bad, "bad.json"), "--out", str(out)]) == 2


def test_cli_predict(config_file, capsys):
    assert main(["predict", "--r-o", "2", "--delta", "1e-4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(2 / 3.141592653589793 / 1e-2, rel=1e-12)
    assert main(["predict", "--r-o", "1", "--delta", "1e-3", "--p", "3"]) == 0
    capsys.readouterr()
    assert main(["predict", "--r-o", "1", "--delta", "2", "--dim", "3"]) == 1
    assert main(["predict", "--delta", "1e-3"]) == 1
    doc = small_document()
    doc["R_o"] = 6.5
    assert main(["predict", "--config", config_file(doc), "--delta", "1e-4", "--mode", "paper"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mode"] == "paper" and out["delta"] == 1e-4


def test_cli_neck(config_file, capsys):
    assert main(["neck", "--delta", "1e-2", "--width", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["conductance"] == pytest.approx(20 * __import__("math").atan(5), rel=1e-8)
    assert out["lower"] <= out["upper"]
    assert main(["neck", "--delta", "1e-2", "--width", "0.5", "--profile", "constant", "--dim", "3"]) == 0
    capsys.readouterr()
    doc = small_document()
    doc["gap"] = {"delta": 0.01}
    assert main(["neck", "--config", config_file(doc), "--level", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["profile"] == "exact" and out["lower"] <= out["upper"]
    assert main(["neck", "--delta", "1e-2"]) == 1


def test_cli_verify(capsys):
    assert main(["verify", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_cli_usage_errors(config_file, capsys):
    assert main([]) == 1
    assert main(["solve", "--level", "99"]) == 1
    assert main(["solve"]) == 1
    doc = small_document()
    doc["sweep"]["deltaa"] = []
    assert main(["sweep", "--config", config_file(doc)]) == 1
    assert "deltaa" in capsys.readouterr().err
