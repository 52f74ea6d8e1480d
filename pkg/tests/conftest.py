from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Gap widths of the shared two-disk benchmark sweep (decreasing).
BENCHMARK_DELTAS = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5]


def benchmark_document(deltas=None, **sweep) -> dict:
    """Unit disks on the y axis inside a circle of radius 10, U = y."""
    doc = {
        "name": "two-disk benchmark",
        "outer": {"kind": "circle", "radius": 10.0},
        "particles": [
            {"kind": "circle", "radius": 1.0, "center": [0.0, -1.005]},
            {"kind": "circle", "radius": 1.0, "center": [0.0, 1.005]},
        ],
        "boundary_data": {"kind": "linear_y", "value": 1.0},
        "sweep": {"deltas": list(deltas or BENCHMARK_DELTAS), "level": 2, "neck_width": 0.2,
                  "workers": 4},
    }
    doc["sweep"].update(sweep)
    return doc


@pytest.fixture(scope="session")
def benchmark_report():
    from gapfield.harness import plan_from_dict, run_sweep

    return run_sweep(plan_from_dict(benchmark_document()))


ACCEPTANCE_LINES: list = []


@pytest.fixture()
def criterion():
    """Record one PASS/FAIL line for the acceptance summary, print it, and return the verdict."""

    def record(number, name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2} {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
