"""Gap sweeps: solve at each gap width, then fit and compare with the predictors."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..asymptotics import gradient_blowup_prediction
from ..energy import QuadraticForm, assemble_quadratic_form, check_c12_relations, minimize_quadratic_form
from ..errors import ConfigError, GapfieldError, GeometryError, SweepError
from ..fitting import fit_exponent, fixed_slope_prefactor
from ..geometry import closest_gap, make_touching, set_gap
from ..neck import conductance_constant, neck_conductance_leading
from ..solver import (
    GRADIENT_RULE,
    dirichlet_energy,
    discretize,
    extrapolate_flux,
    max_gradient,
    solve_floating,
    variational_bounds,
)
from .config import RunPlan

REPORT_VERSION = 1
# magnitudes below this are treated as exact zeros (e.g. constant outer data)
ZERO_TOL = 1e-9

# per-row quantities straight from the solves, in csv order
ROW_COLUMNS = (
    "delta", "T1", "T2", "dT", "max_grad", "argmax_x", "argmax_y", "argmax_xbar", "argmax_in_neck",
    "G1", "G2", "c12", "c12_reverse", "R_delta", "b2", "T_delta", "E_v", "energy", "energy_form",
    "g_derived", "g_paper", "neck_width", "bound_lower", "bound_upper", "bound_gap", "keller",
    "budget", "alpha", "error",
)
# columns filled in after the zero-gap flux is known
DERIVED_COLUMNS = (
    "pred_grad_derived", "pred_grad_paper", "pred_drop_derived", "ratio_drop", "ratio_grad",
    "ratio_pred",
)
CSV_COLUMNS = ROW_COLUMNS + DERIVED_COLUMNS


@dataclass(frozen=True)
class SweepReport:
    rows: tuple
    fits: dict
    R_o: dict
    checks: dict
    metadata: dict
    failures: tuple = field(default=())

    def to_dict(self) -> dict:
        return {"rows": [dict(r) for r in self.rows], "fits": self.fits, "R_o": self.R_o,
                "checks": self.checks, "metadata": self.metadata, "failures": list(self.failures)}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepReport":
        return cls(tuple(dict(r) for r in d["rows"]), d["fits"], d["R_o"], d["checks"], d["metadata"],
                   tuple(d.get("failures", ())))

    def column(self, name: str, ok_only: bool = True) -> list:
        return [r[name] for r in self.rows if not ok_only or r["error"] is None]

    @property
    def ok_rows(self) -> list:
        return [r for r in self.rows if r["error"] is None]

    def form(self, row: dict) -> QuadraticForm:
        return QuadraticForm(row["G1"], row["G2"], row["R_delta"], row["b2"], row["c12"],
                             row["E_v"], row["T_delta"])


def _finite(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def solve_row(plan: RunPlan, touching, delta: float) -> dict:
    """All per-gap quantities for one gap width."""
    i, j = plan.pair
    row = {k: None for k in ROW_COLUMNS}
    row["delta"] = float(delta)
    try:
        cfg = set_gap(touching, i, j, delta)
        gap = closest_gap(cfg, i, j)
        if plan.neck_width is not None:
            try:
                gap = gap.with_neck_width(plan.neck_width)
            except GeometryError:
                gap = gap.with_neck_width(None)
        disc = discretize(cfg, plan.level)
        asm = assemble_quadratic_form(disc, plan.boundary)
        form = asm.form
        psi1, psi2 = asm.capacitance
        u = solve_floating(disc, plan.boundary, pieces=(asm.shared, asm.capacitance))
        grad = max_gradient(u, gap)
        mini = minimize_quadratic_form(form)
        row.update(
            T1=u.potentials[i], T2=u.potentials[j], dT=u.potentials[j] - u.potentials[i],
            max_grad=grad.value, argmax_x=grad.location.real, argmax_y=grad.location.imag,
            argmax_xbar=grad.xbar, argmax_in_neck=grad.in_neck,
            G1=form.a1, G2=form.a2, c12=psi1.particle_flux(1), c12_reverse=psi2.particle_flux(0),
            R_delta=form.b1, b2=form.b2, T_delta=form.T_delta, energy=dirichlet_energy(u),
            energy_form=mini.energy, E_v=form.C,
            g_derived=neck_conductance_leading(gap, "derived"),
            g_paper=neck_conductance_leading(gap, "paper"),
            neck_width=gap.neck_width, alpha=gap.alpha,
        )
        if gap.neck_width is not None:
            bp = variational_bounds(psi1, gap, 0)
            row.update(bound_lower=bp.lower, bound_upper=bp.upper, bound_gap=bp.gap,
                       keller=bp.keller, budget=bp.budget)
    except GapfieldError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return {k: (_finite(v) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()}


def _fit(rows, name, sign=1.0):
    pairs = [(r["delta"], sign * r[name]) for r in rows if r[name] is not None]
    if len(pairs) < 3:
        return {"status": "undefined", "reason": "fewer than 3 rows"}
    if all(abs(v) <= ZERO_TOL for _, v in pairs):
        return {"status": "undefined", "reason": "all values are zero"}
    if any(v <= 0 for _, v in pairs):
        return {"status": "undefined", "reason": "non-positive values"}
    out = fit_exponent(pairs).to_dict()
    out["status"] = "ok"
    return out


def run_sweep(plan: RunPlan) -> SweepReport:
    """Solve every gap width of the plan and aggregate fits and predictor ratios."""
    if plan.config.dim != 2 or plan.config.outer is None:
        raise ConfigError("sweeps need a d=2 configuration with an outer boundary", key_path="dim")
    if plan.config.n_particles != 2:
        raise ConfigError("sweeps are defined for two particles", key_path="particles")
    deltas = plan.deltas
    if len(deltas) < 4:
        raise ConfigError("a sweep needs at least 4 gap values", key_path="sweep.deltas")
    i, j = plan.pair
    touching = make_touching(plan.config, i, j)
    with ThreadPoolExecutor(max_workers=plan.workers) as pool:
        rows = list(pool.map(lambda d: solve_row(plan, touching, d), deltas))
    failures = tuple(f"delta={r['delta']!r}: {r['error']}" for r in rows if r["error"] is not None)
    if len(failures) * 2 > len(rows):
        raise SweepError("more than half of the sweep rows failed: " + "; ".join(failures))
    ok = [r for r in rows if r["error"] is None]

    R_o = {"value": None, "error": None, "status": "ok"}
    try:
        ex = extrapolate_flux([r["delta"] for r in ok], [r["R_delta"] for r in ok])
        R_o.update(value=ex.value, error=ex.error)
    except GapfieldError as exc:
        R_o.update(status=f"{type(exc).__name__}: {exc}")

    Ro = R_o["value"]
    if Ro is not None and abs(Ro) <= ZERO_TOL:
        Ro = R_o["value"] = 0.0
    for r in rows:
        for k in DERIVED_COLUMNS:
            r[k] = None
        if r["error"] is not None or Ro is None:
            continue
        if Ro != 0:
            gap_d = conductance_constant(_row_gap(r), "derived")
            gap_p = conductance_constant(_row_gap(r), "paper")
            pd = gradient_blowup_prediction(abs(Ro), gap_d, r["delta"], 2, "derived")
            pp = gradient_blowup_prediction(abs(Ro), gap_p, r["delta"], 2, "paper")
            r.update(pred_grad_derived=pd.value, pred_grad_paper=pp.value,
                     pred_drop_derived=pd.potential_difference,
                     ratio_drop=_finite(r["dT"] * r["g_derived"] / Ro),
                     ratio_pred=_finite(r["max_grad"] / pd.value))
        if abs(r["dT"]) > ZERO_TOL:
            r["ratio_grad"] = _finite(r["max_grad"] * r["delta"] / r["dT"])

    fits = {
        "max_grad": _fit(ok, "max_grad"),
        "G1": _fit(ok, "G1"),
        "G2": _fit(ok, "G2"),
        "minus_c12": _fit(ok, "c12", -1.0),
        "dT": _fit(ok, "dT"),
    }
    prefactor = None
    if fits["max_grad"]["status"] == "ok":
        prefactor = fixed_slope_prefactor([(r["delta"], r["max_grad"]) for r in ok], -0.5)
    predicted_prefactor = None
    if Ro and ok:
        predicted_prefactor = abs(Ro) / conductance_constant(_row_gap(ok[0]), "derived")
    fits["max_grad_prefactor"] = {"fitted": prefactor, "predicted_derived": predicted_prefactor,
                                  "predicted_paper": (abs(Ro) / conductance_constant(_row_gap(ok[0]), "paper"))
                                  if predicted_prefactor is not None else None,
                                  "slope": -0.5}

    checks = {}
    if len(ok) >= 3:
        forms = [QuadraticForm(r["G1"], r["G2"], r["R_delta"], r["b2"], r["c12"], r["E_v"],
                               r["T_delta"]) for r in ok]
        checks["c12_relations"] = check_c12_relations([r["delta"] for r in ok], forms).to_dict()
    metadata = {
        "config_hash": plan.config_hash,
        "name": plan.name,
        "level": plan.level,
        "neck_width_rule": "auto" if plan.neck_width is None else plan.neck_width,
        "mode": plan.mode,
        "gradient_rule": GRADIENT_RULE,
        "pair": list(plan.pair),
        "boundary_data": plan.boundary.to_dict(),
        "version": __version__,
        "report_version": REPORT_VERSION,
        "columns": list(CSV_COLUMNS),
    }
    rows = sorted(rows, key=lambda r: -r["delta"])
    return SweepReport(tuple(rows), fits, R_o, checks, metadata, failures)


def _row_gap(row):
    from ..geometry import GapGeometry

    return GapGeometry.parabolic_2d(row["delta"], row["alpha"], neck_width=None)
