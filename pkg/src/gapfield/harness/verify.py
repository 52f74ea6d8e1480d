"""Seeded invariant suite used by ``gapfield verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..asymptotics import gradient_blowup_prediction, n_particle_prediction, p_laplacian_prediction
from ..energy import assemble_quadratic_form, minimize_quadratic_form
from ..geometry import Circle, Configuration, GapGeometry
from ..neck import GapProfile, conductance_constant, neck_conductance_quadrature
from ..solver import (
    BoundaryData,
    boundary_flux,
    dirichlet_energy,
    discretize,
    solve_capacitance,
    solve_fixed_potentials,
    solve_floating,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: value={self.value:.3e} tolerance={self.tolerance:.1e} {self.detail}".rstrip()


def two_disk_configuration(delta: float, radius: float = 10.0) -> Configuration:
    """Unit disks on the y axis separated by ``delta`` inside a circle of ``radius``."""
    c = 1 + delta / 2
    return Configuration(Circle(radius=radius), (Circle(center=-1j * c), Circle(center=1j * c)))


def random_table(rng: np.random.Generator, n: int = 64, modes: int = 4) -> BoundaryData:
    t = np.arange(n) / n
    vals = rng.normal() * np.ones(n)
    for k in range(1, modes + 1):
        vals += rng.normal() / k * np.cos(2 * np.pi * k * t) + rng.normal() / k * np.sin(2 * np.pi * k * t)
    return BoundaryData.table(vals)


def random_domain_points(config: Configuration, rng: np.random.Generator, n: int,
                         margin: float = 1e-3) -> np.ndarray:
    outer = config.outer
    R = outer.radius
    pts = []
    while len(pts) < n:
        z = R * (1 - margin) * np.sqrt(rng.random(4 * n)) * np.exp(2j * np.pi * rng.random(4 * n))
        ok = np.ones(len(z), dtype=bool)
        for p in config.particles:
            ok &= np.abs(z - p.center) > p.radius + margin
        pts.extend(z[ok].tolist())
    return np.array(pts[:n])


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def check_annulus() -> CheckResult:
    cfg = Configuration(Circle(radius=2.0), (Circle(radius=0.5),))
    psi = solve_capacitance(discretize(cfg, 1), 0)
    exact = 2 * math.pi / math.log(4)
    err = _rel(dirichlet_energy(psi), exact)
    return CheckResult("annulus capacitance", err <= 1e-6, err, 1e-6)


def check_neck_closed_forms() -> list:
    p2 = GapProfile.parabolic_2d(0.01, 1.0, 0.5)
    e2 = _rel(neck_conductance_quadrature(p2), 2 / math.sqrt(0.01) * math.atan(0.5 / math.sqrt(0.01)))
    p3 = GapProfile.parabolic_3d(1e-4, 1.0, 1.0, 0.1)
    e3 = _rel(neck_conductance_quadrature(p3), math.pi * math.log(1 + 0.01 / 1e-4))
    return [CheckResult("neck conductance d=2 closed form", e2 <= 1e-8, e2, 1e-8),
            CheckResult("neck conductance d=3 closed form", e3 <= 1e-8, e3, 1e-8)]


def check_field_invariants(seed: int = 0, delta: float = 0.05, level: int = 1) -> list:
    rng = np.random.default_rng(seed)
    cfg = two_disk_configuration(delta)
    disc = discretize(cfg, level)
    out = []

    psi1, psi2 = solve_capacitance(disc, 0), solve_capacitance(disc, 1)
    e = _rel(psi1.particle_flux(1), psi2.particle_flux(0))
    out.append(CheckResult("reciprocity", e <= 1e-7, e, 1e-7))

    Ua, Ub = random_table(rng), random_table(rng)
    Ta, Tb = rng.normal(size=2), rng.normal(size=2)
    sa = solve_fixed_potentials(disc, Ua, Ta)
    sb = solve_fixed_potentials(disc, Ub, Tb)
    x, y = rng.normal(size=2)
    Uc = BoundaryData.table(x * np.array(Ua.samples) + y * np.array(Ub.samples))
    sc = solve_fixed_potentials(disc, Uc, x * Ta + y * Tb)
    pts = random_domain_points(cfg, rng, 1000)
    ua, _ = sa.evaluate(pts)
    ub, _ = sb.evaluate(pts)
    uc, _ = sc.evaluate(pts)
    scale = max(np.max(np.abs(uc)), 1.0)
    e = float(np.max(np.abs(uc - (x * ua + y * ub)))) / scale
    out.append(CheckResult("linearity", e <= 1e-9, e, 1e-9))

    lo = min(np.min(sa.outer_values), *Ta)
    hi = max(np.max(sa.outer_values), *Ta)
    # outer data is a trigonometric interpolant; its extremes lie between the nodes
    tt = np.linspace(0, 1, 4096, endpoint=False)
    dense = Ua.evaluate(cfg.outer.point(tt), tt)
    lo, hi = min(lo, dense.min()), max(hi, dense.max())
    excess = float(max(np.max(ua) - hi, lo - np.min(ua), 0.0))
    out.append(CheckResult("maximum principle", excess <= 1e-8, excess, 1e-8))

    total = boundary_flux(sa, "outer") + boundary_flux(sa, 0) + boundary_flux(sa, 1)
    e = abs(total) / max(abs(boundary_flux(sa, 0)), 1.0)
    out.append(CheckResult("flux conservation", e <= 1e-8, e, 1e-8))

    asm = assemble_quadratic_form(disc, Ua)
    form = asm.form
    u = solve_floating(disc, Ua)
    E_float = dirichlet_energy(u)
    net = max(abs(boundary_flux(u, k)) for k in range(2)) / max(abs(boundary_flux(u, "outer")), 1.0)
    out.append(CheckResult("floating fluxes vanish", net <= 1e-8, net, 1e-8))
    worst = 0.0
    for _ in range(5):
        T = rng.normal(size=2)
        s = solve_fixed_potentials(disc, Ua, T)
        worst = max(worst, _rel(form.energy_at_potentials(*T), dirichlet_energy(s)))
    out.append(CheckResult("quadratic form reconstruction", worst <= 1e-7, worst, 1e-7))

    mini = minimize_quadratic_form(form)
    e = max(abs(a - b) for a, b in zip(mini.potentials(form.T_delta), u.potentials))
    e = max(e, _rel(mini.energy, E_float))
    out.append(CheckResult("minimizer matches floating solve", e <= 1e-7, e, 1e-7))

    lowest = min(dirichlet_energy(solve_fixed_potentials(disc, Ua, u.potentials + 0.1 * rng.normal(size=2)))
                 for _ in range(10))
    out.append(CheckResult("floating energy is minimal", E_float <= lowest * (1 + 1e-10),
                           E_float - lowest, 0.0))
    return out


def check_predictor_reductions() -> list:
    gap = GapGeometry.parabolic_2d(1e-3, 1.0, neck_width=None)
    C = conductance_constant(gap)
    base = gradient_blowup_prediction(2.5, C, 1e-3, 2)
    p2 = p_laplacian_prediction(2.5, C, 1e-3, 2, 2.0)
    net = n_particle_prediction([1.25, -1.25], {(0, 1): gap}, [frozenset({1}), frozenset({0})])
    two = gradient_blowup_prediction(abs(1.25 - -1.25), C, 1e-3, 2)
    return [CheckResult("p = 2 reduction", p2.value == base.value, abs(p2.value - base.value), 0.0),
            CheckResult("two-particle network reduction", net.max_value == two.value,
                        abs(net.max_value - two.value), 0.0)]


def run_invariant_suite(seed: int = 0, level: int = 1) -> list:
    results = [check_annulus()]
    results += check_neck_closed_forms()
    results += check_field_invariants(seed=seed, level=level)
    results += check_predictor_reductions()
    return results
