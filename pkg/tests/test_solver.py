from __future__ import annotations

import math

import numpy as np
import pytest

from gapfield.errors import GeometryError, RefineFurtherError
from gapfield.geometry import Circle, Configuration, Ellipse, GapGeometry, closest_gap
from gapfield.harness.verify import random_domain_points, random_table, two_disk_configuration
from gapfield.solver import (
    BoundaryData,
    boundary_flux,
    dirichlet_energy,
    discretize,
    estimate_R_o,
    extrapolate_flux,
    max_gradient,
    min_resolvable_delta,
    solve_capacitance,
    solve_fixed_potentials,
    solve_floating,
    solve_single_floating,
)

ANNULUS = Configuration(Circle(radius=2.0), (Circle(radius=0.5),))


def annulus_exact(z):
    r = np.abs(z)
    return np.log(2 / r) / math.log(4), -z / r**2 / math.log(4)


def gauss_flux(sol, center, radius, n=512):
    """Particle flux from the evaluated gradient on a circle around the particle."""
    th = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * th)
    _, g = sol.evaluate(center + radius * e)
    dudr = (g * np.conj(e)).real
    return -float(np.sum(dudr) * radius * 2 * np.pi / n)


@pytest.fixture(scope="module")
def wide():
    """Two unit disks at gap 0.5; a contour of radius 1.2 around either stays in the domain."""
    return discretize(two_disk_configuration(0.5), 1)


@pytest.fixture(scope="module")
def narrow():
    return discretize(two_disk_configuration(0.01), 1)


# -- discretization ----------------------------------------------------------


def test_discretization_layout():
    d, alpha = 0.1, 1.0
    disc = discretize(two_disk_configuration(d), 1)
    for c in disc.curves:
        assert c.n_nodes >= 64 and c.n_nodes % 2 == 0
    assert disc.outer.arclength == pytest.approx(20 * math.pi, rel=1e-12)
    for c in disc.particle_curves:
        assert c.arclength == pytest.approx(2 * math.pi, rel=1e-12)
        near = np.abs(c.z - c.shape.center) > 0  # all nodes
        gap_pt = c.shape.center + (1 if c.shape.center.imag < 0 else -1) * 1j
        close = np.abs(c.z - gap_pt) < math.sqrt(d * alpha)
        s = np.sort(np.angle((c.z[close & near] - c.shape.center)))
        assert np.max(np.diff(s)) <= math.sqrt(d * alpha) / 8


def test_level_two_splits_panels():
    cfg = two_disk_configuration(0.1)
    d1, d2 = discretize(cfg, 1), discretize(cfg, 2)
    for c1, c2 in zip(d1.curves, d2.curves):
        assert c2.n_nodes == 2 * c1.n_nodes
        # coarse panel breakpoints survive refinement
        assert np.allclose(c2.breaks[::2], c1.breaks, atol=1e-13)


def test_discretization_is_deterministic():
    cfg = two_disk_configuration(1e-3)
    a, b = discretize(cfg, 2), discretize(cfg, 2)
    for c1, c2 in zip(a.curves, b.curves):
        assert np.array_equal(c1.z, c2.z) and np.array_equal(c1.weights, c2.weights)


def test_refine_further():
    with pytest.raises(RefineFurtherError) as info:
        discretize(two_disk_configuration(1e-9), 1)
    assert info.value.suggested_level is None
    with pytest.raises(RefineFurtherError) as info:
        discretize(two_disk_configuration(5e-5), 1)
    assert info.value.suggested_level == 2
    assert min_resolvable_delta(3) == pytest.approx(1e-6)


def test_discretize_rejects_unsupported():
    with pytest.raises(GeometryError):
        discretize(Configuration(None, (Circle(),)), 1)


# -- boundary data -------------------------------------------------------------


def test_boundary_data_catalogue():
    z = np.array([1 + 2j, -3 + 0.5j])
    assert np.allclose(BoundaryData.constant(2.0).evaluate(z), 2.0)
    assert np.allclose(BoundaryData.linear_x(3.0).evaluate(z), [3.0, -9.0])
    assert np.allclose(BoundaryData.linear_y().evaluate(z), [2.0, 0.5])
    dip = BoundaryData.dipole(0.5, 1j)
    d = z - 0.5
    assert np.allclose(dip.evaluate(z), d.imag / np.abs(d) ** 2)


def test_table_interpolates_trig_polynomials():
    n = 32
    t = np.arange(n) / n
    f = lambda t: 0.3 + np.cos(2 * np.pi * t) - 0.7 * np.sin(6 * np.pi * t)
    tab = BoundaryData.table(f(t))
    tt = np.linspace(0, 1, 77)
    assert np.allclose(tab.evaluate(np.zeros(77), tt), f(tt), atol=1e-13)


# -- annulus oracle --------------------------------------------------------------


def test_annulus_potential_and_capacitance():
    disc = discretize(ANNULUS, 1)
    sol = solve_fixed_potentials(disc, BoundaryData.constant(0.0), [1.0])
    rng = np.random.default_rng(0)
    r = 0.5 + 1.5 * rng.random(200)
    z = r * np.exp(2j * np.pi * rng.random(200))
    u, g = sol.evaluate(z)
    ue, ge = annulus_exact(z)
    assert np.max(np.abs(u - ue)) < 1e-10
    assert np.max(np.abs(g - ge)) < 1e-8
    psi = solve_capacitance(disc, 0)
    assert dirichlet_energy(psi) == pytest.approx(2 * math.pi / math.log(4), rel=1e-10)
    # Green identity: flux through the particle equals the energy
    assert boundary_flux(psi, 0) == pytest.approx(dirichlet_energy(psi), rel=1e-10)


def test_close_evaluation_near_boundary():
    disc = discretize(ANNULUS, 1)
    sol = solve_capacitance(disc, 0)
    th = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    for h in (1e-2, 1e-4, 1e-6):
        z = (0.5 + h) * np.exp(1j * th)
        u, g = sol.evaluate(z)
        ue, ge = annulus_exact(z)
        assert np.max(np.abs(u - ue)) < 1e-9
        assert np.max(np.abs(g - ge) / np.abs(ge)) < 1e-7


# -- elementary solutions ------------------------------------------------------------


def test_constant_data(wide):
    U = BoundaryData.constant(0.7)
    for sol in (solve_fixed_potentials(wide, U, [0.7, 0.7]), solve_single_floating(wide, U),
                solve_floating(wide, U)):
        pts = random_domain_points(wide.config, np.random.default_rng(1), 100)
        u, g = sol.evaluate(pts)
        assert np.allclose(u, 0.7, atol=1e-11)
        assert np.max(np.abs(g)) < 1e-10
        assert np.allclose(sol.potentials, 0.7, atol=1e-11)
        assert abs(boundary_flux(sol, "outer")) < 1e-10
        assert abs(dirichlet_energy(sol)) < 1e-10
    v = solve_single_floating(wide, U)
    assert v.T_delta == pytest.approx(0.7) and abs(v.R_delta) < 1e-10


def test_antisymmetry(wide):
    U = BoundaryData.linear_y()
    sol = solve_fixed_potentials(wide, U, [-0.3, 0.3])
    pts = random_domain_points(wide.config, np.random.default_rng(2), 200)
    u, _ = sol.evaluate(pts)
    um, _ = sol.evaluate(np.conj(pts))
    assert np.allclose(u, -um, atol=1e-11)
    v = solve_single_floating(wide, U)
    assert abs(v.T_delta) < 1e-12
    f = solve_floating(wide, U)
    assert f.potentials[1] == pytest.approx(-f.potentials[0], abs=1e-12)


def test_capacitance_symmetry_and_bounds(wide):
    psi1, psi2 = solve_capacitance(wide, 0), solve_capacitance(wide, 1)
    assert dirichlet_energy(psi1) == pytest.approx(dirichlet_energy(psi2), rel=1e-8)
    u, _ = psi1.evaluate(random_domain_points(wide.config, np.random.default_rng(3), 1000))
    assert u.min() >= -1e-10 and u.max() <= 1 + 1e-10


def test_fluxes_against_gauss_contour(wide):
    rng = np.random.default_rng(5)
    U = random_table(rng)
    for sol in (solve_capacitance(wide, 0), solve_fixed_potentials(wide, U, [0.2, -0.4]),
                solve_single_floating(wide, U)):
        for k in (0, 1):
            center = wide.config.particles[k].center
            assert gauss_flux(sol, center, 1.2) == pytest.approx(boundary_flux(sol, k), rel=1e-9, abs=1e-11)


def test_floating_fluxes_vanish(wide):
    U = random_table(np.random.default_rng(6))
    u = solve_floating(wide, U)
    for k in (0, 1):
        assert abs(gauss_flux(u, wide.config.particles[k].center, 1.2)) < 1e-8
    v = solve_single_floating(wide, U)
    assert v.particle_flux(1) == pytest.approx(-v.R_delta, rel=1e-9)


def test_flux_conservation(narrow):
    U = random_table(np.random.default_rng(7))
    sol = solve_fixed_potentials(narrow, U, [1.3, -0.2])
    total = sum(boundary_flux(sol, c) for c in ("outer", 0, 1))
    assert abs(total) < 1e-8 * max(1.0, abs(boundary_flux(sol, 0)))


def test_mean_value_property(wide):
    sol = solve_fixed_potentials(wide, random_table(np.random.default_rng(8)), [0.5, -1.0])
    rng = np.random.default_rng(9)
    centers = random_domain_points(wide.config, rng, 20, margin=0.3)
    th = 2 * np.pi * np.arange(256) / 256
    for c in centers:
        u0, _ = sol.evaluate(np.array([c]))
        ring, _ = sol.evaluate(c + 0.2 * np.exp(1j * th))
        assert ring.mean() == pytest.approx(u0[0], abs=1e-6)


def test_floating_minimises_energy(narrow):
    rng = np.random.default_rng(10)
    U = random_table(rng)
    u = solve_floating(narrow, U)
    E = dirichlet_energy(u)
    for _ in range(10):
        T = np.array(u.potentials) + rng.normal(scale=0.05, size=2)
        assert E <= dirichlet_energy(solve_fixed_potentials(narrow, U, T)) * (1 + 1e-12)


@pytest.mark.parametrize("delta", [1e-1, 1e-2, 1e-4])
def test_self_convergence(delta):
    U = BoundaryData.linear_y()
    cfg = two_disk_configuration(delta)
    out = []
    for level in (1, 2):
        disc = discretize(cfg, level)
        u, v, psi = solve_floating(disc, U), solve_single_floating(disc, U), solve_capacitance(disc, 0)
        out.append(np.array([*u.potentials, v.R_delta, dirichlet_energy(psi)]))
    assert np.allclose(out[0], out[1], rtol=1e-6)


def test_R_delta_against_double_resolution():
    U = BoundaryData.linear_y()
    cfg = two_disk_configuration(0.1)
    coarse = solve_single_floating(discretize(cfg, 1), U).R_delta
    fine = solve_single_floating(discretize(cfg, 3), U).R_delta
    assert coarse == pytest.approx(fine, rel=1e-6)


def test_ellipse_particles_solve():
    cfg = Configuration(Circle(radius=8), (Ellipse(a=1.5, b=0.7, center=-1.51), Circle(radius=0.6, center=0.62 + 0.1j)))
    disc1, disc2 = discretize(cfg, 1), discretize(cfg, 2)
    U = BoundaryData.linear_x()
    a, b = solve_floating(disc1, U), solve_floating(disc2, U)
    assert np.allclose(a.potentials, b.potentials, rtol=1e-7)


# -- gradient maxima -------------------------------------------------------------


def test_max_gradient_constant_is_zero(narrow):
    sol = solve_floating(narrow, BoundaryData.constant(2.0))
    gap = closest_gap(narrow.config, 0, 1)
    assert max_gradient(sol, gap).value < 1e-9


def test_max_gradient_fixed_drop():
    ratios = []
    for d in (1e-1, 1e-2, 1e-3, 1e-4):
        cfg = two_disk_configuration(d)
        disc = discretize(cfg, 2 if d < 1e-3 else 1)
        sol = solve_fixed_potentials(disc, BoundaryData.constant(0.0), [0.0, 1.0])
        gap = closest_gap(cfg, 0, 1)
        gm = max_gradient(sol, gap)
        ratios.append(gm.value * d)
        if d <= 1e-2:
            assert gm.in_neck
    dist = np.abs(np.array(ratios) - 1)
    assert np.all(np.diff(dist) < 0) and dist[-1] < 1e-3


def test_max_gradient_warns_without_close_evaluation(narrow):
    sol = solve_capacitance(narrow, 0)
    gap = closest_gap(narrow.config, 0, 1)
    assert max_gradient(sol, gap, close=False).warning is not None
    assert max_gradient(sol, gap).warning is None


# -- zero-gap flux -------------------------------------------------------------


def test_R_o_constant_data_is_zero():
    est = estimate_R_o(two_disk_configuration(0.1), BoundaryData.constant(1.0), [0.1, 0.05, 0.02, 0.01])
    assert abs(est.value) < 1e-10


def test_R_o_symmetric_sequence():
    # U = x is odd under the mirror x -> -x that maps each disk onto itself, so R_delta = 0 for all gaps
    est = estimate_R_o(two_disk_configuration(0.1), BoundaryData.linear_x(), [0.1, 0.05, 0.02, 0.01])
    assert max(abs(v) for v in est.values) < 1e-10
    assert abs(est.value) < 1e-10


def test_R_o_linear_y_regression():
    # baseline from the level-3 solves; level 1 must reproduce it
    est = estimate_R_o(two_disk_configuration(0.1), BoundaryData.linear_y(),
                       [0.04, 0.02, 0.01, 0.005, 0.0025], level=1)
    assert est.value == pytest.approx(6.4969265364, rel=1e-9)
    tab = extrapolate_flux(est.deltas, est.values).tableau
    assert abs(tab[-1][-1] - tab[-2][-2]) <= 0.01 * abs(est.value)


def test_extrapolation_rejects_short_or_unsorted():
    from gapfield.errors import ExtrapolationError

    with pytest.raises(ExtrapolationError):
        extrapolate_flux([0.1, 0.05, 0.02], [1, 2, 3])
    with pytest.raises(ExtrapolationError):
        extrapolate_flux([0.1, 0.2, 0.05, 0.01], [1, 2, 3, 4])
    with pytest.raises(ExtrapolationError):
        extrapolate_flux([0.1, 0.05, 0.02, 0.01], [1.0, 2.0, 1.0, 2.0])
