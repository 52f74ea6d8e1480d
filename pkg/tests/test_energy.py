from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapfield.energy import (
    QuadraticForm,
    assemble_quadratic_form,
    check_c12_relations,
    minimize_quadratic_form,
    predicted_potential_difference,
)
from gapfield.errors import DomainError, InvalidFormError
from gapfield.harness.verify import random_table, two_disk_configuration
from gapfield.solver import BoundaryData, dirichlet_energy, discretize, solve_fixed_potentials, solve_floating


@pytest.fixture(scope="module")
def disc():
    return discretize(two_disk_configuration(0.02), 1)


@pytest.fixture(scope="module")
def assembly(disc):
    return assemble_quadratic_form(disc, random_table(np.random.default_rng(11)))


def test_constant_data_has_no_linear_term(disc):
    qf = assemble_quadratic_form(disc, BoundaryData.constant(1.5)).form
    assert abs(qf.b1) < 1e-10 and abs(qf.b2) < 1e-10 and abs(qf.C) < 1e-10
    assert qf.T_delta == pytest.approx(1.5)
    m = minimize_quadratic_form(qf)
    assert abs(m.t1) < 1e-9 and abs(m.t2) < 1e-9


def test_symmetric_pair_has_equal_capacitances(assembly):
    qf = assembly.form
    assert qf.a1 == pytest.approx(qf.a2, rel=1e-9)
    assert qf.c12 < 0 < qf.a1


def test_reconstruction_matches_direct_energies(disc, assembly):
    qf = assembly.form
    U = random_table(np.random.default_rng(11))
    rng = np.random.default_rng(12)
    for _ in range(5):
        T = qf.T_delta + rng.normal(size=2)
        direct = dirichlet_energy(solve_fixed_potentials(disc, U, T))
        assert qf.energy_at_potentials(*T) == pytest.approx(direct, rel=1e-7)


def test_minimizer_matches_floating_solve(disc, assembly):
    U = random_table(np.random.default_rng(11))
    m = minimize_quadratic_form(assembly.form)
    u = solve_floating(disc, U)
    assert np.allclose(m.potentials(assembly.form.T_delta), u.potentials, rtol=1e-7, atol=1e-9)
    assert m.energy == pytest.approx(dirichlet_energy(u), rel=1e-7)
    assert not m.degenerate


def test_degenerate_form_uses_gauge():
    g, R = 4.0, 3.0
    qf = QuadraticForm(a1=g, a2=g, b1=R / 2, b2=-R / 2, c12=-g, C=1.0)
    m = minimize_quadratic_form(qf)
    assert m.degenerate
    assert m.t1 == pytest.approx(-R / (4 * g)) and m.t1 + m.t2 == pytest.approx(0, abs=1e-14)
    # potential drop is R/(2g) for this normalisation of the linear term
    assert m.t2 - m.t1 == pytest.approx(R / (2 * g))


def test_degenerate_form_unbounded_below():
    with pytest.raises(InvalidFormError):
        minimize_quadratic_form(QuadraticForm(a1=1, a2=1, b1=1, b2=1, c12=-1, C=0))


def test_indefinite_form_rejected():
    with pytest.raises(InvalidFormError):
        QuadraticForm(a1=1, a2=1, b1=0, b2=0, c12=2, C=0)
    with pytest.raises(InvalidFormError):
        QuadraticForm(a1=-1, a2=1, b1=0, b2=0, c12=0, C=0)


@settings(max_examples=100)
@given(st.lists(st.floats(-5, 5), min_size=5, max_size=5), st.floats(0.1, 10), st.floats(0.1, 10))
def test_spd_minimizer_against_explicit_inverse(v, l1, l2):
    th, b1, b2, C, _ = v
    Q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    H = Q @ np.diag([l1, l2]) @ Q.T
    qf = QuadraticForm(a1=H[0, 0], a2=H[1, 1], b1=b1, b2=b2, c12=H[0, 1], C=C)
    m = minimize_quadratic_form(qf)
    t = -np.linalg.inv(H) @ np.array([b1, b2])
    assert np.allclose([m.t1, m.t2], t, rtol=1e-12, atol=1e-12 * max(1, np.abs(t).max()))
    # stationary value is C - b.H^{-1}.b
    assert m.energy == pytest.approx(C - np.array([b1, b2]) @ np.linalg.solve(H, [b1, b2]), rel=1e-10, abs=1e-10)


def test_predicted_potential_difference():
    assert predicted_potential_difference(2.0, 10.0) == pytest.approx(0.2)
    with pytest.raises(DomainError):
        predicted_potential_difference(1.0, 0.0)


def test_c12_relations_on_synthetic_forms():
    deltas = [1e-2, 1e-3, 1e-4, 1e-5]
    forms = [QuadraticForm(a1=d**-0.5 + 1, a2=d**-0.5 + 2, b1=0, b2=0, c12=-(d**-0.5), C=0) for d in deltas]
    rep = check_c12_relations(deltas, forms)
    assert rep.passed and rep.variation1 < 1e-13 and rep.sums2 == pytest.approx((2.0,) * 4)
    bad = [QuadraticForm(a1=d**-0.5, a2=d**-0.5, b1=0, b2=0, c12=-0.5 * d**-0.5, C=0) for d in deltas]
    assert not check_c12_relations(deltas, bad).passed
    with pytest.raises(DomainError):
        check_c12_relations(deltas[:2], forms[:2])


def test_three_particles_rejected():
    from gapfield.geometry import Circle, Configuration

    cfg = Configuration(Circle(radius=10), (Circle(center=-3), Circle(), Circle(center=3)))
    with pytest.raises(DomainError):
        assemble_quadratic_form(discretize(cfg, 1), BoundaryData.linear_x())
