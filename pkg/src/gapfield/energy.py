"""Energy of the two-particle system as a quadratic form in the particle potentials.

With ``t_k = T_k - T_delta`` the energy of the fixed-potential solution is

    E(t1, t2) = C + a1 t1^2 + a2 t2^2 + 2 b1 t1 + 2 b2 t2 + 2 c12 t1 t2

where ``a_k`` is the capacitance energy of particle k, ``c12`` the cross
energy, ``b_k`` the flux of the shared-potential solution into particle k and
``C`` that solution's energy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidFormError
from .solver import (
    BoundaryData,
    BoundaryDiscretization,
    FieldSolution,
    dirichlet_energy,
    solve_capacitance,
    solve_single_floating,
)

PSD_TOL = 1e-9


@dataclass(frozen=True)
class QuadraticForm:
    a1: float
    a2: float
    b1: float
    b2: float
    c12: float
    C: float
    T_delta: float = 0.0

    def __post_init__(self):
        scale = max(abs(self.a1), abs(self.a2), abs(self.c12), 1.0)
        if self.a1 < -PSD_TOL * scale or self.a2 < -PSD_TOL * scale or \
                self.a1 * self.a2 - self.c12**2 < -PSD_TOL * scale**2:
            raise InvalidFormError("quadratic form is indefinite")

    @property
    def hessian(self) -> np.ndarray:
        return np.array([[self.a1, self.c12], [self.c12, self.a2]])

    @property
    def linear(self) -> np.ndarray:
        return np.array([self.b1, self.b2])

    def energy(self, t1: float, t2: float) -> float:
        return (self.C + self.a1 * t1**2 + self.a2 * t2**2 + 2 * self.b1 * t1 + 2 * self.b2 * t2
                + 2 * self.c12 * t1 * t2)

    def energy_at_potentials(self, T1: float, T2: float) -> float:
        return self.energy(T1 - self.T_delta, T2 - self.T_delta)

    def to_dict(self) -> dict:
        return {"a1": self.a1, "a2": self.a2, "b1": self.b1, "b2": self.b2, "c12": self.c12,
                "C": self.C, "T_delta": self.T_delta}


@dataclass(frozen=True)
class Assembly:
    """A quadratic form with the three solutions it was built from."""

    form: QuadraticForm
    shared: FieldSolution
    capacitance: tuple


def assemble_quadratic_form(disc: BoundaryDiscretization, U: BoundaryData) -> Assembly:
    """Coefficients from exactly three solves: shared potential and two capacitance potentials."""
    if disc.operator.m != 2:
        raise DomainError("the quadratic form is defined for two particles")
    v = solve_single_floating(disc, U)
    psi1 = solve_capacitance(disc, 0)
    psi2 = solve_capacitance(disc, 1)
    # cross energy by reciprocity: flux of psi1 into particle 2 (symmetrised)
    c12 = 0.5 * (psi1.particle_flux(1) + psi2.particle_flux(0))
    form = QuadraticForm(
        a1=psi1.particle_flux(0), a2=psi2.particle_flux(1),
        b1=v.particle_flux(0), b2=v.particle_flux(1),
        c12=c12, C=dirichlet_energy(v), T_delta=v.T_delta,
    )
    return Assembly(form, v, (psi1, psi2))


@dataclass(frozen=True)
class Minimizer:
    t1: float
    t2: float
    energy: float
    degenerate: bool

    def potentials(self, T_delta: float) -> tuple:
        return (T_delta + self.t1, T_delta + self.t2)


def minimize_quadratic_form(qf: QuadraticForm, rcond: float = 1e-12) -> Minimizer:
    """Stationary point of the form; minimum-norm (gauge ``t1 + t2 = 0``) when singular."""
    H = qf.hessian
    scale = max(abs(qf.a1), abs(qf.a2), abs(qf.c12), 1e-300)
    eig = np.linalg.eigvalsh(H)
    if eig[0] < -PSD_TOL * scale:
        raise InvalidFormError("quadratic form is indefinite")
    degenerate = eig[0] <= rcond * scale
    if not degenerate:
        det = qf.a1 * qf.a2 - qf.c12**2
        t1 = -(qf.a2 * qf.b1 - qf.c12 * qf.b2) / det
        t2 = -(qf.a1 * qf.b2 - qf.c12 * qf.b1) / det
    else:
        t = -np.linalg.pinv(H, rcond=rcond, hermitian=True) @ qf.linear
        if np.linalg.norm(H @ t + qf.linear) > 1e-9 * max(np.linalg.norm(qf.linear), scale):
            raise InvalidFormError("linear term is not in the range of the form; unbounded below")
        t1, t2 = float(t[0]), float(t[1])
    return Minimizer(float(t1), float(t2), qf.energy(t1, t2), bool(degenerate))


def predicted_potential_difference(R_o: float, g: float) -> float:
    """Leading-order potential drop across a gap of conductance ``g`` carrying flux ``R_o``."""
    if not g > 0:
        raise DomainError("conductance must be positive")
    return R_o / g


@dataclass(frozen=True)
class C12Report:
    deltas: tuple
    sums1: tuple  # G1 + c12
    sums2: tuple  # G2 + c12
    growth: float  # max G / min G over the sweep
    variation1: float
    variation2: float
    passed: bool

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def _relative_variation(values) -> float:
    v = np.asarray(values, dtype=float)
    mean = abs(v.mean())
    if mean == 0:
        return 0.0 if np.all(v == 0) else float("inf")
    return float(np.sum(np.abs(np.diff(v))) / mean)


def check_c12_relations(deltas, forms, max_variation: float = 0.2, min_growth: float = 3.0) -> C12Report:
    """Boundedness of ``G_i + c12`` across a sweep while ``G_i`` blows up."""
    if len(forms) < 3:
        raise DomainError("need at least three gap values")
    s1 = tuple(f.a1 + f.c12 for f in forms)
    s2 = tuple(f.a2 + f.c12 for f in forms)
    G = np.array([[f.a1, f.a2] for f in forms])
    growth = float(np.min(G.max(axis=0) / G.min(axis=0)))
    v1, v2 = _relative_variation(s1), _relative_variation(s2)
    passed = v1 <= max_variation and v2 <= max_variation and growth >= min_growth
    return C12Report(tuple(float(d) for d in deltas), s1, s2, growth, v1, v2, bool(passed))
