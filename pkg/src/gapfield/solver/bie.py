"""Second-kind double-layer formulation for equipotential inclusions.

The potential is represented as

    u(x) = Re( sum over curves (1/2 pi i) int mu(zeta) dzeta / (zeta - z) )
           + sum_k A_k log|x - c_k|

with ``c_k`` a point inside particle k.  Every curve is traversed with the
domain on its left, so the interior limit of the double layer on any curve
is ``mu/2 + K mu``.  Each particle contributes one log coefficient and one
zero-mean constraint on its density; the net flux into particle k is
``-2 pi A_k`` because double layers carry no flux.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from ..errors import DegenerateSystemError, IllConditionedError
from ..quadrature import lagrange_derivative_matrix
from .boundary_data import BoundaryData
from .closeeval import SAFE_RHO, bernstein_radius, close_weights, panel_coordinates
from .discretization import NODES_PER_PANEL, BoundaryDiscretization

RESIDUAL_TOL = 1e-8
_CHUNK = 2048


@dataclass(frozen=True)
class _Panel:
    curve: int
    start: int
    ends: tuple

    @property
    def slice(self) -> slice:
        return slice(self.start, self.start + NODES_PER_PANEL)


class LayerOperator:
    """Assembled and factored boundary system for one discretization."""

    def __init__(self, disc: BoundaryDiscretization):
        self.disc = disc
        curves = disc.curves
        self.z = np.concatenate([c.z for c in curves])
        self.dz = np.concatenate([c.dz for c in curves])
        self.d2z = np.concatenate([c.d2z for c in curves])
        self.w = np.concatenate([c.weights for c in curves])
        self.curve_id = np.concatenate([np.full(c.n_nodes, k) for k, c in enumerate(curves)])
        self.offsets = np.concatenate([[0], np.cumsum([c.n_nodes for c in curves])])
        self.panels = []
        for k, c in enumerate(curves):
            for p in range(c.n_panels):
                self.panels.append(_Panel(k, int(self.offsets[k] + p * NODES_PER_PANEL), tuple(c.ends[p])))
        self.centers = np.array([c.shape.centroid for c in curves[1:]])
        self.n = len(self.z)
        self.m = len(curves) - 1
        # weight times tangent, the complex line element of each node
        self.dzeta = self.w * self.dz
        self.matrix = self._assemble()
        self._lu = scipy.linalg.lu_factor(self.matrix, check_finite=False)
        self._floating = None

    # -- assembly -----------------------------------------------------------

    def _assemble(self) -> np.ndarray:
        n, m = self.n, self.m
        diff = self.z[None, :] - self.z[:, None]
        np.fill_diagonal(diff, 1.0)
        K = np.real(self.dzeta[None, :] / (2j * np.pi * diff))
        # smooth diagonal limit of the double-layer kernel
        K[np.diag_indices(n)] = np.imag(self.d2z / self.dz) / (4 * np.pi) * self.w
        for pan in self.panels:
            idx = np.nonzero(
                (bernstein_radius(panel_coordinates(self.z, pan.ends)) < SAFE_RHO)
                & (self.curve_id != pan.curve)
            )[0]
            if len(idx):
                wv, _ = close_weights(self.z[idx], self.z[pan.slice], pan.ends)
                K[np.ix_(idx, np.arange(pan.slice.start, pan.slice.stop))] = np.real(wv / (2j * np.pi))
        A = np.zeros((n + m, n + m))
        A[:n, :n] = 0.5 * np.eye(n) + K
        for k in range(m):
            A[:n, n + k] = np.log(np.abs(self.z - self.centers[k]))
            J = slice(self.offsets[k + 1], self.offsets[k + 2])
            A[n + k, J] = self.w[J] * np.abs(self.dz[J])
        return A

    def _floating_lu(self):
        if self._floating is None:
            n, m = self.n, self.m
            B = np.zeros((n + m + 1, n + m + 1))
            B[: n + m, : n + m] = self.matrix
            B[self.offsets[1]:n, n + m] = -1.0
            B[n + m, n:n + m] = 1.0
            self._floating = (B, scipy.linalg.lu_factor(B, check_finite=False))
        return self._floating

    # -- solves -------------------------------------------------------------

    def _checked_solve(self, A, lu, rhs):
        x = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
        # one step of iterative refinement keeps the residual near rounding level
        x = x + scipy.linalg.lu_solve(lu, rhs - A @ x, check_finite=False)
        scale = max(float(np.max(np.abs(rhs))), 1.0)
        res = float(np.max(np.abs(A @ x - rhs))) / scale
        if not np.all(np.isfinite(x)) or res > RESIDUAL_TOL:
            raise IllConditionedError(f"boundary system residual {res:.3e} exceeds {RESIDUAL_TOL:.0e}",
                                      residual=res)
        return x

    def outer_values(self, U: BoundaryData) -> np.ndarray:
        c = self.disc.outer
        return U.evaluate(c.z, c.t)

    def solve_dirichlet(self, outer_values: np.ndarray, potentials: Sequence[float]):
        rhs = np.zeros(self.n + self.m)
        rhs[: self.offsets[1]] = outer_values
        for k, T in enumerate(potentials):
            rhs[self.offsets[k + 1]:self.offsets[k + 2]] = T
        x = self._checked_solve(self.matrix, self._lu, rhs)
        return x[: self.n], x[self.n:]

    def solve_shared_potential(self, outer_values: np.ndarray):
        B, lu = self._floating_lu()
        rhs = np.zeros(self.n + self.m + 1)
        rhs[: self.offsets[1]] = outer_values
        x = self._checked_solve(B, lu, rhs)
        return x[: self.n], x[self.n:self.n + self.m], float(x[-1])

    # -- evaluation ---------------------------------------------------------

    def cauchy(self, targets: np.ndarray, mu: np.ndarray, close: bool = True, skip_curve=None):
        """Cauchy integral of ``mu`` and its z-derivative at ``targets``."""
        targets = np.asarray(targets, dtype=complex).ravel()
        src = self.dzeta * mu / (2j * np.pi)
        keep = slice(None) if skip_curve is None else self.curve_id != skip_curve
        zs, ss = self.z[keep], src[keep]
        phi = np.empty(len(targets), dtype=complex)
        dphi = np.empty(len(targets), dtype=complex)
        for a in range(0, len(targets), _CHUNK):
            d = 1.0 / (zs[None, :] - targets[a:a + _CHUNK, None])
            phi[a:a + _CHUNK] = (d * ss).sum(axis=1)
            dphi[a:a + _CHUNK] = (d * d * ss).sum(axis=1)
        if close:
            for pan in self.panels:
                if pan.curve == skip_curve:
                    continue
                idx = np.nonzero(bernstein_radius(panel_coordinates(targets, pan.ends)) < SAFE_RHO)[0]
                if not len(idx):
                    continue
                J = pan.slice
                d = 1.0 / (self.z[None, J] - targets[idx, None])
                wv, wd = close_weights(targets[idx], self.z[J], pan.ends)
                mj = mu[J]
                phi[idx] += -(d * src[J]).sum(axis=1) + (wv @ mj) / (2j * np.pi)
                dphi[idx] += -(d * d * src[J]).sum(axis=1) + (wd @ mj) / (2j * np.pi)
        return phi, dphi

    def near_boundary(self, targets: np.ndarray) -> np.ndarray:
        targets = np.asarray(targets, dtype=complex).ravel()
        flag = np.zeros(len(targets), dtype=bool)
        for pan in self.panels:
            flag |= bernstein_radius(panel_coordinates(targets, pan.ends)) < SAFE_RHO
        return flag

    def evaluate(self, targets, mu, logs, close: bool = True):
        targets = np.asarray(targets, dtype=complex)
        shape = targets.shape
        flat = targets.ravel()
        phi, dphi = self.cauchy(flat, mu, close=close)
        u = phi.real.copy()
        grad = np.conj(dphi)
        for k in range(self.m):
            d = flat - self.centers[k]
            u += logs[k] * np.log(np.abs(d))
            grad += logs[k] * d / np.abs(d) ** 2
        return u.reshape(shape), grad.reshape(shape)

    def outer_normal_derivative(self, mu, logs) -> np.ndarray:
        """Normal derivative of u (outward from the domain) at the outer nodes."""
        c = self.disc.outer
        n0 = c.n_nodes
        z0, dz0, d2z0, w0 = c.z, c.dz, c.d2z, c.weights
        m0 = mu[:n0]
        mt = np.empty(n0)
        mtt = np.empty(n0)
        for p in range(c.n_panels):
            J = slice(p * NODES_PER_PANEL, (p + 1) * NODES_PER_PANEL)
            D = lagrange_derivative_matrix(c.t[J])
            mt[J] = D @ m0[J]
            mtt[J] = D @ mt[J]
        d1 = mt / dz0
        d2 = (mtt - mt * d2z0 / dz0) / dz0**2
        diff = z0[None, :] - z0[:, None]
        np.fill_diagonal(diff, 1.0)
        num = m0[None, :] - m0[:, None] - d1[:, None] * diff
        terms = w0[None, :] * dz0[None, :] * num / diff**2
        np.fill_diagonal(terms, 0.5 * d2 * w0 * dz0)
        dphi = d1 + terms.sum(axis=1) / (2j * np.pi)
        # remaining curves and the log terms, evaluated at the outer nodes
        _, dphi_rest = self.cauchy(z0, mu, close=True, skip_curve=0)
        grad = np.conj(dphi + dphi_rest)
        for k in range(self.m):
            d = z0 - self.centers[k]
            grad += logs[k] * d / np.abs(d) ** 2
        normal = c.normals
        return (grad * np.conj(normal)).real


@dataclass(frozen=True, eq=False)
class FieldSolution:
    """Solved potential: density, log coefficients and particle potentials."""

    operator: LayerOperator = field(repr=False)
    density: np.ndarray = field(repr=False)
    log_coefficients: np.ndarray
    potentials: tuple
    outer_values: np.ndarray = field(repr=False)
    problem: str
    T_delta: float | None = None
    R_delta: float | None = None

    @property
    def disc(self) -> BoundaryDiscretization:
        return self.operator.disc

    def evaluate(self, points, close: bool = True):
        """Potential and gradient (as ``gx + 1j*gy``) at points of the domain."""
        return self.operator.evaluate(points, self.density, self.log_coefficients, close=close)

    def particle_flux(self, k: int) -> float:
        return float(-2 * np.pi * self.log_coefficients[k])

    def outer_flux_density(self) -> np.ndarray:
        return self.operator.outer_normal_derivative(self.density, self.log_coefficients)

    def combine(self, coefficients, others, problem: str = "combination") -> "FieldSolution":
        """Linear combination ``coefficients[0]*self + sum(c*other)``."""
        sols = (self, *others)
        c = list(coefficients)
        dens = sum(ci * s.density for ci, s in zip(c, sols))
        logs = sum(ci * s.log_coefficients for ci, s in zip(c, sols))
        pots = tuple(sum(ci * s.potentials[k] for ci, s in zip(c, sols)) for k in range(len(self.potentials)))
        outer = sum(ci * s.outer_values for ci, s in zip(c, sols))
        return FieldSolution(self.operator, dens, logs, pots, outer, problem)


def operator_for(disc: BoundaryDiscretization) -> LayerOperator:
    return disc.operator


def solve_fixed_potentials(disc: BoundaryDiscretization, U: BoundaryData, potentials) -> FieldSolution:
    """Dirichlet problem with ``u = U`` on the outer boundary and ``u = T_k`` on particle k."""
    op = operator_for(disc)
    potentials = tuple(float(p) for p in potentials)
    if len(potentials) != op.m:
        raise ValueError(f"expected {op.m} particle potentials, got {len(potentials)}")
    outer = op.outer_values(U)
    mu, logs = op.solve_dirichlet(outer, potentials)
    return FieldSolution(op, mu, logs, potentials, outer, "fixed")


def solve_capacitance(disc: BoundaryDiscretization, i: int) -> FieldSolution:
    """Potential equal to 1 on particle ``i`` and 0 on every other boundary."""
    op = operator_for(disc)
    pots = tuple(1.0 if k == i else 0.0 for k in range(op.m))
    outer = np.zeros(disc.outer.n_nodes)
    mu, logs = op.solve_dirichlet(outer, pots)
    return FieldSolution(op, mu, logs, pots, outer, f"capacitance-{i}")


def solve_single_floating(disc: BoundaryDiscretization, U: BoundaryData) -> FieldSolution:
    """All particles at one unknown potential with zero total flux.

    ``R_delta`` is the net flux into particle 0.
    """
    op = operator_for(disc)
    outer = op.outer_values(U)
    mu, logs, T = op.solve_shared_potential(outer)
    return FieldSolution(op, mu, logs, (T,) * op.m, outer, "single-floating", T_delta=T,
                         R_delta=float(-2 * np.pi * logs[0]))


def solve_floating(disc: BoundaryDiscretization, U: BoundaryData, pieces=None) -> FieldSolution:
    """Every particle floats with zero net flux.

    Superposes the shared-potential solution ``v`` with capacitance
    potentials: ``u = v + sum_k t_k psi_k`` where the ``t_k`` cancel the flux
    of ``v`` on each particle.  ``pieces`` may pass precomputed
    ``(v, [psi_0, psi_1, ...])``.
    """
    op = operator_for(disc)
    if pieces is None:
        v = solve_single_floating(disc, U)
        psis = [solve_capacitance(disc, k) for k in range(op.m)]
    else:
        v, psis = pieces
    cap = np.array([[p.particle_flux(j) for p in psis] for j in range(op.m)])
    rhs = -np.array([v.particle_flux(j) for j in range(op.m)])
    if np.linalg.cond(cap) > 1e12:
        raise DegenerateSystemError("capacitance matrix is numerically singular")
    t = np.linalg.solve(cap, rhs)
    sol = v.combine([1.0, *t], psis, problem="floating")
    pots = tuple(v.T_delta + tk for tk in t)
    return FieldSolution(op, sol.density, sol.log_coefficients, pots, sol.outer_values, "floating",
                         T_delta=v.T_delta, R_delta=v.R_delta)
