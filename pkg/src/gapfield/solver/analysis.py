"""Quantities extracted from solved fields: fluxes, energies, gap maxima, bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ExtrapolationError, GeometryError
from ..fitting import Extrapolation, check_monotone, richardson_extrapolate
from ..geometry import Configuration, GapGeometry, closest_gap, make_touching, set_gap
from ..neck import BoundPair, GapProfile, bound_gap, dual_lower_bound, keller_upper_bound
from ..quadrature import gauss_legendre
from .bie import FieldSolution, solve_single_floating
from .boundary_data import BoundaryData
from .discretization import discretize

GRADIENT_RULE = "gradmax-v1"
SEGMENT_POINTS = 201
NECK_COLUMNS = 41
NECK_ROWS = 11
NUDGE = 1e-3


def boundary_flux(sol: FieldSolution, curve="outer") -> float:
    """Net flux of ``u`` through a boundary, normal pointing out of the domain.

    ``curve`` is ``"outer"`` or a particle index.
    """
    if curve == "outer":
        c = sol.disc.outer
        return float(np.sum(sol.outer_flux_density() * c.weights * c.speed))
    return sol.particle_flux(int(curve))


def dirichlet_energy(sol: FieldSolution) -> float:
    """Integral of |grad u|^2 from the boundary form sum of int u du/dn."""
    c = sol.disc.outer
    outer = float(np.sum(sol.outer_values * sol.outer_flux_density() * c.weights * c.speed))
    parts = sum(T * sol.particle_flux(k) for k, T in enumerate(sol.potentials))
    return outer + parts


@dataclass(frozen=True)
class GradientMax:
    value: float
    location: complex
    xbar: float
    in_neck: bool
    rule: str = GRADIENT_RULE
    samples: int = 0
    warning: str | None = None

    def to_dict(self) -> dict:
        return {"value": self.value, "location": [self.location.real, self.location.imag],
                "xbar": self.xbar, "in_neck": self.in_neck, "rule": self.rule,
                "samples": self.samples, "warning": self.warning}


def gradient_samples(sol: FieldSolution, gap: GapGeometry) -> np.ndarray:
    """Sample points of the versioned max-gradient rule.

    201 points on the closest-distance segment (ends moved inward by
    ``1e-3*delta``) plus a 41 x 11 grid spanning the neck ``|xbar| <= w``
    between the two boundaries, with the same inward nudge.
    """
    s = np.linspace(NUDGE, 1 - NUDGE, SEGMENT_POINTS)
    pts = [gap.point_i + (gap.point_j - gap.point_i) * s]
    if gap.neck_width is not None:
        profile = GapProfile.exact(sol.disc.config, gap)
        x = np.linspace(-gap.neck_width, gap.neck_width, NECK_COLUMNS)
        lo, up, _, _ = profile.graphs(x)
        H = up - lo
        eps = NUDGE * gap.delta / H
        frac = np.linspace(0, 1, NECK_ROWS)[None, :]
        frac = np.clip(frac, eps[:, None], 1 - eps[:, None])
        y = lo[:, None] + frac * H[:, None]
        pts.append(gap.from_frame(x[:, None] + 1j * y).ravel())
    return np.concatenate(pts)


def max_gradient(sol: FieldSolution, gap: GapGeometry, close: bool = True) -> GradientMax:
    pts = gradient_samples(sol, gap)
    _, g = sol.evaluate(pts, close=close)
    mag = np.abs(g)
    k = int(np.argmax(mag))
    loc = complex(pts[k])
    xbar = float(gap.to_frame(loc).real)
    w = gap.neck_width
    in_neck = abs(xbar) <= (w if w is not None else 0.0) + 1e-12
    warning = None
    if not close and sol.operator.near_boundary(pts).any():
        warning = "close-evaluation correction disabled at samples near a boundary; values may be inaccurate"
    return GradientMax(float(mag[k]), loc, xbar, bool(in_neck), GRADIENT_RULE, len(pts), warning)


@dataclass(frozen=True)
class REstimate:
    value: float
    error: float
    deltas: tuple
    values: tuple

    def to_dict(self) -> dict:
        return {"value": self.value, "error": self.error, "deltas": list(self.deltas),
                "values": list(self.values)}


def extrapolate_flux(deltas, values) -> Extrapolation:
    """Limit of ``R_delta`` at zero gap with a monotonicity guard."""
    deltas = np.asarray(deltas, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(deltas) < 4:
        raise ExtrapolationError("need at least 4 gap values")
    if np.any(np.diff(deltas) >= 0):
        raise ExtrapolationError("gap values must be strictly decreasing")
    # solver round-off only; the Richardson error bar is large exactly when data oscillate
    check_monotone(values, 1e-9 * max(1.0, float(np.max(np.abs(values)))))
    return richardson_extrapolate(deltas, values)


def estimate_R_o(config: Configuration, U: BoundaryData, deltas, level: int = 1,
                 pair=(0, 1)) -> REstimate:
    """Zero-gap flux from single-floating solves on re-opened touching geometry."""
    i, j = pair
    touching = make_touching(config, i, j)
    vals = []
    for d in deltas:
        disc = discretize(set_gap(touching, i, j, d), level)
        vals.append(solve_single_floating(disc, U).R_delta)
    ex = extrapolate_flux(deltas, vals)
    return REstimate(ex.value, ex.error, tuple(float(d) for d in deltas), tuple(vals))


# --------------------------------------------------------------------------
# neck energy bounds for capacitance potentials
# --------------------------------------------------------------------------


def _graded_panels(half: float, scale: float, marks) -> np.ndarray:
    pts = {0.0, half, *[m for m in marks if 0 < m < half]}
    p = scale
    while p < half:
        pts.add(p)
        p *= 2
    pos = np.array(sorted(pts))
    return np.concatenate([-pos[:0:-1], pos])


def outer_budget(psi: FieldSolution, gap: GapGeometry, which: int = 0) -> float:
    """Energy budget outside the neck for the capacitance potential ``psi``.

    The test potential equals the neck's linear-in-gap potential for
    ``|xbar| <= w``, blends into ``psi`` by a cosine cutoff on
    ``w < |xbar| < 2w`` and equals ``psi`` beyond.  Its energy outside the
    neck is ``band + G - int_{|xbar|<2w} |grad psi|^2``.  ``which`` selects
    the inclusion at unit potential (0 = lower side of the gap).
    """
    w = gap.neck_width
    if w is None:
        raise GeometryError("no admissible neck half-width")
    if gap.graph_range is not None and 2 * w > gap.graph_range:
        raise GeometryError("outer budget needs the profile single-valued over |xbar| <= 2w")
    profile = GapProfile.exact(psi.disc.config, gap, width=2 * w)
    edges = _graded_panels(2 * w, math.sqrt(gap.delta * gap.alpha) / 2, [w])
    xg, wg = gauss_legendre(16)
    a, b = edges[:-1, None], edges[1:, None]
    x = ((a + b) / 2 + (b - a) / 2 * xg).ravel()
    wx = (wg * (b - a) / 2).ravel()
    lo, up, dlo, dup = profile.graphs(x)
    H = up - lo
    s = (xg + 1) / 2
    ws = wg / 2
    y = lo[:, None] + s[None, :] * H[:, None]
    weight = wx[:, None] * ws[None, :] * H[:, None]
    pts = gap.from_frame(x[:, None] + 1j * y)
    val, grad = psi.evaluate(pts)
    grad = grad / gap.tangent  # gradient components in the neck frame
    gsq = np.abs(grad) ** 2
    inner = float(np.sum(gsq * weight))

    # linear-in-gap potential equal to 1 on the selected side
    frac = s[None, :] * np.ones_like(H)[:, None]
    phi = 1 - frac if which == 0 else frac
    dphi_dy = (-1 if which == 0 else 1) / H[:, None]
    dH = (dup - dlo)[:, None]
    if which == 0:
        dphi_dx = (dup[:, None] - phi * dH) / H[:, None]
    else:
        dphi_dx = -(dlo[:, None] + frac * dH) / H[:, None]
    ax = np.abs(x)[:, None]
    band = (ax > w) & (ax <= 2 * w)
    arg = np.clip((ax - w) / w, 0, 1)
    chi = np.where(ax <= w, 1.0, 0.5 * (1 + np.cos(np.pi * arg)))
    dchi = np.where(band, -0.5 * np.sin(np.pi * arg) * np.pi / w * np.sign(x)[:, None], 0.0)
    gx = chi * dphi_dx + (1 - chi) * grad.real + (phi - val) * dchi
    gy = chi * dphi_dy + (1 - chi) * grad.imag
    band_energy = float(np.sum(np.where(band, gx**2 + gy**2, 0.0) * weight))
    k = gap.pair[which]
    return band_energy + psi.particle_flux(k) - inner


def variational_bounds(psi: FieldSolution, gap: GapGeometry, which: int = 0) -> BoundPair:
    """Dual-flux lower and Keller-plus-budget upper bound for the solved capacitance energy."""
    profile = GapProfile.exact(psi.disc.config, gap)
    keller = keller_upper_bound(profile, rtol=1e-10)
    budget = outer_budget(psi, gap, which)
    return BoundPair(lower=dual_lower_bound(profile), upper=keller + budget,
                     gap=bound_gap(profile), keller=keller, budget=budget)
