"""Gap profiles, neck conductance and the variational energy bounds of the neck.

The neck is the region between the two boundaries over the cross-section
``|xbar| <= w`` (d=2) or ``x^2/a + y^2/b <= w^2`` (d=3).  The lower boundary
belongs to inclusion i, the upper boundary to inclusion j, and ``H`` is the
vertical distance between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, GeometryError, InfiniteConductanceError
from .geometry import Configuration, GapGeometry, Shape
from .quadrature import adaptive_integrate, gauss_legendre

MODES = ("derived", "paper")
RTOL = 1e-10
_S_NODES = 8  # transverse Gauss points; the transverse integrands are polynomial in s
_THETA_NODES = 64


@dataclass(frozen=True)
class GapProfile:
    """Boundary graphs of a neck over its cross-section.

    ``kind`` is ``"parabolic"`` (osculating parabolas/paraboloids),
    ``"exact"`` (the true boundary curves as graphs, d=2 only) or
    ``"constant"`` (flat plates, ``H = delta``).
    """

    kind: str
    delta: float
    width: float
    dim: int = 2
    lower_curvature: tuple = (0.0,)
    upper_curvature: tuple = (0.0,)
    region_axes: tuple = (1.0,)
    shapes: tuple | None = field(default=None, compare=False)
    gap: GapGeometry | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("parabolic", "exact", "constant"):
            raise GeometryError(f"unknown profile kind {self.kind!r}")
        if self.dim not in (2, 3):
            raise GeometryError("profile dimension must be 2 or 3")
        if not self.delta > 0:
            raise InfiniteConductanceError("gap width must be positive for a neck profile")
        if not self.width > 0:
            raise GeometryError("neck half-width must be positive")
        if self.kind == "exact" and self.dim != 2:
            raise GeometryError("exact profiles are available in d=2 only")

    # -- constructors -----------------------------------------------------

    @classmethod
    def parabolic(cls, gap: GapGeometry, width: float | None = None) -> "GapProfile":
        w = gap.neck_width if width is None else width
        if w is None:
            raise GeometryError("no admissible neck half-width for this gap")
        if gap.dim == 2:
            return cls("parabolic", gap.delta, float(w), 2, (1 / gap.radii_i[0],),
                       (1 / gap.radii_j[0],), (gap.alpha,), gap=gap)
        return cls("parabolic", gap.delta, float(w), 3,
                   tuple(1 / r for r in gap.radii_i), tuple(1 / r for r in gap.radii_j),
                   (gap.a, gap.b), gap=gap)

    @classmethod
    def parabolic_2d(cls, delta: float, alpha: float, width: float) -> "GapProfile":
        return cls.parabolic(GapGeometry.parabolic_2d(delta, alpha, neck_width=None), width)

    @classmethod
    def parabolic_3d(cls, delta: float, a: float, b: float, width: float) -> "GapProfile":
        return cls.parabolic(GapGeometry.parabolic_3d(delta, (a, b), neck_width=None), width)

    @classmethod
    def constant(cls, delta: float, width: float, dim: int = 2) -> "GapProfile":
        zeros = (0.0,) * (dim - 1)
        return cls("constant", float(delta), float(width), dim, zeros, zeros, (1.0,) * (dim - 1))

    @classmethod
    def exact(cls, config: Configuration, gap: GapGeometry, width: float | None = None) -> "GapProfile":
        w = gap.neck_width if width is None else width
        if w is None:
            raise GeometryError("no admissible neck half-width for this gap")
        if gap.graph_range is not None and w > gap.graph_range:
            raise GeometryError("neck half-width exceeds the single-valued profile range")
        i, j = gap.pair
        return cls("exact", gap.delta, float(w), 2, (1 / gap.radii_i[0],), (1 / gap.radii_j[0],),
                   (gap.alpha,), shapes=(config.particles[i], config.particles[j]), gap=gap)

    def with_width(self, width: float) -> "GapProfile":
        from dataclasses import replace
        return replace(self, width=float(width))

    # -- boundary graphs --------------------------------------------------

    @cached_property
    def _graph_tables(self):
        gap = self.gap
        tables = []
        for shape, t0 in zip(self.shapes, gap.params):
            n = 4000
            t = t0 + np.linspace(-0.5, 0.5, n + 1)
            x = gap.to_frame(shape.point(t)).real
            dx = (shape.d1(t) / gap.tangent).real
            k0 = n // 2
            s0 = np.sign(dx[k0])
            same = np.sign(dx) == s0
            lo = k0
            while lo > 0 and same[lo - 1]:
                lo -= 1
            hi = k0
            while hi < n and same[hi + 1]:
                hi += 1
            tt, xx = t[lo:hi + 1], x[lo:hi + 1]
            if s0 < 0:
                tt, xx = tt[::-1], xx[::-1]
            tables.append((shape, xx, tt))
        return tables

    def _exact_graph(self, which: int, x):
        shape, xx, tt = self._graph_tables[which]
        gap = self.gap
        t = np.interp(x, xx, tt)
        for _ in range(30):
            w = gap.to_frame(shape.point(t))
            dw = shape.d1(t) / gap.tangent
            step = (w.real - x) / dw.real
            t = t - step
            if np.all(np.abs(step) < 1e-16):
                break
        w = gap.to_frame(shape.point(t))
        dw = shape.d1(t) / gap.tangent
        return w.imag, dw.imag / dw.real

    def graphs(self, x, y=None):
        """Return ``(lower, upper, grad_lower, grad_upper)``.

        In d=2 gradients are arrays; in d=3 they are pairs of arrays.
        """
        x = np.asarray(x, dtype=float)
        d = self.delta
        if self.dim == 2:
            if self.kind == "exact":
                lo, dlo = self._exact_graph(0, x)
                up, dup = self._exact_graph(1, x)
                return lo, up, dlo, dup
            kl, ku = self.lower_curvature[0], self.upper_curvature[0]
            return (-d / 2 - kl * x**2 / 2, d / 2 + ku * x**2 / 2, -kl * x, ku * x)
        y = np.asarray(y, dtype=float)
        (klx, kly), (kux, kuy) = self.lower_curvature, self.upper_curvature
        lo = -d / 2 - klx * x**2 / 2 - kly * y**2 / 2
        up = d / 2 + kux * x**2 / 2 + kuy * y**2 / 2
        return lo, up, (-klx * x, -kly * y), (kux * x, kuy * y)

    def height(self, x, y=None):
        lo, up, _, _ = self.graphs(x, y)
        return up - lo

    # -- cross-section integration ----------------------------------------

    def _scale(self) -> float:
        ref = self.region_axes[0] if self.dim == 2 else min(self.region_axes)
        return math.sqrt(self.delta * ref) if self.kind != "constant" else self.width

    def _breaks(self, hi: float):
        s = self._scale()
        pts, p = [], s
        while p < hi:
            pts.append(p)
            p *= 4
        return pts

    def integrate_cross_section(self, kernel, rtol: float = RTOL) -> float:
        """Integrate ``kernel(lower, upper, grad_lower, grad_upper)`` over the cross-section.

        ``kernel`` returns the transverse integral at each cross-section point.
        """
        w = self.width
        if self.dim == 2:
            def f(x):
                return kernel(*self.graphs(x))

            br = self._breaks(w)
            brk = [0.0] + br + [-p for p in br]
            return adaptive_integrate(f, -w, w, rtol=rtol, breakpoints=brk)[0]
        a, b = self.region_axes
        th = 2 * np.pi * np.arange(_THETA_NODES) / _THETA_NODES
        c, s = np.cos(th), np.sin(th)

        def g(r):
            r = np.asarray(r)[:, None]
            x, y = math.sqrt(a) * r * c, math.sqrt(b) * r * s
            vals = kernel(*self.graphs(x, y))
            return math.sqrt(a * b) * r[:, 0] * vals.mean(axis=1) * 2 * np.pi

        return adaptive_integrate(g, 0.0, w, rtol=rtol, breakpoints=self._breaks(w))[0]


@dataclass(frozen=True)
class BoundPair:
    """Lower/upper bounds on an inclusion's capacitance energy from the neck."""

    lower: float
    upper: float
    gap: float
    keller: float
    budget: float = 0.0

    def __post_init__(self):
        if self.lower > self.upper * (1 + 1e-12):
            raise DomainError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "gap": self.gap,
                "keller": self.keller, "budget": self.budget}


def _transverse(fn):
    s, ws = gauss_legendre(_S_NODES)
    s, ws = (s + 1) / 2, ws / 2

    def kernel(lo, up, dlo, dup):
        H = up - lo
        sh = (Ellipsis,) + (None,)
        return np.sum(fn(s, H[sh], lo[sh], up[sh], dlo, dup) * ws * H[sh], axis=-1)

    return kernel


def _tangential_sq(s, dlo, dup):
    """|grad_x (y - lower)/H|^2 * H^2 at fraction s, i.e. |grad lower + s grad H|^2."""
    if isinstance(dlo, tuple):
        total = 0.0
        for gl, gu in zip(dlo, dup):
            gl, gu = gl[..., None], gu[..., None]
            total = total + (gl + s * (gu - gl)) ** 2
        return total
    gl, gu = dlo[..., None], dup[..., None]
    return (gl + s * (gu - gl)) ** 2


def neck_conductance_quadrature(profile: GapProfile, rtol: float = RTOL) -> float:
    """Integral of 1/H over the neck cross-section."""
    return profile.integrate_cross_section(lambda lo, up, dlo, dup: 1.0 / (up - lo), rtol)


def inverse_square_integral(profile: GapProfile, rtol: float = RTOL) -> float:
    """Integral of 1/H^2 over the cross-section, exposed for comparison only."""
    return profile.integrate_cross_section(lambda lo, up, dlo, dup: 1.0 / (up - lo) ** 2, rtol)


def keller_upper_bound(profile: GapProfile, rtol: float = RTOL) -> float:
    """Dirichlet energy of the linear-in-gap potential over the neck volume."""
    def integrand(s, H, lo, up, dlo, dup):
        return (1.0 + _tangential_sq(s, dlo, dup)) / H**2

    return profile.integrate_cross_section(_transverse(integrand), rtol)


def _flux_term(lo, up, dlo, dup):
    # 2 * (j . n) ds along the lower boundary with j = (0, -1/H) and n pointing into
    # the lower inclusion; the area element and normal are formed explicitly
    H = up - lo
    if isinstance(dlo, tuple):
        grad_sq = dlo[0] ** 2 + dlo[1] ** 2
    else:
        grad_sq = dlo**2
    area = np.sqrt(1.0 + grad_sq)
    n_vertical = -1.0 / area
    return 2.0 * (-1.0 / H) * n_vertical * area


def dual_lower_bound(profile: GapProfile, rtol: float = RTOL) -> float:
    """Dual functional 2*int_{boundary} j.n - int_volume |j|^2 for the vertical test flux."""
    flux = profile.integrate_cross_section(_flux_term, rtol)

    def vol(s, H, lo, up, dlo, dup):
        return np.broadcast_to(1.0 / H**2, np.broadcast_shapes(H.shape, s.shape))

    volume = profile.integrate_cross_section(_transverse(vol), rtol)
    return flux - volume


def bound_gap(profile: GapProfile, rtol: float = RTOL) -> float:
    """Integral over the neck of |grad(Keller potential) - test flux|^2."""
    def integrand(s, H, lo, up, dlo, dup):
        return _tangential_sq(s, dlo, dup) / H**2

    return profile.integrate_cross_section(_transverse(integrand), rtol)


def bound_pair(profile: GapProfile, budget: float = 0.0) -> BoundPair:
    k = keller_upper_bound(profile)
    return BoundPair(lower=dual_lower_bound(profile), upper=k + budget, gap=bound_gap(profile),
                     keller=k, budget=budget)


# --------------------------------------------------------------------------
# leading-order conductance
# --------------------------------------------------------------------------


def conductance_constant(gap: GapGeometry, mode: str = "derived") -> float:
    """Constant multiplying delta^-1/2 (d=2) or |ln delta| (d=3) in the conductance.

    ``derived`` is the leading coefficient of the integral of 1/h; ``paper``
    is the printed constant.  They coincide for unit curvature radii.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    if gap.dim == 2:
        return math.pi * (math.sqrt(gap.alpha) if mode == "derived" else gap.alpha)
    ab = gap.a * gap.b
    return math.pi * (math.sqrt(ab) if mode == "derived" else ab)


def leading_conductance(constant: float, delta: float, dim: int) -> float:
    if delta <= 0:
        raise InfiniteConductanceError("conductance is infinite at zero gap")
    if dim == 2:
        return constant * delta**-0.5
    if dim == 3:
        if delta >= 1:
            raise DomainError("|ln delta| vanishes or changes sign for delta >= 1")
        return constant * abs(math.log(delta))
    raise DomainError(f"dimension must be 2 or 3, got {dim}")


def neck_conductance_leading(gap: GapGeometry, mode: str = "derived") -> float:
    return leading_conductance(conductance_constant(gap, mode), gap.delta, gap.dim)
