"""Planar shapes, configurations of inclusions and gap geometry.

Points in the plane are complex numbers throughout (``x + 1j*y``).  Every
closed curve is parametrised by ``t`` in ``[0, 1)`` and oriented
counterclockwise, so the signed curvature of a convex inclusion is positive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull

from .errors import (
    AmbiguousGapError,
    DegenerateParametrizationError,
    DuplicatePointsError,
    GeometryError,
    InfeasibleTouchingError,
    UnsupportedGeometryError,
)

TWO_PI = 2.0 * math.pi
_POLY_SAMPLES = 720


def as_complex(p) -> complex:
    if isinstance(p, (complex, float, int)):
        return complex(p)
    x, y = p
    return complex(float(x), float(y))


# --------------------------------------------------------------------------
# shapes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Shape:
    """A smooth closed curve placed in the plane by a translation and rotation.

    Subclasses implement ``_local(t, order)`` returning the ``order``-th
    derivative (0, 1 or 2) of the curve in its own frame.
    """

    center: complex = 0j
    rotation: float = 0.0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "center", as_complex(self.center))
        object.__setattr__(self, "rotation", float(self.rotation))

    kind = "shape"

    def _local(self, t, order):  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def _rot(self) -> complex:
        return complex(math.cos(self.rotation), math.sin(self.rotation))

    def point(self, t):
        return self.center + self._rot * self._local(np.asarray(t, dtype=float), 0)

    def d1(self, t):
        return self._rot * self._local(np.asarray(t, dtype=float), 1)

    def d2(self, t):
        return self._rot * self._local(np.asarray(t, dtype=float), 2)

    def translated(self, shift) -> "Shape":
        return replace(self, center=self.center + as_complex(shift))

    def rotated(self, angle: float, origin=0j) -> "Shape":
        origin = as_complex(origin)
        rot = complex(math.cos(angle), math.sin(angle))
        return replace(
            self, center=origin + rot * (self.center - origin), rotation=self.rotation + angle
        )

    def polygon(self, n: int = _POLY_SAMPLES) -> np.ndarray:
        return self.point(np.arange(n) / n)

    @cached_property
    def perimeter(self) -> float:
        x, w = np.polynomial.legendre.leggauss(16)
        edges = np.linspace(0.0, 1.0, 129)
        a, b = edges[:-1, None], edges[1:, None]
        t = (a + b) / 2 + (b - a) / 2 * x
        return float(np.sum(np.abs(self.d1(t)) * w * (b - a) / 2))

    @cached_property
    def centroid(self) -> complex:
        z = self.polygon(4096)
        zn = np.roll(z, -1)
        cross = (z.real * zn.imag - zn.real * z.imag)
        area = cross.sum() / 2
        cx = ((z.real + zn.real) * cross).sum() / (6 * area)
        cy = ((z.imag + zn.imag) * cross).sum() / (6 * area)
        return complex(cx, cy)

    @cached_property
    def diameter(self) -> float:
        z = self.polygon(256)
        return float(np.abs(z[:, None] - z[None, :]).max())

    @cached_property
    def min_curvature_radius(self) -> float:
        t = np.arange(1024) / 1024
        kappa = np.abs(curvature_at(self, t))
        return float(1.0 / kappa.max())

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Circle(Shape):
    radius: float = 1.0
    kind = "circle"

    def __post_init__(self):
        super().__post_init__()
        if not self.radius > 0:
            raise GeometryError(f"circle radius must be positive, got {self.radius}")

    def _local(self, t, order):
        e = np.exp(1j * TWO_PI * t)
        return self.radius * (1j * TWO_PI) ** order * e

    @cached_property
    def perimeter(self) -> float:
        return TWO_PI * self.radius

    @property
    def centroid(self) -> complex:
        return self.center

    def to_dict(self) -> dict:
        return {"kind": "circle", "radius": self.radius, "center": [self.center.real, self.center.imag],
                "rotation": self.rotation, "label": self.label}


@dataclass(frozen=True)
class Ellipse(Shape):
    """Ellipse with semi-axes ``a`` (local x) and ``b`` (local y)."""

    a: float = 1.0
    b: float = 1.0
    kind = "ellipse"

    def __post_init__(self):
        super().__post_init__()
        if not (self.a > 0 and self.b > 0):
            raise GeometryError(f"ellipse semi-axes must be positive, got ({self.a}, {self.b})")

    def _local(self, t, order):
        th = TWO_PI * t
        c, s = np.cos(th), np.sin(th)
        if order == 0:
            return self.a * c + 1j * self.b * s
        if order == 1:
            return TWO_PI * (-self.a * s + 1j * self.b * c)
        return -(TWO_PI**2) * (self.a * c + 1j * self.b * s)

    @property
    def centroid(self) -> complex:
        return self.center

    def to_dict(self) -> dict:
        return {"kind": "ellipse", "semi_axes": [self.a, self.b],
                "center": [self.center.real, self.center.imag],
                "rotation": self.rotation, "label": self.label}


@dataclass(frozen=True)
class SampledCurve(Shape):
    """Closed curve given by a table of equispaced samples, Fourier-interpolated."""

    samples: tuple = ()
    kind = "table"

    def __post_init__(self):
        super().__post_init__()
        pts = tuple(as_complex(p) for p in self.samples)
        object.__setattr__(self, "samples", pts)
        if len(pts) < 8:
            raise GeometryError("a sampled curve needs at least 8 points")
        z = np.array(pts)
        zn = np.roll(z, -1)
        area = 0.5 * np.sum(z.real * zn.imag - zn.real * z.imag)
        if area <= 0:
            raise GeometryError("sampled curve must be oriented counterclockwise")
        if _self_intersects(self.polygon(4 * len(pts))):
            raise GeometryError("sampled curve is self-intersecting")
        if np.min(np.abs(self.d1(np.arange(4 * len(pts)) / (4 * len(pts))))) < 1e-12:
            raise DegenerateParametrizationError("sampled curve has a vanishing tangent")

    @cached_property
    def _coeffs(self):
        z = np.array(self.samples)
        n = len(z)
        c = np.fft.fft(z) / n
        k = np.fft.fftfreq(n, d=1.0 / n)
        if n % 2 == 0:
            # split the Nyquist mode symmetrically so derivatives stay real-consistent
            c = np.concatenate([c, [c[n // 2] / 2]])
            c[n // 2] /= 2
            k = np.concatenate([k, [n // 2]])
            k[n // 2] = -n // 2
        return c, k

    def _local(self, t, order):
        c, k = self._coeffs
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * TWO_PI * np.multiply.outer(t, k))
        return phase @ (c * (1j * TWO_PI * k) ** order)

    def to_dict(self) -> dict:
        return {"kind": "table", "points": [[p.real, p.imag] for p in self.samples],
                "center": [self.center.real, self.center.imag],
                "rotation": self.rotation, "label": self.label}


def _self_intersects(z: np.ndarray) -> bool:
    a, b = z, np.roll(z, -1)
    n = len(z)
    d = b - a

    def orient(p, q, r):
        return np.sign(((q - p).conjugate() * (r - p)).imag)

    o1 = orient(a[:, None], b[:, None], a[None, :])
    o2 = orient(a[:, None], b[:, None], b[None, :])
    o3 = orient(a[None, :], b[None, :], a[:, None])
    o4 = orient(a[None, :], b[None, :], b[:, None])
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    idx = np.arange(n)
    adjacent = (np.abs(idx[:, None] - idx[None, :]) <= 1) | (np.abs(idx[:, None] - idx[None, :]) == n - 1)
    del d
    return bool(np.any(hit & ~adjacent))


def curvature_at(shape: Shape, t):
    """Signed curvature at parameter ``t``; positive on convex CCW arcs."""
    z1 = shape.d1(t)
    z2 = shape.d2(t)
    speed = np.abs(z1)
    if np.any(speed < 1e-12 * max(shape.perimeter, 1e-300)):
        raise DegenerateParametrizationError(f"tangent vanishes on {shape.label or shape.kind}")
    kappa = (np.conj(z1) * z2).imag / speed**3
    return float(kappa) if np.ndim(kappa) == 0 else kappa


def contains(shape: Shape, points, n: int = 2048) -> np.ndarray:
    """Winding-number containment test against a fine polygon of ``shape``."""
    z = shape.polygon(n)
    p = np.atleast_1d(np.asarray(points, dtype=complex))
    total = np.zeros(p.shape)
    for a, b in zip(z, np.roll(z, -1)):
        total += np.angle((b - p) / (a - p))
    return np.abs(total) > math.pi


# --------------------------------------------------------------------------
# closest points between two curves
# --------------------------------------------------------------------------


def _local_minima(sa: Shape, sb: Shape, starts: int = 16, iters: int = 80):
    """Damped Newton on |A(s) - B(t)|^2 from a ``starts`` x ``starts`` grid."""
    g = (np.arange(starts) + 0.5) / starts
    s, t = (a.ravel() for a in np.meshgrid(g, g, indexing="ij"))
    scale = max(sa.diameter, sb.diameter)

    def fval(s, t):
        return np.abs(sa.point(s) - sb.point(t)) ** 2

    f = fval(s, t)
    for _ in range(iters):
        D = sa.point(s) - sb.point(t)
        A1, A2 = sa.d1(s), sa.d2(s)
        B1, B2 = sb.d1(t), sb.d2(t)
        gs = 2 * (np.conj(D) * A1).real
        gt = -2 * (np.conj(D) * B1).real
        hss = 2 * (np.abs(A1) ** 2 + (np.conj(D) * A2).real)
        htt = 2 * (np.abs(B1) ** 2 - (np.conj(D) * B2).real)
        hst = -2 * (np.conj(A1) * B1).real
        det = hss * htt - hst**2
        pd = (hss > 0) & (det > 1e-14 * (hss * htt + 1e-300))
        ds = np.where(pd, -(htt * gs - hst * gt) / np.where(pd, det, 1), 0.0)
        dt = np.where(pd, -(hss * gt - hst * gs) / np.where(pd, det, 1), 0.0)
        gscale = 2 * (np.abs(A1) ** 2 + np.abs(B1) ** 2)
        ds = np.where(pd, ds, -gs / gscale)
        dt = np.where(pd, dt, -gt / gscale)
        # cap the parameter step and backtrack until the distance decreases
        cap = np.maximum(np.abs(ds), np.abs(dt)) / 0.05
        cap = np.where(cap > 1, cap, 1.0)
        ds, dt = ds / cap, dt / cap
        lam = np.ones_like(s)
        accepted = np.zeros(s.shape, dtype=bool)
        s_new, t_new, f_new = s.copy(), t.copy(), f.copy()
        for _ in range(40):
            todo = ~accepted
            if not todo.any():
                break
            cs = s[todo] + lam[todo] * ds[todo]
            ct = t[todo] + lam[todo] * dt[todo]
            cf = fval(cs, ct)
            # tolerate round-off growth so Newton can finish in flat valleys
            ok = cf <= f[todo] + 1e-15 * scale**2
            idx = np.nonzero(todo)[0]
            good = idx[ok]
            s_new[good], t_new[good], f_new[good] = cs[ok], ct[ok], cf[ok]
            accepted[good] = True
            lam[idx[~ok]] *= 0.5
        step = np.maximum(np.abs(s_new - s) * np.abs(A1), np.abs(t_new - t) * np.abs(B1))
        s, t, f = np.mod(s_new, 1.0), np.mod(t_new, 1.0), f_new
        if np.all(step < 1e-15 * scale):
            break
    D = sa.point(s) - sb.point(t)
    A1, A2, B1, B2 = sa.d1(s), sa.d2(s), sb.d1(t), sb.d2(t)
    hss = 2 * (np.abs(A1) ** 2 + (np.conj(D) * A2).real)
    htt = 2 * (np.abs(B1) ** 2 - (np.conj(D) * B2).real)
    hst = -2 * (np.conj(A1) * B1).real
    is_min = (hss >= 0) & (hss * htt - hst**2 >= -1e-10 * (hss * htt + 1e-300))
    dist = np.abs(D)
    order = np.argsort(dist)
    minima = []
    for k in order:
        if not is_min[k]:
            continue
        dup = False
        for m in minima:
            if _pdist(m[0], s[k]) < 1e-6 and _pdist(m[1], t[k]) < 1e-6:
                dup = True
                break
        if not dup:
            minima.append((float(s[k]), float(t[k]), float(dist[k])))
    return minima


def _pdist(a, b):
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def min_distance(sa: Shape, sb: Shape) -> float:
    minima = _local_minima(sa, sb)
    return minima[0][2] if minima else float(np.min(np.abs(sa.polygon()[:, None] - sb.polygon()[None, :])))


# --------------------------------------------------------------------------
# gap geometry
# --------------------------------------------------------------------------


def harmonic_mean(r1: float, r2: float) -> float:
    return 2.0 * r1 * r2 / (r1 + r2)


@dataclass(frozen=True)
class GapGeometry:
    """Closest-gap data between two inclusions.

    ``radii_i``/``radii_j`` hold the curvature radius at each closest point
    (``(alpha,)`` in d=2, the principal pair ``(a, b)`` in d=3).  The frame
    has its origin at the midpoint of the closest points, ``axis`` pointing
    from inclusion i to inclusion j.
    """

    delta: float
    dim: int
    radii_i: tuple
    radii_j: tuple
    point_i: complex | None = None
    point_j: complex | None = None
    axis: complex | None = None
    params: tuple | None = None
    pair: tuple | None = None
    neck_width: float | None = None
    graph_range: float | None = None

    def __post_init__(self):
        if self.delta < 0:
            raise GeometryError(f"gap width must be non-negative, got {self.delta}")
        if self.dim not in (2, 3):
            raise GeometryError(f"dimension must be 2 or 3, got {self.dim}")
        need = 1 if self.dim == 2 else 2
        if len(self.radii_i) != need or len(self.radii_j) != need:
            raise GeometryError(f"d={self.dim} needs {need} curvature radii per side")
        if min(self.radii_i + self.radii_j) <= 0:
            raise UnsupportedGeometryError("curvature radii at the gap must be positive (convex)")
        w = self.neck_width
        if w is not None:
            if w < 10 * self.delta:
                raise GeometryError(f"neck half-width {w} is below 10*delta = {10 * self.delta}")
            if self.graph_range is not None and w > self.graph_range:
                raise GeometryError("neck half-width exceeds the single-valued profile range")

    @classmethod
    def parabolic_2d(cls, delta, alpha1, alpha2=None, neck_width="auto"):
        alpha2 = alpha1 if alpha2 is None else alpha2
        g = cls(delta=float(delta), dim=2, radii_i=(float(alpha1),), radii_j=(float(alpha2),))
        if neck_width == "auto":
            neck_width = default_neck_width(g)
        return replace(g, neck_width=neck_width)

    @classmethod
    def parabolic_3d(cls, delta, radii1, radii2=None, neck_width="auto"):
        radii2 = radii1 if radii2 is None else radii2
        g = cls(delta=float(delta), dim=3, radii_i=tuple(map(float, radii1)),
                radii_j=tuple(map(float, radii2)))
        if neck_width == "auto":
            neck_width = default_neck_width(g)
        return replace(g, neck_width=neck_width)

    @property
    def alpha(self) -> float:
        if self.dim != 2:
            raise AttributeError("alpha is defined for d=2 only")
        return harmonic_mean(self.radii_i[0], self.radii_j[0])

    @property
    def a(self) -> float:
        if self.dim != 3:
            raise AttributeError("(a, b) are defined for d=3 only")
        return harmonic_mean(self.radii_i[0], self.radii_j[0])

    @property
    def b(self) -> float:
        if self.dim != 3:
            raise AttributeError("(a, b) are defined for d=3 only")
        return harmonic_mean(self.radii_i[1], self.radii_j[1])

    @property
    def reference_radius(self) -> float:
        return self.alpha if self.dim == 2 else min(self.a, self.b)

    @property
    def midpoint(self) -> complex:
        return (self.point_i + self.point_j) / 2

    @property
    def tangent(self) -> complex:
        return -1j * self.axis

    def to_frame(self, z):
        """Map plane points to neck coordinates ``(xbar, x_d)`` as a complex number."""
        return (np.asarray(z) - self.midpoint) / self.tangent

    def from_frame(self, w):
        return self.midpoint + self.tangent * np.asarray(w)

    def with_neck_width(self, w) -> "GapGeometry":
        return replace(self, neck_width=w)


def default_neck_width(gap: GapGeometry) -> float | None:
    """min(0.2*min radius, 50*sqrt(delta*alpha)), clamped to the graph range.

    Half the single-valued range is the ceiling because the outer-budget
    construction uses a band out to twice the neck width.  Returns ``None``
    when no width satisfies ``w >= 10*delta``.
    """
    rmin = min(gap.radii_i + gap.radii_j)
    w = min(0.2 * rmin, 50.0 * math.sqrt(gap.delta * gap.reference_radius))
    if gap.graph_range is not None:
        w = min(w, 0.5 * gap.graph_range)
    if w < 10 * gap.delta:
        return None
    return w


def _graph_range(shape: Shape, t0: float, frame_origin: complex, tangent: complex) -> float:
    """Largest |xbar| reachable from t0 along the curve while xbar stays monotone."""
    n = 4000
    best = math.inf
    for sign in (1.0, -1.0):
        t = t0 + sign * np.arange(1, n) / n * 0.5
        x = ((shape.point(t) - frame_origin) / tangent).real
        dx = ((shape.d1(t)) / tangent).real * sign
        s0 = np.sign(dx[0])
        flip = np.nonzero(np.sign(dx) != s0)[0]
        k = flip[0] if len(flip) else len(t) - 1
        best = min(best, float(np.max(np.abs(x[: k + 1]))))
    return best


def closest_gap(config: "Configuration", i: int, j: int) -> GapGeometry:
    """Global closest pair of boundary points between particles ``i`` and ``j``."""
    if config.dim == 3:
        for pair, gap in config.analytic_gaps:
            if tuple(pair) == (i, j):
                return gap
            if tuple(pair) == (j, i):
                return replace(gap, radii_i=gap.radii_j, radii_j=gap.radii_i, pair=(i, j))
        raise GeometryError(f"no analytic gap data for pair ({i}, {j})")
    if i == j:
        raise GeometryError("closest_gap needs two distinct particles")
    sa, sb = config.particles[i], config.particles[j]
    return _gap_between(sa, sb, pair=(i, j))


def _gap_between(sa: Shape, sb: Shape, pair=None) -> GapGeometry:
    minima = _local_minima(sa, sb)
    if not minima:
        raise GeometryError(f"no closest pair found between particles {pair}")
    diam = max(sa.diameter, sb.diameter)
    s, t, d = minima[0]
    # a rival must sit at a genuinely different place; nearby copies are
    # unconverged starts in the flat valley of nearly touching curves
    rivals = [m for m in minima[1:] if m[2] - d <= 1e-9 * diam
              and max(_pdist(m[0], s), _pdist(m[1], t)) > 1e-3]
    if rivals:
        raise AmbiguousGapError(
            f"closest gap between particles {pair} is not unique",
            candidates=[(m[0], m[1], m[2]) for m in [minima[0], *rivals]],
        )
    pa, pb = complex(sa.point(s)), complex(sb.point(t))
    ka, kb = curvature_at(sa, s), curvature_at(sb, t)
    if ka <= 0 or kb <= 0:
        raise UnsupportedGeometryError(
            f"boundary is not convex at the gap of particles {pair} (curvatures {ka:.3g}, {kb:.3g})"
        )
    if d > 1e-14 * diam:
        axis = (pb - pa) / abs(pb - pa)
    else:
        # touching: use the outward normal of the first curve
        tan = complex(sa.d1(s))
        axis = -1j * tan / abs(tan)
    mid = (pa + pb) / 2
    tangent = -1j * axis
    rng = min(_graph_range(sa, s, mid, tangent), _graph_range(sb, t, mid, tangent))
    gap = GapGeometry(
        delta=float(d), dim=2, radii_i=(1.0 / ka,), radii_j=(1.0 / kb,),
        point_i=pa, point_j=pb, axis=axis, params=(s, t), pair=pair, graph_range=rng,
    )
    return replace(gap, neck_width=default_neck_width(gap))


# --------------------------------------------------------------------------
# configurations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    """Outer boundary plus an ordered tuple of particles.

    ``touching`` holds index pairs ``(i, j)`` with ``i < j`` that are allowed
    (and expected) to have zero gap.  d=3 configurations carry only
    ``analytic_gaps`` (pairs of ``((i, j), GapGeometry)``).
    """

    outer: Shape | None
    particles: tuple = ()
    dim: int = 2
    touching: frozenset = field(default_factory=frozenset)
    analytic_gaps: tuple = ()
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))
        object.__setattr__(self, "touching", frozenset(tuple(sorted(p)) for p in self.touching))
        if self.dim not in (2, 3):
            raise GeometryError(f"dimension must be 2 or 3, got {self.dim}")
        if self.dim == 2 and self.validate:
            _validate(self)

    @property
    def n_particles(self) -> int:
        return len(self.particles)

    def replace_particles(self, particles, touching=None) -> "Configuration":
        return replace(self, particles=tuple(particles),
                       touching=self.touching if touching is None else touching)

    def transformed(self, angle: float = 0.0, shift=0j) -> "Configuration":
        """Rigid motion: rotate about the origin, then translate."""
        shift = as_complex(shift)
        move = lambda s: s.rotated(angle).translated(shift)
        return replace(self, outer=None if self.outer is None else move(self.outer),
                       particles=tuple(move(p) for p in self.particles))

    def outer_clearance(self) -> float:
        if self.outer is None:
            return math.inf
        return min(min_distance(self.outer, p) for p in self.particles) if self.particles else math.inf


def _validate(config: Configuration) -> None:
    parts = config.particles
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            d = min_distance(parts[i], parts[j])
            tol = 1e-10 * max(parts[i].diameter, parts[j].diameter)
            if (i, j) in config.touching:
                if d > tol:
                    raise GeometryError(f"particles {i} and {j} are flagged touching but are {d:.3g} apart")
                continue
            inside = contains(parts[j], parts[i].point(0.0))[0] or contains(parts[i], parts[j].point(0.0))[0]
            if d <= tol or inside:
                raise GeometryError(f"particles {i} and {j} overlap")
    if config.outer is not None:
        for i, p in enumerate(parts):
            if not contains(config.outer, p.point(np.arange(8) / 8)).all():
                raise GeometryError(f"particle {i} is not inside the outer boundary")
            if min_distance(config.outer, p) <= 1e-10 * config.outer.diameter:
                raise GeometryError(f"particle {i} touches the outer boundary")


def make_touching(config: Configuration, i: int = 0, j: int = 1) -> Configuration:
    """Translate particles i and j toward each other along their centre line until they touch.

    Each particle moves by half of the closing distance.
    """
    key = tuple(sorted((i, j)))
    if key in config.touching:
        return config
    pi, pj = config.particles[i], config.particles[j]
    line = pj.centroid - pi.centroid
    if abs(line) == 0:
        raise InfeasibleTouchingError("particle centres of mass coincide")
    e = line / abs(line)
    diam = max(pi.diameter, pj.diameter)
    moved = 0.0
    for _ in range(60):
        gap = _gap_between(pi, pj, pair=(i, j))
        if gap.delta <= 1e-14 * diam:
            break
        rate = (np.conj(gap.axis) * e).real
        if rate <= 1e-12:
            raise InfeasibleTouchingError("particles do not approach each other along the centre line")
        step = gap.delta / rate
        pi, pj = pi.translated(step / 2 * e), pj.translated(-step / 2 * e)
        moved += step
    parts = list(config.particles)
    parts[i], parts[j] = pi, pj
    try:
        return replace(config, particles=tuple(parts), touching=config.touching | {key})
    except GeometryError as exc:
        raise InfeasibleTouchingError(f"closing the gap ({i}, {j}) is infeasible: {exc}") from exc


def set_gap(config: Configuration, i: int, j: int, delta: float) -> Configuration:
    """Open (or close) the gap between i and j to exactly ``delta`` along the gap axis."""
    gap = closest_gap(config, i, j)
    move = (delta - gap.delta) / 2
    parts = list(config.particles)
    parts[i] = parts[i].translated(-move * gap.axis)
    parts[j] = parts[j].translated(move * gap.axis)
    key = tuple(sorted((i, j)))
    touching = config.touching - {key}
    if delta == 0:
        touching = touching | {key}
    return replace(config, particles=tuple(parts), touching=touching)


# --------------------------------------------------------------------------
# neighbours
# --------------------------------------------------------------------------


def _perturbation(n: int) -> np.ndarray:
    # symbolic-style lift perturbation: later indices are lifted slightly more,
    # so ties among cocircular points are resolved by index order
    return (np.arange(n) + 1.0) / n


def voronoi_neighbors(centers: Sequence) -> tuple:
    """Neighbour index sets of the Delaunay triangulation of ``centers``.

    Cocircular ties are broken by lifting point k by ``eps*(k+1)/n`` on the
    paraboloid (``eps`` = 1e-9 of the squared spread), which consistently
    favours diagonals through lower-index points.  Collinear inputs chain
    consecutive points along the line.
    """
    z = np.array([as_complex(c) for c in centers])
    n = len(z)
    if n < 2:
        raise GeometryError("need at least two points")
    scale = float(np.max(np.abs(z - z.mean()))) or 1.0
    for a in range(n):
        for b in range(a + 1, n):
            if abs(z[a] - z[b]) <= 1e-12 * scale:
                raise DuplicatePointsError(f"points {a} and {b} coincide")
    nbrs = [set() for _ in range(n)]
    w = (z - z.mean()) / scale
    cross = np.array([((w[k] - w[0]).conjugate() * (w[m] - w[0])).imag
                      for k in range(n) for m in range(n)])
    if n == 2 or np.max(np.abs(cross)) < 1e-12:
        direction = w[np.argmax(np.abs(w - w[0]))] - w[0]
        order = np.argsort((w / direction).real, kind="stable")
        for a, b in zip(order[:-1], order[1:]):
            nbrs[a].add(int(b))
            nbrs[b].add(int(a))
        return tuple(frozenset(s) for s in nbrs)
    if n == 3:
        return tuple(frozenset({0, 1, 2} - {k}) for k in range(3))
    lifted = np.column_stack([w.real, w.imag, np.abs(w) ** 2 + 1e-9 * _perturbation(n)])
    hull = ConvexHull(lifted)
    for simplex, eq in zip(hull.simplices, hull.equations):
        if eq[2] >= 0:
            continue
        for a in simplex:
            for b in simplex:
                if a != b:
                    nbrs[a].add(int(b))
    return tuple(frozenset(s) for s in nbrs)
