"""Panel layouts on the boundary curves with geometric grading toward gaps."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import GeometryError, RefineFurtherError
from ..geometry import Configuration, Shape, _gap_between
from ..quadrature import gauss_legendre

NODES_PER_PANEL = 16
BASE_PANELS = 16
GRADING_RATIO = 0.7
MAX_LEVEL = 3
# central panel length as a multiple of sqrt(delta*alpha)
CENTRAL_PANEL = 0.5


def min_resolvable_delta(level: int) -> float:
    """Smallest relative gap delta/alpha accepted at a refinement level."""
    return 10.0 ** -(3 + level)


@dataclass(frozen=True)
class Curve:
    """Quadrature nodes of one boundary curve in its solver orientation.

    Particle curves are traversed clockwise (``sign = -1``) so the solution
    domain always lies to the left of the direction of travel.
    """

    shape: Shape
    role: str  # "outer" or "particle"
    index: int  # particle index, -1 for the outer boundary
    sign: int
    t: np.ndarray  # shape parameters of the nodes
    weights: np.ndarray  # weights with respect to the traversal parameter
    z: np.ndarray
    dz: np.ndarray
    d2z: np.ndarray
    ends: np.ndarray  # (n_panels, 2) panel start/end points in traversal order
    breaks: np.ndarray  # arclength breakpoints in the shape's own orientation

    @property
    def n_panels(self) -> int:
        return len(self.ends)

    @property
    def n_nodes(self) -> int:
        return len(self.z)

    @property
    def speed(self) -> np.ndarray:
        return np.abs(self.dz)

    @property
    def normals(self) -> np.ndarray:
        """Unit normals pointing out of the solution domain."""
        return -1j * self.dz / np.abs(self.dz)

    @property
    def curvature(self) -> np.ndarray:
        # curvature of the underlying CCW shape (positive for convex particles)
        return self.sign * (np.conj(self.dz) * self.d2z).imag / np.abs(self.dz) ** 3

    @property
    def arclength(self) -> float:
        return float(np.sum(self.weights * self.speed))


@dataclass(frozen=True, eq=False)
class BoundaryDiscretization:
    config: Configuration
    level: int
    curves: tuple
    foci: tuple  # (particle index, parameter, central panel length)

    @cached_property
    def operator(self):
        """Assembled and factored boundary system, built on first use."""
        from .bie import LayerOperator

        return LayerOperator(self)

    @property
    def outer(self) -> Curve:
        return self.curves[0]

    @property
    def particle_curves(self) -> tuple:
        return self.curves[1:]

    @property
    def n_nodes(self) -> int:
        return sum(c.n_nodes for c in self.curves)


class _ArclengthMap:
    """Arclength s(t) of a shape and its inverse."""

    def __init__(self, shape: Shape, n: int = 512):
        x, w = gauss_legendre(16)
        edges = np.linspace(0.0, 1.0, n + 1)
        a, b = edges[:-1, None], edges[1:, None]
        t = (a + b) / 2 + (b - a) / 2 * x
        seg = np.sum(np.abs(shape.d1(t)) * w * (b - a) / 2, axis=1)
        self.shape = shape
        self.edges = edges
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.length = float(self.cum[-1])

    def s_of_t(self, t):
        t = np.asarray(t, dtype=float)
        base = np.floor(t)
        tt = t - base
        k = np.minimum((tt * (len(self.edges) - 1)).astype(int), len(self.edges) - 2)
        x, w = gauss_legendre(16)
        lo = self.edges[k]
        half = (tt - lo) / 2
        pts = lo[..., None] + half[..., None] * (x + 1)
        part = np.sum(np.abs(self.shape.d1(pts)) * w, axis=-1) * half
        return base * self.length + self.cum[k] + part

    def t_of_s(self, s):
        s = np.asarray(s, dtype=float)
        base = np.floor(s / self.length)
        ss = s - base * self.length
        t = np.interp(ss, self.cum, self.edges)
        for _ in range(8):
            t = t - (self.s_of_t(t) - ss) / np.abs(self.shape.d1(t))
        return t + base


def _breakpoints(length: float, base: float, foci, ratio: float = GRADING_RATIO) -> np.ndarray:
    """Arclength panel breakpoints covering one period, graded toward ``foci``.

    ``foci`` holds ``(s_focus, central_length)``; the first focus gets a
    panel centred on it and panel lengths grow geometrically away from it.
    """
    if not foci:
        n = int(math.ceil(length / base - 1e-9))
        return np.linspace(0.0, length, n + 1)

    def size(s):
        out = base
        for sf, lm in foci:
            d = abs((s - sf + length / 2) % length - length / 2)
            out = min(out, lm + (1 / ratio - 1) * max(0.0, d - lm / 2))
        return out

    s0 = foci[0][0] - foci[0][1] / 2
    b = [s0]
    while b[-1] < s0 + length - 1e-12 * length:
        L = size(b[-1])
        L = size(b[-1] + L / 2)
        b.append(b[-1] + L)
    b = np.array(b)
    lens = np.diff(b)
    excess = b[-1] - (s0 + length)
    uniform = lens > 0.99 * base
    if not uniform.any():
        uniform[:] = True
    lens[uniform] -= excess * lens[uniform] / lens[uniform].sum()
    if np.any(lens <= 0):
        raise GeometryError("panel layout failed; curve too short for the requested grading")
    return s0 + np.concatenate([[0.0], np.cumsum(lens)])


def _refine(b: np.ndarray, level: int) -> np.ndarray:
    k = 2 ** (level - 1)
    if k == 1:
        return b
    pieces = [np.linspace(b[i], b[i + 1], k + 1)[:-1] for i in range(len(b) - 1)]
    return np.concatenate(pieces + [[b[-1]]])


def _build_curve(shape: Shape, role: str, index: int, sign: int, breaks: np.ndarray,
                 amap: _ArclengthMap) -> Curve:
    x, w = gauss_legendre(NODES_PER_PANEL)
    tb = amap.t_of_s(breaks)
    a, b = tb[:-1, None], tb[1:, None]
    t = ((a + b) / 2 + (b - a) / 2 * x)
    wt = np.broadcast_to(w * (b - a) / 2, t.shape)
    starts, stops = shape.point(tb[:-1]), shape.point(tb[1:])
    if sign < 0:
        t, wt = t[::-1, ::-1], wt[::-1, ::-1]
        ends = np.stack([stops[::-1], starts[::-1]], axis=1)
    else:
        ends = np.stack([starts, stops], axis=1)
    t, wt = t.ravel().copy(), wt.ravel().copy()
    z = shape.point(t)
    dz = sign * shape.d1(t)
    d2z = shape.d2(t)
    arrays = [t, wt, z, dz, d2z, ends, breaks]
    for arr in arrays:
        arr.setflags(write=False)
    return Curve(shape, role, index, sign, *arrays)


def discretize(config: Configuration, level: int = 1) -> BoundaryDiscretization:
    """Graded panel layout for every curve of a 2D configuration.

    Each closest-gap point gets a central panel of length
    ``0.5*sqrt(delta*alpha)`` and neighbouring panels grow by ``1/0.7`` until
    they reach the base length.  Level ``l`` splits every panel into
    ``2**(l-1)`` equal pieces, so coarser breakpoints are kept.
    """
    if config.dim != 2:
        raise GeometryError("only d=2 configurations can be discretized")
    if config.outer is None:
        raise GeometryError("the configuration has no outer boundary")
    if not 1 <= level <= MAX_LEVEL:
        raise RefineFurtherError(f"refinement level must be in 1..{MAX_LEVEL}", suggested_level=None)
    if config.touching:
        raise GeometryError("touching configurations cannot be discretized; re-open the gap first")

    parts = config.particles
    maps = [_ArclengthMap(p) for p in parts]
    foci = [[] for _ in parts]
    focus_log = []
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            gap = _gap_between(parts[i], parts[j], pair=(i, j))
            base = min(_base_length(parts[i]), _base_length(parts[j]))
            lm = CENTRAL_PANEL * math.sqrt(gap.delta * gap.alpha)
            if lm >= base:
                continue
            ratio = gap.delta / gap.alpha
            if ratio < min_resolvable_delta(level):
                need = next((lv for lv in range(level + 1, MAX_LEVEL + 1)
                             if ratio >= min_resolvable_delta(lv)), None)
                raise RefineFurtherError(
                    f"gap {gap.delta:.3g} between particles {i} and {j} is below the resolvable "
                    f"threshold {min_resolvable_delta(level):.1e}*alpha at level {level}",
                    suggested_level=need,
                )
            for k, t in ((i, gap.params[0]), (j, gap.params[1])):
                foci[k].append((float(maps[k].s_of_t(t)), lm))
                focus_log.append((k, float(t), lm))

    outer = config.outer
    omap = _ArclengthMap(outer)
    curves = [_build_curve(outer, "outer", -1, 1,
                           _refine(_breakpoints(omap.length, omap.length / BASE_PANELS, []), level), omap)]
    for k, p in enumerate(parts):
        fk = sorted(foci[k], key=lambda f: f[1])
        b = _breakpoints(maps[k].length, _base_length(p), fk)
        curves.append(_build_curve(p, "particle", k, -1, _refine(b, level), maps[k]))
    return BoundaryDiscretization(config, level, tuple(curves), tuple(focus_log))


def _base_length(shape: Shape) -> float:
    return min(shape.perimeter / BASE_PANELS, 0.5 * shape.min_curvature_radius)
