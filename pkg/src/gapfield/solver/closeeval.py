"""Panel-wise close evaluation of Cauchy integrals by monomial recurrences.

For a target near a 16-point Gauss panel, the Cauchy integral of the
panel's polynomial interpolant is computed exactly in the monomial basis,
then mapped back to weights on the panel nodes.
"""
from __future__ import annotations

import numpy as np

SAFE_RHO = 3.0


def bernstein_radius(z: np.ndarray) -> np.ndarray:
    """Bernstein ellipse parameter of points ``z`` relative to [-1, 1]."""
    s = np.sqrt(z - 1) * np.sqrt(z + 1)
    r = np.abs(z + s)
    return np.maximum(r, 1.0 / r)


def panel_coordinates(targets: np.ndarray, ends) -> np.ndarray:
    za, zb = ends
    return (targets - (za + zb) / 2) / ((zb - za) / 2)


def close_weights(targets: np.ndarray, nodes: np.ndarray, ends):
    """Weights ``(wv, wd)`` with shape ``(n_targets, n_nodes)`` such that

    ``sum(wv * f) ~ int f(t) dt/(t - z)`` and ``sum(wd * f) ~ int f(t) dt/(t - z)^2``
    for the panel with nodes ``nodes`` and endpoints ``ends``.
    """
    za, zb = ends
    mid, half = (za + zb) / 2, (zb - za) / 2
    z = (np.asarray(targets) - mid) / half
    tn = (nodes - mid) / half
    n = len(nodes)
    p = np.empty((n, len(z)), dtype=complex)
    q = np.empty_like(p)
    p1 = np.log(1 - z) - np.log(-1 - z)
    # the principal-branch log difference assumes the straight chord; add the
    # winding of the true panel (polygon through its nodes) relative to the chord
    poly = np.concatenate([[-1.0 + 0j], tn, [1.0 + 0j], [-1.0 + 0j]])
    ang = np.zeros(len(z))
    for a, b in zip(poly[:-1], poly[1:]):
        ang += np.angle((b - z) / (a - z))
    p1 = p1 + 2j * np.pi * np.round(ang / (2 * np.pi))
    p[0] = p1
    q[0] = -1 / (1 - z) - 1 / (1 + z)
    for k in range(1, n):
        p[k] = z * p[k - 1] + (1 - (-1) ** k) / k
        q[k] = p[k - 1] + z * q[k - 1]
    V = np.vander(tn, n, increasing=True)
    wv = np.linalg.solve(V.T, p)
    wd = np.linalg.solve(V.T, q) / half
    return wv.T, wd.T


def near_targets(targets: np.ndarray, ends, safe: float = SAFE_RHO) -> np.ndarray:
    return np.nonzero(bernstein_radius(panel_coordinates(targets, ends)) < safe)[0]

