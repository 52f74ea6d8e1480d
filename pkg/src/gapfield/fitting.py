"""Log-log slope fits and polynomial extrapolation to zero gap."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExtrapolationError


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    half_width: float
    n: int

    @property
    def prefactor(self) -> float:
        return float(np.exp(self.intercept))

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "half_width": self.half_width, "n": self.n}


def fit_exponent(pairs) -> ExponentFit:
    """Least-squares line through ``(ln x, ln y)``; half-width is twice the slope's standard error."""
    pairs = [(float(x), float(y)) for x, y in pairs]
    if len(pairs) < 3:
        raise DomainError("an exponent fit needs at least 3 points")
    bad = [k for k, (x, y) in enumerate(pairs) if not (x > 0 and y > 0)]
    if bad:
        raise DomainError(f"non-positive values at rows {bad}")
    lx = np.log([p[0] for p in pairs])
    ly = np.log([p[1] for p in pairs])
    X = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(X, ly, rcond=None)
    resid = ly - X @ coef
    n = len(pairs)
    dof = n - 2
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    se = float(np.sqrt(np.sum(resid**2) / dof / sxx)) if dof > 0 and sxx > 0 else 0.0
    return ExponentFit(float(coef[0]), float(coef[1]), 2.0 * se, n)


def fixed_slope_prefactor(pairs, slope: float) -> float:
    """Geometric-mean prefactor ``C`` of ``y = C x**slope`` with the slope held fixed."""
    x = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("fixed-slope prefactor needs positive data")
    return float(np.exp(np.mean(np.log(y) - slope * np.log(x))))


@dataclass(frozen=True)
class Extrapolation:
    value: float
    error: float
    tableau: tuple

    def to_dict(self) -> dict:
        return {"value": self.value, "error": self.error}


def richardson_extrapolate(hs, values) -> Extrapolation:
    """Neville extrapolation to ``h = 0`` of a polynomial in ``h``.

    The estimate is the top diagonal entry built from all samples; the error
    bar is its distance to the previous diagonal entry.
    """
    h = np.asarray(hs, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(h) < 2:
        raise ExtrapolationError("need at least two samples to extrapolate")
    n = len(h)
    T = [[float(v[i])] for i in range(n)]
    for i in range(1, n):
        for k in range(1, i + 1):
            prev, low = T[i][k - 1], T[i - 1][k - 1]
            T[i].append(prev + (prev - low) * h[i] / (h[i - k] - h[i]))
    best = T[-1][-1]
    err = abs(best - T[-2][-1])
    return Extrapolation(float(best), float(err), tuple(tuple(row) for row in T))


def check_monotone(values, tolerance: float) -> None:
    """Raise if consecutive differences change sign by more than ``tolerance``."""
    d = np.diff(np.asarray(values, dtype=float))
    big = d[np.abs(d) > tolerance]
    if len(big) and not (np.all(big > 0) or np.all(big < 0)):
        raise ExtrapolationError("sequence is not monotone beyond its error bars")


def is_monotone_toward(values, target: float) -> bool:
    """True when ``|values - target|`` is non-increasing."""
    dist = np.abs(np.asarray(values, dtype=float) - target)
    return bool(np.all(np.diff(dist) <= 1e-12 * max(1.0, abs(target))))
