"""Closed-form predictors for the field in narrow gaps."""
from __future__ import annotations

from dataclasses import dataclass

from .energy import predicted_potential_difference
from .errors import DomainError
from .geometry import GapGeometry
from .neck import MODES, conductance_constant, leading_conductance


@dataclass(frozen=True)
class Prediction:
    """A predicted gradient magnitude together with everything used to form it."""

    value: float
    potential_difference: float | None
    conductance: float | None
    R_o: float
    C12: float
    delta: float
    dim: int
    formula: str
    mode: str | None = None
    p: float | None = None
    note: str | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _check_delta(delta: float, dim: int) -> None:
    if dim not in (2, 3):
        raise DomainError(f"dimension must be 2 or 3, got {dim}")
    if not delta > 0:
        raise DomainError("gap width must be positive")
    if dim == 3 and delta >= 1:
        raise DomainError("the d=3 law needs delta < 1 so that |ln delta| > 0")


def gradient_blowup_prediction(R_o: float, C12: float, delta: float, dim: int = 2,
                               mode: str | None = None) -> Prediction:
    """Leading-order max gradient: potential drop ``R_o/g`` divided by the gap width."""
    _check_delta(delta, dim)
    if not C12 > 0:
        raise DomainError("conductance constant must be positive")
    if R_o < 0:
        raise DomainError("flux number must be non-negative")
    g = leading_conductance(C12, delta, dim)
    drop = predicted_potential_difference(R_o, g)
    formula = "R_o/C12 * delta^(-1/2)" if dim == 2 else "R_o/C12 / (delta |ln delta|)"
    return Prediction(drop / delta, drop, g, float(R_o), float(C12), float(delta), dim, formula, mode)


def gap_prediction(R_o: float, gap: GapGeometry, mode: str = "derived") -> Prediction:
    return gradient_blowup_prediction(R_o, conductance_constant(gap, mode), gap.delta, gap.dim, mode)


@dataclass(frozen=True)
class NetworkPrediction:
    drops: dict  # (i, j) -> |T_i - T_j| prediction
    fields: dict  # (i, j) -> drop / delta_ij
    max_pair: tuple
    max_value: float
    mode: str

    def to_dict(self) -> dict:
        return {"drops": {f"{i}-{j}": v for (i, j), v in self.drops.items()},
                "fields": {f"{i}-{j}": v for (i, j), v in self.fields.items()},
                "max_pair": list(self.max_pair), "max_value": self.max_value, "mode": self.mode}


def n_particle_prediction(R, gaps: dict, neighbors, mode: str = "derived",
                          flux_tolerance: float = 1e-8) -> NetworkPrediction:
    """Potential drops ``|R_i - R_j|/g_ij`` across neighbouring gaps and the largest field.

    ``gaps`` maps index pairs ``(i, j)`` with ``i < j`` to their gap
    geometry; ``neighbors`` is the neighbour-set list for the particles.
    Ties in the maximum go to the lowest pair.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    R = [float(r) for r in R]
    n = len(R)
    if len(neighbors) != n:
        raise DomainError("one neighbour set per particle is required")
    for i, nb in enumerate(neighbors):
        for j in nb:
            if i not in neighbors[j]:
                raise DomainError(f"neighbour sets are not symmetric for pair ({i}, {j})")
    scale = max(1.0, max(abs(r) for r in R))
    if abs(sum(R)) > flux_tolerance * scale * n:
        raise DomainError("flux numbers must sum to zero")
    drops, fields = {}, {}
    for i in range(n):
        for j in sorted(neighbors[i]):
            if j <= i:
                continue
            key = (i, j)
            gap = gaps.get(key) or gaps.get((j, i))
            if gap is None:
                raise DomainError(f"missing gap geometry for neighbour pair {key}")
            if not gap.delta > 0:
                raise DomainError(f"gap of pair {key} must be positive")
            g = leading_conductance(conductance_constant(gap, mode), gap.delta, gap.dim)
            drops[key] = predicted_potential_difference(abs(R[i] - R[j]), g)
            fields[key] = drops[key] / gap.delta
    if not fields:
        raise DomainError("no neighbour pairs")
    best = min(fields, key=lambda k: (-fields[k], k))
    return NetworkPrediction(drops, fields, best, fields[best], mode)


def p_laplacian_prediction(R_o: float, C12: float, delta: float, dim: int, p: float) -> Prediction:
    """Field scaling ``(R_o/C12)^(1/(p-1)) * delta^(-(d-1)/(2(p-1)))`` for power-law media."""
    if p <= 1:
        raise DomainError("the exponent p must exceed 1")
    if p < 2:
        raise DomainError("the power-law prediction is stated for p >= 2")
    _check_delta(delta, dim)
    if p == 2:
        if dim == 3:
            raise DomainError("p = 2 in d = 3 lacks the logarithmic factor of the linear law; "
                              "use gradient_blowup_prediction")
        base = gradient_blowup_prediction(R_o, C12, delta, 2)
        return Prediction(base.value, base.potential_difference, base.conductance, base.R_o, base.C12,
                          base.delta, 2, "linear law (p = 2)", p=2.0,
                          note="p = 2 reduces to the linear d=2 law")
    if not C12 > 0 or R_o < 0:
        raise DomainError("need C12 > 0 and R_o >= 0")
    q = 1.0 / (p - 1)
    expo = -(dim - 1) / (2 * (p - 1))
    value = (R_o / C12) ** q * delta**expo
    return Prediction(value, None, None, float(R_o), float(C12), float(delta), dim,
                      "(R_o/C12)^(1/(p-1)) * delta^(-(d-1)/(2(p-1)))", p=float(p))
