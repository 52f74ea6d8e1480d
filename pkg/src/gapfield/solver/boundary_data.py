"""Dirichlet data on the outer boundary."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..geometry import as_complex

KINDS = ("constant", "linear_x", "linear_y", "dipole", "table")


@dataclass(frozen=True)
class BoundaryData:
    """Named outer-boundary potential.

    * ``constant``: ``U = value``
    * ``linear_x`` / ``linear_y``: ``U = value * x`` / ``value * y``
    * ``dipole``: ``U = moment . (x - center) / |x - center|^2``
    * ``table``: equispaced samples in the outer curve's parameter,
      interpolated by trigonometric polynomials.
    """

    kind: str = "constant"
    value: float = 1.0
    center: complex = 0j
    moment: complex = 1.0 + 0j
    samples: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown boundary data kind {self.kind!r}", key_path="boundary_data.kind")
        object.__setattr__(self, "center", as_complex(self.center))
        object.__setattr__(self, "moment", as_complex(self.moment))
        object.__setattr__(self, "samples", tuple(float(v) for v in self.samples))
        if self.kind == "table" and len(self.samples) < 4:
            raise ConfigError("a boundary table needs at least 4 samples", key_path="boundary_data.samples")

    @classmethod
    def constant(cls, value: float) -> "BoundaryData":
        return cls("constant", value=float(value))

    @classmethod
    def linear_x(cls, scale: float = 1.0) -> "BoundaryData":
        return cls("linear_x", value=float(scale))

    @classmethod
    def linear_y(cls, scale: float = 1.0) -> "BoundaryData":
        return cls("linear_y", value=float(scale))

    @classmethod
    def dipole(cls, center, moment) -> "BoundaryData":
        return cls("dipole", center=center, moment=moment)

    @classmethod
    def table(cls, samples) -> "BoundaryData":
        return cls("table", samples=tuple(samples))

    def evaluate(self, z, t=None) -> np.ndarray:
        """Values at points ``z`` (with outer-curve parameters ``t`` for tables)."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "constant":
            return np.full(z.shape, self.value)
        if self.kind == "linear_x":
            return self.value * z.real
        if self.kind == "linear_y":
            return self.value * z.imag
        if self.kind == "dipole":
            d = z - self.center
            return (np.conj(self.moment) * d).real / np.abs(d) ** 2
        if t is None:
            raise ConfigError("table boundary data needs curve parameters", key_path="boundary_data")
        vals = np.array(self.samples)
        n = len(vals)
        c = np.fft.rfft(vals) / n
        k = np.arange(len(c))
        scale = np.where((k == 0) | ((n % 2 == 0) & (k == n // 2)), 1.0, 2.0)
        phase = np.exp(2j * np.pi * np.multiply.outer(np.asarray(t, dtype=float), k))
        return (phase @ (scale * c)).real

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant" or (self.kind == "table" and len(set(self.samples)) == 1)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind in ("constant", "linear_x", "linear_y"):
            out["value"] = self.value
        elif self.kind == "dipole":
            out["center"] = [self.center.real, self.center.imag]
            out["moment"] = [self.moment.real, self.moment.imag]
        else:
            out["samples"] = list(self.samples)
        return out
