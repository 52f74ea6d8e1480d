"""Run-plan files: JSON documents validated against a strict schema.

Defaults (applied when a key is absent):

* ``dim``: 2
* ``outer``: circle of radius 10 centred at the origin (d=2 only)
* ``boundary_data``: ``{"kind": "linear_y", "value": 1.0}``
* ``gap.pair``: ``[0, 1]``; no gap override
* ``sweep.level``: 2, ``sweep.neck_width``: ``"auto"``, ``sweep.mode``:
  ``"derived"``, ``sweep.workers``: 1, ``sweep.deltas``: none (``solve`` only)
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from ..errors import ConfigError, GeometryError
from ..geometry import Circle, Configuration, Ellipse, GapGeometry, SampledCurve, set_gap
from ..neck import MODES
from ..solver import MAX_LEVEL, BoundaryData

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_POS = {"type": "number", "exclusiveMinimum": 0}

SHAPE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["circle", "ellipse", "table"]},
        "radius": _POS,
        "semi_axes": {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2},
        "points": {"type": "array", "items": _POINT, "minItems": 8},
        "center": _POINT,
        "rotation": {"type": "number"},
        "label": {"type": "string"},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "circle"}}}, "then": {"required": ["radius"]}},
        {"if": {"properties": {"kind": {"const": "ellipse"}}}, "then": {"required": ["semi_axes"]}},
        {"if": {"properties": {"kind": {"const": "table"}}}, "then": {"required": ["points"]}},
    ],
}

BOUNDARY_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["constant", "linear_x", "linear_y", "dipole", "table"]},
        "value": {"type": "number"},
        "center": _POINT,
        "moment": _POINT,
        "samples": {"type": "array", "items": {"type": "number"}, "minItems": 4},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "dim": {"enum": [2, 3]},
        "outer": SHAPE_SCHEMA,
        "particles": {"type": "array", "items": SHAPE_SCHEMA, "minItems": 1},
        "boundary_data": BOUNDARY_SCHEMA,
        "gap": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pair": {"type": "array", "items": {"type": "integer", "minimum": 0},
                         "minItems": 2, "maxItems": 2},
                "delta": {"type": "number", "minimum": 0},
            },
        },
        "analytic_gap": {
            "type": "object",
            "additionalProperties": False,
            "required": ["delta", "radii_1"],
            "properties": {
                "delta": {"type": "number", "minimum": 0},
                "radii_1": {"type": "array", "items": _POS, "minItems": 1, "maxItems": 2},
                "radii_2": {"type": "array", "items": _POS, "minItems": 1, "maxItems": 2},
                "neck_width": _POS,
            },
        },
        "R_o": {"type": "number", "minimum": 0},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "deltas": {"type": "array", "items": _POS, "minItems": 1},
                "level": {"type": "integer", "minimum": 1, "maximum": MAX_LEVEL},
                "neck_width": {"oneOf": [{"const": "auto"}, _POS]},
                "mode": {"enum": list(MODES)},
                "workers": {"type": "integer", "minimum": 1},
            },
        },
    },
}


@dataclass(frozen=True)
class RunPlan:
    """Fully resolved inputs for ``solve``, ``sweep``, ``predict`` and ``neck``."""

    config: Configuration
    boundary: BoundaryData
    pair: tuple = (0, 1)
    deltas: tuple = ()
    level: int = 2
    neck_width: float | None = None  # None means the automatic rule
    mode: str = "derived"
    workers: int = 1
    analytic_gap: GapGeometry | None = None
    R_o: float | None = None
    name: str = ""
    source: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def config_hash(self) -> str:
        text = json.dumps(self.source, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _shape(spec: dict, where: str):
    center = complex(*spec.get("center", (0.0, 0.0)))
    common = dict(center=center, rotation=spec.get("rotation", 0.0), label=spec.get("label", ""))
    kind = spec["kind"]
    if kind == "circle":
        return Circle(radius=spec["radius"], **common)
    if kind == "ellipse":
        a, b = spec["semi_axes"]
        return Ellipse(a=a, b=b, **common)
    try:
        return SampledCurve(samples=tuple(complex(x, y) for x, y in spec["points"]), **common)
    except GeometryError as exc:
        raise GeometryError(f"{where}: {exc}") from exc


def _boundary(spec: dict) -> BoundaryData:
    kind = spec["kind"]
    if kind == "dipole":
        return BoundaryData.dipole(complex(*spec.get("center", (0, 0))), complex(*spec.get("moment", (1, 0))))
    if kind == "table":
        if "samples" not in spec:
            raise ConfigError("table boundary data needs samples", key_path="boundary_data.samples")
        return BoundaryData.table(spec["samples"])
    return BoundaryData(kind, value=float(spec.get("value", 1.0)))


def _key_path(error) -> str:
    parts = [str(p) for p in error.absolute_path]
    if error.validator == "additionalProperties":
        extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        parts += extra[:1]
    return ".".join(parts) or "<root>"


def validate_document(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(list(e.absolute_path)), str(e.message)))
    if errors:
        err = errors[0]
        path = _key_path(err)
        raise ConfigError(err.message, key_path=path)


def plan_from_dict(doc: dict) -> RunPlan:
    validate_document(doc)
    dim = doc.get("dim", 2)
    sweep = doc.get("sweep", {})
    deltas = tuple(float(d) for d in sweep.get("deltas", ()))
    if len(deltas) > 1 and any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ConfigError("sweep deltas must be strictly decreasing", key_path="sweep.deltas")
    width = sweep.get("neck_width", "auto")
    boundary = _boundary(doc.get("boundary_data", {"kind": "linear_y", "value": 1.0}))
    gap_spec = doc.get("gap", {})
    pair = tuple(gap_spec.get("pair", (0, 1)))
    if pair[0] == pair[1]:
        raise ConfigError("gap pair must name two different particles", key_path="gap.pair")

    analytic = None
    if "analytic_gap" in doc:
        a = doc["analytic_gap"]
        r1 = tuple(a["radii_1"])
        r2 = tuple(a.get("radii_2", r1))
        if len(r1) != dim - 1 or len(r2) != dim - 1:
            raise ConfigError(f"d={dim} needs {dim - 1} radii per side", key_path="analytic_gap.radii_1")
        analytic = GapGeometry(delta=float(a["delta"]), dim=dim, radii_i=r1, radii_j=r2, pair=pair)
        if "neck_width" in a:
            analytic = analytic.with_neck_width(float(a["neck_width"]))
        else:
            from ..geometry import default_neck_width
            analytic = analytic.with_neck_width(default_neck_width(analytic))

    if dim == 3:
        if "particles" in doc or "outer" in doc:
            raise ConfigError("d=3 plans carry only analytic gap data", key_path="particles")
        if analytic is None:
            raise ConfigError("d=3 plans need analytic_gap", key_path="analytic_gap")
        config = Configuration(None, (), dim=3, analytic_gaps=((pair, analytic),))
    else:
        if "particles" not in doc:
            if analytic is None:
                raise ConfigError("d=2 plans need particles or analytic_gap", key_path="particles")
            config = Configuration(None, (), dim=2, validate=False)
        else:
            outer = _shape(doc.get("outer", {"kind": "circle", "radius": 10.0}), "outer")
            parts = tuple(_shape(p, f"particles.{k}") for k, p in enumerate(doc["particles"]))
            if max(pair) >= len(parts):
                raise ConfigError("gap pair index out of range", key_path="gap.pair")
            config = Configuration(outer, parts)
            if "delta" in gap_spec:
                config = set_gap(config, pair[0], pair[1], float(gap_spec["delta"]))
                if gap_spec["delta"] > 0:
                    # re-validate the moved configuration
                    config = Configuration(config.outer, config.particles)
    return RunPlan(
        config=config, boundary=boundary, pair=pair, deltas=deltas,
        level=int(sweep.get("level", 2)), neck_width=None if width == "auto" else float(width),
        mode=sweep.get("mode", "derived"), workers=int(sweep.get("workers", 1)),
        analytic_gap=analytic, R_o=doc.get("R_o"), name=doc.get("name", ""), source=doc,
    )


def load_config(path) -> RunPlan:
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"configuration file not found: {p}", key_path="<file>") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}", key_path="<file>") from exc
    return plan_from_dict(doc)
