"""Scenario files (JSON, schema ``plurienv/1``)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import jsonschema
import numpy as np

from .disc import KINDS, AnalyticDisc
from .domains import DomainSpec
from .envelope import OptimizerSettings
from .perron import GridSettings
from .potentials import (CurrentSpec, Weight, expr_from_json, parse_complex,
                         parse_cvector)

SCHEMA_VERSION = "plurienv/1"

_number = {"type": ["number", "string"]}
_complex = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_point = {"type": "array", "items": _complex, "minItems": 1}
_expr = {"type": ["object", "number"]}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "plurienv scenario",
    "type": "object",
    "required": ["schema", "domain", "weight"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "seed": _number,
        "domain": {
            "type": "object",
            "required": ["kind", "center", "radii"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["ball", "polydisc"]},
                "center": _point,
                "radii": {"type": "array", "items": _number, "minItems": 1},
            },
        },
        "omega": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"psi1": _expr, "psi2": _expr},
        },
        "weight": {
            "type": "object",
            "required": ["phi1"],
            "additionalProperties": False,
            "properties": {"phi1": _expr, "phi2": _expr},
        },
        "points": {"type": "array", "items": _point},
        "optimizer": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "families": {"type": "array", "items": {
                    "type": "array", "prefixItems": [{"enum": list(KINDS)}, {"type": "integer", "minimum": 1}],
                    "minItems": 2, "maxItems": 2}},
                "restarts": {"type": "integer", "minimum": 1},
                "max_fev": {"type": "integer", "minimum": 1},
                "penalty": _number,
                "n_circle": {"type": "integer", "minimum": 16},
                "disc_radius": _number,
                "xatol": _number,
                "fatol": _number,
            },
        },
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "res": {"type": "integer", "minimum": 4},
                "n_dirs": {"type": ["integer", "null"], "minimum": 1},
                "rho": _number,
                "n_circle": {"type": "integer", "minimum": 4},
                "tol": _number,
                "max_iter": {"type": "integer", "minimum": 1},
                "checkpoint_every": {"type": "integer", "minimum": 1},
            },
        },
        "compare": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"tolerance": _number, "interior_fraction": _number},
        },
        "mollify": {
            "type": "object",
            "additionalProperties": False,
            "required": ["deltas"],
            "properties": {
                "deltas": {"type": "array", "items": _number},
                "n_quad": {"type": "integer", "minimum": 3},
                "point": _point,
                "tolerance": _number,
                "limit_tolerance": _number,
            },
        },
    },
}


class ScenarioError(ValueError):
    """Validation failure; ``pointer`` names the offending field."""

    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


@dataclass(frozen=True)
class MollifySweep:
    deltas: tuple
    n_quad: int = 21
    point: tuple | None = None
    tolerance: float = 0.01
    limit_tolerance: float = 0.05


@dataclass(frozen=True)
class Scenario:
    name: str
    dom: DomainSpec
    omega: CurrentSpec
    weight: Weight
    points: tuple = ()
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    oracle: GridSettings = field(default_factory=GridSettings)
    mollify: MollifySweep | None = None
    seed: int = 0
    compare_tolerance: float = 0.05
    interior_fraction: float = 0.9

    def with_seed(self, seed: int) -> Scenario:
        return replace(self, seed=int(seed), optimizer=replace(self.optimizer, seed=int(seed)))

    def with_points(self, points) -> Scenario:
        pts = tuple(tuple(complex(v) for v in np.atleast_1d(np.asarray(p, dtype=complex))) for p in points)
        _check_points(pts, self.dom, "points")
        return replace(self, points=pts)

    def to_json(self) -> dict:
        opt = self.optimizer.to_json()
        opt.pop("seed")
        out = {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "seed": str(self.seed),
            "domain": self.dom.to_json(),
            "omega": self.omega.to_json(),
            "weight": self.weight.to_json(),
            "points": [[_pair(c) for c in p] for p in self.points],
            "optimizer": opt,
            "oracle": self.oracle.to_json(),
            "compare": {"tolerance": self.compare_tolerance, "interior_fraction": self.interior_fraction},
        }
        if self.mollify is not None:
            m = self.mollify
            out["mollify"] = {"deltas": list(m.deltas), "n_quad": m.n_quad,
                              "tolerance": m.tolerance, "limit_tolerance": m.limit_tolerance}
            if m.point is not None:
                out["mollify"]["point"] = [_pair(c) for c in m.point]
        return out


def _pair(c):
    c = complex(c)
    return [c.real, c.imag]


def _check_points(points, dom, where):
    for i, p in enumerate(points):
        if len(p) != dom.dim:
            raise ScenarioError(f"{where}[{i}]", f"point has {len(p)} coordinates, domain has {dom.dim}")
        if not dom.contains(np.asarray(p)):
            raise ScenarioError(f"{where}[{i}]", "point is not inside the domain")


def _pointer(path):
    return "scenario" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path)


def scenario_from_json(obj) -> Scenario:
    """Validate and build a :class:`Scenario`; raises :class:`ScenarioError`."""
    try:
        jsonschema.validate(obj, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ScenarioError(_pointer(exc.absolute_path), exc.message) from None

    def guarded(where, fn, *args):
        try:
            return fn(*args)
        except ScenarioError:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            raise ScenarioError(where, str(exc)) from None

    d = obj["domain"]
    dom = guarded("scenario.domain", lambda: DomainSpec(
        d["kind"], parse_cvector(d["center"], "domain.center"), [float(r) for r in d["radii"]]))
    om = obj.get("omega", {})
    omega = guarded("scenario.omega", lambda: CurrentSpec(
        expr_from_json(om.get("psi1", 0.0), "omega.psi1"), expr_from_json(om.get("psi2", 0.0), "omega.psi2")))
    wt = obj["weight"]
    weight = guarded("scenario.weight", lambda: Weight(
        expr_from_json(wt["phi1"], "weight.phi1"), expr_from_json(wt.get("phi2", 0.0), "weight.phi2")))
    for label, dim in (("omega", omega.dim), ("weight", weight.dim)):
        if dim is not None and dim != dom.dim:
            raise ScenarioError(f"scenario.{label}", f"expressions live on C^{dim}, domain on C^{dom.dim}")
    points = tuple(tuple(complex(v) for v in guarded(f"scenario.points[{i}]", parse_cvector, p))
                   for i, p in enumerate(obj.get("points", [])))
    _check_points(points, dom, "scenario.points")
    seed = guarded("scenario.seed", lambda: int(obj.get("seed", 0)))

    o = dict(obj.get("optimizer", {}))
    for k in ("penalty", "disc_radius", "xatol", "fatol"):
        if k in o:
            o[k] = float(o[k])
    if "families" in o:
        o["families"] = tuple(tuple(f) for f in o["families"])
    opt = guarded("scenario.optimizer", lambda: OptimizerSettings(seed=seed, **o))
    g = dict(obj.get("oracle", {}))
    for k in ("rho", "tol"):
        if k in g:
            g[k] = float(g[k])
    grid = guarded("scenario.oracle", lambda: GridSettings(**g))
    cmp_ = obj.get("compare", {})
    moll = None
    if "mollify" in obj:
        m = obj["mollify"]
        mpoint = None
        if "point" in m:
            mpoint = tuple(complex(v) for v in guarded("scenario.mollify.point", parse_cvector, m["point"]))
            _check_points([mpoint], dom, "scenario.mollify.point")
        moll = MollifySweep(tuple(float(v) for v in m["deltas"]), int(m.get("n_quad", 21)), mpoint,
                            float(m.get("tolerance", 0.01)), float(m.get("limit_tolerance", 0.05)))
    return Scenario(
        name=obj.get("name", "scenario"), dom=dom, omega=omega, weight=weight, points=points,
        optimizer=opt, oracle=grid, mollify=moll, seed=seed,
        compare_tolerance=float(cmp_.get("tolerance", 0.05)),
        interior_fraction=float(cmp_.get("interior_fraction", 0.9)),
    )


def load_scenario(path) -> Scenario:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError("scenario", f"invalid JSON: {exc}") from None
    return scenario_from_json(obj)


def disc_from_json(obj, dim=None) -> AnalyticDisc:
    """Disc syntax: ``{"kind", "coeffs": [[a_0 coords], [a_1 coords], ...], "warp", "radius"}``."""
    if not isinstance(obj, dict):
        raise ScenarioError("disc", "expected an object")
    kind = obj.get("kind", "polynomial")
    if kind not in KINDS:
        raise ScenarioError("disc.kind", f"unknown kind {kind!r}")
    rows = obj.get("coeffs")
    if not isinstance(rows, list) or not rows:
        raise ScenarioError("disc.coeffs", "expected a non-empty list of coefficient vectors")
    coeffs = []
    for k, row in enumerate(rows):
        if not isinstance(row, list):
            raise ScenarioError(f"disc.coeffs[{k}]", "expected a list of coordinates")
        vec = []
        for j, v in enumerate(row):
            try:
                vec.append(parse_complex(v, f"disc.coeffs[{k}][{j}]"))
            except ValueError as exc:
                raise ScenarioError(f"disc.coeffs[{k}][{j}]", str(exc)) from None
        coeffs.append(vec)
    if len({len(r) for r in coeffs}) != 1:
        raise ScenarioError("disc.coeffs", "coefficient vectors have different lengths")
    if dim is not None and len(coeffs[0]) != dim:
        raise ScenarioError("disc.coeffs[0]", f"disc lives in C^{len(coeffs[0])}, scenario in C^{dim}")
    try:
        warp = parse_complex(obj.get("warp", 0.0), "disc.warp")
    except ValueError as exc:
        raise ScenarioError("disc.warp", str(exc)) from None
    try:
        return AnalyticDisc(np.array(coeffs), kind=kind, warp=warp, radius=float(obj.get("radius", 1.05)))
    except ValueError as exc:
        raise ScenarioError("disc", str(exc)) from None


__all__ = ["SCHEMA", "SCHEMA_VERSION", "Scenario", "ScenarioError", "MollifySweep",
           "scenario_from_json", "load_scenario", "disc_from_json"]
