"""JSON instance and report files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .geom import AffineFunc, HPolyhedron, PolygonV
from .partition import (AffineSpec, CellSet, PartitionTree, TreeNode, build_affine_cells,
                        hierarchical_cells, restrict)

_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_VECTOR = {"type": "array", "items": {"type": "number"}}
_HREP = {
    "type": "object",
    "required": ["A", "b"],
    "properties": {"A": _MATRIX, "b": _VECTOR},
    "additionalProperties": False,
}
_FUNC = {
    "type": "object",
    "required": ["gradient", "offset"],
    "properties": {"gradient": _VECTOR, "offset": {"type": "number"}},
}
_NODE = {
    "type": "object",
    "required": ["gradient", "offset"],
    "properties": {
        "gradient": _VECTOR,
        "offset": {"type": "number"},
        "children": {"type": "array", "items": {"$ref": "#/$defs/node"}},
    },
}

INSTANCE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["dimension", "body", "partition"],
    "properties": {
        "dimension": {"type": "integer", "minimum": 1},
        "body": {
            "type": "object",
            "oneOf": [
                {"required": ["halfspaces"], "properties": {"halfspaces": _HREP}},
                {"required": ["polygon"], "properties": {"polygon": _MATRIX}},
            ],
        },
        "partition": {
            "type": "object",
            "required": ["kind", "payload"],
            "properties": {
                "kind": {"enum": ["affine", "tree", "cells"]},
                "payload": {"type": "object"},
            },
            "allOf": [
                {"if": {"properties": {"kind": {"const": "affine"}}},
                 "then": {"properties": {"payload": {
                     "required": ["functions"],
                     "properties": {"functions": {"type": "array", "minItems": 1,
                                                  "items": _FUNC}}}}}},
                {"if": {"properties": {"kind": {"const": "tree"}}},
                 "then": {"properties": {"payload": {
                     "required": ["root"], "properties": {"root": {"$ref": "#/$defs/node"}}}}}},
                {"if": {"properties": {"kind": {"const": "cells"}}},
                 "then": {"properties": {"payload": {
                     "required": ["cells"],
                     "properties": {"cells": {"type": "array", "minItems": 1, "items": _HREP},
                                    "scope": {"enum": ["space", "body"]}}}}}},
            ],
        },
        "metadata": {"type": "object"},
    },
    "$defs": {"node": _NODE},
}


class InstanceError(ValueError):
    """Malformed or inconsistent instance file."""


@dataclass
class InstanceFile:
    """A body and a partition, as stored on disk.

    ``partition`` is an AffineSpec, a PartitionTree or a CellSet; for cells,
    ``scope`` says whether they partition the whole space or only the body.
    """

    dimension: int
    body: HPolyhedron
    partition: object
    polygon: PolygonV | None = None
    scope: str = "space"
    metadata: dict = field(default_factory=dict)

    def space_cells(self) -> CellSet | None:
        if isinstance(self.partition, AffineSpec):
            return build_affine_cells(self.partition)
        if isinstance(self.partition, PartitionTree):
            return hierarchical_cells(self.partition)
        return self.partition if self.scope == "space" else None

    def body_cells(self) -> CellSet:
        if isinstance(self.partition, CellSet) and self.scope == "body":
            return restrict(self.partition, self.body)
        return restrict(self.space_cells(), self.body)

    def body_polygon(self) -> PolygonV:
        if self.polygon is not None:
            return self.polygon
        from .geom import polygon_from_hrep
        return polygon_from_hrep(self.body)


def _hrep(P: HPolyhedron) -> dict:
    return {"A": P.A.tolist(), "b": P.b.tolist()}


def _func(f: AffineFunc) -> dict:
    return {"gradient": f.gradient.tolist(), "offset": float(f.offset)}


def _node(n: TreeNode) -> dict:
    out = _func(n.func)
    if n.children:
        out["children"] = [_node(c) for c in n.children]
    return out


def instance_to_dict(inst: InstanceFile) -> dict:
    if inst.polygon is not None:
        body = {"polygon": inst.polygon.vertices.tolist()}
    else:
        body = {"halfspaces": _hrep(inst.body)}
    p = inst.partition
    if isinstance(p, AffineSpec):
        part = {"kind": "affine", "payload": {"functions": [_func(f) for f in p.funcs]}}
    elif isinstance(p, PartitionTree):
        part = {"kind": "tree", "payload": {"root": _node(p.root)}}
    elif isinstance(p, CellSet):
        part = {"kind": "cells", "payload": {"cells": [_hrep(c) for c in p.cells],
                                             "scope": inst.scope}}
    else:
        raise InstanceError(f"unsupported partition type {type(p).__name__}")
    return {"dimension": inst.dimension, "body": body, "partition": part,
            "metadata": dict(inst.metadata)}


def _read_node(d: dict) -> TreeNode:
    return TreeNode(AffineFunc(d["gradient"], d["offset"]),
                    tuple(_read_node(c) for c in d.get("children", [])))


def _matrix(rows, d: int) -> np.ndarray:
    A = np.array(rows, dtype=float).reshape(-1, d) if len(rows) else np.zeros((0, d))
    if A.shape[1] != d:
        raise InstanceError("row length does not match the dimension")
    return A


def instance_from_dict(doc: dict) -> InstanceFile:
    try:
        jsonschema.validate(doc, INSTANCE_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise InstanceError(f"schema violation at {path}: {exc.message}") from exc
    d = doc["dimension"]
    try:
        polygon = None
        if "polygon" in doc["body"]:
            if d != 2:
                raise InstanceError("polygon bodies are two-dimensional")
            polygon = PolygonV(np.array(doc["body"]["polygon"], dtype=float))
            if not polygon.is_convex():
                raise InstanceError("body polygon must be convex and counter-clockwise")
            body = polygon.to_hpolyhedron()
        else:
            h = doc["body"]["halfspaces"]
            body = HPolyhedron(_matrix(h["A"], d), np.array(h["b"], dtype=float), d)
        kind = doc["partition"]["kind"]
        payload = doc["partition"]["payload"]
        scope = "space"
        if kind == "affine":
            part = AffineSpec(tuple(AffineFunc(f["gradient"], f["offset"])
                                    for f in payload["functions"]))
        elif kind == "tree":
            part = PartitionTree(_read_node(payload["root"]))
        else:
            scope = payload.get("scope", "space")
            part = CellSet(tuple(HPolyhedron(_matrix(c["A"], d), np.array(c["b"], dtype=float), d)
                                 for c in payload["cells"]))
        if isinstance(part, (AffineSpec, PartitionTree)) and part.dim != d:
            raise InstanceError("partition dimension does not match")
    except InstanceError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InstanceError(str(exc)) from exc
    return InstanceFile(d, body, part, polygon, scope, dict(doc.get("metadata", {})))


def read_instance(path) -> InstanceFile:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc
    return instance_from_dict(doc)


def write_instance(inst: InstanceFile, path) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)), encoding="utf-8")


def jsonable(obj):
    """Replace infinities by "+inf"/"-inf" strings and NaN by null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "+inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: dict, path) -> None:
    Path(path).write_text(dumps(report), encoding="utf-8")


def instance_from_generated(inst) -> InstanceFile:
    """Serializable form of a generated ``verify.Instance``."""
    meta = {"kind": inst.kind, "seed": inst.seed, "k": inst.k, "d": inst.d}
    if inst.spec is not None:
        part, scope = inst.spec, "space"
    elif inst.tree is not None and inst.kind == "hierarchical":
        part, scope = inst.tree, "space"
    elif inst.space is not None:
        part, scope = inst.space, "space"
    else:
        part, scope = inst.cells, "body"
    return InstanceFile(inst.d, inst.body, part, inst.polygon, scope,
                        {k: v for k, v in meta.items() if v is not None})


__all__ = [
    "INSTANCE_SCHEMA",
    "InstanceError",
    "InstanceFile",
    "dumps",
    "instance_from_dict",
    "instance_from_generated",
    "instance_to_dict",
    "jsonable",
    "read_instance",
    "write_instance",
    "write_report",
]
