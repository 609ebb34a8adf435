"""JSON net format: load with field-precise errors, save with lossless
round-tripping (repr floats reparse to the identical double)."""

from __future__ import annotations

import json
import os

from . import surfaces
from .errors import SchemaError
from .net import Net, NetVertex
from .surfaces import Point, SurfaceModel

_KINDS = (surfaces.FLAT, surfaces.HYPERBOLIC, surfaces.SPHERICAL)


def net_to_dict(net: Net) -> dict:
    out = {
        "surface": {"kind": net.surface.kind, "curvature": net.surface.curvature},
        "vertices": [
            {"id": vid, "coords": [nv.point.x, nv.point.y], "fixed": nv.fixed}
            for vid, nv in sorted(net.vertices.items())
        ],
        "edges": [[u, v] for u, v in net.edges],
    }
    if net.meta:
        out["meta"] = net.meta
    return out


def net_from_dict(data: dict) -> Net:
    if not isinstance(data, dict):
        raise SchemaError("$", "top level must be an object")
    surf = data.get("surface")
    if not isinstance(surf, dict):
        raise SchemaError("surface", "missing or not an object")
    kind = surf.get("kind")
    if kind not in _KINDS:
        raise SchemaError("surface.kind", f"expected one of {_KINDS}, got {kind!r}")
    curvature = surf.get("curvature")
    if not isinstance(curvature, (int, float)) or isinstance(curvature, bool):
        raise SchemaError("surface.curvature", "expected a number")
    try:
        surface = SurfaceModel(kind, float(curvature))
    except ValueError as exc:
        raise SchemaError("surface.curvature", str(exc)) from None

    raw_vertices = data.get("vertices")
    if not isinstance(raw_vertices, list) or not raw_vertices:
        raise SchemaError("vertices", "missing or empty list")
    verts = {}
    for i, item in enumerate(raw_vertices):
        where = f"vertices[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(where, "expected an object")
        vid = item.get("id")
        if not isinstance(vid, str) or not vid:
            raise SchemaError(f"{where}.id", "expected a nonempty string")
        if vid in verts:
            raise SchemaError(f"{where}.id", f"duplicate id {vid!r}")
        coords = item.get("coords")
        if (not isinstance(coords, list) or len(coords) != 2
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool)
                           for c in coords)):
            raise SchemaError(f"{where}.coords", "expected [number, number]")
        fixed = item.get("fixed")
        if not isinstance(fixed, bool):
            raise SchemaError(f"{where}.fixed", "expected a boolean")
        try:
            point = Point(surface, float(coords[0]), float(coords[1]))
        except Exception as exc:
            raise SchemaError(f"{where}.coords", str(exc)) from None
        verts[vid] = NetVertex(point, fixed)

    raw_edges = data.get("edges")
    if not isinstance(raw_edges, list):
        raise SchemaError("edges", "missing list")
    edges = []
    for i, item in enumerate(raw_edges):
        where = f"edges[{i}]"
        if (not isinstance(item, list) or len(item) != 2
                or not all(isinstance(x, str) for x in item)):
            raise SchemaError(where, "expected [id, id]")
        if item[0] not in verts or item[1] not in verts:
            raise SchemaError(where, f"unknown vertex in {item}")
        edges.append((item[0], item[1]))

    meta = data.get("meta", {})
    if meta and not isinstance(meta, dict):
        raise SchemaError("meta", "expected an object")
    return Net(surface, verts, edges, meta=meta)


def dumps(net: Net) -> str:
    return json.dumps(net_to_dict(net), indent=2)


def save(net: Net, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(net))
        fh.write("\n")


def load(path, validate: bool = True, tol: float | None = None) -> Net:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from None
    net = net_from_dict(data)
    if validate:
        net.validate(tol)
    return net
