"""JSON graph files: graph, measures and the optional boundary block.

Layout::

    {"vertices": [{"id": "v", "mass": 0.0}, ...],
     "edges": [{"id": "e", "from": "v", "to": "w", "interval": [0, 1],
                "measure": {"density": [{"from": 0, "to": 1, "value": 1}],
                            "atoms": [{"at": 0.5, "mass": 1}]}}, ...],
     "boundary": {"type": "local", "vertices": {"v": {"kind": "delta", "strength": 2}}}
              or {"type": "global", "X_basis": [[...], ...], "L": [[...], ...]}}

Unknown keys anywhere are rejected with a :class:`SchemaError` naming them.
"""
from __future__ import annotations

import json
from pathlib import Path

from .boundary import BoundaryData, LocalBC, assemble_global, assemble_local
from .graph import Edge, EdgeMeasure, MetricGraph, Vertex


class SchemaError(ValueError):
    pass


def _keys(obj, where: str, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
    extra = set(obj) - required - set(optional)
    if extra:
        raise SchemaError(f"{where}: unknown key(s) {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"{where}: missing key(s) {sorted(missing)}")


def _num(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _matrix(rows, where: str) -> list[list[float]]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SchemaError(f"{where}: expected an array of arrays")
    return [[_num(x, where) for x in r] for r in rows]


def _measure(obj, where: str) -> EdgeMeasure:
    _keys(obj, where, set(), {"density", "atoms"})
    dens = []
    for k, seg in enumerate(obj.get("density", [])):
        w = f"{where}.density[{k}]"
        _keys(seg, w, {"from", "to", "value"})
        dens.append((_num(seg["from"], w + ".from"), _num(seg["to"], w + ".to"), _num(seg["value"], w + ".value")))
    atoms = []
    for k, at in enumerate(obj.get("atoms", [])):
        w = f"{where}.atoms[{k}]"
        _keys(at, w, {"at", "mass"})
        atoms.append((_num(at["at"], w + ".at"), _num(at["mass"], w + ".mass")))
    return EdgeMeasure(tuple(dens), tuple(atoms))


def graph_from_dict(data) -> MetricGraph:
    _keys(data, "graph", {"vertices", "edges"}, {"boundary"})
    vertices = []
    for k, v in enumerate(data["vertices"]):
        w = f"vertices[{k}]"
        _keys(v, w, {"id"}, {"mass"})
        vertices.append(Vertex(str(v["id"]), _num(v.get("mass", 0.0), w + ".mass")))
    edges = []
    for k, e in enumerate(data["edges"]):
        w = f"edges[{k}]"
        _keys(e, w, {"id", "from", "to", "interval"}, {"measure"})
        iv = e["interval"]
        if not isinstance(iv, list) or len(iv) != 2:
            raise SchemaError(f"{w}.interval: expected [a, b]")
        edges.append(Edge(str(e["id"]), str(e["from"]), str(e["to"]),
                          (_num(iv[0], w + ".interval"), _num(iv[1], w + ".interval")),
                          _measure(e.get("measure", {}), w + ".measure")))
    return MetricGraph(tuple(vertices), tuple(edges))


def _local_bc(obj, where: str) -> LocalBC:
    _keys(obj, where, {"kind"}, {"strength", "X_basis", "L"})
    kind = obj["kind"]
    if kind not in LocalBC.KINDS:
        raise SchemaError(f"{where}.kind: unknown kind {kind!r}")
    strength = _num(obj.get("strength", 0.0), where + ".strength")
    if kind != "custom":
        if "X_basis" in obj or "L" in obj:
            raise SchemaError(f"{where}: X_basis / L only allowed for kind 'custom'")
        return LocalBC(kind, strength)
    if "X_basis" not in obj:
        raise SchemaError(f"{where}: missing key(s) ['X_basis']")
    basis = tuple(tuple(r) for r in _matrix(obj["X_basis"], where + ".X_basis"))
    form = tuple(tuple(r) for r in _matrix(obj["L"], where + ".L")) if "L" in obj else None
    return LocalBC("custom", strength, basis, form)


def boundary_from_dict(graph: MetricGraph, data) -> BoundaryData:
    if data is None:
        return assemble_local(graph)
    if not isinstance(data, dict) or "type" not in data:
        raise SchemaError("boundary: missing key(s) ['type']")
    if data["type"] == "local":
        _keys(data, "boundary", {"type"}, {"vertices"})
        specs = data.get("vertices", {})
        if not isinstance(specs, dict):
            raise SchemaError("boundary.vertices: expected an object")
        ids = {v.id for v in graph.vertices}
        for vid in specs:
            if vid not in ids:
                raise SchemaError(f"boundary.vertices: unknown key {vid!r} (no such vertex)")
        local = {vid: _local_bc(s, f"boundary.vertices.{vid}") for vid, s in specs.items()}
        return assemble_local(graph, local)
    if data["type"] == "global":
        _keys(data, "boundary", {"type", "X_basis"}, {"L"})
        basis = _matrix(data["X_basis"], "boundary.X_basis")
        form = _matrix(data["L"], "boundary.L") if "L" in data else None
        return assemble_global(graph, basis, form)
    raise SchemaError(f"boundary.type: unknown value {data['type']!r}")


def load(path) -> tuple[MetricGraph, dict | None]:
    """Read a graph file; returns the graph and the raw boundary block."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    return graph_from_dict(data), data.get("boundary") if isinstance(data, dict) else None


def graph_to_dict(graph: MetricGraph, boundary: dict | None = None) -> dict:
    out = {
        "vertices": [{"id": v.id, "mass": v.mass} for v in graph.vertices],
        "edges": [
            {
                "id": e.id, "from": e.source, "to": e.target, "interval": list(e.interval),
                "measure": {
                    "density": [{"from": lo, "to": hi, "value": w} for lo, hi, w in e.measure.density],
                    "atoms": [{"at": x, "mass": m} for x, m in e.measure.atoms],
                },
            }
            for e in graph.edges
        ],
    }
    if boundary is not None:
        out["boundary"] = boundary
    return out


def dumps(graph: MetricGraph, boundary: dict | None = None) -> str:
    return json.dumps(graph_to_dict(graph, boundary), indent=2, sort_keys=True)


def loads(text: str) -> MetricGraph:
    return graph_from_dict(json.loads(text))
