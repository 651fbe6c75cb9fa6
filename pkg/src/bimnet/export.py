"""Deterministic serialisation of a :class:`Network` to JSON, GraphML and CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from xml.sax.saxutils import escape
from enum import Enum

from .geometry import SpatialClass, SpatialRelation
from .model import Aabb, PointLocator, SegmentLocator, SemanticRecord
from .network import Edge, Network, Node
from .relations import EdgeKind

FORMAT_VERSION = 1


class ExportFormat(Enum):
    JSON = "json"
    GRAPHML = "graphml"
    CSV = "csv"


def fmt(x: float) -> float:
    """Round to 9 significant digits; also folds -0.0 into 0.0."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} in network")
    r = float(f"{x:.9g}")
    return 0.0 if r == 0.0 else r


def fmt_text(x: float) -> str:
    return repr(fmt(x))


def _vec(v) -> list[float]:
    return [fmt(c) for c in v]


def _flat_psets(psets: dict) -> dict:
    out = {}
    for pset, props in psets.items():
        for prop, value in props.items():
            out[f"{pset}.{prop}"] = fmt(value) if isinstance(value, float) else value
    return out


def _locator_dict(loc) -> dict:
    return {"kind": loc.kind, "points": [_vec(p) for p in loc.points]}


def _centroid(n: Node) -> tuple:
    # midpoint of the rounded box, so a reloaded network re-exports identically
    return tuple((fmt(lo) + fmt(hi)) / 2 for lo, hi in zip(n.aabb.min, n.aabb.max))


def _node_dict(n: Node) -> dict:
    s = n.semantics
    return {
        "id": n.id,
        "express_id": n.express_id,
        "global_id": n.global_id,
        "node_type": n.node_type,
        "is_floor": n.is_floor,
        "centroid": _vec(_centroid(n)),
        "aabb": {"min": _vec(n.aabb.min), "max": _vec(n.aabb.max), "exact": n.aabb.exact},
        "locator": _locator_dict(n.locator),
        "semantics": {
            "name": s.name,
            "family_name": s.family_name,
            "representation_kinds": sorted(s.representation_kinds),
            "materials": list(s.materials),
            "psets": _flat_psets(s.psets),
        },
    }


def _edge_dict(e: Edge) -> dict:
    d = {"kind": e.kind.label, "a": e.a, "b": e.b}
    if e.features is not None:
        f = e.features
        d.update({
            "class": f.cls.label,
            "angle_deg": fmt(f.angle_deg),
            "vector_a": _vec(f.vector_a),
            "vector_b": _vec(f.vector_b),
            "signed_distance_m": fmt(f.signed_distance_m),
            "horizontal_angle_deg": fmt(f.horizontal_angle_deg),
        })
    return d


def network_to_dict(net: Network) -> dict:
    meta = {k: (fmt(v) if isinstance(v, float) else v) for k, v in net.meta.items()}
    meta["format_version"] = FORMAT_VERSION
    return {
        "meta": meta,
        "nodes": [_node_dict(n) for n in net.nodes],
        "edges": [_edge_dict(e) for e in net.edges],
    }


def export_json(net: Network) -> bytes:
    # compact separators keep json on its C encoder; indentation is several times slower
    text = json.dumps(network_to_dict(net), sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      allow_nan=False)
    return (text + "\n").encode("utf-8")


def _unflatten_psets(flat: dict) -> dict:
    psets: dict[str, dict] = {}
    for key, value in flat.items():
        pset, _, prop = key.partition(".")
        psets.setdefault(pset, {})[prop] = value
    return psets


def _tuple3(v) -> tuple[float, float, float]:
    return (float(v[0]), float(v[1]), float(v[2]))


def network_from_dict(doc: dict) -> Network:
    nodes = []
    for d in doc["nodes"]:
        pts = [_tuple3(p) for p in d["locator"]["points"]]
        loc = PointLocator(pts[0]) if d["locator"]["kind"] == "Point" else SegmentLocator(pts[0], pts[1])
        s = d["semantics"]
        sem = SemanticRecord(
            global_id=d["global_id"],
            name=s["name"],
            family_name=s["family_name"],
            representation_kinds=frozenset(s["representation_kinds"]),
            materials=tuple(s["materials"]),
            psets=_unflatten_psets(s["psets"]),
        )
        box = Aabb(_tuple3(d["aabb"]["min"]), _tuple3(d["aabb"]["max"]), d["aabb"]["exact"])
        nodes.append(Node(d["id"], d["express_id"], d["global_id"], d["node_type"], sem, loc, box,
                          d.get("is_floor", False)))
    edges = []
    for d in doc["edges"]:
        features = None
        if "class" in d:
            features = SpatialRelation(
                SpatialClass.from_label(d["class"]), float(d["angle_deg"]),
                _tuple3(d["vector_a"]), _tuple3(d["vector_b"]),
                float(d["signed_distance_m"]), float(d["horizontal_angle_deg"]),
            )
        edges.append(Edge(EdgeKind.from_label(d["kind"]), d["a"], d["b"], features))
    meta = dict(doc.get("meta", {}))
    meta.pop("format_version", None)
    return Network(nodes, edges, meta)


def load_json(data: bytes | str) -> Network:
    return network_from_dict(json.loads(data))


# --------------------------------------------------------------------------
# GraphML
# --------------------------------------------------------------------------

_NODE_KEYS = [
    ("express_id", "int"), ("global_id", "string"), ("node_type", "string"), ("name", "string"),
    ("family_name", "string"), ("is_floor", "boolean"),
    ("cx", "double"), ("cy", "double"), ("cz", "double"),
    ("min_x", "double"), ("min_y", "double"), ("min_z", "double"),
    ("max_x", "double"), ("max_y", "double"), ("max_z", "double"), ("aabb_exact", "boolean"),
    ("locator_kind", "string"), ("locator", "string"),
    ("representation_kinds", "string"), ("materials", "string"), ("psets", "string"),
]

_EDGE_KEYS = [
    ("kind", "string"), ("class", "string"), ("angle_deg", "double"),
    ("ax", "double"), ("ay", "double"), ("az", "double"),
    ("bx", "double"), ("by", "double"), ("bz", "double"),
    ("signed_distance_m", "double"), ("horizontal_angle_deg", "double"),
]

_GRAPH_KEYS = [
    ("schema", "string"), ("source_sha256", "string"), ("threshold_m", "double"),
    ("touch_tol_m", "double"), ("angular_eps", "double"), ("coplanar_eps", "double"),
]

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def _gml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_text(v)
    return str(v)


def _node_attrs(n: Node) -> dict:
    s = n.semantics
    c = _centroid(n)
    return {
        "express_id": n.express_id,
        "global_id": n.global_id,
        "node_type": n.node_type,
        "name": s.name,
        "family_name": s.family_name,
        "is_floor": n.is_floor,
        "cx": c[0], "cy": c[1], "cz": c[2],
        "min_x": n.aabb.min[0], "min_y": n.aabb.min[1], "min_z": n.aabb.min[2],
        "max_x": n.aabb.max[0], "max_y": n.aabb.max[1], "max_z": n.aabb.max[2],
        "aabb_exact": n.aabb.exact,
        "locator_kind": n.locator.kind,
        "locator": json.dumps([_vec(p) for p in n.locator.points]),
        "representation_kinds": "|".join(sorted(s.representation_kinds)),
        "materials": "|".join(s.materials),
        "psets": json.dumps(_flat_psets(s.psets), sort_keys=True, ensure_ascii=False),
    }


def _edge_attrs(e: Edge) -> dict:
    d = {"kind": e.kind.label}
    f = e.features
    if f is not None:
        d.update({
            "class": f.cls.label, "angle_deg": f.angle_deg,
            "ax": f.vector_a[0], "ay": f.vector_a[1], "az": f.vector_a[2],
            "bx": f.vector_b[0], "by": f.vector_b[1], "bz": f.vector_b[2],
            "signed_distance_m": f.signed_distance_m, "horizontal_angle_deg": f.horizontal_angle_deg,
        })
    return d


def export_graphml(net: Network) -> bytes:
    # written as text rather than through ElementTree, whose serializer dominates runtime on large graphs
    out = ['<?xml version="1.0" encoding="utf-8"?>', f'<graphml xmlns="{GRAPHML_NS}">']
    for prefix, target, keys in (("g", "graph", _GRAPH_KEYS), ("n", "node", _NODE_KEYS), ("e", "edge", _EDGE_KEYS)):
        for name, typ in keys:
            out.append(f' <key id="{prefix}_{name}" for="{target}" attr.name="{name}" attr.type="{typ}"/>')
    out.append(' <graph id="G" edgedefault="undirected">')
    for name, _ in _GRAPH_KEYS:
        value = net.meta.get(name)
        if value is not None and value != "":
            out.append(f'  <data key="g_{name}">{escape(_gml_value(value))}</data>')
    for n in net.nodes:
        out.append(f'  <node id="n{n.id}">')
        for name, value in _node_attrs(n).items():
            if value is not None and value != "":
                out.append(f'   <data key="n_{name}">{escape(_gml_value(value))}</data>')
        out.append("  </node>")
    for i, e in enumerate(net.edges):
        out.append(f'  <edge id="e{i}" source="n{e.a}" target="n{e.b}">')
        for name, value in _edge_attrs(e).items():
            out.append(f'   <data key="e_{name}">{escape(_gml_value(value))}</data>')
        out.append("  </edge>")
    out.append(" </graph>")
    out.append("</graphml>")
    return ("\n".join(out) + "\n").encode("utf-8")


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

NODE_COLUMNS = [
    "id", "express_id", "global_id", "node_type", "name", "family_name", "is_floor",
    "cx", "cy", "cz", "min_x", "min_y", "min_z", "max_x", "max_y", "max_z", "aabb_exact",
    "locator_kind", "lax", "lay", "laz", "lbx", "lby", "lbz",
    "representation_kinds", "materials",
]

EDGE_COLUMNS = [
    "kind", "a", "b", "class", "angle_deg", "ax", "ay", "az", "bx", "by", "bz",
    "signed_distance_m", "horizontal_angle_deg",
]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return fmt_text(v)
    return str(v)


def export_csv(net: Network, psets: list[str] | tuple[str, ...] = ()) -> tuple[bytes, bytes]:
    """Node and edge tables. ``psets`` selects ``"Pset.Prop"`` columns appended to the node table."""
    nbuf = io.StringIO()
    writer = csv.writer(nbuf, lineterminator="\r\n")
    writer.writerow(NODE_COLUMNS + list(psets))
    for n in net.nodes:
        s = n.semantics
        pts = list(n.locator.points)
        la = pts[0]
        lb = pts[1] if len(pts) > 1 else (None, None, None)
        flat = _flat_psets(s.psets)
        row = [
            n.id, n.express_id, n.global_id, n.node_type, s.name, s.family_name, n.is_floor,
            *_centroid(n), *n.aabb.min, *n.aabb.max, n.aabb.exact,
            n.locator.kind, *la, *lb,
            "|".join(sorted(s.representation_kinds)), "|".join(s.materials),
        ] + [flat.get(p) for p in psets]
        writer.writerow([_cell(v) for v in row])

    ebuf = io.StringIO()
    writer = csv.writer(ebuf, lineterminator="\r\n")
    writer.writerow(EDGE_COLUMNS)
    for e in net.edges:
        f = e.features
        if f is None:
            row = [e.kind.label, e.a, e.b] + [None] * 10
        else:
            row = [e.kind.label, e.a, e.b, f.cls.label, f.angle_deg, *f.vector_a, *f.vector_b,
                   f.signed_distance_m, f.horizontal_angle_deg]
        writer.writerow([_cell(v) for v in row])
    return nbuf.getvalue().encode("utf-8"), ebuf.getvalue().encode("utf-8")
