"""Assembly of the heterogeneous component network."""

from __future__ import annotations

import logging
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .geometry import ANGULAR_EPS, COPLANAR_EPS, SpatialRelation, spatial_relation
from .model import Aabb, Component, Diagnostic, Locator, SemanticRecord, extract_components
from .relations import (
    DEFAULT_THRESHOLD,
    DEFAULT_TOUCH_TOL,
    EdgeKind,
    TopoEdge,
    extract_connection_edges,
    extract_host_edges,
    extract_touch_floor_edges,
    find_spatial_neighbors,
)
from .step import EntityTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    touch: float = DEFAULT_TOUCH_TOL
    angular: float = ANGULAR_EPS
    coplanar: float = COPLANAR_EPS

    def __post_init__(self):
        if min(self.touch, self.angular, self.coplanar) < 0:
            raise ValueError("tolerances must be non-negative")


@dataclass(frozen=True)
class Node:
    id: int
    express_id: int
    global_id: str
    node_type: str
    semantics: SemanticRecord
    locator: Locator
    aabb: Aabb
    is_floor: bool = False

    @property
    def centroid(self):
        return self.aabb.centroid


@dataclass(frozen=True)
class Edge:
    kind: EdgeKind
    a: int
    b: int
    features: SpatialRelation | None = None

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"edge endpoints must satisfy a < b, got {self.a}, {self.b}")
        if (self.kind is EdgeKind.SPATIAL) != (self.features is not None):
            raise ValueError("spatial edges carry features, topological edges do not")

    @property
    def sort_key(self):
        return (int(self.kind), self.a, self.b)


@dataclass
class Network:
    nodes: list[Node]
    edges: list[Edge]
    meta: dict = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list, compare=False)


# below this many candidate pairs thread start-up costs more than it saves
PARALLEL_MIN_PAIRS = 2000


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BIMNET_THREADS", "1")))
    except ValueError:
        return 1


def _spatial_features(pairs, by_id, tols: Tolerances) -> list[SpatialRelation]:
    def work(chunk):
        return [spatial_relation(by_id[a], by_id[b], tols.angular, tols.coplanar) for a, b in chunk]

    threads = _threads()
    if threads == 1 or len(pairs) < PARALLEL_MIN_PAIRS:
        return work(pairs)
    size = -(-len(pairs) // threads)
    chunks = [pairs[i:i + size] for i in range(0, len(pairs), size)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return [rel for part in pool.map(work, chunks) for rel in part]


def merge_topological(*edge_lists: list[TopoEdge]) -> dict[tuple[int, int], EdgeKind]:
    """One kind per express-id pair; Host beats Connection beats TouchFloor."""
    merged: dict[tuple[int, int], EdgeKind] = {}
    for edges in edge_lists:
        for e in edges:
            key = (e.a, e.b)
            if key not in merged or e.kind < merged[key]:
                merged[key] = e.kind
    return merged


def build_network(
    table: EntityTable,
    threshold: float = DEFAULT_THRESHOLD,
    tols: Tolerances | None = None,
    source_digest: str | None = None,
) -> Network:
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    tols = tols or Tolerances()
    diagnostics: list[Diagnostic] = []
    components = extract_components(table, diagnostics)
    return network_from_components(
        components,
        host=extract_host_edges(table, diagnostics),
        connection=extract_connection_edges(table, diagnostics),
        threshold=threshold,
        tols=tols,
        diagnostics=diagnostics,
        meta={"schema": table.schema_name, "source_sha256": source_digest},
    )


def network_from_components(
    components: list[Component],
    host: list[TopoEdge] = (),
    connection: list[TopoEdge] = (),
    threshold: float = DEFAULT_THRESHOLD,
    tols: Tolerances | None = None,
    diagnostics: list[Diagnostic] | None = None,
    meta: dict | None = None,
) -> Network:
    tols = tols or Tolerances()
    diagnostics = list(diagnostics or [])
    components = sorted(components, key=lambda c: c.express_id)
    index = {c.express_id: i for i, c in enumerate(components)}
    by_id = {c.express_id: c for c in components}

    nodes = [
        Node(i, c.express_id, c.semantics.global_id, c.ifc_type, c.semantics, c.locator, c.aabb, c.is_floor)
        for i, c in enumerate(components)
    ]

    touch = extract_touch_floor_edges(components, tols.touch)
    topo = merge_topological(
        [e for e in host if e.a in index and e.b in index],
        [e for e in connection if e.a in index and e.b in index],
        touch,
    )

    candidates = [p for p in find_spatial_neighbors(components, threshold) if p not in topo]
    features = _spatial_features(candidates, by_id, tols)

    edges = [Edge(kind, index[a], index[b]) if index[a] < index[b] else Edge(kind, index[b], index[a])
             for (a, b), kind in topo.items()]
    for (a, b), rel in zip(candidates, features):
        # the broad phase measures box clearance; inexact boxes report locator distance instead
        if rel.signed_distance_m > threshold:
            diagnostics.append(Diagnostic("spatial_dropped", a,
                                          f"pair with #{b}: locator distance exceeds threshold"))
            continue
        ia, ib = index[a], index[b]
        if ia > ib:
            ia, ib, rel = ib, ia, rel.swapped()
        edges.append(Edge(EdgeKind.SPATIAL, ia, ib, rel))
    edges.sort(key=lambda e: e.sort_key)

    full_meta = {
        "threshold_m": threshold,
        "touch_tol_m": tols.touch,
        "angular_eps": tols.angular,
        "coplanar_eps": tols.coplanar,
        "schema": "",
        "source_sha256": None,
    }
    full_meta.update(meta or {})
    return Network(nodes, edges, full_meta, diagnostics)


# --------------------------------------------------------------------------
# statistics
# --------------------------------------------------------------------------


def _component_count(n_nodes: int, edges: list[Edge]) -> int:
    parent = list(range(n_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = n_nodes
    for e in edges:
        ra, rb = find(e.a), find(e.b)
        if ra != rb:
            parent[ra] = rb
            count -= 1
    return count


def network_stats(net: Network) -> dict:
    degree = Counter()
    for e in net.edges:
        degree[e.a] += 1
        degree[e.b] += 1
    histogram = Counter(degree[n.id] for n in net.nodes)
    return {
        "nodes": len(net.nodes),
        "edges": len(net.edges),
        "nodes_by_type": dict(sorted(Counter(n.node_type for n in net.nodes).items())),
        "edges_by_kind": {k.label: sum(1 for e in net.edges if e.kind is k) for k in EdgeKind},
        "degree_histogram": {str(d): c for d, c in sorted(histogram.items())},
        "negative_clearance_edges": sum(
            1 for e in net.edges if e.features is not None and e.features.signed_distance_m < 0
        ),
        "connected_components": _component_count(len(net.nodes), net.edges),
    }
