"""Topological edges (host, connection, touch-floor) and spatial neighbour search."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import IntEnum
from itertools import combinations

import numpy as np

from .model import OPENING_TYPES, Component, Diagnostic, is_component_type
from .step import EntityTable, Ref

DEFAULT_THRESHOLD = 0.5
DEFAULT_TOUCH_TOL = 0.01


class EdgeKind(IntEnum):
    HOST = 0
    CONNECTION = 1
    TOUCH_FLOOR = 2
    SPATIAL = 3

    @property
    def label(self) -> str:
        return {0: "Host", 1: "Connection", 2: "TouchFloor", 3: "Spatial"}[self.value]

    @classmethod
    def from_label(cls, label: str) -> "EdgeKind":
        for member in cls:
            if member.label == label:
                return member
        raise ValueError(f"unknown edge kind {label!r}")


@dataclass(frozen=True, order=True)
class TopoEdge:
    kind: EdgeKind
    a: int
    b: int

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("edge endpoints must differ")
        if self.a > self.b:
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)


def _ref_id(v) -> int | None:
    return v.id if isinstance(v, Ref) else None


def extract_host_edges(table: EntityTable, diagnostics: list[Diagnostic] | None = None) -> list[TopoEdge]:
    """Wall-to-filling edges; the intermediate opening element is collapsed."""
    if diagnostics is None:
        diagnostics = []
    hosts: dict[int, list[int]] = defaultdict(list)
    for rel in table.of_type("IFCRELVOIDSELEMENT"):
        host, opening = _ref_id(rel.attrs[4]), _ref_id(rel.attrs[5])
        if host is None or opening is None or host not in table or opening not in table:
            diagnostics.append(Diagnostic("bad_relation", rel.id, "voids relation with missing ends"))
            continue
        hosts[opening].append(host)
    edges = set()
    for rel in table.of_type("IFCRELFILLSELEMENT"):
        opening, filler = _ref_id(rel.attrs[4]), _ref_id(rel.attrs[5])
        if opening is None or filler is None or filler not in table:
            diagnostics.append(Diagnostic("bad_relation", rel.id, "fills relation with missing ends"))
            continue
        if table[filler].type_name in OPENING_TYPES or not is_component_type(table[filler].type_name):
            diagnostics.append(Diagnostic("skipped_relation", rel.id, "filling element is not a component"))
            continue
        for host in hosts.get(opening, ()):
            if host == filler:
                continue
            if not is_component_type(table[host].type_name):
                diagnostics.append(Diagnostic("skipped_relation", rel.id, "host element is not a component"))
                continue
            edges.add(TopoEdge(EdgeKind.HOST, host, filler))
    return sorted(edges)


def extract_connection_edges(table: EntityTable, diagnostics: list[Diagnostic] | None = None) -> list[TopoEdge]:
    if diagnostics is None:
        diagnostics = []
    edges = set()
    for rel in table.of_type("IFCRELCONNECTSPATHELEMENTS"):
        a, b = _ref_id(rel.attrs[5]), _ref_id(rel.attrs[6])
        if a is None or b is None or a not in table or b not in table:
            diagnostics.append(Diagnostic("bad_relation", rel.id, "path connection with missing ends"))
            continue
        if a == b or not (is_component_type(table[a].type_name) and is_component_type(table[b].type_name)):
            diagnostics.append(Diagnostic("skipped_relation", rel.id, "path connection between non-components"))
            continue
        edges.add(TopoEdge(EdgeKind.CONNECTION, a, b))
    return sorted(edges)


def _box_arrays(components: list[Component]) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([c.aabb.min for c in components], dtype=float).reshape(-1, 3)
    hi = np.array([c.aabb.max for c in components], dtype=float).reshape(-1, 3)
    return lo, hi


def extract_touch_floor_edges(components: list[Component], tol: float = DEFAULT_TOUCH_TOL) -> list[TopoEdge]:
    """Edges between floor slabs and the non-floor components resting on or hanging under them."""
    if tol < 0:
        raise ValueError("touch tolerance must be non-negative")
    floors = [i for i, c in enumerate(components) if c.is_floor]
    others = np.array([i for i, c in enumerate(components) if not c.is_floor], dtype=int)
    if not floors or others.size == 0:
        return []
    lo, hi = _box_arrays(components)
    olo, ohi = lo[others], hi[others]
    edges = []
    for f in floors:
        ox = np.minimum(ohi[:, 0], hi[f, 0]) - np.maximum(olo[:, 0], lo[f, 0])
        oy = np.minimum(ohi[:, 1], hi[f, 1]) - np.maximum(olo[:, 1], lo[f, 1])
        gap = np.maximum(olo[:, 2] - hi[f, 2], lo[f, 2] - ohi[:, 2])
        hit = (ox > 0.0) & (oy > 0.0) & (gap <= tol)
        fid = components[f].express_id
        for j in others[hit]:
            edges.append(TopoEdge(EdgeKind.TOUCH_FLOOR, components[j].express_id, fid))
    return sorted(edges)


def box_clearances(alo: np.ndarray, ahi: np.ndarray, blo: np.ndarray, bhi: np.ndarray) -> np.ndarray:
    """Row-wise signed clearance; same arithmetic as :func:`bimnet.geometry.box_clearance`."""
    g = np.maximum(alo - bhi, blo - ahi)
    p = np.maximum(g, 0.0)
    gap = np.sqrt(p[:, 0] * p[:, 0] + p[:, 1] * p[:, 1] + p[:, 2] * p[:, 2])
    return np.where((g > 0.0).any(axis=1), gap, g.max(axis=1))


def _cell_size(lo: np.ndarray, hi: np.ndarray, threshold: float) -> float:
    # a few huge elements (slabs, long walls) must not blow up the cell size;
    # boxes spanning too many cells are handled as oversized instead
    ext = (hi - lo).max(axis=1)
    return threshold + float(np.percentile(ext, 90))


def neighbor_pairs(lo: np.ndarray, hi: np.ndarray, threshold: float, max_cells: int = 64) -> list[tuple[int, int]]:
    """Index pairs (i < j) of boxes whose signed clearance is at most ``threshold``.

    Uniform-grid broad phase: each box, grown by half the threshold on every
    side, is hashed into the cells it overlaps. Two boxes whose per-axis gaps are
    all within the threshold share at least one cell, so candidates are a
    superset of the answer; the exact clearance test then decides.
    """
    n = len(lo)
    if n < 2:
        return []
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    cell = _cell_size(lo, hi, threshold)
    scale = max(1.0, float(np.abs(lo).max()), float(np.abs(hi).max()))
    grow = threshold / 2.0 + 1e-9 * scale
    clo = np.floor((lo - grow) / cell).astype(np.int64)
    chi = np.floor((hi + grow) / cell).astype(np.int64)
    ncells = (chi - clo + 1).prod(axis=1).tolist()
    clo, chi = clo.tolist(), chi.tolist()

    grid: dict[tuple[int, int, int], list[int]] = defaultdict(list)
    oversized = []
    for i in range(n):
        if ncells[i] > max_cells:
            oversized.append(i)
            continue
        x0, y0, z0 = clo[i]
        x1, y1, z1 = chi[i]
        for x in range(x0, x1 + 1):
            for y in range(y0, y1 + 1):
                for z in range(z0, z1 + 1):
                    grid[(x, y, z)].append(i)

    candidates: set[tuple[int, int]] = set()
    for members in grid.values():
        if len(members) > 1:
            candidates.update(combinations(members, 2))
    for i in oversized:
        for j in range(n):
            if i != j:
                candidates.add((i, j) if i < j else (j, i))

    if not candidates:
        return []
    pairs = np.array(sorted(candidates), dtype=np.int64)
    keep = box_clearances(lo[pairs[:, 0]], hi[pairs[:, 0]], lo[pairs[:, 1]], hi[pairs[:, 1]]) <= threshold
    result = [tuple(p) for p in pairs[keep].tolist()]
    return result


def find_spatial_neighbors(components: list[Component], threshold: float = DEFAULT_THRESHOLD) -> list[tuple[int, int]]:
    """Express-id pairs (a < b) whose boxes lie within ``threshold`` metres of each other."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if len(components) < 2:
        return []
    lo, hi = _box_arrays(components)
    ids = [c.express_id for c in components]
    pairs = []
    for i, j in neighbor_pairs(lo, hi, threshold):
        a, b = ids[i], ids[j]
        pairs.append((a, b) if a < b else (b, a))
    pairs.sort()
    return pairs

