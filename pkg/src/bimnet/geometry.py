"""Pairwise spatial quantities between component locators and boxes.

Vectors are plain ``(x, y, z)`` float tuples; these functions run once per
candidate pair, so they avoid numpy's per-call overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from .model import Aabb, Component, Locator, PointLocator, SegmentLocator, Vec3

ANGULAR_EPS = 1e-6
COPLANAR_EPS = 1e-6


class SpatialClass(IntEnum):
    DIFFERENT_SURFACE = 1
    INTERFACE_NON_PARALLEL = 2
    INTERFACE_PARALLEL = 3
    POINT_TO_LINE = 4
    POINT_TO_POINT = 5

    @property
    def label(self) -> str:
        return _CLASS_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "SpatialClass":
        for member in cls:
            if member.label == label:
                return member
        raise ValueError(f"unknown spatial class {label!r}")


_CLASS_LABELS = {c: "".join(part.capitalize() for part in c.name.split("_")) for c in SpatialClass}


@dataclass(frozen=True)
class SpatialRelation:
    cls: SpatialClass
    angle_deg: float
    vector_a: Vec3
    vector_b: Vec3
    signed_distance_m: float
    horizontal_angle_deg: float

    def swapped(self) -> "SpatialRelation":
        return SpatialRelation(self.cls, self.angle_deg, self.vector_b, self.vector_a,
                               self.signed_distance_m, self.horizontal_angle_deg)


# --------------------------------------------------------------------------
# vector helpers
# --------------------------------------------------------------------------


def _sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _add_scaled(a: Vec3, d: Vec3, t: float) -> Vec3:
    return (a[0] + d[0] * t, a[1] + d[1] * t, a[2] + d[2] * t)


def _dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a: Vec3, b: Vec3) -> Vec3:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _norm(a: Vec3) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def _unit(a: Vec3) -> Vec3:
    n = _norm(a)
    return (a[0] / n, a[1] / n, a[2] / n)


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


# --------------------------------------------------------------------------
# closest points
# --------------------------------------------------------------------------


def _point_segment(p: Vec3, a: Vec3, b: Vec3) -> Vec3:
    d = _sub(b, a)
    t = _clamp01(_dot(_sub(p, a), d) / _dot(d, d))
    return _add_scaled(a, d, t)


def segment_parameters(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> tuple[float, float]:
    """Parameters (s, t) of the closest pair on segments p1q1 and p2q2.

    The squared distance is a convex quadratic over the unit square, so its
    minimum is either the interior stationary point or lies on an edge, where
    it is the clamped projection of a segment endpoint. All five candidates are
    scored by actual distance, which stays exact for nearly parallel inputs
    where the stationary point is ill-conditioned. Among equally close pairs
    (parallel overlap) the one with the smallest s, then smallest t, wins.
    """
    d1 = _sub(q1, p1)
    d2 = _sub(q2, p2)
    r = _sub(p1, p2)
    a = _dot(d1, d1)
    e = _dot(d2, d2)
    f = _dot(d2, r)
    c = _dot(d1, r)
    b = _dot(d1, d2)
    cands = [(0.0, _clamp01(f / e)), (1.0, _clamp01((b + f) / e)),
             (_clamp01(-c / a), 0.0), (_clamp01((b - c) / a), 1.0)]
    denom = a * e - b * b
    if denom > 0.0:
        s = (b * f - c * e) / denom
        t = (a * f - b * c) / denom
        if 0.0 < s < 1.0 and 0.0 < t < 1.0:
            cands.append((s, t))
    scored = []
    for s, t in cands:
        w = (r[0] + s * d1[0] - t * d2[0], r[1] + s * d1[1] - t * d2[1], r[2] + s * d1[2] - t * d2[2])
        scored.append((_norm(w), s, t))
    best = min(x[0] for x in scored)
    tol = 1e-12 * (1.0 + math.sqrt(a) + math.sqrt(e) + best)
    _, s, t = min((x for x in scored if x[0] <= best + tol), key=lambda x: (x[1], x[2]))
    return s, t


def closest_points(a: Locator, b: Locator) -> tuple[Vec3, Vec3]:
    if isinstance(a, PointLocator):
        if isinstance(b, PointLocator):
            return a.p, b.p
        return a.p, _point_segment(a.p, b.a, b.b)
    if isinstance(b, PointLocator):
        return _point_segment(b.p, a.a, a.b), b.p
    s, t = segment_parameters(a.a, a.b, b.a, b.b)
    return _add_scaled(a.a, _sub(a.b, a.a), s), _add_scaled(b.a, _sub(b.b, b.a), t)


def locator_distance(a: Locator, b: Locator) -> float:
    pa, pb = closest_points(a, b)
    return _norm(_sub(pa, pb))


# --------------------------------------------------------------------------
# classification and angles
# --------------------------------------------------------------------------


def _farthest_offset(a: SegmentLocator, b: SegmentLocator) -> Vec3:
    best = None
    best_len = -1.0
    for p in (a.a, a.b):
        for q in (b.a, b.b):
            v = _sub(q, p)
            n = _norm(v)
            if n > best_len:
                best, best_len = v, n
    return best


def classify(a: Locator, b: Locator, angular_eps: float = ANGULAR_EPS,
             coplanar_eps: float = COPLANAR_EPS) -> SpatialClass:
    a_pt = isinstance(a, PointLocator)
    b_pt = isinstance(b, PointLocator)
    if a_pt and b_pt:
        return SpatialClass.POINT_TO_POINT
    if a_pt or b_pt:
        return SpatialClass.POINT_TO_LINE
    d1 = _unit(_sub(a.b, a.a))
    d2 = _unit(_sub(b.b, b.a))
    n = _cross(d1, d2)
    sin_angle = _norm(n)
    if sin_angle < angular_eps:
        return SpatialClass.INTERFACE_PARALLEL
    for p in (a.a, a.b):
        for q in (b.a, b.b):
            if _norm(_sub(p, q)) <= 1e-9:
                return SpatialClass.INTERFACE_NON_PARALLEL
    v = _farthest_offset(a, b)
    if abs(_dot(n, v)) / (sin_angle * _norm(v)) < coplanar_eps:
        return SpatialClass.INTERFACE_NON_PARALLEL
    return SpatialClass.DIFFERENT_SURFACE


def intersection_angle(a: Locator, b: Locator) -> float:
    if isinstance(a, PointLocator) or isinstance(b, PointLocator):
        return 0.0
    d1 = _unit(_sub(a.b, a.a))
    d2 = _unit(_sub(b.b, b.a))
    return math.degrees(math.atan2(_norm(_cross(d1, d2)), abs(_dot(d1, d2))))


def _line_tilt(d: Vec3) -> float:
    """Angle between a line of direction ``d`` and the horizontal plane."""
    if _norm(d) == 0.0:
        return 0.0
    return math.degrees(math.atan2(abs(d[2]), math.hypot(d[0], d[1])))


def _plane_tilt(n: Vec3) -> float:
    """Dihedral angle between the plane of normal ``n`` and the horizontal plane."""
    return math.degrees(math.atan2(math.hypot(n[0], n[1]), abs(n[2])))


def _plane_or_line_tilt(d: Vec3, v: Vec3, angular_eps: float) -> float:
    """Tilt of the plane spanned by ``d`` and ``v``, or of ``d`` alone when they are collinear."""
    nv = _norm(v)
    if nv == 0.0:
        return _line_tilt(d)
    n = _cross(_unit(d), (v[0] / nv, v[1] / nv, v[2] / nv))
    if _norm(n) < angular_eps:
        return _line_tilt(d)
    return _plane_tilt(n)


def horizontal_angle(a: Locator, b: Locator, cls: SpatialClass, angular_eps: float = ANGULAR_EPS) -> float:
    if cls is SpatialClass.DIFFERENT_SURFACE:
        return 0.0
    if cls is SpatialClass.POINT_TO_POINT:
        return _line_tilt(_sub(b.p, a.p))
    if cls is SpatialClass.POINT_TO_LINE:
        point, seg = (a, b) if isinstance(a, PointLocator) else (b, a)
        d = _sub(seg.b, seg.a)
        ends = (seg.a, seg.b)
        far = max(ends, key=lambda e: _norm(_sub(point.p, e)))
        return _plane_or_line_tilt(d, _sub(point.p, far), angular_eps)
    d1 = _sub(a.b, a.a)
    if cls is SpatialClass.INTERFACE_NON_PARALLEL:
        return _plane_tilt(_cross(_unit(d1), _unit(_sub(b.b, b.a))))
    return _plane_or_line_tilt(d1, _farthest_offset(a, b), angular_eps)


# --------------------------------------------------------------------------
# boxes
# --------------------------------------------------------------------------


def box_clearance(alo: Vec3, ahi: Vec3, blo: Vec3, bhi: Vec3) -> float:
    g0 = max(alo[0] - bhi[0], blo[0] - ahi[0])
    g1 = max(alo[1] - bhi[1], blo[1] - ahi[1])
    g2 = max(alo[2] - bhi[2], blo[2] - ahi[2])
    if g0 > 0.0 or g1 > 0.0 or g2 > 0.0:
        p0, p1, p2 = max(g0, 0.0), max(g1, 0.0), max(g2, 0.0)
        return math.sqrt(p0 * p0 + p1 * p1 + p2 * p2)
    return max(g0, g1, g2)


def aabb_signed_clearance(a: Aabb, b: Aabb) -> float:
    """Euclidean gap between two boxes; when they overlap, minus the smallest per-axis penetration."""
    return box_clearance(a.min, a.max, b.min, b.max)


# --------------------------------------------------------------------------
# full relation
# --------------------------------------------------------------------------


def _locator_key(loc: Locator) -> tuple:
    return (0 if isinstance(loc, PointLocator) else 1,) + tuple(c for p in loc.points for c in p)


def spatial_relation(a: Component, b: Component, angular_eps: float = ANGULAR_EPS,
                     coplanar_eps: float = COPLANAR_EPS) -> SpatialRelation:
    """Relation features for a component pair; exactly symmetric under argument swap."""
    if _locator_key(b.locator) < _locator_key(a.locator):
        return spatial_relation(b, a, angular_eps, coplanar_eps).swapped()
    la, lb = a.locator, b.locator
    cls = classify(la, lb, angular_eps, coplanar_eps)
    pa, pb = closest_points(la, lb)
    if a.aabb is not None and b.aabb is not None and a.aabb.exact and b.aabb.exact:
        signed = aabb_signed_clearance(a.aabb, b.aabb)
    else:
        signed = _norm(_sub(pa, pb))
    return SpatialRelation(
        cls=cls,
        angle_deg=intersection_angle(la, lb),
        vector_a=pa,
        vector_b=pb,
        signed_distance_m=signed,
        horizontal_angle_deg=horizontal_angle(la, lb, cls, angular_eps),
    )
