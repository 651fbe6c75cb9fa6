"""Synthetic IFC4 models with known ground truth.

The manifests are computed from the generator parameters with plain
arithmetic on world-space boxes and axes. They deliberately share no code
with :mod:`bimnet.geometry` or :mod:`bimnet.relations`, so they can serve as
an oracle for the whole pipeline.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import uuid
from dataclasses import asdict, dataclass
from pathlib import Path

from .step import EnumValue, Ref, Typed, format_record

_IFC64 = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_$"
_GUID_NS = uuid.UUID("6f1c3c1e-2d3b-4c55-9a53-4b1d0a7e9f10")


class InvalidDimensions(ValueError):
    pass


def ifc_guid(name: str) -> str:
    """Deterministic 22-character IFC GlobalId derived from ``name``."""
    n = uuid.uuid5(_GUID_NS, name).int
    chars = []
    for _ in range(21):
        chars.append(_IFC64[n & 63])
        n >>= 6
    chars.append(_IFC64[n & 3])
    return "".join(reversed(chars))


class StepWriter:
    """Appends numbered entity records; ids start at 1 and increase by one."""

    def __init__(self, schema: str = "IFC4", name: str = "fixture"):
        self.schema = schema
        self.name = name
        self.lines: list[str] = []
        self._cache: dict = {}

    def add(self, type_name: str, *attrs) -> Ref:
        eid = len(self.lines) + 1
        self.lines.append(format_record(eid, type_name, attrs))
        return Ref(eid)

    def shared(self, key, type_name: str, *attrs) -> Ref:
        if key not in self._cache:
            self._cache[key] = self.add(type_name, *attrs)
        return self._cache[key]

    def point(self, *coords: float) -> Ref:
        return self.add("IFCCARTESIANPOINT", tuple(float(c) for c in coords))

    def direction(self, *ratios: float) -> Ref:
        key = ("dir",) + tuple(float(r) for r in ratios)
        return self.shared(key, "IFCDIRECTION", tuple(float(r) for r in ratios))

    def placement3d(self, origin, axis=None, ref_dir=None) -> Ref:
        return self.add(
            "IFCAXIS2PLACEMENT3D",
            self.point(*origin),
            None if axis is None else self.direction(*axis),
            None if ref_dir is None else self.direction(*ref_dir),
        )

    def local_placement(self, parent: Ref | None, origin, axis=None, ref_dir=None) -> Ref:
        return self.add("IFCLOCALPLACEMENT", parent, self.placement3d(origin, axis, ref_dir))

    @property
    def entity_count(self) -> int:
        return len(self.lines)

    def text(self) -> str:
        head = [
            "ISO-10303-21;",
            "HEADER;",
            "FILE_DESCRIPTION(('ViewDefinition [DesignTransferView]'),'2;1');",
            f"FILE_NAME('{self.name}.ifc','2024-01-01T00:00:00',(''),(''),'bimnet','bimnet','');",
            f"FILE_SCHEMA(('{self.schema}'));",
            "ENDSEC;",
            "DATA;",
        ]
        return "\n".join(head + self.lines + ["ENDSEC;", "END-ISO-10303-21;"]) + "\n"


_UNIT_PREFIX = {"METRE": (None, 1.0), "MILLIMETRE": ("MILLI", 1000.0)}


class _Model:
    """Project scaffolding shared by the generators."""

    def __init__(self, name: str, unit: str, site_rotation=None, site_translation=(0.0, 0.0, 0.0),
                 storey_elevation: float = 0.0):
        if unit not in _UNIT_PREFIX:
            raise ValueError(f"unsupported unit {unit!r}")
        prefix, self.k = _UNIT_PREFIX[unit]
        self.name = name
        w = self.w = StepWriter(name=name)
        self.counter = 0
        units = w.add("IFCUNITASSIGNMENT", (
            w.add("IFCSIUNIT", None, EnumValue("LENGTHUNIT"), None if prefix is None else EnumValue(prefix),
                  EnumValue("METRE")),
            w.add("IFCSIUNIT", None, EnumValue("PLANEANGLEUNIT"), None, EnumValue("RADIAN")),
        ))
        world = w.placement3d((0.0, 0.0, 0.0))
        self.context = w.add("IFCGEOMETRICREPRESENTATIONCONTEXT", None, "Model", 3, 1e-5, world, None)
        self.body_ctx = w.add("IFCGEOMETRICREPRESENTATIONSUBCONTEXT", "Body", "Model", None, None, None, None,
                              self.context, None, EnumValue("MODEL_VIEW"), None)
        self.axis_ctx = w.add("IFCGEOMETRICREPRESENTATIONSUBCONTEXT", "Axis", "Model", None, None, None, None,
                              self.context, None, EnumValue("GRAPH_VIEW"), None)
        project = w.add("IFCPROJECT", self.guid("project"), None, name, None, None, None, None,
                        (self.context,), units)
        axis, ref = (None, None)
        if site_rotation is not None:
            axis = tuple(float(r[2]) for r in site_rotation)
            ref = tuple(float(r[0]) for r in site_rotation)
        k = self.k
        site_pl = w.local_placement(None, tuple(c * k for c in site_translation), axis, ref)
        site = w.add("IFCSITE", self.guid("site"), None, "Site", None, None, site_pl, None, None,
                     EnumValue("ELEMENT"), None, None, None, None, None)
        bldg_pl = w.local_placement(site_pl, (0.0, 0.0, 0.0))
        bldg = w.add("IFCBUILDING", self.guid("building"), None, "Building", None, None, bldg_pl, None, None,
                     EnumValue("ELEMENT"), None, None, None)
        self.storey_pl = w.local_placement(bldg_pl, (0.0, 0.0, storey_elevation * k))
        self.storey = w.add("IFCBUILDINGSTOREY", self.guid("storey"), None, "Level 1", None, None,
                            self.storey_pl, None, None, EnumValue("ELEMENT"), storey_elevation * k)
        w.add("IFCRELAGGREGATES", self.guid("agg1"), None, None, None, project, (site,))
        w.add("IFCRELAGGREGATES", self.guid("agg2"), None, None, None, site, (bldg,))
        w.add("IFCRELAGGREGATES", self.guid("agg3"), None, None, None, bldg, (self.storey,))
        self.contained: list[Ref] = []
        self.origin_solid = w.shared("solid_pos", "IFCAXIS2PLACEMENT3D", w.point(0.0, 0.0, 0.0), None, None)
        self.up = w.direction(0.0, 0.0, 1.0)

    def guid(self, key: str) -> str:
        return ifc_guid(f"{self.name}/{key}")

    def rect_extrusion(self, center_xy, xdim, ydim, depth, z0=0.0) -> Ref:
        w, k = self.w, self.k
        pos2d = w.add("IFCAXIS2PLACEMENT2D", w.point(center_xy[0] * k, center_xy[1] * k), None)
        prof = w.add("IFCRECTANGLEPROFILEDEF", EnumValue("AREA"), None, pos2d, xdim * k, ydim * k)
        pos = self.origin_solid if z0 == 0.0 else w.placement3d((0.0, 0.0, z0 * k))
        return w.add("IFCEXTRUDEDAREASOLID", prof, pos, self.up, depth * k)

    def shape(self, body_items, body_type="SweptSolid", axis_items=None) -> Ref:
        w = self.w
        reps = []
        if axis_items:
            reps.append(w.add("IFCSHAPEREPRESENTATION", self.axis_ctx, "Axis", "Curve2D", tuple(axis_items)))
        reps.append(w.add("IFCSHAPEREPRESENTATION", self.body_ctx, "Body", body_type, tuple(body_items)))
        return w.add("IFCPRODUCTDEFINITIONSHAPE", None, None, tuple(reps))

    def finish(self) -> str:
        self.w.add("IFCRELCONTAINEDINSPATIALSTRUCTURE", self.guid("contained"), None, None, None,
                   tuple(self.contained), self.storey)
        return self.w.text()


# --------------------------------------------------------------------------
# two-room floor
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoRoomParams:
    room_length: float = 4.0
    room_width: float = 5.0
    wall_thickness: float = 0.2
    wall_height: float = 3.0
    slab_thickness: float = 0.2
    door_width: float = 0.9
    door_height: float = 2.1
    door_thickness: float = 0.05
    door_sill: float = 0.05
    window_width: float = 1.2
    window_height: float = 1.2
    window_sill: float = 0.9
    window_thickness: float = 0.05
    with_pipe: bool = False
    pipe_offset: float = 0.4
    pipe_elevation: float = 2.5
    pipe_radius: float = 0.05
    storey_elevation: float = 0.0
    unit: str = "MILLIMETRE"
    quarter_turns: int = 0
    yaw_deg: float = 0.0
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def validate(self) -> None:
        positive = [self.room_length, self.room_width, self.wall_thickness, self.wall_height, self.slab_thickness,
                    self.door_width, self.door_height, self.door_thickness, self.window_width,
                    self.window_height, self.window_thickness, self.pipe_radius]
        if any(not v > 0 for v in positive):
            raise InvalidDimensions("all dimensions must be positive")
        if self.door_sill < 0 or self.window_sill < 0:
            raise InvalidDimensions("sill heights must be non-negative")
        if self.door_width >= self.room_length - self.wall_thickness or \
                self.window_width >= self.room_length - self.wall_thickness:
            raise InvalidDimensions("openings must fit in the south wall of their room")
        if self.door_sill + self.door_height > self.wall_height or \
                self.window_sill + self.window_height > self.wall_height:
            raise InvalidDimensions("openings must fit below the wall top")


_QUARTER = [((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, -1, 0), (1, 0, 0), (0, 0, 1)),
            ((-1, 0, 0), (0, -1, 0), (0, 0, 1)), ((0, 1, 0), (-1, 0, 0), (0, 0, 1))]


def _site_matrix(p: TwoRoomParams):
    q = _QUARTER[p.quarter_turns % 4]
    if not p.yaw_deg:
        return q
    c, s = math.cos(math.radians(p.yaw_deg)), math.sin(math.radians(p.yaw_deg))
    yaw = ((c, -s, 0.0), (s, c, 0.0), (0.0, 0.0, 1.0))
    return tuple(tuple(sum(yaw[i][m] * q[m][j] for m in range(3)) for j in range(3)) for i in range(3))


def _to_world(p: TwoRoomParams, pt):
    """Site-to-world mapping of a point (rotation rows, then translation)."""
    r = _site_matrix(p)
    x, y, z = pt
    z += p.storey_elevation
    return tuple(r[i][0] * x + r[i][1] * y + r[i][2] * z + p.translation[i] for i in range(3))


def _box_to_world(p: TwoRoomParams, lo, hi):
    corners = [_to_world(p, (x, y, z)) for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])]
    return (tuple(min(c[i] for c in corners) for i in range(3)),
            tuple(max(c[i] for c in corners) for i in range(3)))


def _two_room_layout(p: TwoRoomParams):
    """World-space description of every component, in storey coordinates before the site move."""
    L, W, t, H = p.room_length, p.room_width, p.wall_thickness, p.wall_height
    h = t / 2.0
    walls = [
        # name, start, end, body extension at start, at end
        ("W1", (0.0, 0.0), (2 * L, 0.0), h, h),
        ("W2", (2 * L, 0.0), (2 * L, W), -h, -h),
        ("W3", (2 * L, W), (L, W), h, 0.0),
        ("W4", (L, W), (0.0, W), 0.0, h),
        ("W5", (0.0, W), (0.0, 0.0), -h, -h),
        ("W6", (L, 0.0), (L, W), -h, -h),
    ]
    items = []
    for name, s, e, ext_s, ext_e in walls:
        dx, dy = e[0] - s[0], e[1] - s[1]
        length = math.hypot(dx, dy)
        ux, uy = dx / length, dy / length
        a = (s[0] - ux * ext_s, s[1] - uy * ext_s)
        b = (e[0] + ux * ext_e, e[1] + uy * ext_e)
        lo = (min(a[0], b[0]) - abs(uy) * h, min(a[1], b[1]) - abs(ux) * h, 0.0)
        hi = (max(a[0], b[0]) + abs(uy) * h, max(a[1], b[1]) + abs(ux) * h, H)
        items.append(dict(name=name, type="IFCWALL", box=(lo, hi), axis=((s[0], s[1], 0.0), (e[0], e[1], 0.0)),
                          floor=False, wall=(s, e, ext_s, ext_e, length)))
    dx = L / 2.0
    wx = 1.5 * L
    items.append(dict(name="D1", type="IFCDOOR",
                      box=((dx - p.door_width / 2, -p.door_thickness / 2, p.door_sill),
                           (dx + p.door_width / 2, p.door_thickness / 2, p.door_sill + p.door_height)),
                      point=(dx, 0.0, p.door_sill), floor=False))
    items.append(dict(name="N1", type="IFCWINDOW",
                      box=((wx - p.window_width / 2, -p.window_thickness / 2, p.window_sill),
                           (wx + p.window_width / 2, p.window_thickness / 2, p.window_sill + p.window_height)),
                      point=(wx, 0.0, p.window_sill), floor=False))
    items.append(dict(name="S1", type="IFCSLAB",
                      box=((-h, -h, -p.slab_thickness), (2 * L + h, W + h, 0.0)),
                      point=(L, W / 2.0, -p.slab_thickness), floor=True))
    if p.with_pipe:
        r = p.pipe_radius
        y0, y1 = 0.5, W - 0.5
        x, z = p.pipe_offset, p.pipe_elevation
        items.append(dict(name="P1", type="IFCPIPESEGMENT",
                          box=((x - r, y0, z - r), (x + r, y1, z + r)),
                          axis=((x, y0, z), (x, y1, z)), floor=False))
    return items


_TOPOLOGY = {
    "Host": [("W1", "D1"), ("W1", "N1")],
    "Connection": [("W1", "W2"), ("W2", "W3"), ("W3", "W4"), ("W4", "W5"), ("W5", "W1"),
                   ("W6", "W1"), ("W6", "W3"), ("W6", "W4")],
}


def _clearance(a, b) -> float:
    gaps = [max(a[0][i] - b[1][i], b[0][i] - a[1][i]) for i in range(3)]
    if any(g > 0 for g in gaps):
        return math.sqrt(sum(max(g, 0.0) ** 2 for g in gaps))
    return max(gaps)


def _touches_floor(c, f, tol: float) -> bool:
    ox = min(c[1][0], f[1][0]) - max(c[0][0], f[0][0])
    oy = min(c[1][1], f[1][1]) - max(c[0][1], f[0][1])
    gap = max(c[0][2] - f[1][2], f[0][2] - c[1][2])
    return ox > 0 and oy > 0 and gap <= tol


def _expected_edges(items, threshold: float, touch_tol: float) -> dict[str, list[tuple[str, str]]]:
    by_name = {it["name"]: it for it in items}
    edges = {"Host": [], "Connection": [], "TouchFloor": [], "Spatial": []}
    taken = set()
    for kind in ("Host", "Connection"):
        for a, b in _TOPOLOGY[kind]:
            key = frozenset((a, b))
            if key not in taken:
                taken.add(key)
                edges[kind].append((a, b))
    for f in items:
        if not f["floor"]:
            continue
        for c in items:
            if c["floor"] or frozenset((c["name"], f["name"])) in taken:
                continue
            if _touches_floor(c["box"], f["box"], touch_tol):
                taken.add(frozenset((c["name"], f["name"])))
                edges["TouchFloor"].append((c["name"], f["name"]))
    names = sorted(by_name)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if frozenset((a, b)) in taken:
                continue
            if _clearance(by_name[a]["box"], by_name[b]["box"]) <= threshold:
                edges["Spatial"].append((a, b))
    return edges


def _designated_relations(p: TwoRoomParams, items) -> list[dict]:
    """Hand-derived relation features for a few pairs, independent of the geometry kernel."""
    by_name = {it["name"]: it for it in items}
    L, W = p.room_length, p.room_width

    def rel(a, b, cls, angle, va, vb, horizontal):
        return {
            "a": a, "b": b, "class": cls, "angle_deg": angle,
            "vector_a": list(_to_world(p, va)), "vector_b": list(_to_world(p, vb)),
            "distance_m": math.dist(va, vb),
            "signed_distance_m": _clearance(by_name[a]["box"], by_name[b]["box"]),
            "horizontal_angle_deg": horizontal,
        }

    door = (L / 2.0, 0.0, p.door_sill)
    slab = (L, W / 2.0, -p.slab_thickness)
    dz = door[2] - slab[2]
    out = [
        rel("W1", "W5", "InterfaceNonParallel", 90.0, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), 0.0),
        rel("W1", "W6", "InterfaceNonParallel", 90.0, (L, 0.0, 0.0), (L, 0.0, 0.0), 0.0),
        rel("W3", "W4", "InterfaceParallel", 0.0, (L, W, 0.0), (L, W, 0.0), 0.0),
        # door origin sits straight above the south wall axis: the spanned plane is vertical
        rel("D1", "W1", "PointToLine", 0.0, door, (L / 2.0, 0.0, 0.0), 90.0),
        rel("D1", "S1", "PointToPoint", 0.0, door, slab,
            math.degrees(math.atan2(abs(dz), math.hypot(slab[0] - door[0], slab[1] - door[1])))),
    ]
    if p.with_pipe:
        x, z = p.pipe_offset, p.pipe_elevation
        out.append(rel("P1", "W1", "DifferentSurface", 90.0, (x, 0.5, z), (x, 0.0, 0.0), 0.0))
        # parallel lines: the plane through both contains y and the (x, z) offset
        out.append({**rel("P1", "W5", "InterfaceParallel", 0.0, (x, 0.5, z), (0.0, 0.5, 0.0),
                          math.degrees(math.atan2(z, x))), "vector_a": None, "vector_b": None})
    return out


def gen_two_room_floor(params: TwoRoomParams | None = None, threshold: float = 0.5,
                       touch_tol: float = 0.01) -> tuple[str, dict]:
    """Two rooms side by side on one floor slab, with a door and a window in the south wall."""
    p = params or TwoRoomParams()
    p.validate()
    items = _two_room_layout(p)
    site_rot = _site_matrix(p) if p.quarter_turns % 4 or p.yaw_deg else None
    m = _Model("two_room_floor", p.unit, site_rot, p.translation, p.storey_elevation)
    w, k = m.w, m.k
    t = p.wall_thickness
    refs: dict[str, Ref] = {}

    layers = w.add("IFCMATERIALLAYERSET", (
        w.add("IFCMATERIALLAYER", w.add("IFCMATERIAL", "Gypsum", None, None), 0.0125 * k, None, None, None, None, None),
        w.add("IFCMATERIALLAYER", w.add("IFCMATERIAL", "Stud", None, None), 0.175 * k, None, None, None, None, None),
        w.add("IFCMATERIALLAYER", w.add("IFCMATERIAL", "Gypsum", None, None), 0.0125 * k, None, None, None, None, None),
    ), "Generic - 200mm", None)
    usage = w.add("IFCMATERIALLAYERSETUSAGE", layers, EnumValue("AXIS2"), EnumValue("POSITIVE"), -t / 2 * k, None)
    wall_pset = w.add("IFCPROPERTYSET", m.guid("pset_wall"), None, "Pset_WallCommon", None, (
        w.add("IFCPROPERTYSINGLEVALUE", "IsExternal", None, Typed("IFCBOOLEAN", True), None),
        w.add("IFCPROPERTYSINGLEVALUE", "ThermalTransmittance", None,
              Typed("IFCTHERMALTRANSMITTANCEMEASURE", 0.35), None),
        w.add("IFCPROPERTYSINGLEVALUE", "Reference", None, Typed("IFCIDENTIFIER", "Generic - 200mm"), None),
    ))

    for it in items:
        name = it["name"]
        if it["type"] == "IFCWALL":
            s, e, ext_s, ext_e, length = it["wall"]
            ux, uy = (e[0] - s[0]) / length, (e[1] - s[1]) / length
            pl = w.local_placement(m.storey_pl, (s[0] * k, s[1] * k, 0.0), None, (ux, uy, 0.0))
            axis = w.add("IFCPOLYLINE", (w.point(0.0, 0.0), w.point(length * k, 0.0)))
            body_len = length + ext_s + ext_e
            body = m.rect_extrusion(((body_len / 2.0 - ext_s), 0.0), body_len, t, p.wall_height)
            shape = m.shape([body], axis_items=[axis])
            refs[name] = w.add("IFCWALL", m.guid(name), None, f"Wall {name}", None, "Basic Wall:Generic - 200mm",
                               pl, shape, name, EnumValue("STANDARD"))
        elif it["type"] == "IFCDOOR":
            x, y, z = it["point"]
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k))
            shape = m.shape([m.rect_extrusion((0.0, 0.0), p.door_width, p.door_thickness, p.door_height)])
            refs[name] = w.add("IFCDOOR", m.guid(name), None, "Door D1", None, "Single-Flush 0915 x 2134mm", pl,
                               shape, name, p.door_height * k, p.door_width * k, EnumValue("DOOR"),
                               EnumValue("SINGLE_SWING_LEFT"), None)
            door_type = w.add("IFCDOORTYPE", m.guid("door_type"), None, "Single-Flush", None, None, None, None,
                              None, None, EnumValue("DOOR"), EnumValue("SINGLE_SWING_LEFT"), None, None)
            w.add("IFCRELDEFINESBYTYPE", m.guid("door_type_rel"), None, None, None, (refs[name],), door_type)
        elif it["type"] == "IFCWINDOW":
            x, y, z = it["point"]
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k))
            shape = m.shape([m.rect_extrusion((0.0, 0.0), p.window_width, p.window_thickness, p.window_height)])
            refs[name] = w.add("IFCWINDOW", m.guid(name), None, "Window N1", None, "Fixed:1200 x 1200mm", pl,
                               shape, name, p.window_height * k, p.window_width * k, EnumValue("WINDOW"),
                               EnumValue("SINGLE_PANEL"), None)
        elif it["type"] == "IFCSLAB":
            x, y, z = it["point"]
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k))
            lo, hi = it["box"]
            shape = m.shape([m.rect_extrusion((0.0, 0.0), hi[0] - lo[0], hi[1] - lo[1], p.slab_thickness)])
            refs[name] = w.add("IFCSLAB", m.guid(name), None, "Floor S1", None, "Floor:Generic 200mm", pl, shape,
                               name, EnumValue("FLOOR"))
            w.add("IFCRELASSOCIATESMATERIAL", m.guid("slab_mat"), None, None, None, (refs[name],),
                  w.add("IFCMATERIAL", "Concrete", None, None))
        elif it["type"] == "IFCPIPESEGMENT":
            (x, y0, z), (_, y1, _) = it["axis"]
            pl = w.local_placement(m.storey_pl, (x * k, y0 * k, z * k), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0))
            axis = w.add("IFCPOLYLINE", (w.point(0.0, 0.0, 0.0), w.point(0.0, 0.0, (y1 - y0) * k)))
            body = m.rect_extrusion((0.0, 0.0), 2 * p.pipe_radius, 2 * p.pipe_radius, y1 - y0)
            shape = m.shape([body], axis_items=[axis])
            refs[name] = w.add("IFCPIPESEGMENT", m.guid(name), None, "Pipe P1", None, "Pipe Types:Standard",
                               pl, shape, name, EnumValue("RIGIDSEGMENT"))
        m.contained.append(refs[name])

    walls = [refs[n] for n in ("W1", "W2", "W3", "W4", "W5", "W6")]
    w.add("IFCRELASSOCIATESMATERIAL", m.guid("wall_mat"), None, None, None, tuple(walls), usage)
    w.add("IFCRELDEFINESBYPROPERTIES", m.guid("wall_pset"), None, None, None, tuple(walls), wall_pset)

    # openings: voided by the south wall, filled by the door and the window
    for filler, width, height, sill in (("D1", p.door_width, p.door_height, p.door_sill),
                                        ("N1", p.window_width, p.window_height, p.window_sill)):
        x = next(it for it in items if it["name"] == filler)["point"][0]
        pl = w.local_placement(m.storey_pl, (x * k, 0.0, sill * k))
        shape = m.shape([m.rect_extrusion((0.0, 0.0), width, t + 0.02, height)])
        opening = w.add("IFCOPENINGELEMENT", m.guid(f"O_{filler}"), None, f"Opening {filler}", None, None, pl,
                        shape, None, EnumValue("OPENING"))
        w.add("IFCRELVOIDSELEMENT", m.guid(f"V_{filler}"), None, None, None, refs["W1"], opening)
        w.add("IFCRELFILLSELEMENT", m.guid(f"F_{filler}"), None, None, None, opening, refs[filler])

    for a, b in _TOPOLOGY["Connection"]:
        w.add("IFCRELCONNECTSPATHELEMENTS", m.guid(f"C_{a}_{b}"), None, None, None, None, refs[a], refs[b],
              (), (), EnumValue("ATEND"), EnumValue("ATSTART"))
    # a second record for an already-connected pair must not create a second edge
    w.add("IFCRELCONNECTSPATHELEMENTS", m.guid("C_dup"), None, None, None, None, refs["W2"], refs["W1"],
          (), (), EnumValue("ATSTART"), EnumValue("ATEND"))

    text = m.finish()
    world_items = [{**it, "box": _box_to_world(p, *it["box"])} for it in items]
    edges = _expected_edges(world_items, threshold, touch_tol)
    counts: dict[str, int] = {}
    for it in items:
        counts[it["type"]] = counts.get(it["type"], 0) + 1
    manifest = {
        "params": {k_: list(v) if isinstance(v, tuple) else v for k_, v in asdict(p).items()},
        "threshold_m": threshold,
        "touch_tol_m": touch_tol,
        "entity_count": w.entity_count,
        "component_count": len(items),
        "components_by_type": dict(sorted(counts.items())),
        "opening_count": 2,
        "global_ids": {it["name"]: m.guid(it["name"]) for it in items},
        "boxes": {it["name"]: [list(it["box"][0]), list(it["box"][1])] for it in world_items},
        "edges": {kind: [list(e) for e in pairs] for kind, pairs in edges.items()},
        "edge_counts": {kind: len(pairs) for kind, pairs in edges.items()},
        "relations": _designated_relations(p, world_items),
    }
    return text, manifest


# --------------------------------------------------------------------------
# random model
# --------------------------------------------------------------------------

_RANDOM_KINDS = ["IFCCOLUMN", "IFCBEAM", "IFCBUILDINGELEMENTPROXY", "IFCWALL", "IFCPIPESEGMENT", "IFCSLAB"]
_RANDOM_WEIGHTS = [3, 3, 1, 4, 2, 1]


def gen_random_model(seed: int, n: int, unit: str = "METRE") -> tuple[str, dict]:
    """``n`` box-like components scattered with a seeded RNG through a cube that grows with ``n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    m = _Model(f"random_{seed}_{n}", unit)
    w, k = m.w, m.k
    side = 1.8 * n ** (1.0 / 3.0)
    walls: list[Ref] = []
    for i in range(n):
        kind = rng.choices(_RANDOM_KINDS, _RANDOM_WEIGHTS)[0]
        x, y, z = rng.uniform(0, side), rng.uniform(0, side), rng.uniform(0, side)
        gid = m.guid(f"c{i}")
        name = f"{kind[3:].title()} {i}"
        if kind == "IFCWALL":
            theta = rng.uniform(0, 2 * math.pi)
            length, height = rng.uniform(1.0, 4.0), rng.uniform(2.5, 3.5)
            thick = rng.choice([0.1, 0.2, 0.3])
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k), None,
                                   (round(math.cos(theta), 12), round(math.sin(theta), 12), 0.0))
            axis = w.add("IFCPOLYLINE", (w.point(0.0, 0.0), w.point(length * k, 0.0)))
            shape = m.shape([m.rect_extrusion((length / 2, 0.0), length, thick, height)], axis_items=[axis])
            ref = w.add("IFCWALL", gid, None, name, None, "Basic Wall:Random", pl, shape, None,
                        EnumValue("STANDARD"))
            if walls and rng.random() < 0.3:
                w.add("IFCRELCONNECTSPATHELEMENTS", m.guid(f"conn{i}"), None, None, None, None, walls[-1], ref,
                      (), (), EnumValue("ATEND"), EnumValue("ATSTART"))
            walls.append(ref)
        elif kind == "IFCPIPESEGMENT":
            length = rng.uniform(1.0, 3.0)
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0))
            axis = w.add("IFCPOLYLINE", (w.point(0.0, 0.0, 0.0), w.point(0.0, 0.0, length * k)))
            r = rng.uniform(0.02, 0.15)
            body = m.rect_extrusion((0.0, 0.0), 2 * r, 2 * r, length)
            ref = w.add("IFCPIPESEGMENT", gid, None, name, None, None, pl, m.shape([body], axis_items=[axis]),
                        None, EnumValue("RIGIDSEGMENT"))
        elif kind == "IFCBEAM":
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k))
            corner = w.point(0.0, 0.0, 0.0)
            box = w.add("IFCBOUNDINGBOX", corner, rng.uniform(1.0, 4.0) * k, 0.3 * k, 0.5 * k)
            shape = m.shape([box], body_type="BoundingBox")
            ref = w.add("IFCBEAM", gid, None, name, None, None, pl, shape, None, EnumValue("BEAM"))
        elif kind == "IFCBUILDINGELEMENTPROXY":
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k))
            box = w.add("IFCBOUNDINGBOX", w.point(0.0, 0.0, 0.0), rng.uniform(0.3, 1.5) * k,
                        rng.uniform(0.3, 1.5) * k, rng.uniform(0.3, 1.5) * k)
            ref = w.add("IFCBUILDINGELEMENTPROXY", gid, None, name, None, None, pl,
                        m.shape([box], body_type="BoundingBox"), None, EnumValue("ELEMENT"))
        elif kind == "IFCSLAB":
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k))
            shape = m.shape([m.rect_extrusion((0.0, 0.0), rng.uniform(2.0, 5.0), rng.uniform(2.0, 5.0), 0.2)])
            ref = w.add("IFCSLAB", gid, None, name, None, None, pl, shape, None, EnumValue("FLOOR"))
        else:  # column
            pl = w.local_placement(m.storey_pl, (x * k, y * k, z * k))
            side_c = rng.uniform(0.2, 0.5)
            shape = m.shape([m.rect_extrusion((0.0, 0.0), side_c, side_c, rng.uniform(2.5, 3.5))])
            ref = w.add("IFCCOLUMN", gid, None, name, None, None, pl, shape, None, EnumValue("COLUMN"))
        m.contained.append(ref)
    return m.finish(), {"n": n, "seed": seed}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m bimnet.fixtures", description="Write synthetic IFC fixtures.")
    ap.add_argument("out", type=Path, help="output directory")
    ap.add_argument("--random", type=int, metavar="N", help="write a random model with N components instead")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--pipe", action="store_true", help="add the optional pipe run to the two-room floor")
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    if args.random:
        text, manifest = gen_random_model(args.seed, args.random)
        stem = f"random_{args.seed}_{args.random}"
    else:
        text, manifest = gen_two_room_floor(TwoRoomParams(with_pipe=args.pipe))
        stem = "two_room_floor"
    (args.out / f"{stem}.ifc").write_text(text, encoding="ascii")
    (args.out / f"{stem}.manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    print(args.out / f"{stem}.ifc")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
