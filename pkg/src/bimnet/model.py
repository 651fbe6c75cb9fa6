"""Building components read out of an IFC entity table.

Attribute positions follow IFC4; every position used here is identical in
IFC2x3 except where ``_ATTR`` says otherwise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Iterable

import numpy as np

from .step import EntityInstance, EntityTable, EnumValue, Ref, Typed, unwrap

logger = logging.getLogger(__name__)

Vec3 = tuple[float, float, float]

# --------------------------------------------------------------------------
# node type inclusion list
# --------------------------------------------------------------------------

BUILDING_ELEMENT_TYPES = frozenset(
    "IFC" + name.upper()
    for name in """
    Beam BeamStandardCase BuildingElementProxy BuiltElement Chimney Column ColumnStandardCase
    Covering CurtainWall Door DoorStandardCase Footing Member MemberStandardCase Pile Plate
    PlateStandardCase Railing Ramp RampFlight Roof ShadingDevice Slab SlabElementedCase
    SlabStandardCase Stair StairFlight Wall WallElementedCase WallStandardCase Window
    WindowStandardCase
    """.split()
)

FLOW_ELEMENT_TYPES = frozenset(
    "IFC" + name.upper()
    for name in """
    FlowSegment PipeSegment DuctSegment CableSegment CableCarrierSegment
    FlowFitting PipeFitting DuctFitting CableFitting CableCarrierFitting JunctionBox
    FlowTerminal AirTerminal AudioVisualAppliance CommunicationsAppliance ElectricAppliance
    FireSuppressionTerminal Lamp LightFixture MedicalDevice Outlet SanitaryTerminal
    SpaceHeater StackTerminal WasteTerminal
    """.split()
)

COMPONENT_TYPES = BUILDING_ELEMENT_TYPES | FLOW_ELEMENT_TYPES
SLAB_TYPES = frozenset({"IFCSLAB", "IFCSLABSTANDARDCASE", "IFCSLABELEMENTEDCASE"})
OPENING_TYPES = frozenset({"IFCOPENINGELEMENT", "IFCOPENINGSTANDARDCASE"})


def is_component_type(type_name: str) -> bool:
    return type_name in COMPONENT_TYPES


# positional attribute indexes of the few entities whose layout differs by schema
_ATTR = {
    "IFC4": {"slab_predefined_type": 8},
    "IFC2X3": {"slab_predefined_type": 8},
}

EPS_LENGTH = 1e-9


class PlacementError(ValueError):
    pass


class CyclicPlacement(PlacementError):
    pass


class NonOrthogonal(PlacementError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    code: str
    entity_id: int | None
    message: str

    def __str__(self) -> str:
        where = f"#{self.entity_id}: " if self.entity_id is not None else ""
        return f"[{self.code}] {where}{self.message}"


# --------------------------------------------------------------------------
# value types
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Transform3:
    rotation: np.ndarray
    translation: np.ndarray

    @classmethod
    def identity(cls) -> "Transform3":
        return cls(np.eye(3), np.zeros(3))

    def compose(self, other: "Transform3") -> "Transform3":
        """``self ∘ other``: apply ``other`` first."""
        return Transform3(self.rotation @ other.rotation,
                          self.rotation @ other.translation + self.translation)

    def apply(self, p) -> Vec3:
        q = self.rotation @ np.asarray(p, dtype=float) + self.translation
        return (float(q[0]), float(q[1]), float(q[2]))

    def apply_many(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.rotation.T + self.translation

    def is_rigid(self, tol: float = 1e-9) -> bool:
        r = self.rotation
        return bool(np.allclose(r @ r.T, np.eye(3), atol=tol) and abs(np.linalg.det(r) - 1.0) <= tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Transform3):
            return NotImplemented
        return bool(np.array_equal(self.rotation, other.rotation)
                    and np.array_equal(self.translation, other.translation))


@dataclass(frozen=True)
class PointLocator:
    p: Vec3
    kind = "Point"

    @property
    def points(self) -> tuple[Vec3, ...]:
        return (self.p,)


@dataclass(frozen=True)
class SegmentLocator:
    a: Vec3
    b: Vec3
    kind = "Segment"

    def __post_init__(self):
        if math.dist(self.a, self.b) <= EPS_LENGTH:
            raise ValueError("segment locator endpoints coincide")

    @property
    def points(self) -> tuple[Vec3, ...]:
        return (self.a, self.b)


Locator = PointLocator | SegmentLocator


@dataclass(frozen=True)
class Aabb:
    min: Vec3
    max: Vec3
    exact: bool = True

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.min, self.max)):
            raise ValueError(f"inverted box {self.min} > {self.max}")

    @classmethod
    def of_points(cls, pts, exact: bool = True) -> "Aabb":
        arr = np.asarray(pts, dtype=float).reshape(-1, 3)
        lo = arr.min(axis=0)
        hi = arr.max(axis=0)
        return cls(tuple(map(float, lo)), tuple(map(float, hi)), exact)

    @property
    def centroid(self) -> Vec3:
        return tuple((lo + hi) / 2.0 for lo, hi in zip(self.min, self.max))

    @property
    def extents(self) -> Vec3:
        return tuple(hi - lo for lo, hi in zip(self.min, self.max))

    def corners(self) -> np.ndarray:
        lo, hi = self.min, self.max
        return np.array([[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])])

    def union(self, other: "Aabb") -> "Aabb":
        return Aabb(tuple(map(min, self.min, other.min)), tuple(map(max, self.max, other.max)),
                    self.exact and other.exact)


@dataclass(frozen=True)
class SemanticRecord:
    global_id: str
    name: str | None = None
    family_name: str | None = None
    representation_kinds: frozenset[str] = frozenset()
    materials: tuple[str, ...] = ()
    psets: dict[str, dict[str, Any]] = field(default_factory=dict)


@dataclass(frozen=True)
class Component:
    express_id: int
    ifc_type: str
    semantics: SemanticRecord
    world: Transform3
    locator: Locator | None = None
    aabb: Aabb | None = None
    is_floor: bool = False


# --------------------------------------------------------------------------
# small helpers over raw attributes
# --------------------------------------------------------------------------


def _text(v) -> str | None:
    v = unwrap(v)
    return v if isinstance(v, str) else None


def _number(v) -> float | None:
    v = unwrap(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        return None
    return float(v)


def _refs(v) -> list[Ref]:
    if isinstance(v, Ref):
        return [v]
    if isinstance(v, tuple):
        return [x for x in v if isinstance(x, Ref)]
    return []


def _attr(inst: EntityInstance, i: int):
    return inst.attrs[i] if i < len(inst.attrs) else None


def _coords(table: EntityTable, ref) -> np.ndarray | None:
    inst = table.get(ref)
    if inst is None or inst.type_name != "IFCCARTESIANPOINT":
        return None
    vals = [_number(c) for c in (_attr(inst, 0) or ())]
    if not vals or any(v is None for v in vals):
        return None
    vals = (vals + [0.0, 0.0, 0.0])[:3]
    return np.array(vals, dtype=float)


def _direction(table: EntityTable, ref) -> np.ndarray | None:
    inst = table.get(ref)
    if inst is None or inst.type_name != "IFCDIRECTION":
        return None
    vals = [_number(c) for c in (_attr(inst, 0) or ())]
    if not vals or any(v is None for v in vals):
        return None
    vals = (vals + [0.0, 0.0, 0.0])[:3]
    return np.array(vals, dtype=float)


def _index(table: EntityTable) -> dict:
    """Reverse indexes from elements to the relationship objects citing them."""
    idx = table.cache.get("model_index")
    if idx is not None:
        return idx
    materials: dict[int, list[Ref]] = {}
    psets: dict[int, list[Ref]] = {}
    types: dict[int, Ref] = {}
    for rel in table.of_type("IFCRELASSOCIATESMATERIAL"):
        mat = _attr(rel, 5)
        if isinstance(mat, Ref):
            for obj in _refs(_attr(rel, 4)):
                materials.setdefault(obj.id, []).append(mat)
    for rel in table.of_type("IFCRELDEFINESBYPROPERTIES"):
        pdef = _attr(rel, 5)
        for obj in _refs(_attr(rel, 4)):
            for p in _refs(pdef):
                psets.setdefault(obj.id, []).append(p)
    for rel in table.of_type("IFCRELDEFINESBYTYPE"):
        typ = _attr(rel, 5)
        if isinstance(typ, Ref):
            for obj in _refs(_attr(rel, 4)):
                types.setdefault(obj.id, typ)
    idx = {"materials": materials, "psets": psets, "types": types}
    table.cache["model_index"] = idx
    return idx


# --------------------------------------------------------------------------
# units
# --------------------------------------------------------------------------

_SI_PREFIX = {
    "EXA": 1e18, "PETA": 1e15, "TERA": 1e12, "GIGA": 1e9, "MEGA": 1e6, "KILO": 1e3,
    "HECTO": 1e2, "DECA": 1e1, "DECI": 1e-1, "CENTI": 1e-2, "MILLI": 1e-3,
    "MICRO": 1e-6, "NANO": 1e-9, "PICO": 1e-12, "FEMTO": 1e-15, "ATTO": 1e-18,
}


def _unit_factor(table: EntityTable, unit: EntityInstance, depth: int = 0) -> float | None:
    if unit.type_name == "IFCSIUNIT":
        if unwrap(_attr(unit, 1)) != "LENGTHUNIT":
            return None
        prefix = unwrap(_attr(unit, 2))
        return _SI_PREFIX.get(prefix, 1.0) if prefix else 1.0
    if unit.type_name == "IFCCONVERSIONBASEDUNIT" and depth < 4:
        if unwrap(_attr(unit, 1)) != "LENGTHUNIT":
            return None
        measure = table.get(_attr(unit, 3))
        if measure is None:
            return None
        value = _number(_attr(measure, 0))
        base = table.get(_attr(measure, 1))
        base_factor = _unit_factor(table, base, depth + 1) if base is not None else 1.0
        if value is None:
            return None
        return value * (base_factor or 1.0)
    return None


def length_unit_scale(table: EntityTable) -> float:
    """Metres per model length unit, taken from the project's unit assignment."""
    if "length_scale" in table.cache:
        return table.cache["length_scale"]
    scale = 1.0
    assignments = []
    for proj in table.of_type("IFCPROJECT"):
        ua = table.get(_attr(proj, 8))
        if ua is not None and ua.type_name == "IFCUNITASSIGNMENT":
            assignments.append(ua)
    assignments.extend(table.of_type("IFCUNITASSIGNMENT"))
    for ua in assignments:
        found = None
        for ref in _refs(_attr(ua, 0)):
            unit = table.get(ref)
            if unit is not None:
                found = _unit_factor(table, unit)
                if found is not None:
                    break
        if found is not None:
            scale = found
            break
    table.cache["length_scale"] = scale
    return scale


# --------------------------------------------------------------------------
# placements
# --------------------------------------------------------------------------


def _frame(axis: np.ndarray | None, ref_dir: np.ndarray | None, entity_id: int | None) -> np.ndarray:
    key = (None if axis is None else tuple(axis.tolist()), None if ref_dir is None else tuple(ref_dir.tolist()))
    try:
        return _frame_cached(*key)
    except NonOrthogonal as exc:
        raise NonOrthogonal(f"#{entity_id}: {exc}") from None


@lru_cache(maxsize=4096)
def _frame_cached(axis: tuple | None, ref_dir: tuple | None) -> np.ndarray:
    # plain floats: this runs once per placement and numpy's per-call overhead dominates
    z = (0.0, 0.0, 1.0) if axis is None else axis
    nz = math.sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2])
    if nz < 1e-12:
        raise NonOrthogonal("zero-length axis")
    z = (z[0] / nz, z[1] / nz, z[2] / nz)
    x = (1.0, 0.0, 0.0) if ref_dir is None else ref_dir
    if ref_dir is None and abs(z[0]) > 1.0 - 1e-6:
        # default RefDirection is undefined when Axis is ±X; IFC picks a perpendicular
        x = (0.0, 0.0, 1.0) if abs(z[2]) < 0.9 else (1.0, 0.0, 0.0)
    d = x[0] * z[0] + x[1] * z[1] + x[2] * z[2]
    x = (x[0] - d * z[0], x[1] - d * z[1], x[2] - d * z[2])
    nx = math.sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
    if nx < 1e-6:
        raise NonOrthogonal("RefDirection parallel to Axis")
    x = (x[0] / nx, x[1] / nx, x[2] / nx)
    y = (z[1] * x[2] - z[2] * x[1], z[2] * x[0] - z[0] * x[2], z[0] * x[1] - z[1] * x[0])
    r = np.array([x, y, z]).T
    if np.abs(r.T @ r - np.eye(3)).max() > 1e-6:
        raise NonOrthogonal("axes are not orthonormal")
    r.flags.writeable = False
    return r


def axis2placement(table: EntityTable, ref, scale: float = 1.0) -> Transform3:
    """Local frame of an IfcAxis2Placement3D/2D (identity when unset)."""
    inst = table.get(ref)
    if inst is None:
        return Transform3.identity()
    loc = _coords(table, _attr(inst, 0))
    t = np.zeros(3) if loc is None else loc * scale
    if inst.type_name == "IFCAXIS2PLACEMENT3D":
        rot = _frame(_direction(table, _attr(inst, 1)), _direction(table, _attr(inst, 2)), inst.id)
    elif inst.type_name == "IFCAXIS2PLACEMENT2D":
        rot = _frame(None, _direction(table, _attr(inst, 1)), inst.id)
    else:
        rot = np.eye(3)
    return Transform3(rot, t)


def resolve_placement(table: EntityTable, placement) -> Transform3:
    """World transform of an IfcObjectPlacement, following PlacementRelTo to the root."""
    if placement is None or table.get(placement) is None:
        return Transform3.identity()
    cache = table.cache.setdefault("placements", {})
    scale = length_unit_scale(table)

    chain: list[EntityInstance] = []
    seen: set[int] = set()
    ref = placement
    base = Transform3.identity()
    while ref is not None:
        inst = table.get(ref)
        if inst is None:
            break
        if inst.id in cache:
            base = cache[inst.id]
            break
        if inst.id in seen:
            raise CyclicPlacement(f"placement chain revisits #{inst.id}")
        seen.add(inst.id)
        chain.append(inst)
        ref = _attr(inst, 0) if inst.type_name == "IFCLOCALPLACEMENT" else None

    world = base
    for inst in reversed(chain):
        if inst.type_name == "IFCLOCALPLACEMENT":
            local = axis2placement(table, _attr(inst, 1), scale)
        else:
            local = Transform3.identity()
        world = world.compose(local)
        cache[inst.id] = world
    return world


# --------------------------------------------------------------------------
# semantics
# --------------------------------------------------------------------------


def _material_names(table: EntityTable, ref, out: list[str], depth: int = 0) -> None:
    inst = table.get(ref)
    if inst is None or depth > 6:
        return
    t = inst.type_name
    if t == "IFCMATERIAL":
        name = _text(_attr(inst, 0))
        if name is not None:
            out.append(name)
    elif t in ("IFCMATERIALLAYERSETUSAGE", "IFCMATERIALPROFILESETUSAGE",
               "IFCMATERIALPROFILESETUSAGETAPERING"):
        _material_names(table, _attr(inst, 0), out, depth + 1)
    elif t == "IFCMATERIALLAYERSET":
        for layer in _refs(_attr(inst, 0)):
            _material_names(table, layer, out, depth + 1)
    elif t in ("IFCMATERIALLAYER", "IFCMATERIALLAYERWITHOFFSETS"):
        _material_names(table, _attr(inst, 0), out, depth + 1)
    elif t == "IFCMATERIALLIST":
        for m in _refs(_attr(inst, 0)):
            _material_names(table, m, out, depth + 1)
    elif t in ("IFCMATERIALPROFILESET", "IFCMATERIALCONSTITUENTSET"):
        for m in _refs(_attr(inst, 2)):
            _material_names(table, m, out, depth + 1)
    elif t in ("IFCMATERIALPROFILE", "IFCMATERIALPROFILEWITHOFFSETS", "IFCMATERIALCONSTITUENT"):
        _material_names(table, _attr(inst, 2), out, depth + 1)


def _scalar(v):
    v = unwrap(v)
    if isinstance(v, (str, int, float, bool)):
        return v
    return None


def _psets(table: EntityTable, refs: Iterable[Ref]) -> dict[str, dict[str, Any]]:
    result: dict[str, dict[str, Any]] = {}
    for ref in refs:
        pset = table.get(ref)
        if pset is None or pset.type_name != "IFCPROPERTYSET":
            continue
        pname = _text(_attr(pset, 2)) or f"#{pset.id}"
        props = result.setdefault(pname, {})
        for pref in _refs(_attr(pset, 4)):
            prop = table.get(pref)
            if prop is None or prop.type_name != "IFCPROPERTYSINGLEVALUE":
                continue
            name = _text(_attr(prop, 0))
            value = _scalar(_attr(prop, 2))
            if name is not None and value is not None:
                props[name] = value
    return {k: v for k, v in result.items() if v}


def _representations(table: EntityTable, element: EntityInstance) -> list[EntityInstance]:
    pds = table.get(_attr(element, 6))
    if pds is None:
        return []
    return [r for r in (table.get(x) for x in _refs(_attr(pds, 2))) if r is not None]


def family_name_of(table: EntityTable, element: EntityInstance) -> str | None:
    object_type = _text(_attr(element, 4))
    if object_type and ":" in object_type:
        return object_type.split(":", 1)[0]
    typ = table.get(_index(table)["types"].get(element.id))
    if typ is not None:
        return _text(_attr(typ, 2))
    return None


def extract_semantics(table: EntityTable, element_id: int) -> SemanticRecord:
    element = table[element_id]
    idx = _index(table)
    kinds = set()
    for rep in _representations(table, element):
        label = _text(_attr(rep, 2))
        if label:
            kinds.add(label)
    materials: list[str] = []
    for m in idx["materials"].get(element_id, ()):
        _material_names(table, m, materials)
    return SemanticRecord(
        global_id=_text(_attr(element, 0)) or "",
        name=_text(_attr(element, 2)),
        family_name=family_name_of(table, element),
        representation_kinds=frozenset(kinds),
        materials=tuple(materials),
        psets=_psets(table, idx["psets"].get(element_id, ())),
    )


# --------------------------------------------------------------------------
# locators
# --------------------------------------------------------------------------


def _curve_points(table: EntityTable, ref, scale: float, depth: int = 0) -> np.ndarray | None:
    """Ordered points of a polyline-like curve in its local frame, scaled to metres."""
    inst = table.get(ref)
    if inst is None or depth > 4:
        return None
    t = inst.type_name
    if t == "IFCPOLYLINE":
        pts = [_coords(table, p) for p in _refs(_attr(inst, 0))]
        if len(pts) < 2 or any(p is None for p in pts):
            return None
        return np.array(pts) * scale
    if t == "IFCINDEXEDPOLYCURVE":
        plist = table.get(_attr(inst, 0))
        if plist is None:
            return None
        rows = [[_number(c) for c in row] for row in (_attr(plist, 0) or ())]
        if len(rows) < 2 or any(v is None for row in rows for v in row):
            return None
        arr = np.zeros((len(rows), 3))
        for i, row in enumerate(rows):
            arr[i, :len(row[:3])] = row[:3]
        return arr * scale
    if t == "IFCTRIMMEDCURVE":
        line = table.get(_attr(inst, 0))
        if line is None or line.type_name != "IFCLINE":
            return None
        origin = _coords(table, _attr(line, 0))
        vec = table.get(_attr(line, 1))
        if origin is None or vec is None:
            return None
        direction = _direction(table, _attr(vec, 0))
        magnitude = _number(_attr(vec, 1))
        if direction is None or magnitude is None:
            return None
        dn = np.linalg.norm(direction)
        if dn < 1e-12:
            return None
        step = direction / dn * magnitude
        ends = []
        for trim in (_attr(inst, 1), _attr(inst, 2)):
            point = None
            for item in trim if isinstance(trim, tuple) else ():
                if isinstance(item, Ref):
                    point = _coords(table, item)
                elif isinstance(item, Typed) and item.name == "IFCPARAMETERVALUE":
                    u = _number(item)
                    point = origin + u * step if u is not None else None
                if point is not None:
                    break
            if point is None:
                return None
            ends.append(point)
        if unwrap(_attr(inst, 3)) is False:
            ends.reverse()
        return np.array(ends) * scale
    return None


def derive_locator(table: EntityTable, component: Component) -> Locator:
    element = table[component.express_id]
    scale = length_unit_scale(table)
    for rep in _representations(table, element):
        if _text(_attr(rep, 1)) != "Axis":
            continue
        for item in _refs(_attr(rep, 3)):
            pts = _curve_points(table, item, scale)
            if pts is None:
                continue
            a = component.world.apply(pts[0])
            b = component.world.apply(pts[-1])
            if math.dist(a, b) <= EPS_LENGTH:
                return PointLocator(a)
            return SegmentLocator(a, b)
    t = component.world.translation
    return PointLocator((float(t[0]), float(t[1]), float(t[2])))


# --------------------------------------------------------------------------
# bounding boxes
# --------------------------------------------------------------------------


def _profile_points(table: EntityTable, ref, scale: float) -> np.ndarray | None:
    """Corner points (z=0) bounding a profile, in the extrusion's local frame."""
    prof = table.get(ref)
    if prof is None:
        return None
    t = prof.type_name
    if t in ("IFCRECTANGLEPROFILEDEF", "IFCROUNDEDRECTANGLEPROFILEDEF", "IFCRECTANGLEHOLLOWPROFILEDEF",
             "IFCISHAPEPROFILEDEF", "IFCASYMMETRICISHAPEPROFILEDEF", "IFCCSHAPEPROFILEDEF",
             "IFCUSHAPEPROFILEDEF", "IFCTSHAPEPROFILEDEF"):
        if t == "IFCASYMMETRICISHAPEPROFILEDEF":
            xdim = _number(_attr(prof, 3))
            ydim = _number(_attr(prof, 4))
        elif t in ("IFCCSHAPEPROFILEDEF", "IFCUSHAPEPROFILEDEF", "IFCTSHAPEPROFILEDEF"):
            # (Depth, Width) ordering: y first
            ydim = _number(_attr(prof, 3))
            xdim = _number(_attr(prof, 4))
        else:
            xdim = _number(_attr(prof, 3))
            ydim = _number(_attr(prof, 4))
        if xdim is None or ydim is None:
            return None
        hx, hy = xdim / 2.0, ydim / 2.0
        local = np.array([[-hx, -hy, 0.0], [hx, -hy, 0.0], [hx, hy, 0.0], [-hx, hy, 0.0]])
    elif t in ("IFCCIRCLEPROFILEDEF", "IFCCIRCLEHOLLOWPROFILEDEF"):
        r = _number(_attr(prof, 3))
        if r is None:
            return None
        local = np.array([[-r, -r, 0.0], [r, -r, 0.0], [r, r, 0.0], [-r, r, 0.0]])
    elif t in ("IFCELLIPSEPROFILEDEF",):
        a, b = _number(_attr(prof, 3)), _number(_attr(prof, 4))
        if a is None or b is None:
            return None
        local = np.array([[-a, -b, 0.0], [a, -b, 0.0], [a, b, 0.0], [-a, b, 0.0]])
    elif t in ("IFCARBITRARYCLOSEDPROFILEDEF", "IFCARBITRARYPROFILEDEFWITHVOIDS"):
        pts = _curve_points(table, _attr(prof, 2), 1.0)
        if pts is None:
            return None
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return np.array([[lo[0], lo[1], 0.0], [hi[0], lo[1], 0.0], [hi[0], hi[1], 0.0], [lo[0], hi[1], 0.0]]) * scale
    else:
        return None
    position = axis2placement(table, _attr(prof, 2), 1.0)
    return position.apply_many(local) * scale


def _item_points(table: EntityTable, ref, scale: float, depth: int = 0) -> tuple[np.ndarray | None, bool]:
    """Points whose box bounds a representation item, in the representation's frame."""
    item = table.get(ref)
    if item is None or depth > 4:
        return None, False
    t = item.type_name
    if t == "IFCBOUNDINGBOX":
        corner = _coords(table, _attr(item, 0))
        dims = [_number(_attr(item, i)) for i in (1, 2, 3)]
        if corner is None or any(d is None for d in dims):
            return None, False
        lo = corner * scale
        box = Aabb(tuple(map(float, lo)), tuple(map(float, lo + np.array(dims) * scale)))
        return box.corners(), True
    if t in ("IFCEXTRUDEDAREASOLID", "IFCEXTRUDEDAREASOLIDTAPERED"):
        profile = _profile_points(table, _attr(item, 0), scale)
        direction = _direction(table, _attr(item, 2))
        depth_ = _number(_attr(item, 3))
        if profile is None or direction is None or depth_ is None:
            return None, False
        dn = np.linalg.norm(direction)
        if dn < 1e-12:
            return None, False
        sweep = direction / dn * depth_ * scale
        pts = np.vstack([profile, profile + sweep])
        position = axis2placement(table, _attr(item, 1), scale)
        return position.apply_many(pts), True
    if t in ("IFCFACETEDBREP", "IFCFACETEDBREPWITHVOIDS", "IFCCLOSEDSHELL", "IFCOPENSHELL",
             "IFCSHELLBASEDSURFACEMODEL", "IFCFACEBASEDSURFACEMODEL"):
        pts = _reachable_points(table, item)
        return (pts * scale, True) if pts is not None else (None, False)
    if t in ("IFCPOLYGONALFACESET", "IFCTRIANGULATEDFACESET"):
        plist = table.get(_attr(item, 0))
        if plist is None:
            return None, False
        rows = [[_number(c) for c in row] for row in (_attr(plist, 0) or ())]
        if not rows or any(len(r) != 3 or None in r for r in rows):
            return None, False
        return np.array(rows, dtype=float) * scale, True
    if t == "IFCMAPPEDITEM":
        source = table.get(_attr(item, 0))
        if source is None:
            return None, False
        origin = axis2placement(table, _attr(source, 0), scale)
        rep = table.get(_attr(source, 1))
        if rep is None:
            return None, False
        pts = _representation_points(table, rep, scale, depth + 1)
        if pts is None:
            return None, False
        target = _mapping_target(table, _attr(item, 1), scale)
        if target is None:
            return None, False
        return target.apply_many(origin.apply_many(pts)), True
    return None, False


def _mapping_target(table: EntityTable, ref, scale: float) -> Transform3 | None:
    op = table.get(ref)
    if op is None:
        return Transform3.identity()
    if op.type_name not in ("IFCCARTESIANTRANSFORMATIONOPERATOR3D",):
        return None
    x = _direction(table, _attr(op, 0))
    y = _direction(table, _attr(op, 1))
    origin = _coords(table, _attr(op, 2))
    s = _number(_attr(op, 3))
    z = _direction(table, _attr(op, 4))
    if s not in (None, 1.0):
        return None
    if z is None and x is not None and y is not None:
        z = np.cross(x, y)
    rot = _frame(z, x, op.id)
    t = np.zeros(3) if origin is None else origin * scale
    return Transform3(rot, t)


def _reachable_points(table: EntityTable, root: EntityInstance) -> np.ndarray | None:
    pts = []
    seen = {root.id}
    stack = [root]
    while stack:
        inst = stack.pop()
        if inst.type_name == "IFCCARTESIANPOINT":
            c = _coords(table, Ref(inst.id))
            if c is not None:
                pts.append(c)
            continue
        todo = list(inst.attrs)
        while todo:
            v = todo.pop()
            if isinstance(v, Ref) and v.id not in seen:
                seen.add(v.id)
                child = table.get(v)
                if child is not None:
                    stack.append(child)
            elif isinstance(v, tuple):
                todo.extend(v)
    return np.array(pts) if pts else None


def _representation_points(table: EntityTable, rep: EntityInstance, scale: float, depth: int = 0):
    chunks = []
    for item in _refs(_attr(rep, 3)):
        pts, ok = _item_points(table, item, scale, depth)
        if ok:
            chunks.append(pts)
    return np.vstack(chunks) if chunks else None


def derive_aabb(table: EntityTable, component: Component) -> Aabb:
    element = table[component.express_id]
    scale = length_unit_scale(table)
    for rep in _representations(table, element):
        if _text(_attr(rep, 1)) == "Axis":
            continue
        pts = _representation_points(table, rep, scale)
        if pts is not None:
            return Aabb.of_points(component.world.apply_many(pts), exact=True)
    loc = component.locator or derive_locator(table, component)
    p = loc.points[0]
    return Aabb(p, p, exact=False)


# --------------------------------------------------------------------------
# components
# --------------------------------------------------------------------------


def _schema_family(table: EntityTable) -> str:
    return "IFC2X3" if table.schema_name.upper().startswith("IFC2X") else "IFC4"


def is_floor_slab(table: EntityTable, element: EntityInstance) -> bool:
    if element.type_name not in SLAB_TYPES:
        return False
    idx = _ATTR[_schema_family(table)]["slab_predefined_type"]
    ptype = unwrap(_attr(element, idx))
    return ptype is None or (isinstance(ptype, EnumValue) and ptype == "FLOOR")


def extract_components(table: EntityTable, diagnostics: list[Diagnostic] | None = None) -> list[Component]:
    """All building components of the model, ascending by express id."""
    if diagnostics is None:
        diagnostics = []
    ids: list[int] = []
    for type_name in COMPONENT_TYPES.intersection(table.by_type):
        ids.extend(table.by_type[type_name])
    components = []
    seen_gids: dict[str, int] = {}
    for eid in sorted(ids):
        element = table.entities[eid]
        try:
            world = resolve_placement(table, _attr(element, 5))
        except PlacementError as exc:
            diagnostics.append(Diagnostic("placement", eid, str(exc)))
            world = Transform3.identity()
        comp = Component(eid, element.type_name, extract_semantics(table, eid), world,
                         is_floor=is_floor_slab(table, element))
        try:
            comp = replace(comp, locator=derive_locator(table, comp))
            comp = replace(comp, aabb=derive_aabb(table, comp))
        except (PlacementError, ValueError) as exc:
            diagnostics.append(Diagnostic("geometry", eid, str(exc)))
            t = tuple(map(float, world.translation))
            comp = replace(comp, locator=PointLocator(t), aabb=Aabb(t, t, exact=False))
        if not comp.aabb.exact:
            diagnostics.append(Diagnostic("inexact_box", eid,
                                          f"{element.type_name} has no supported body geometry"))
        gid = comp.semantics.global_id
        if not gid:
            diagnostics.append(Diagnostic("missing_global_id", eid, "element has no GlobalId"))
        elif gid in seen_gids:
            diagnostics.append(Diagnostic("duplicate_global_id", eid,
                                          f"GlobalId {gid} already used by #{seen_gids[gid]}"))
        else:
            seen_gids[gid] = eid
        components.append(comp)
    return components
