import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from helpers import metre_units, wrap

from bimnet.fixtures import TwoRoomParams, gen_two_room_floor
from bimnet.model import (
    Aabb, CyclicPlacement, NonOrthogonal, PointLocator, SegmentLocator, Transform3, axis2placement,
    extract_components, extract_semantics, length_unit_scale, resolve_placement,
)
from bimnet.step import Ref, format_record, parse_step


def by_name(components, name):
    return next(c for c in components if c.semantics.name and c.semantics.name.endswith(f" {name}"))


def placement_records(entries, first_id=1):
    """Records for a chain of local placements; each entry is (origin, axis, ref_dir, parent_index)."""
    lines, ids, i = [], [], first_id
    for origin, axis, ref_dir, parent in entries:
        pid = i
        lines.append(format_record(i, "IFCCARTESIANPOINT", (tuple(map(float, origin)),)))
        i += 1
        ax = rd = None
        if axis is not None:
            lines.append(format_record(i, "IFCDIRECTION", (tuple(map(float, axis)),)))
            ax, i = Ref(i), i + 1
        if ref_dir is not None:
            lines.append(format_record(i, "IFCDIRECTION", (tuple(map(float, ref_dir)),)))
            rd, i = Ref(i), i + 1
        lines.append(format_record(i, "IFCAXIS2PLACEMENT3D", (Ref(pid), ax, rd)))
        a2p, i = Ref(i), i + 1
        rel = None if parent is None else Ref(ids[parent])
        lines.append(format_record(i, "IFCLOCALPLACEMENT", (rel, a2p)))
        ids.append(i)
        i += 1
    return "\n".join(lines), ids


def resolve(entries):
    text, ids = placement_records(entries)
    table = parse_step(wrap(text + "\n" + metre_units()))
    return table, [resolve_placement(table, Ref(i)) for i in ids]


# --- placements ---

def test_identity_placement():
    _, (t,) = resolve([((0, 0, 0), None, None, None)])
    assert np.array_equal(t.rotation, np.eye(3)) and np.array_equal(t.translation, np.zeros(3))


def test_unset_placement_is_identity():
    table = parse_step(wrap(metre_units()))
    t = resolve_placement(table, None)
    assert t == Transform3.identity()


def test_translations_compose():
    _, (_, child) = resolve([((0, 2, 0), None, None, None), ((1, 0, 0), None, None, 0)])
    assert child.apply((0, 0, 0)) == (1.0, 2.0, 0.0)


def test_rotation_about_z():
    _, (t,) = resolve([((0, 0, 0), (0, 0, 1), (0, 1, 0), None)])
    assert np.allclose(t.apply((1, 0, 0)), (0, 1, 0), atol=1e-12)
    assert t.is_rigid()


def test_refdirection_is_orthogonalised():
    _, (t,) = resolve([((0, 0, 0), (0, 0, 1), (1, 0, 0.3), None)])
    assert np.allclose(t.rotation[:, 0], (1, 0, 0))
    assert t.is_rigid()


def test_parallel_axis_and_refdirection():
    text, ids = placement_records([((0, 0, 0), (0, 0, 1), (0, 0, 2), None)])
    table = parse_step(wrap(text))
    with pytest.raises(NonOrthogonal):
        resolve_placement(table, Ref(ids[0]))


def test_zero_axis():
    text, ids = placement_records([((0, 0, 0), (0, 0, 0), None, None)])
    with pytest.raises(NonOrthogonal):
        resolve_placement(parse_step(wrap(text)), Ref(ids[0]))


def test_cyclic_placement():
    text = "\n".join([
        "#1=IFCCARTESIANPOINT((0.,0.,0.));",
        "#2=IFCAXIS2PLACEMENT3D(#1,$,$);",
        "#3=IFCLOCALPLACEMENT(#4,#2);",
        "#4=IFCLOCALPLACEMENT(#3,#2);",
    ])
    with pytest.raises(CyclicPlacement):
        resolve_placement(parse_step(wrap(text)), Ref(3))


_unit = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda v: math.hypot(*v) > 0.2)
_coord = st.tuples(*[st.floats(-50, 50, allow_nan=False)] * 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(_coord, _unit, _unit), min_size=1, max_size=4))
def test_chain_resolution_is_composition_of_local_frames(chain):
    entries = []
    for k, (origin, axis, ref) in enumerate(chain):
        a, r = np.array(axis), np.array(ref)
        if np.linalg.norm(np.cross(a / np.linalg.norm(a), r / np.linalg.norm(r))) < 1e-3:
            helper = (1.0, 0.0, 0.0) if abs(a[0]) < 0.5 * np.linalg.norm(a) else (0.0, 1.0, 0.0)
            ref = tuple(np.cross(a, helper).tolist())
        entries.append((origin, axis, ref, None if k == 0 else k - 1))
    table, worlds = resolve(entries)
    text, ids = placement_records(entries)
    expected = Transform3.identity()
    for pid in ids:
        local = axis2placement(table, table[pid].attrs[1])
        expected = expected.compose(local)
    assert np.allclose(worlds[-1].rotation, expected.rotation, atol=1e-12)
    assert np.allclose(worlds[-1].translation, expected.translation, atol=1e-9)
    # pairwise: world(child) == world(parent) ∘ local(child)
    for k in range(1, len(ids)):
        local = axis2placement(table, table[ids[k]].attrs[1])
        step = worlds[k - 1].compose(local)
        assert np.allclose(worlds[k].rotation, step.rotation, atol=1e-12)
        assert np.allclose(worlds[k].translation, step.translation, atol=1e-9)
        assert worlds[k].is_rigid(1e-9)


# --- units ---

@pytest.mark.parametrize("unit,scale", [
    ("#1=IFCSIUNIT(*,.LENGTHUNIT.,.MILLI.,.METRE.);", 0.001),
    ("#1=IFCSIUNIT(*,.LENGTHUNIT.,.CENTI.,.METRE.);", 0.01),
    ("#1=IFCSIUNIT(*,.LENGTHUNIT.,$,.METRE.);", 1.0),
])
def test_length_unit_scale(unit, scale):
    text = unit + "\n#2=IFCUNITASSIGNMENT((#1));\n#3=IFCPROJECT('x',$,$,$,$,$,$,(),#2);"
    assert length_unit_scale(parse_step(wrap(text))) == pytest.approx(scale)


def test_conversion_based_foot():
    text = "\n".join([
        "#1=IFCSIUNIT(*,.LENGTHUNIT.,$,.METRE.);",
        "#2=IFCMEASUREWITHUNIT(IFCLENGTHMEASURE(0.3048),#1);",
        "#3=IFCDIMENSIONALEXPONENTS(1,0,0,0,0,0,0);",
        "#4=IFCCONVERSIONBASEDUNIT(#3,.LENGTHUNIT.,'FOOT',#2);",
        "#5=IFCUNITASSIGNMENT((#4));",
        "#6=IFCPROJECT('x',$,$,$,$,$,$,(),#5);",
    ])
    assert length_unit_scale(parse_step(wrap(text))) == pytest.approx(0.3048)


def test_model_without_units_is_metres():
    assert length_unit_scale(parse_step(wrap(""))) == 1.0


# --- components on the two-room fixture ---

def test_fixture_components(two_room):
    _, manifest, table, _ = two_room
    comps = extract_components(table)
    assert len(comps) == manifest["component_count"] == 9
    counts = {}
    for c in comps:
        counts[c.ifc_type] = counts.get(c.ifc_type, 0) + 1
    assert counts == manifest["components_by_type"]
    assert all(c.ifc_type != "IFCOPENINGELEMENT" for c in comps)
    assert [c.express_id for c in comps] == sorted(c.express_id for c in comps)
    assert len({c.semantics.global_id for c in comps}) == 9
    assert all(len(c.semantics.global_id) == 22 for c in comps)


def test_fixture_boxes_match_manifest(two_room):
    _, manifest, table, _ = two_room
    comps = extract_components(table)
    for name, (lo, hi) in manifest["boxes"].items():
        c = by_name(comps, name)
        assert c.aabb.exact
        assert c.aabb.min == pytest.approx(tuple(lo), abs=1e-9)
        assert c.aabb.max == pytest.approx(tuple(hi), abs=1e-9)


def test_fixture_extracts_without_diagnostics(two_room):
    diags = []
    extract_components(two_room[2], diags)
    assert diags == []


def test_semantics(two_room):
    table = two_room[2]
    comps = extract_components(table)
    wall = by_name(comps, "W1").semantics
    assert wall.family_name == "Basic Wall"
    assert wall.materials == ("Gypsum", "Stud", "Gypsum")
    assert wall.representation_kinds == frozenset({"Curve2D", "SweptSolid"})
    assert wall.psets == {"Pset_WallCommon": {"IsExternal": True, "ThermalTransmittance": 0.35,
                                              "Reference": "Generic - 200mm"}}
    door = by_name(comps, "D1").semantics
    assert door.family_name == "Single-Flush"  # no ':' in ObjectType, so the type object's name
    assert door.psets == {} and door.materials == ()
    slab = by_name(comps, "S1")
    assert slab.semantics.materials == ("Concrete",)
    assert slab.semantics.family_name == "Floor"
    assert slab.is_floor
    assert extract_semantics(table, slab.express_id) == slab.semantics


def test_locators_at_storey_elevation():
    text, _ = gen_two_room_floor(TwoRoomParams(storey_elevation=3.0, door_sill=0.0))
    comps = extract_components(parse_step(text))
    w1 = by_name(comps, "W1").locator
    assert isinstance(w1, SegmentLocator)
    assert w1.a == pytest.approx((0, 0, 3)) and w1.b == pytest.approx((8, 0, 3))
    door = by_name(comps, "D1").locator
    assert isinstance(door, PointLocator) and door.p == pytest.approx((2, 0, 3))


def test_pipe_axis_is_three_dimensional(two_room_pipe):
    comps = extract_components(two_room_pipe[2])
    pipe = by_name(comps, "P1").locator
    assert pipe.a == pytest.approx((0.4, 0.5, 2.5)) and pipe.b == pytest.approx((0.4, 4.5, 2.5))


# --- small hand-written models ---

def _element(body: str, rep_type: str = "SweptSolid", ident: str = "Body", axis_items: str | None = None,
             entity: str = "IFCWALL", tail: str = "$,.STANDARD.") -> str:
    reps = [f"#31=IFCSHAPEREPRESENTATION(#20,'{ident}','{rep_type}',(#30));"]
    rep_refs = "#31"
    if axis_items:
        reps.append(f"#33=IFCSHAPEREPRESENTATION(#20,'Axis','Curve2D',({axis_items}));")
        rep_refs = "#33,#31"
    return "\n".join([
        "#10=IFCCARTESIANPOINT((0.,0.,0.));",
        "#11=IFCAXIS2PLACEMENT3D(#10,$,$);",
        "#12=IFCLOCALPLACEMENT($,#11);",
        "#20=IFCGEOMETRICREPRESENTATIONCONTEXT($,'Model',3,1.E-05,#11,$);",
        body,
        *reps,
        f"#32=IFCPRODUCTDEFINITIONSHAPE($,$,({rep_refs}));",
        f"#40={entity}('1hOSvn6df7F8_7GcBWlR72',$,'E',$,$,#12,#32,{tail});",
        metre_units(),
    ])


def one(text):
    diags = []
    comps = extract_components(parse_step(wrap(text)), diags)
    assert len(comps) == 1
    return comps[0], diags


def test_bounding_box_item():
    c, diags = one(_element("#30=IFCBOUNDINGBOX(#10,5.,0.2,3.);", "BoundingBox"))
    assert (c.aabb.min, c.aabb.max, c.aabb.exact) == ((0, 0, 0), (5, 0.2, 3), True)
    assert diags == []


def test_centred_rectangle_extrusion():
    c, _ = one(_element("#29=IFCRECTANGLEPROFILEDEF(.AREA.,$,$,5.,0.2);\n"
                        "#28=IFCDIRECTION((0.,0.,1.));\n#30=IFCEXTRUDEDAREASOLID(#29,#11,#28,3.);"))
    assert c.aabb.min == pytest.approx((-2.5, -0.1, 0)) and c.aabb.max == pytest.approx((2.5, 0.1, 3))


def test_circle_and_oblique_extrusion():
    c, _ = one(_element("#29=IFCCIRCLEPROFILEDEF(.AREA.,$,$,0.5);\n"
                        "#28=IFCDIRECTION((1.,0.,1.));\n#30=IFCEXTRUDEDAREASOLID(#29,#11,#28,2.);"))
    s = math.sqrt(2)
    assert c.aabb.min == pytest.approx((-0.5, -0.5, 0)) and c.aabb.max == pytest.approx((0.5 + s, 0.5, s))


def test_arbitrary_polyline_profile():
    body = "\n".join([
        "#25=IFCCARTESIANPOINT((0.,0.));", "#26=IFCCARTESIANPOINT((4.,0.));", "#27=IFCCARTESIANPOINT((1.,3.));",
        "#24=IFCPOLYLINE((#25,#26,#27,#25));",
        "#29=IFCARBITRARYCLOSEDPROFILEDEF(.AREA.,$,#24);",
        "#28=IFCDIRECTION((0.,0.,1.));", "#30=IFCEXTRUDEDAREASOLID(#29,#11,#28,1.);",
    ])
    c, _ = one(_element(body))
    assert c.aabb.min == pytest.approx((0, 0, 0)) and c.aabb.max == pytest.approx((4, 3, 1))


def test_faceted_brep_vertices():
    body = "\n".join([
        "#21=IFCCARTESIANPOINT((0.,0.,0.));", "#22=IFCCARTESIANPOINT((2.,0.,0.));",
        "#23=IFCCARTESIANPOINT((0.,3.,1.));",
        "#24=IFCPOLYLOOP((#21,#22,#23));", "#25=IFCFACEOUTERBOUND(#24,.T.);", "#26=IFCFACE((#25));",
        "#27=IFCCLOSEDSHELL((#26));", "#30=IFCFACETEDBREP(#27);",
    ])
    c, _ = one(_element(body, "Brep"))
    assert c.aabb.min == pytest.approx((0, 0, 0)) and c.aabb.max == pytest.approx((2, 3, 1))
    assert c.semantics.representation_kinds == frozenset({"Brep"})


def test_unsupported_geometry_gives_inexact_box():
    c, diags = one(_element("#30=IFCSPHERE(#11,1.);", "CSG"))
    assert not c.aabb.exact
    assert c.aabb.min == c.aabb.max == c.locator.points[0]
    assert [d.code for d in diags] == ["inexact_box"]


def test_zero_length_axis_falls_back_to_point():
    body = "#30=IFCBOUNDINGBOX(#10,1.,1.,1.);\n#34=IFCCARTESIANPOINT((2.,1.));\n#35=IFCPOLYLINE((#34,#34));"
    c, _ = one(_element(body, "BoundingBox", axis_items="#35"))
    assert isinstance(c.locator, PointLocator) and c.locator.p == (2.0, 1.0, 0.0)


def test_axis_trimmed_line():
    body = "\n".join([
        "#30=IFCBOUNDINGBOX(#10,1.,1.,1.);",
        "#34=IFCCARTESIANPOINT((1.,1.));", "#35=IFCDIRECTION((1.,0.));", "#36=IFCVECTOR(#35,1.);",
        "#37=IFCLINE(#34,#36);",
        "#38=IFCTRIMMEDCURVE(#37,(IFCPARAMETERVALUE(0.)),(IFCPARAMETERVALUE(3.)),.T.,.PARAMETER.);",
    ])
    c, _ = one(_element(body, "BoundingBox", axis_items="#38"))
    assert c.locator == SegmentLocator((1.0, 1.0, 0.0), (4.0, 1.0, 0.0))


@pytest.mark.parametrize("ptype,floor", [(".FLOOR.", True), ("$", True), (".ROOF.", False),
                                         (".BASESLAB.", False)])
def test_is_floor(ptype, floor):
    c, _ = one(_element("#30=IFCBOUNDINGBOX(#10,1.,1.,1.);", "BoundingBox", entity="IFCSLAB",
                        tail=f"$,{ptype}"))
    assert c.is_floor is floor


def test_empty_and_scaffolding_models():
    assert extract_components(parse_step(wrap(""))) == []
    text = "\n".join([
        "#1=IFCCARTESIANPOINT((0.,0.,0.));", "#2=IFCAXIS2PLACEMENT3D(#1,$,$);", "#3=IFCLOCALPLACEMENT($,#2);",
        "#4=IFCSITE('0000000000000000000002',$,'S',$,$,#3,$,$,.ELEMENT.,$,$,$,$,$);",
        "#5=IFCBUILDINGSTOREY('0000000000000000000003',$,'L',$,$,#3,$,$,.ELEMENT.,0.);",
        metre_units(),
    ])
    assert extract_components(parse_step(wrap(text))) == []


def test_duplicate_global_id_diagnostic():
    text = _element("#30=IFCBOUNDINGBOX(#10,1.,1.,1.);", "BoundingBox")
    text += "\n#41=IFCCOLUMN('1hOSvn6df7F8_7GcBWlR72',$,'C',$,$,#12,#32,$,$);"
    diags = []
    extract_components(parse_step(wrap(text)), diags)
    assert [d.code for d in diags] == ["duplicate_global_id"]


# --- transformed boxes contain transformed corners ---

@settings(max_examples=80, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), _coord,
       st.tuples(*[st.floats(0.01, 10)] * 3))
def test_world_box_contains_transformed_corners(yaw, pitch, origin, dims):
    axis = (math.sin(pitch) * math.cos(yaw), math.sin(pitch) * math.sin(yaw), math.cos(pitch))
    ref = (math.cos(yaw + 1.0), math.sin(yaw + 1.0), 0.0)
    if abs(np.dot(axis, ref)) > 0.99:
        ref = (0.0, 0.0, 1.0) if abs(axis[2]) < 0.9 else (1.0, 0.0, 0.0)
    text, ids = placement_records([(origin, axis, ref, None)], first_id=100)
    body = f"#30=IFCBOUNDINGBOX(#10,{dims[0]!r},{dims[1]!r},{dims[2]!r});"
    model = _element(body, "BoundingBox").replace("#40=IFCWALL('1hOSvn6df7F8_7GcBWlR72',$,'E',$,$,#12,",
                                                  f"#40=IFCWALL('1hOSvn6df7F8_7GcBWlR72',$,'E',$,$,#{ids[0]},")
    c, _ = one(text + "\n" + model)
    corners = Aabb((0, 0, 0), dims).corners()
    world = c.world.apply_many(corners)
    assert np.all(world >= np.array(c.aabb.min) - 1e-9) and np.all(world <= np.array(c.aabb.max) + 1e-9)
    # and the box is tight: every face touches a corner
    assert np.allclose(world.min(axis=0), c.aabb.min) and np.allclose(world.max(axis=0), c.aabb.max)


def test_ifc2x3_slab_predefined_type():
    text = _element("#30=IFCBOUNDINGBOX(#10,1.,1.,1.);", "BoundingBox", entity="IFCSLAB", tail="$,.ROOF.")
    comps = extract_components(parse_step(wrap(text, schema="IFC2X3")))
    assert comps[0].is_floor is False
