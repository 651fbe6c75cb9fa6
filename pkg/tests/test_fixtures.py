import json
import re
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bimnet import build_network, network_stats, parse_step
from bimnet.fixtures import InvalidDimensions, TwoRoomParams, gen_random_model, gen_two_room_floor, ifc_guid
from bimnet.model import extract_components

GUID_CHARS = re.compile(r"^[0-9A-Za-z_$]{22}$")


def test_two_room_is_deterministic():
    assert gen_two_room_floor() == gen_two_room_floor()
    assert gen_two_room_floor(TwoRoomParams(with_pipe=True))[0] != gen_two_room_floor()[0]


def test_random_is_deterministic():
    assert gen_random_model(4, 50) == gen_random_model(4, 50)
    assert gen_random_model(4, 50)[0] != gen_random_model(5, 50)[0]


def test_ifc_guid():
    g = ifc_guid("abc")
    assert GUID_CHARS.match(g) and g[0] in "0123"
    assert g == ifc_guid("abc") and g != ifc_guid("abd")


def test_global_ids_unique(two_room_pipe):
    ids = list(two_room_pipe[1]["global_ids"].values())
    assert len(ids) == len(set(ids)) and all(GUID_CHARS.match(g) for g in ids)


def test_single_component_model():
    net = build_network(parse_step(gen_random_model(1, 1)[0]))
    assert len(net.nodes) == 1 and net.edges == []


def test_random_rejects_empty():
    with pytest.raises(ValueError):
        gen_random_model(1, 0)


@pytest.mark.parametrize("changes", [
    {"wall_thickness": 0.0},
    {"room_length": -1.0},
    {"door_sill": -0.1},
    {"door_width": 3.9},
    {"window_sill": 2.5},
])
def test_invalid_dimensions(changes):
    with pytest.raises(InvalidDimensions):
        gen_two_room_floor(TwoRoomParams(**changes))


@pytest.mark.parametrize("seed", range(5))
def test_random_models_extract_cleanly(seed):
    table = parse_step(gen_random_model(seed, 200)[0])
    diagnostics = []
    comps = extract_components(table, diagnostics)
    assert diagnostics == []
    assert len(comps) == 200 and all(c.aabb.exact for c in comps)


@pytest.mark.parametrize("unit", ["METRE", "MILLIMETRE"])
def test_random_model_units_agree(unit):
    a = build_network(parse_step(gen_random_model(2, 80, unit)[0]))
    b = build_network(parse_step(gen_random_model(2, 80, "METRE")[0]))
    assert [(e.kind, e.a, e.b) for e in a.edges] == [(e.kind, e.a, e.b) for e in b.edges]


@settings(max_examples=15, deadline=None)
@given(length=st.floats(3.0, 8.0), width=st.floats(3.0, 8.0), thickness=st.floats(0.1, 0.3),
       elevation=st.floats(-5.0, 20.0), unit=st.sampled_from(["METRE", "MILLIMETRE"]),
       yaw=st.floats(0.0, 360.0))
def test_manifest_matches_pipeline_for_any_valid_layout(length, width, thickness, elevation, unit, yaw):
    p = TwoRoomParams(room_length=length, room_width=width, wall_thickness=thickness,
                      storey_elevation=elevation, unit=unit, with_pipe=True, yaw_deg=yaw)
    text, manifest = gen_two_room_floor(p)
    net = build_network(parse_step(text))
    stats = network_stats(net)
    assert stats["nodes"] == manifest["component_count"]
    assert stats["edges_by_kind"] == manifest["edge_counts"]
    assert not net.diagnostics


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "bimnet.fixtures", str(tmp_path), "--pipe"],
                         capture_output=True, text=True, check=True)
    ifc = tmp_path / "two_room_floor.ifc"
    assert out.stdout.strip() == str(ifc)
    manifest = json.loads((tmp_path / "two_room_floor.manifest.json").read_text())
    assert ifc.read_text() == gen_two_room_floor(TwoRoomParams(with_pipe=True))[0]
    assert manifest["edge_counts"] == gen_two_room_floor(TwoRoomParams(with_pipe=True))[1]["edge_counts"]

    subprocess.run([sys.executable, "-m", "bimnet.fixtures", str(tmp_path), "--random", "20", "--seed", "3"],
                   capture_output=True, check=True)
    assert (tmp_path / "random_3_20.ifc").read_text() == gen_random_model(3, 20)[0]
