import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import wrap

from bimnet.step import (
    DERIVED, BadEscape, Binary, DanglingRef, DuplicateId, EntityInstance, EntityTable, EnumValue, IndexOutOfRange,
    MissingSection, NoSuchEntity, Ref, StepSyntaxError, Token, Typed, UnterminatedString, format_record,
    format_value, get_attr, parse_step, tokenize, unparse, unwrap,
)


def kinds_values(text):
    return [(t.kind, t.value) for t in tokenize(text)]


def test_tokenize_record():
    assert kinds_values("#12=IFCWALL('w1',$);") == [
        ("ID", 12), ("PUNCT", "="), ("KEYWORD", "IFCWALL"), ("PUNCT", "("), ("STRING", "w1"),
        ("PUNCT", ","), ("UNSET", None), ("PUNCT", ")"), ("PUNCT", ";"),
    ]


def test_tokens_carry_offsets():
    toks = list(tokenize("  #1 = X(1);"))
    assert isinstance(toks[0], Token)
    assert toks[0].offset == 2
    assert toks[2].offset == 7


@pytest.mark.parametrize("src,expected", [
    ("'it''s'", "it's"),
    ("''", ""),
    (r"'\X2\00E9\X0\t\X2\00E9\X0\'", "été"),
    (r"'\X2\03B103B2\X0\'", "αβ"),
    (r"'\X4\0001F600\X0\'", "\U0001F600"),
    (r"'caf\X\E9'", "café"),
    (r"'\S\Dx'", "Äx"),
    (r"'a\\b'", "a\\b"),
    (r"'\PA\abc'", "abc"),
    ("'semi;colon(paren)'", "semi;colon(paren)"),
])
def test_string_decoding(src, expected):
    assert kinds_values(src) == [("STRING", expected)]


def test_enum_and_logicals():
    assert kinds_values(".NOTDEFINED.") == [("ENUM", "NOTDEFINED")]
    assert kinds_values(".notdefined.") == [("ENUM", "NOTDEFINED")]


@pytest.mark.parametrize("src,kind,value", [
    ("42", "INTEGER", 42), ("-7", "INTEGER", -7), ("3.", "REAL", 3.0), ("1.5E-3", "REAL", 0.0015),
    ("-2.5e2", "REAL", -250.0), ("1E3", "REAL", 1000.0), ("$", "UNSET", None), ('"0A1"', "BINARY", "0A1"),
])
def test_numbers_and_scalars(src, kind, value):
    assert kinds_values(src) == [(kind, value)]


def test_keywords_case_folded_and_comments_dropped():
    assert kinds_values("ifcWall /* note; with ') */ (") == [("KEYWORD", "IFCWALL"), ("PUNCT", "(")]


def test_unterminated_string_reports_offset():
    with pytest.raises(UnterminatedString) as exc:
        list(tokenize("#1=X('abc);"))
    assert exc.value.offset == 5


def test_bad_escape():
    with pytest.raises(BadEscape):
        list(tokenize(r"'\X2\00E\X0\'"))


def test_unexpected_character():
    with pytest.raises(StepSyntaxError) as exc:
        list(tokenize("#1=X(1)@;"))
    assert exc.value.offset == 7


def test_forward_reference_resolves():
    table = parse_step(wrap("#1=IFCFOO(#2,'a');\n#2=IFCBAR(.T.,.F.,.U.);"))
    assert table.schema_name == "IFC4"
    assert len(table) == 2
    assert table[1].attrs == (Ref(2), "a")
    assert table[Ref(2)].attrs == (True, False, EnumValue("U"))
    assert table.by_type == {"IFCFOO": [1], "IFCBAR": [2]}
    assert not table.partially_resolved


def test_empty_data_section():
    table = parse_step(wrap(""))
    assert len(table) == 0 and table.by_type == {}


def test_missing_data_section():
    text = "ISO-10303-21;\nHEADER;\nFILE_SCHEMA(('IFC4'));\nENDSEC;\nEND-ISO-10303-21;\n"
    with pytest.raises(MissingSection):
        parse_step(text)


def test_duplicate_id_reports_both_offsets():
    text = wrap("#5=IFCA(1);\n#5=IFCB(2);")
    with pytest.raises(DuplicateId) as exc:
        parse_step(text)
    first, second = text.index("#5"), text.rindex("#5")
    assert (exc.value.first_offset, exc.value.second_offset) == (first, second)


def test_dangling_ref_policy():
    text = wrap("#1=IFCA(#9,(#8,#1));")
    with pytest.raises(DanglingRef) as exc:
        parse_step(text)
    assert exc.value.missing == [8, 9]
    table = parse_step(text, strict_refs=False)
    assert table.partially_resolved and table.dangling == [8, 9]


def test_nested_lists_typed_and_derived():
    table = parse_step(wrap("#1=IFCX(((1,2),(3)),IFCLABEL('x'),*,IFCREAL(2.5),(),\"1F\");"))
    attrs = table[1].attrs
    assert attrs[0] == ((1, 2), (3,))
    assert attrs[1] == Typed("IFCLABEL", "x") and unwrap(attrs[1]) == "x"
    assert attrs[2] is DERIVED
    assert unwrap(attrs[3]) == 2.5
    assert attrs[4] == ()
    assert attrs[5] == Binary("1F")


def test_complex_entity_instance():
    table = parse_step(wrap("#1=(IFCA(1)IFCB('x',$));"))
    inst = table[1]
    assert inst.type_name == ""
    assert inst.attrs == (Typed("IFCA", (1,)), Typed("IFCB", ("x", None)))


@pytest.mark.parametrize("data", [
    "#1=IFCA(1,2", "#1=IFCA(1 2);", "#1=IFCA(,1);", "#1 IFCA(1);", "#0=IFCA(1);", "#1=IFCA(#0);",
    "#1=IFCA(IFCLABEL('a','b'));", "IFCA(1);",
])
def test_syntax_errors(data):
    with pytest.raises(StepSyntaxError):
        parse_step(wrap(data))


def test_get_attr():
    table = parse_step(wrap("#7=IFCB();\n#1=IFCWALL('2O2Fr$t4X7Zf8NOew3FLOH',$,#7,IFCLABEL('n'));"))
    assert get_attr(table, 1, 0) == "2O2Fr$t4X7Zf8NOew3FLOH"
    assert get_attr(table, 1, 1) is None
    assert get_attr(table, 1, 2) == Ref(7)
    assert get_attr(table, 1, 3) == Typed("IFCLABEL", "n")
    assert get_attr(table, 1, 3, unwrapped=True) == "n"
    with pytest.raises(NoSuchEntity):
        get_attr(table, 99, 0)
    with pytest.raises(IndexOutOfRange):
        get_attr(table, 1, 4)


def test_ref_rejects_non_positive():
    with pytest.raises(ValueError):
        Ref(0)


def test_fixture_entity_count_and_round_trip(two_room):
    text, manifest, table, _ = two_room
    assert len(table) == manifest["entity_count"]
    again = parse_step(unparse(table))
    assert again == table
    assert sum(len(ids) for ids in table.by_type.values()) == len(table)
    assert all(ids == sorted(ids) for ids in table.by_type.values())


def test_parse_is_pure(two_room):
    text = two_room[0]
    assert parse_step(text) == parse_step(text)


# --- round-trip property over generated attribute values ---

_names = st.from_regex(r"[A-Z][A-Z0-9_]{0,8}", fullmatch=True)
_scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(min_value=-10**12, max_value=10**12),
    st.floats(allow_nan=False, allow_infinity=False, width=64),
    st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=12),
    # .T. and .F. are the logical literals, so they come back as booleans
    _names.filter(lambda n: n not in ("T", "F")).map(EnumValue),
    st.integers(min_value=1, max_value=50).map(Ref),
)
_values = st.recursive(
    _scalars,
    lambda inner: st.one_of(
        st.lists(inner, max_size=4).map(tuple),
        st.builds(Typed, _names.map(lambda n: "IFC" + n), inner),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(st.lists(_values, max_size=6).map(tuple))
def test_record_round_trip(attrs):
    text = wrap(format_record(1, "IFCTHING", attrs))
    table = parse_step(text, strict_refs=False)
    assert table[1] == EntityInstance(1, "IFCTHING", attrs)


def test_format_value_roundtrips_awkward_reals():
    for x in (0.1, 1e-300, -0.0, 123456789.123456789, 5e-324):
        table = parse_step(wrap(format_record(1, "IFCR", (x,))))
        assert table[1].attrs[0] == x
    assert format_value(3.0).endswith(".") or "." in format_value(3.0)


def test_table_equality_ignores_cache():
    a = EntityTable.from_entities({1: EntityInstance(1, "IFCA", (1,))}, "IFC4")
    b = EntityTable.from_entities({1: EntityInstance(1, "IFCA", (1,))}, "IFC4")
    a.cache["x"] = 1
    assert a == b
