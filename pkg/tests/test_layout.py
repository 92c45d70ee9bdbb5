from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import EXAMPLE_VALUES
from jagged.builder import from_values
from jagged.errors import EncodingError, FieldNotFoundError, NoRecordError, StructureError
from jagged.layout import (
    EmptyArray,
    IndexedOptionArray,
    ListOffsetArray,
    NumericArray,
    RecordArray,
    UnionArray,
    as_buffer,
    check,
    iter_buffers,
    project_field,
    set_parameter,
    take,
    to_values,
    truncate,
    validate,
)

json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-(2**63), 2**63 - 1) | st.floats(allow_nan=False, allow_infinity=False)
    | st.text(max_size=5),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.sampled_from("abc"), inner, max_size=3),
    max_leaves=20,
)


def strings(words, parameters=None):
    raw = "".join(words).encode()
    offsets = np.cumsum([0] + [len(w.encode()) for w in words])
    return ListOffsetArray(offsets, NumericArray(np.frombuffer(raw, np.uint8)), parameters or {"__class__": "string"})


def test_example_layout_values(example):
    assert len(example) == 3
    assert validate(example) is None
    assert to_values(example) == EXAMPLE_VALUES


def test_buffers_are_read_only_and_shared(example):
    data = np.array([1.0, 2.0])
    data.flags.writeable = False
    leaf = NumericArray(data)
    assert leaf.data is data
    for buf in iter_buffers(example):
        assert not buf.flags.writeable
        with pytest.raises(ValueError):
            buf[0] = 0


def test_nodes_are_immutable(example):
    with pytest.raises(AttributeError):
        example.content = None


def test_as_buffer_rejects_unsupported_dtypes():
    with pytest.raises(TypeError):
        as_buffer(np.zeros(2, np.float32), np.float32)
    with pytest.raises(ValueError):
        as_buffer(np.zeros((2, 2)), "f64")


def test_string_interpretation_toggles_with_parameter():
    words = strings(["one", "two", "three"])
    assert to_values(words) == ["one", "two", "three"]
    raw = set_parameter(words, "__class__", None)
    assert to_values(raw) == [[111, 110, 101], [116, 119, 111], [116, 104, 114, 101, 101]]
    assert words.offsets is raw.offsets


def test_invalid_utf8_is_an_encoding_error():
    bad = ListOffsetArray([0, 2], NumericArray(np.array([0xFF, 0xFE], np.uint8)), {"__class__": "string"})
    with pytest.raises(EncodingError):
        to_values(bad)


def test_set_parameter_returns_a_copy(example):
    tagged = set_parameter(example, "__str__", "P")
    assert tagged.parameter("__str__") == "P"
    assert example.parameter("__str__") is None
    assert set_parameter(tagged, "__str__", None).parameters == {}
    with pytest.raises(TypeError):
        set_parameter(example, "k", [1, 2])


@pytest.mark.parametrize(
    "node, path, fragment",
    [
        (ListOffsetArray([1, 2], NumericArray([1.0, 2.0])), (), "offsets[0]"),
        (ListOffsetArray([0, 2, 1], NumericArray([1.0, 2.0])), (), "non-decreasing at position 1"),
        (ListOffsetArray([0, 3], NumericArray([1.0, 2.0])), (), "content has length 2"),
        (ListOffsetArray([0, 1], ListOffsetArray([0, 5], NumericArray([1.0]))), (".content",), "reach 5"),
        (RecordArray([("a", NumericArray([1]))], 2), (), "field 'a'"),
        (RecordArray([("a", IndexedOptionArray([0, 4], NumericArray([1, 2])))], 2), ("['a']",),
         "position 1"),
        (UnionArray([0, 2], [0, 0], [NumericArray([1]), EmptyArray()]), (), "tag out of range at position 1"),
        (UnionArray([0, 1], [0, 0], [NumericArray([1]), EmptyArray()]), (), "index out of range"),
    ],
)
def test_validate_reports_path_and_position(node, path, fragment):
    err = validate(node)
    assert isinstance(err, StructureError)
    assert err.path == path
    assert fragment in str(err)
    with pytest.raises(StructureError):
        check(node)
    with pytest.raises(StructureError):
        to_values(node)


def test_record_fields_longer_than_record_are_cut():
    record = RecordArray([("a", NumericArray([1, 2, 3]))], 2)
    assert to_values(record) == [{"a": 1}, {"a": 2}]
    assert len(record.field("a")) == 2


def test_zero_field_record_keeps_its_length():
    assert to_values(RecordArray([], 3)) == [{}, {}, {}]
    with pytest.raises(ValueError):
        RecordArray([])


def test_project_field(example):
    assert to_values(project_field(example, "x")) == [[1, 2], [], [3]]
    with pytest.raises(FieldNotFoundError) as info:
        project_field(example, "z")
    assert list(info.value.available) == ["x", "y"]
    with pytest.raises(NoRecordError):
        project_field(NumericArray([1.0]), "x")


def test_project_field_shares_buffers(example):
    x = project_field(example, "x")
    assert x.offsets is example.offsets
    assert np.shares_memory(x.content.data, example.content.field("x").data)


def test_truncate_is_a_view(example):
    short = truncate(example, 2)
    assert to_values(short) == EXAMPLE_VALUES[:2]
    assert np.shares_memory(short.offsets, example.offsets)


@given(json_values.filter(lambda v: isinstance(v, list)), st.data())
def test_take_matches_list_indexing(values, data):
    layout = from_values(values)
    if not values:
        return
    idx = data.draw(st.lists(st.integers(0, len(values) - 1), max_size=6))
    picked = take(layout, np.array(idx, np.int64))
    assert validate(picked) is None
    whole = to_values(layout)
    assert to_values(picked) == [whole[i] for i in idx]


@given(st.lists(json_values, max_size=6))
def test_builder_output_always_validates(values):
    assert validate(from_values(values)) is None


def test_equality_compares_structure_and_parameters(example):
    from conftest import build_example

    assert example == build_example()
    assert example != set_parameter(build_example(), "k", 1)
    assert NumericArray([1, 2]) != NumericArray([1.0, 2.0])
