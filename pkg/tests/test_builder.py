from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import equivalence
import oracles
from conftest import EXAMPLE_TYPE, EXAMPLE_VALUES
from jagged.builder import (
    INT64_MAX,
    INT64_MIN,
    ArrayBuilder,
    FloatAcc,
    GrowableBuffer,
    UnionAcc,
    fill,
    from_values,
)
from jagged.datashape import typestr
from jagged.errors import DuplicateFieldError, FillStateError, IntegerOverflowError, UnsupportedValueError
from jagged.layout import iter_buffers, to_values
from test_layout import json_values


def test_example_from_events():
    b = ArrayBuilder()
    for event in EXAMPLE_VALUES:
        fill(b, event)
    layout = b.snapshot()
    assert typestr(layout) == EXAMPLE_TYPE
    assert to_values(layout) == EXAMPLE_VALUES


def test_growable_buffer_doubles_and_snapshots_are_prefixes():
    buf = GrowableBuffer(np.int64)
    assert buf.capacity == 1024
    for i in range(1025):
        buf.append(i)
    assert buf.capacity == 2048
    view = buf.view()
    assert len(view) == 1025 and not view.flags.writeable
    assert view.tolist() == list(range(1025))


def test_promotion_reuses_int_values_once():
    b = ArrayBuilder()
    b.integer(1)
    b.integer(2)
    b.real(3.3)
    assert isinstance(b.accumulator, FloatAcc)
    assert to_values(b.snapshot()) == [1.0, 2.0, 3.3]
    b.string_("x")
    assert isinstance(b.accumulator, UnionAcc)
    assert typestr(b.snapshot()) == "4 * union[float64, string]"


def test_null_wraps_from_outside():
    b = ArrayBuilder()
    b.integer(1)
    b.null_()
    b.string_("s")
    b.null_()
    assert typestr(b.snapshot()) == "4 * ?union[int64, string]"
    assert to_values(b.snapshot()) == [1, None, "s", None]


def test_records_backfill_missing_fields():
    layout = from_values([{"x": 1}, {"y": 2.5}, {"x": None}])
    assert typestr(layout) == '3 * {"x": ?int64, "y": ?float64}'
    assert to_values(layout) == [{"x": 1, "y": None}, {"x": None, "y": 2.5}, {"x": None, "y": None}]


def test_union_of_lists_and_scalars():
    layout = from_values([1, "a", None, [1]])
    assert typestr(layout) == "4 * ?union[int64, string, var * int64]"
    assert to_values(layout) == [1, "a", None, [1]]


def test_earlier_snapshots_do_not_change():
    b = ArrayBuilder()
    for i in range(3):
        b.integer(i)
    first = b.snapshot()
    for i in range(2000):
        b.integer(i)
    b.real(0.5)
    assert to_values(first) == [0, 1, 2]
    assert len(b.snapshot()) == 2004


def test_snapshot_buffers_are_read_only():
    layout = from_values([[1, 2], [], [3.5]])
    assert all(not buf.flags.writeable for buf in iter_buffers(layout))


@pytest.mark.parametrize(
    "events, expected, got",
    [
        (["end_list"], "a value or begin_list", "end_list without an open list"),
        (["end_record"], "a value", "end_record without an open record"),
        ([("field", "a")], "a value", "field('a') outside a record"),
        (["begin_record", ("integer", 1)], "field(name) or end_record", "integer"),
        (["begin_record", ("field", "a"), ("field", "b")], "a value for field 'a'", "field('b')"),
        (["begin_record", ("field", "a"), "end_record"], "a value for field 'a'", "end_record"),
        (["begin_list", "end_record"], "a value or end_list", "end_record inside a list"),
        (["begin_list", ("field", "x")], "a value or end_list", "field('x') inside a list"),
        (["begin_list", "snapshot"], "a balanced fill state", "snapshot inside an open list or record"),
        (["begin_record", "snapshot"], "a balanced fill state", "snapshot inside an open list or record"),
    ],
)
def test_fill_state_errors(events, expected, got):
    b = ArrayBuilder()
    with pytest.raises(FillStateError) as info:
        for event in events:
            name, *args = (event,) if isinstance(event, str) else event
            getattr(b, name)(*args)
    assert info.value.expected == expected
    assert info.value.got == got


def test_duplicate_field():
    b = ArrayBuilder()
    b.begin_record()
    b.field("a")
    b.integer(1)
    with pytest.raises(DuplicateFieldError) as info:
        b.field("a")
    assert info.value.name == "a"


@pytest.mark.parametrize("v", [INT64_MAX + 1, INT64_MIN - 1])
def test_integer_range(v):
    b = ArrayBuilder()
    with pytest.raises(IntegerOverflowError):
        b.integer(v)
    b.integer(INT64_MAX)
    b.integer(INT64_MIN)
    assert to_values(b.snapshot()) == [INT64_MAX, INT64_MIN]


@pytest.mark.parametrize("value", [[{1, 2}], [b"bytes"], [{1: "a"}], [object()], [1j]])
def test_unsupported_values(value):
    with pytest.raises(UnsupportedValueError):
        from_values(value)


def test_from_values_needs_a_sequence():
    with pytest.raises(UnsupportedValueError):
        from_values(3)


def test_numpy_scalars_are_accepted():
    assert to_values(from_values([np.int32(3), np.float32(0.5), np.bool_(True)])) == [3, 0.5, True]


def test_seeded_typed_round_trip():
    run = equivalence.values_roundtrip(seed=11, target=200)
    assert run.ok, run.failures


@given(st.lists(json_values, max_size=6))
def test_round_trip_is_a_fixed_point(values):
    once = to_values(from_values(values))
    layout = from_values(once)
    assert oracles.same(once, to_values(layout))
    assert typestr(layout) == typestr(from_values(values))
