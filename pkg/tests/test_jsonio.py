from __future__ import annotations

import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

import equivalence
import oracles
from conftest import EXAMPLE_TYPE, EXAMPLE_VALUES
from jagged import jsonio
from jagged.builder import from_values
from jagged.datashape import typestr
from jagged.errors import (
    DepthLimitError,
    DuplicateFieldError,
    EncodingError,
    IntegerOverflowError,
    ParseError,
    StructureDeviationError,
)
from jagged.jsonio import from_json, from_json_numbers, iter_events, to_json
from jagged.layout import ListOffsetArray, NumericArray, to_values
from test_layout import json_values

EXAMPLE_JSON = json.dumps(EXAMPLE_VALUES)


def test_example_text():
    layout = from_json(EXAMPLE_JSON)
    assert typestr(layout) == EXAMPLE_TYPE
    assert to_values(layout) == EXAMPLE_VALUES


@pytest.mark.parametrize("wrap", [str, str.encode, lambda s: io.BytesIO(s.encode()), io.StringIO])
def test_sources(wrap):
    assert to_values(from_json(wrap(EXAMPLE_JSON))) == EXAMPLE_VALUES


def test_path_source(tmp_path):
    path = tmp_path / "events.json"
    path.write_text(EXAMPLE_JSON)
    assert to_values(from_json(path)) == EXAMPLE_VALUES


def test_empty_array():
    assert typestr(from_json("[]")) == "0 * unknown"
    assert typestr(from_json(" [ ] ")) == "0 * unknown"


def test_ndjson():
    text = '{"a": 1}\n{"a": 2.5, "b": [true]}\n\n[1]\n'
    layout = from_json(text, ndjson=True)
    assert to_values(layout) == [{"a": 1.0, "b": None}, {"a": 2.5, "b": [True]}, [1]]
    assert len(from_json("", ndjson=True)) == 0


def test_strings_and_escapes():
    text = r'["plain", "tab\there", "é€", "😀", "quote\"", ""]'
    assert to_values(from_json(text)) == json.loads(text)


def test_event_stream():
    events = list(iter_events('[{"a": [1, 2.5]}, null, "s", true]'))
    assert [(e.kind, e.value) for e in events] == [
        ("start-object", None), ("key", "a"), ("start-array", None), ("int", 1), ("float", 2.5),
        ("end-array", None), ("end-object", None), ("null", None), ("string", "s"), ("bool", True),
    ]
    assert [e.offset for e in events[:4]] == [1, 2, 7, 8]


@pytest.mark.parametrize(
    "text, error, offset",
    [
        ("[1,2", ParseError, 4),
        ("1", ParseError, 0),
        ('{"a": 1}', ParseError, 0),
        ("[1,]", ParseError, 3),
        ("[1] x", ParseError, 4),
        ('["ab', ParseError, 1),
        ("[1.]", ParseError, 3),
        ("[-]", ParseError, 2),
        ("[01]", ParseError, 2),
        ("[tru]", ParseError, 1),
        ("[nul", ParseError, 4),
        ("[1 2]", ParseError, 3),
        ("[1}", ParseError, 2),
        ("[{1: 2}]", ParseError, 2),
        ('[{"a" 1}]', ParseError, 6),
        (r'["\q"]', ParseError, 3),
        ("", ParseError, 0),
        ("   ", ParseError, 3),
        ("[123456789012345678901]", IntegerOverflowError, 1),
        ("[-9223372036854775809]", IntegerOverflowError, 1),
        ('[{"a": 1, "a": 2}]', DuplicateFieldError, 10),
        ("[[[[[1]]]]]", DepthLimitError, 4),
    ],
)
def test_parse_errors_report_offsets(text, error, offset):
    with pytest.raises(error) as info:
        from_json(text, depth_limit=4)
    assert info.value.offset == offset
    assert str(offset) in str(info.value) or error is DuplicateFieldError


def test_invalid_utf8_in_string_is_a_parse_error():
    with pytest.raises(ParseError) as info:
        from_json(b'[1, "\xff"]')
    assert info.value.offset == 4


def test_depth_limit_default_and_configurable():
    deep = "[" * 64 + "]" * 64
    from_json(deep)
    with pytest.raises(DepthLimitError) as info:
        from_json("[" + deep + "]")
    assert info.value.limit == 64
    assert len(from_json("[" * 100 + "]" * 100, depth_limit=100)) == 1


def test_int64_bounds_are_accepted():
    assert to_values(from_json("[9223372036854775807, -9223372036854775808]")) == [2**63 - 1, -(2**63)]


@pytest.mark.parametrize("chunk", [1, 2, 3, 7, 64])
def test_chunk_boundaries_do_not_matter(monkeypatch, chunk):
    text = '[{"key": "va\\"lue", "n": -12.5e-3}, [true, false, null], 123456789, "é"]'
    expected = to_values(from_json(text))
    monkeypatch.setattr(jsonio, "CHUNK_SIZE", chunk)
    assert to_values(from_json(text)) == expected
    assert to_values(from_json(io.BytesIO(text.encode()))) == expected


@given(st.lists(json_values, max_size=5), st.integers(1, 17))
def test_random_text_across_small_chunks(values, chunk):
    text = json.dumps(values)
    saved = jsonio.CHUNK_SIZE
    jsonio.CHUNK_SIZE = chunk
    try:
        layout = from_json(text)
    finally:
        jsonio.CHUNK_SIZE = saved
    assert oracles.same(to_values(from_values(values)), to_values(layout))


def test_parse_error_offsets_are_absolute_across_chunks(monkeypatch):
    monkeypatch.setattr(jsonio, "CHUNK_SIZE", 4)
    with pytest.raises(ParseError) as info:
        from_json("[1, 2, 3, 4, 5,, 6]")
    assert info.value.offset == 15


def test_to_json_is_compact_utf8():
    layout = from_values([{"a": 1.5, "b": "é"}, {"a": None, "b": ""}])
    assert to_json(layout) == '[{"a":1.5,"b":"é"},{"a":null,"b":""}]'


def test_to_json_shortest_float_repr():
    assert to_json(from_values([0.1, 1e-7, 2.0, 1e22])) == "[0.1,1e-07,2.0,1e+22]"


def test_to_json_encoding_errors():
    with pytest.raises(EncodingError):
        to_json(from_values([float("nan")]))
    bad = ListOffsetArray([0, 1], NumericArray(bytearray(b"\xff"), dtype="u8"), {"__class__": "string"})
    with pytest.raises(EncodingError):
        to_json(bad)


def test_seeded_json_round_trip():
    run = equivalence.json_roundtrip(seed=3, target=200)
    assert run.ok, run.failures


# -- numbers-only fast path ----------------------------------------------------------------


@pytest.mark.parametrize(
    "text, depth",
    [
        ("[[1.1, 2], [], [3e2]]", 2),
        ("[[1, 2], [3]]", 2),
        ("[]", 1),
        ("[[]]", 2),
        ("[[], []]", 2),
        ("[[[1], []], [], [[2.5, -0.0]]]", 3),
        ("  [ 1 , 2.5 ]  ", 1),
    ],
)
def test_fast_path_equals_general_path(text, depth):
    fast, slow = from_json_numbers(text, depth), from_json(text)
    assert typestr(fast) == typestr(slow)
    assert oracles.same(to_values(slow), to_values(fast))


@pytest.mark.parametrize(
    "text, depth, error, offset",
    [
        ("[[1], [2, {}]]", 2, StructureDeviationError, 10),
        ("[[1], 2]", 2, StructureDeviationError, 6),
        ("[1, [2]]", 1, StructureDeviationError, 4),
        ('[[1], ["a"]]', 2, StructureDeviationError, 7),
        ("[1, true]", 1, StructureDeviationError, 4),
        ("[[1], [2]", 2, ParseError, 9),
        ("[[1], [2]] x", 2, ParseError, 11),
        ("[[1], [99999999999999999999]]", 2, IntegerOverflowError, 7),
    ],
)
def test_fast_path_errors(text, depth, error, offset):
    with pytest.raises(error) as info:
        from_json_numbers(text, depth)
    assert info.value.offset == offset


def test_fast_path_rejects_bad_depth():
    with pytest.raises(ValueError):
        from_json_numbers("[]", 0)


def test_seeded_fast_path_cases():
    run = equivalence.numbers_fast_path(seed=9, target=200)
    assert run.ok, run.failures
