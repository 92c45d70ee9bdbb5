"""JSON ingestion and serialization.

``from_json`` streams the input through an event scanner and drives an
:class:`~jagged.builder.ArrayBuilder` one event at a time; no intermediate
tree is built.  ``from_json_numbers`` is the specialized path for input that
is nothing but nested lists of numbers: a compiled scanner fills offsets
directly, with no type discovery.
"""

from __future__ import annotations

import json
import os
import re
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import kernels
from .builder import ArrayBuilder
from .errors import (
    BuilderError,
    DepthLimitError,
    EncodingError,
    IntegerOverflowError,
    ParseError,
    StructureDeviationError,
)
from .layout import EmptyArray, Layout, ListOffsetArray, NumericArray, to_values

CHUNK_SIZE = 1 << 16
DEFAULT_DEPTH_LIMIT = 64

# event kinds, shared with the tokenizer kernel
BEGIN_LIST, END_LIST = kernels.TOK_BEGIN_LIST, kernels.TOK_END_LIST
BEGIN_RECORD, END_RECORD = kernels.TOK_BEGIN_RECORD, kernels.TOK_END_RECORD
KEY, STRING, INT = kernels.TOK_KEY, kernels.TOK_STRING, kernels.TOK_INT
FLOAT, BOOL, NULL = kernels.TOK_FLOAT, kernels.TOK_BOOL, kernels.TOK_NULL
EVENT_NAMES = (
    "start-array", "end-array", "start-object", "end-object", "key",
    "string", "int", "float", "bool", "null",
)


@dataclass(frozen=True)
class JsonEvent:
    kind: str
    value: Any
    offset: int


def _chunks(source) -> Iterator[bytes]:
    if isinstance(source, str):
        source = source.encode("utf-8")
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
        for start in range(0, len(data), CHUNK_SIZE):
            yield data[start : start + CHUNK_SIZE]
    elif isinstance(source, os.PathLike):
        with open(source, "rb") as f:
            yield from iter(lambda: f.read(CHUNK_SIZE), b"")
    elif hasattr(source, "read"):
        while True:
            chunk = source.read(CHUNK_SIZE)
            if not chunk:
                break
            yield chunk.encode("utf-8") if isinstance(chunk, str) else chunk
    else:
        raise TypeError(f"cannot read JSON from {type(source).__name__}")


def _decode_string(raw: bytes, offset: int) -> str:
    body = raw[1:-1]
    try:
        if b"\\" not in body:
            return body.decode("utf-8")
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as err:
        raise ParseError(offset, f"invalid string literal ({err.__class__.__name__})") from None


class _Batch:
    """Tokens of one input window; offsets are relative to ``buf``."""

    __slots__ = ("base", "buf", "ends", "floats", "ivals", "kinds", "starts")

    def __init__(self, kinds, ivals, floats, starts, ends, buf, base):
        self.kinds = kinds
        self.ivals = ivals
        self.floats = floats
        self.starts = starts
        self.ends = ends
        self.buf = buf
        self.base = base

    def string(self, t) -> str:
        s = self.starts[t]
        return _decode_string(self.buf[s : self.ends[t]], self.base + s)


def _raise_token_error(status, buf: bytes, base: int, depth_limit: int):
    pos = status.position
    offset = base + pos
    if status.message == "integer-overflow":
        m = _NUMBER_AT.match(buf, pos)
        raise IntegerOverflowError(m.group().decode() if m else "?", offset)
    if status.message == "nesting depth limit exceeded":
        raise DepthLimitError(offset, depth_limit)
    if status.message == "invalid character" and pos < len(buf):
        raise ParseError(offset, f"invalid character {buf[pos:pos + 1].decode('latin-1')!r}")
    raise ParseError(offset, status.message)


def _scan(source, ndjson: bool, depth_limit: int) -> Iterator[_Batch]:
    """Tokenize ``source`` window by window, yielding one batch per window.

    In array mode the outermost ``[`` and ``]`` produce no tokens, so the
    stream is exactly the sequence of top-level entries.
    """
    stack = np.zeros(depth_limit, np.uint8)
    info = np.zeros(7, np.int64)
    info[kernels.JT_INFO_STATE] = kernels.JT_TOP
    capacity = 0
    base = 0  # absolute offset of buf[0]
    buf = b""
    chunks = _chunks(source)
    eof = False
    while not eof:
        chunk = next(chunks, None)
        if chunk is None:
            eof = True
        else:
            buf = buf + chunk if buf else chunk
        n = len(buf)
        if n >= capacity:
            capacity = max(n, 2 * capacity, 1)
            kinds = np.empty(capacity, np.int8)
            starts = np.empty(capacity, np.int64)
            ends = np.empty(capacity, np.int64)
            ivals = np.empty(capacity, np.int64)
            realtext = np.empty(capacity + 1, np.uint8)
        status = kernels.k_json_tokens(
            np.frombuffer(buf, np.uint8), eof, ndjson, stack, info, kinds, starts, ends, ivals, realtext
        )
        ntok = int(info[kernels.JT_INFO_TOKENS])
        if ntok:
            nreal = int(info[kernels.JT_INFO_REALTEXT])
            floats = np.fromstring(realtext[:nreal].tobytes(), np.float64, sep=" ").tolist() if nreal else []
            yield _Batch(
                kinds[:ntok].tolist(), ivals[:ntok].tolist(), floats,
                starts[:ntok].tolist(), ends[:ntok].tolist(), buf, base,
            )
        if not status.ok:
            _raise_token_error(status, buf, base, depth_limit)
        consumed = int(info[kernels.JT_INFO_CONSUMED])
        base += consumed
        buf = buf[consumed:]


def iter_events(source, ndjson: bool = False, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Iterator[JsonEvent]:
    """The event stream that ``from_json`` feeds to the builder.

    The outermost array brackets are not reported: each top-level entry (or
    NDJSON value) starts afresh at the top level.
    """
    for batch in _scan(source, ndjson, depth_limit):
        floats = iter(batch.floats)
        for t, kind in enumerate(batch.kinds):
            if kind == FLOAT:
                value = next(floats)
            elif kind == INT:
                value = batch.ivals[t]
            elif kind == BOOL:
                value = bool(batch.ivals[t])
            elif kind == KEY or kind == STRING:
                value = batch.string(t)
            else:
                value = None
            yield JsonEvent(EVENT_NAMES[kind], value, batch.base + batch.starts[t])


def from_json(source, ndjson: bool = False, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Layout:
    """Convert a JSON array (or NDJSON lines) into a layout, discovering its type.

    ``source`` is JSON text (``str`` or ``bytes``), a binary or text file
    object, or a path-like object.  Events drive the builder one to one.

    >>> from jagged.datashape import typestr
    >>> typestr(from_json('[[1.1], [2.0, 0.2]]'))
    '2 * var * float64'
    """
    b = ArrayBuilder()
    real, integer = b.real, b.integer
    begin_list, end_list = b.begin_list, b.end_list
    batch = None
    t = 0
    try:
        for batch in _scan(source, ndjson, depth_limit):
            kinds, ivals, floats = batch.kinds, batch.ivals, batch.floats
            fi = 0
            for t, kind in enumerate(kinds):
                if kind == FLOAT:
                    real(floats[fi])
                    fi += 1
                elif kind == INT:
                    integer(ivals[t])
                elif kind == BEGIN_LIST:
                    begin_list()
                elif kind == END_LIST:
                    end_list()
                elif kind == KEY:
                    b.field(batch.string(t))
                elif kind == BEGIN_RECORD:
                    b.begin_record()
                elif kind == END_RECORD:
                    b.end_record()
                elif kind == STRING:
                    b.string_(batch.string(t))
                elif kind == NULL:
                    b.null_()
                else:
                    b.boolean(ivals[t] == 1)
    except BuilderError as err:
        if err.offset is None and batch is not None:
            err.offset = batch.base + batch.starts[t]
        raise
    return b.snapshot()


def _read_all(source) -> bytes:
    if isinstance(source, str):
        return source.encode("utf-8")
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    if isinstance(source, os.PathLike):
        with open(source, "rb") as f:
            return f.read()
    if hasattr(source, "read"):
        data = source.read()
        return data.encode("utf-8") if isinstance(data, str) else data
    raise TypeError(f"cannot read JSON from {type(source).__name__}")


_BRACKETS_TO_SPACE = bytes.maketrans(b"[],", b"   ")
_NUMBER_AT = re.compile(rb"-?[0-9]+")


def from_json_numbers(source, depth: int) -> Layout:
    """Fast path for JSON that is ``depth`` uniform levels of lists around numbers.

    ``depth`` counts the outermost array, so ``[[1.0], [2.0, 3.0]]`` has
    depth 2.  The result equals ``from_json`` of the same text.  The whole
    input is read into memory.
    """
    depth = int(depth)
    if depth < 1:
        raise ValueError("depth must be positive")
    raw = _read_all(source)
    data = np.frombuffer(raw, np.uint8)
    counts = np.zeros(depth, np.int64)
    info = np.zeros(2, np.int64)
    status = kernels.k_scan_numbers_json(data, depth, counts, info)
    if not status.ok:
        _raise_scan_error(status, raw)
    sizes = counts[:-1] + 1
    bases = np.zeros(depth, np.int64)
    bases[1:] = np.cumsum(sizes)
    flat_offsets = np.zeros(int(bases[-1]), np.int64)
    n_leaves = int(counts[-1])
    ints = np.empty(n_leaves, np.int64)
    status = kernels.k_scan_numbers_json(data, depth, counts, info, flat_offsets, bases, ints)
    assert status.ok, status

    if n_leaves == 0:
        node: Layout = EmptyArray()
    elif info[0]:
        leaves = np.fromstring(raw.translate(_BRACKETS_TO_SPACE), dtype=np.float64, sep=" ")
        if len(leaves) != n_leaves:
            raise ParseError(0, "number literals could not be converted")
        node = NumericArray(leaves)
    else:
        node = NumericArray(ints)
    for level in range(depth - 1, 0, -1):
        n = int(counts[level - 1])
        if n == 0:
            node = EmptyArray()
        else:
            start = int(bases[level - 1])
            node = ListOffsetArray(flat_offsets[start : start + n + 1], node)
    return node


def _raise_scan_error(status, raw: bytes):
    offset = status.position
    if status.message == "structure-deviation":
        raise StructureDeviationError(offset, "input is not uniformly nested lists of numbers")
    if status.message == "integer-overflow":
        m = _NUMBER_AT.match(raw, offset)
        raise IntegerOverflowError(m.group().decode() if m else "?", offset)
    if status.message == "parse-error":
        if offset >= len(raw):
            raise ParseError(offset, "unexpected end of input")
        raise ParseError(offset, "invalid JSON")
    raise ValueError(status.message)


def to_json(node: Layout) -> str:
    """Compact JSON text of the layout's values (no insignificant whitespace).

    Non-ASCII characters are written as UTF-8, floats in shortest
    round-trip form.
    """
    try:
        return json.dumps(to_values(node), separators=(",", ":"), ensure_ascii=False, allow_nan=False)
    except ValueError as err:
        if isinstance(err, EncodingError):
            raise
        raise EncodingError(f"value not representable in JSON: {err}") from None
