"""Immutable layout nodes over flat buffers.

A layout is a small tree of nodes, each contributing one structural
feature: numeric leaves, variable-length lists (offsets over a content
node), records, tagged unions, missing values and the empty array.  Nodes
never change after construction; every "modifying" operation returns a new
node that shares the untouched children and buffers of the original.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping
from types import MappingProxyType
from typing import Any

import numpy as np

from . import kernels
from .errors import EncodingError, FieldNotFoundError, NoRecordError, StructureError

DTYPES = {
    "bool8": np.dtype(np.bool_),
    "i8": np.dtype(np.int8),
    "u8": np.dtype(np.uint8),
    "i64": np.dtype(np.int64),
    "f64": np.dtype(np.float64),
}
DTYPE_NAMES = {v: k for k, v in DTYPES.items()}

_EMPTY_PARAMETERS = MappingProxyType({})


def as_buffer(values, dtype) -> np.ndarray:
    """Return a read-only, contiguous, one-dimensional buffer of ``dtype``.

    Arrays that already satisfy this are returned as-is, so buffers pass
    between nodes without copies.  ``dtype`` is a numpy dtype or one of the
    short names in :data:`DTYPES`.
    """
    dtype = DTYPES.get(dtype, None) if isinstance(dtype, str) else np.dtype(dtype)
    if dtype is None or dtype not in DTYPE_NAMES:
        raise TypeError(f"unsupported buffer dtype {dtype!r}")
    if (
        isinstance(values, np.ndarray)
        and values.dtype == dtype
        and values.ndim == 1
        and not values.flags.writeable
        and values.flags.c_contiguous
    ):
        return values
    if isinstance(values, np.ndarray) and values.dtype == dtype:
        arr = np.ascontiguousarray(values).view()
    else:
        arr = np.array(values, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError("buffers are one-dimensional")
    arr.flags.writeable = False
    return arr


def _check_json_value(value):
    if value is None or isinstance(value, (bool, int, str)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("parameter values must be finite numbers")
        return
    raise TypeError(f"parameter values must be JSON scalars, not {type(value).__name__}")


def _freeze_parameters(parameters) -> Mapping[str, Any]:
    if not parameters:
        return _EMPTY_PARAMETERS
    out = {}
    for key, value in dict(parameters).items():
        if not isinstance(key, str):
            raise TypeError("parameter keys must be strings")
        _check_json_value(value)
        if value is not None:
            out[key] = value
    return MappingProxyType(out) if out else _EMPTY_PARAMETERS


class Layout:
    """Base class of all layout nodes."""

    __slots__ = ("_parameters",)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _set(self, name, value):
        object.__setattr__(self, name, value)

    @property
    def parameters(self) -> Mapping[str, Any]:
        return self._parameters

    def parameter(self, key, default=None):
        return self._parameters.get(key, default)

    def __len__(self):
        raise NotImplementedError

    def _with_parameters(self, parameters):
        raise NotImplementedError

    def _same(self, other) -> bool:
        raise NotImplementedError

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return dict(self._parameters) == dict(other._parameters) and self._same(other)

    __hash__ = None

    def __repr__(self):
        from .datashape import render, type_of

        try:
            shown = render(len(self), type_of(self))
        except Exception:  # invalid layouts still need a repr
            shown = "?"
        return f"<{type(self).__name__} len={len(self)} type={shown!r}>"


def _buffers_equal(a, b) -> bool:
    return a.dtype == b.dtype and len(a) == len(b) and kernels.k_equal(a, b).ok


class EmptyArray(Layout):
    """Zero-length array of unknown type."""

    __slots__ = ()

    def __init__(self, parameters=None):
        self._set("_parameters", _freeze_parameters(parameters))

    def __len__(self):
        return 0

    def _with_parameters(self, parameters):
        return EmptyArray(parameters)

    def _same(self, other):
        return True


class NumericArray(Layout):
    __slots__ = ("_data",)

    def __init__(self, data, parameters=None, dtype=None):
        if dtype is None:
            dtype = data.dtype if isinstance(data, np.ndarray) else _infer_dtype(data)
        self._set("_data", as_buffer(data, dtype))
        self._set("_parameters", _freeze_parameters(parameters))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dtype(self) -> str:
        return DTYPE_NAMES[self._data.dtype]

    def __len__(self):
        return len(self._data)

    def _with_parameters(self, parameters):
        return NumericArray(self._data, parameters)

    def _same(self, other):
        return _buffers_equal(self._data, other._data)


def _infer_dtype(values):
    values = list(values)
    if values and all(isinstance(v, bool) for v in values):
        return "bool8"
    if all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        return "i64"
    return "f64"


class ListOffsetArray(Layout):
    """Variable-length lists: sublist i is ``content[offsets[i]:offsets[i+1]]``."""

    __slots__ = ("_content", "_offsets")

    def __init__(self, offsets, content, parameters=None):
        if not isinstance(content, Layout):
            raise TypeError("content must be a Layout")
        self._set("_offsets", as_buffer(offsets, "i64"))
        self._set("_content", content)
        self._set("_parameters", _freeze_parameters(parameters))

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets

    @property
    def content(self) -> Layout:
        return self._content

    def __len__(self):
        return max(len(self._offsets) - 1, 0)

    def _with_parameters(self, parameters):
        return ListOffsetArray(self._offsets, self._content, parameters)

    def _same(self, other):
        return _buffers_equal(self._offsets, other._offsets) and self._content == other._content


class RecordArray(Layout):
    """Named fields of equal logical length.

    ``fields`` is a mapping or a sequence of ``(name, content)`` pairs; the
    order is kept.  The length is stored so zero-field records are
    well-defined; it defaults to the shortest field.
    """

    __slots__ = ("_contents", "_length", "_names")

    def __init__(self, fields, length=None, parameters=None):
        items = list(fields.items()) if isinstance(fields, Mapping) else list(fields)
        names = tuple(name for name, _ in items)
        contents = tuple(content for _, content in items)
        for name, content in items:
            if not isinstance(name, str):
                raise TypeError("field names must be strings")
            if not isinstance(content, Layout):
                raise TypeError("field contents must be Layouts")
        if length is None:
            if not contents:
                raise ValueError("a record with no fields needs an explicit length")
            length = min(len(c) for c in contents)
        if length < 0:
            raise ValueError("length must be non-negative")
        self._set("_names", names)
        self._set("_contents", contents)
        self._set("_length", int(length))
        self._set("_parameters", _freeze_parameters(parameters))

    @property
    def fields(self) -> tuple[str, ...]:
        return self._names

    @property
    def contents(self) -> tuple[Layout, ...]:
        return self._contents

    def items(self):
        return zip(self._names, self._contents)

    def field(self, name) -> Layout:
        """The named field's content, truncated to the record length."""
        try:
            content = self._contents[self._names.index(name)]
        except ValueError:
            raise FieldNotFoundError(name, self._names) from None
        return truncate(content, self._length)

    def __len__(self):
        return self._length

    def _with_parameters(self, parameters):
        return RecordArray(self.items(), self._length, parameters)

    def _same(self, other):
        return (
            self._names == other._names
            and self._length == other._length
            and all(a == b for a, b in zip(self._contents, other._contents))
        )


class UnionArray(Layout):
    """Tagged union: element i is ``contents[tags[i]][index[i]]``."""

    __slots__ = ("_contents", "_index", "_tags")

    def __init__(self, tags, index, contents, parameters=None):
        contents = tuple(contents)
        if not contents or not all(isinstance(c, Layout) for c in contents):
            raise TypeError("contents must be a non-empty sequence of Layouts")
        if len(contents) > 127:
            raise ValueError("at most 127 union contents")
        tags = as_buffer(tags, "i8")
        index = as_buffer(index, "i64")
        if len(tags) != len(index):
            raise ValueError("tags and index must have the same length")
        self._set("_tags", tags)
        self._set("_index", index)
        self._set("_contents", contents)
        self._set("_parameters", _freeze_parameters(parameters))

    @property
    def tags(self) -> np.ndarray:
        return self._tags

    @property
    def index(self) -> np.ndarray:
        return self._index

    @property
    def contents(self) -> tuple[Layout, ...]:
        return self._contents

    def __len__(self):
        return len(self._tags)

    def _with_parameters(self, parameters):
        return UnionArray(self._tags, self._index, self._contents, parameters)

    def _same(self, other):
        return (
            _buffers_equal(self._tags, other._tags)
            and _buffers_equal(self._index, other._index)
            and len(self._contents) == len(other._contents)
            and all(a == b for a, b in zip(self._contents, other._contents))
        )


class IndexedOptionArray(Layout):
    """Possibly-missing values: ``index[i] == -1`` marks a missing element."""

    __slots__ = ("_content", "_index")

    def __init__(self, index, content, parameters=None):
        if not isinstance(content, Layout):
            raise TypeError("content must be a Layout")
        self._set("_index", as_buffer(index, "i64"))
        self._set("_content", content)
        self._set("_parameters", _freeze_parameters(parameters))

    @property
    def index(self) -> np.ndarray:
        return self._index

    @property
    def content(self) -> Layout:
        return self._content

    def __len__(self):
        return len(self._index)

    def _with_parameters(self, parameters):
        return IndexedOptionArray(self._index, self._content, parameters)

    def _same(self, other):
        return _buffers_equal(self._index, other._index) and self._content == other._content


# -- operations ------------------------------------------------------------------


def length(node: Layout) -> int:
    return len(node)


def is_string(node: Layout) -> bool:
    """True for a list node flagged ``__class__ = "string"`` over 8-bit unsigned content."""
    return (
        isinstance(node, ListOffsetArray)
        and node.parameter("__class__") == "string"
        and isinstance(node.content, NumericArray)
        and node.content.data.dtype == DTYPES["u8"]
    )


def set_parameter(node: Layout, key: str, value) -> Layout:
    """Return a copy of ``node`` with one parameter changed; ``None`` removes it."""
    if not isinstance(key, str):
        raise TypeError("parameter keys must be strings")
    _check_json_value(value)
    params = dict(node.parameters)
    if value is None:
        params.pop(key, None)
    else:
        params[key] = value
    return node._with_parameters(params)


def parameters_json(node: Layout) -> str:
    return json.dumps(dict(node.parameters), separators=(",", ":"))


def validate(node: Layout, path=()) -> StructureError | None:
    """Check every node invariant recursively.

    Returns ``None`` when the layout is valid and a :class:`StructureError`
    (not raised) naming the path to the first offending node otherwise.
    """
    path = tuple(path)
    if isinstance(node, EmptyArray):
        return None
    if isinstance(node, NumericArray):
        if node.data.dtype not in DTYPE_NAMES:
            return StructureError(path, f"unsupported dtype {node.data.dtype}")
        return None
    if isinstance(node, ListOffsetArray):
        offsets = node.offsets
        if len(offsets) == 0:
            return StructureError(path, "offsets must have at least one entry")
        if offsets[0] != 0:
            return StructureError(path, "offsets[0] must be 0")
        status = kernels.k_list_lengths(offsets, np.empty(len(offsets) - 1, np.int64))
        if not status:
            return StructureError(path, f"offsets not non-decreasing at position {status.position}")
        if offsets[-1] > len(node.content):
            return StructureError(
                path, f"offsets reach {offsets[-1]} but content has length {len(node.content)}"
            )
        return validate(node.content, path + (".content",))
    if isinstance(node, RecordArray):
        if len(set(node.fields)) != len(node.fields):
            return StructureError(path, "duplicate field names")
        for name, content in node.items():
            if len(content) < len(node):
                return StructureError(
                    path, f"field {name!r} has length {len(content)} < record length {len(node)}"
                )
            err = validate(content, path + (f"[{name!r}]",))
            if err is not None:
                return err
        return None
    if isinstance(node, UnionArray):
        lengths = np.array([len(c) for c in node.contents], np.int64)
        status = kernels.k_check_union(node.tags, node.index, lengths)
        if not status:
            return StructureError(path, f"{status.message} at position {status.position}")
        for i, content in enumerate(node.contents):
            err = validate(content, path + (f".contents[{i}]",))
            if err is not None:
                return err
        return None
    if isinstance(node, IndexedOptionArray):
        status = kernels.k_check_index(node.index, len(node.content), True)
        if not status:
            return StructureError(path, f"option index out of range at position {status.position}")
        return validate(node.content, path + (".content",))
    return StructureError(path, f"not a layout node: {type(node).__name__}")


def check(node: Layout) -> Layout:
    """Raise the :func:`validate` error, if any; return ``node`` otherwise."""
    err = validate(node)
    if err is not None:
        raise err
    return node


def truncate(node: Layout, n: int) -> Layout:
    """The first ``n`` elements of ``node`` as views, without copying buffers."""
    if len(node) == n:
        return node
    if n > len(node):
        raise ValueError(f"cannot truncate length {len(node)} to {n}")
    if isinstance(node, NumericArray):
        return NumericArray(node.data[:n], node.parameters)
    if isinstance(node, ListOffsetArray):
        return ListOffsetArray(node.offsets[: n + 1], node.content, node.parameters)
    if isinstance(node, RecordArray):
        return RecordArray(node.items(), n, node.parameters)
    if isinstance(node, UnionArray):
        return UnionArray(node.tags[:n], node.index[:n], node.contents, node.parameters)
    if isinstance(node, IndexedOptionArray):
        return IndexedOptionArray(node.index[:n], node.content, node.parameters)
    raise TypeError(type(node).__name__)


def take(node: Layout, indices) -> Layout:
    """Select elements ``indices`` (int64, in range) of ``node``.

    Lists and records copy the selected values down to the leaves; unions
    and options only gather their tag/index buffers and share contents.
    """
    indices = as_buffer(indices, "i64")
    if isinstance(node, EmptyArray):
        if len(indices):
            raise IndexError("cannot take from an empty array")
        return node
    if isinstance(node, NumericArray):
        out = np.empty(len(indices), node.data.dtype)
        _ok(kernels.k_gather(node.data, indices, out))
        return NumericArray(out, node.parameters)
    if isinstance(node, ListOffsetArray):
        nextoffsets = np.empty(len(indices) + 1, np.int64)
        _ok(kernels.k_carry_list(node.offsets, indices, nextoffsets))
        nextcarry = np.empty(nextoffsets[-1], np.int64)
        _ok(kernels.k_carry_list(node.offsets, indices, nextoffsets, nextcarry))
        return ListOffsetArray(nextoffsets, take(node.content, nextcarry), node.parameters)
    if isinstance(node, RecordArray):
        status = kernels.k_check_index(indices, len(node), False)
        if not status:
            raise IndexError(f"take index out of range at position {status.position}")
        return RecordArray(
            [(name, take(content, indices)) for name, content in node.items()],
            len(indices),
            node.parameters,
        )
    if isinstance(node, UnionArray):
        tags = np.empty(len(indices), np.int8)
        index = np.empty(len(indices), np.int64)
        _ok(kernels.k_gather(node.tags, indices, tags))
        _ok(kernels.k_gather(node.index, indices, index))
        return UnionArray(tags, index, node.contents, node.parameters)
    if isinstance(node, IndexedOptionArray):
        index = np.empty(len(indices), np.int64)
        _ok(kernels.k_gather(node.index, indices, index))
        return IndexedOptionArray(index, node.content, node.parameters)
    raise TypeError(type(node).__name__)


def arange(start, stop) -> np.ndarray:
    out = np.empty(max(stop - start, 0), np.int64)
    kernels.k_iota(start, out)
    return out


def _ok(status):
    if not status:
        raise IndexError(f"{status.message} at position {status.position}")


def to_values(node: Layout) -> list:
    """Convert a layout to nested lists, dicts, numbers, strings and ``None``."""
    check(node)
    return _to_values(node)


def _to_values(node):
    if isinstance(node, EmptyArray):
        return []
    if isinstance(node, NumericArray):
        return node.data.tolist()
    if isinstance(node, ListOffsetArray):
        offsets = node.offsets.tolist()
        if is_string(node):
            raw = node.content.data.tobytes()
            try:
                return [raw[offsets[i] : offsets[i + 1]].decode("utf-8") for i in range(len(node))]
            except UnicodeDecodeError as err:
                raise EncodingError(f"string bytes are not valid UTF-8: {err}") from None
        content = _to_values(node.content)
        return [content[offsets[i] : offsets[i + 1]] for i in range(len(node))]
    if isinstance(node, RecordArray):
        names = node.fields
        columns = [_to_values(truncate(c, len(node))) for c in node.contents]
        return [dict(zip(names, row)) for row in zip(*columns)] if names else [{} for _ in range(len(node))]
    if isinstance(node, UnionArray):
        contents = [_to_values(c) for c in node.contents]
        return [contents[t][i] for t, i in zip(node.tags.tolist(), node.index.tolist())]
    if isinstance(node, IndexedOptionArray):
        content = _to_values(node.content)
        return [None if i < 0 else content[i] for i in node.index.tolist()]
    raise TypeError(type(node).__name__)


def project_field(node: Layout, name: str) -> Layout:
    """Replace the shallowest record under ``node`` by its field ``name``.

    Lists, options and unions above the record are kept, sharing their
    buffers with ``node``.
    """
    projected = _project(node, name)
    if projected is None:
        raise NoRecordError(name)
    return projected


def _project(node, name):
    if isinstance(node, RecordArray):
        return node.field(name)
    if isinstance(node, ListOffsetArray) and not is_string(node):
        inner = _project(node.content, name)
        return None if inner is None else ListOffsetArray(node.offsets, inner, node.parameters)
    if isinstance(node, IndexedOptionArray):
        inner = _project(node.content, name)
        return None if inner is None else IndexedOptionArray(node.index, inner, node.parameters)
    if isinstance(node, UnionArray):
        projected = []
        for content in node.contents:
            try:
                projected.append(_project(content, name))
            except FieldNotFoundError:
                projected.append(None)
        if all(p is not None for p in projected):
            return UnionArray(node.tags, node.index, projected, node.parameters)
        available = []
        for content in node.contents:
            for field in _record_fields(content) or ():
                if field not in available:
                    available.append(field)
        if not available:
            return None
        if name in available:
            raise FieldNotFoundError(name, available, "only some union variants have it")
        raise FieldNotFoundError(name, available)
    return None


def _record_fields(node):
    if isinstance(node, RecordArray):
        return node.fields
    if isinstance(node, (IndexedOptionArray, ListOffsetArray)) and not is_string(node):
        return _record_fields(node.content)
    if isinstance(node, UnionArray):
        names = [f for c in node.contents for f in (_record_fields(c) or ())]
        return tuple(dict.fromkeys(names)) or None
    return None


def iter_buffers(node: Layout) -> Iterable[np.ndarray]:
    """All buffers of a layout in depth-first order."""
    if isinstance(node, NumericArray):
        yield node.data
    elif isinstance(node, ListOffsetArray):
        yield node.offsets
        yield from iter_buffers(node.content)
    elif isinstance(node, RecordArray):
        for content in node.contents:
            yield from iter_buffers(content)
    elif isinstance(node, UnionArray):
        yield node.tags
        yield node.index
        for content in node.contents:
            yield from iter_buffers(content)
    elif isinstance(node, IndexedOptionArray):
        yield node.index
        yield from iter_buffers(node.content)
