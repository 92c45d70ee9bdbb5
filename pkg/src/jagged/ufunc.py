"""Elementwise numeric functions applied through nested structure.

Offsets, record fields, union tags and option indices pass through
unchanged (the buffers are shared); only numeric leaves are recomputed, by
:func:`jagged.kernels.k_map_unary` and :func:`jagged.kernels.k_map_binary`.

>>> from jagged.builder import from_values
>>> from jagged.layout import to_values
>>> to_values(map_binary("add", from_values([[1, 2], [3]]), 10))
[[11, 12], [13]]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NonNumericLeafError, StructureMismatchError
from .layout import (
    EmptyArray,
    IndexedOptionArray,
    Layout,
    ListOffsetArray,
    NumericArray,
    RecordArray,
    UnionArray,
    is_string,
    truncate,
)

_ARITY = {"sin": 1, "negate": 1, "abs": 1, "add": 2, "multiply": 2}


@dataclass(frozen=True)
class ElementwiseOp:
    name: str

    def __post_init__(self):
        if self.name not in _ARITY:
            raise ValueError(f"unknown elementwise op {self.name!r}; expected one of {sorted(_ARITY)}")

    @property
    def arity(self) -> int:
        return _ARITY[self.name]


def _op(op, arity) -> str:
    op = op if isinstance(op, ElementwiseOp) else ElementwiseOp(op)
    if op.arity != arity:
        raise ValueError(f"{op.name} takes {op.arity} operand(s), not {arity}")
    return op.name


def _leaf_parameters(leaf: NumericArray, out: np.ndarray):
    # a leaf's parameters describe its dtype, so they only survive if it is unchanged
    return leaf.parameters if leaf.data.dtype == out.dtype else None


def _numeric_leaf(node, path):
    if isinstance(node, NumericArray):
        if node.dtype == "bool8":
            raise NonNumericLeafError(path, "boolean")
        return node
    if is_string(node):
        raise NonNumericLeafError(path, "string")
    return None


def map_unary(op, node: Layout) -> Layout:
    """Apply ``sin``, ``negate`` or ``abs`` to every numeric leaf; results are float64."""
    return _unary(_op(op, 1), node, ())


def _unary(op, node, path):
    leaf = _numeric_leaf(node, path)
    if leaf is not None:
        out = np.empty(len(leaf), np.float64)
        status = kernels.k_map_unary(op, leaf.data, out)
        assert status.ok, status
        return NumericArray(out, _leaf_parameters(leaf, out))
    if isinstance(node, EmptyArray):
        return node
    if isinstance(node, ListOffsetArray):
        return ListOffsetArray(node.offsets, _unary(op, node.content, path + (".content",)), node.parameters)
    if isinstance(node, RecordArray):
        fields = [
            (name, _unary(op, truncate(c, len(node)), path + (f"[{name!r}]",)))
            for name, c in node.items()
        ]
        return RecordArray(fields, len(node), node.parameters)
    if isinstance(node, UnionArray):
        contents = [_unary(op, c, path + (f".contents[{i}]",)) for i, c in enumerate(node.contents)]
        return UnionArray(node.tags, node.index, contents, node.parameters)
    if isinstance(node, IndexedOptionArray):
        return IndexedOptionArray(node.index, _unary(op, node.content, path + (".content",)), node.parameters)
    raise TypeError(type(node).__name__)


def map_binary(op, a: Layout, b) -> Layout:
    """Combine ``a`` with a scalar or with a layout of identical structure.

    The result leaf is int64 when both operands are int64 (wrapping on
    overflow) and float64 otherwise.
    """
    name = _op(op, 2)
    if isinstance(b, Layout):
        return _binary(name, a, b, ())
    if isinstance(b, (bool, np.bool_)) or not isinstance(b, (int, float, np.integer, np.floating)):
        raise TypeError(f"second operand must be a number or a Layout, not {type(b).__name__}")
    return _broadcast(name, a, b, ())


def _scalar_kind(x):
    if isinstance(x, (int, np.integer)) and -(2**63) <= int(x) < 2**63:
        return np.int64(x)
    return np.float64(x)


def _broadcast(op, node, scalar, path):
    leaf = _numeric_leaf(node, path)
    if leaf is not None:
        right = _scalar_kind(scalar)
        left = leaf.data
        if left.dtype == np.int64 and right.dtype == np.int64:
            out = np.empty(len(left), np.int64)
        else:
            out = np.empty(len(left), np.float64)
            right = np.float64(right)
        status = kernels.k_map_binary(op, left, right, out)
        assert status.ok, status
        return NumericArray(out, _leaf_parameters(leaf, out))
    if isinstance(node, EmptyArray):
        return node
    if isinstance(node, ListOffsetArray):
        return ListOffsetArray(
            node.offsets, _broadcast(op, node.content, scalar, path + (".content",)), node.parameters
        )
    if isinstance(node, RecordArray):
        fields = [
            (name, _broadcast(op, truncate(c, len(node)), scalar, path + (f"[{name!r}]",)))
            for name, c in node.items()
        ]
        return RecordArray(fields, len(node), node.parameters)
    if isinstance(node, UnionArray):
        contents = [
            _broadcast(op, c, scalar, path + (f".contents[{i}]",)) for i, c in enumerate(node.contents)
        ]
        return UnionArray(node.tags, node.index, contents, node.parameters)
    if isinstance(node, IndexedOptionArray):
        return IndexedOptionArray(
            node.index, _broadcast(op, node.content, scalar, path + (".content",)), node.parameters
        )
    raise TypeError(type(node).__name__)


def _same_buffer(a, b) -> bool:
    return len(a) == len(b) and kernels.k_equal(a, b).ok


def _binary(op, a, b, path):
    left = _numeric_leaf(a, path)
    right = _numeric_leaf(b, path)
    if left is not None and right is not None:
        if len(left) != len(right):
            raise StructureMismatchError(path, f"leaf lengths differ ({len(left)} vs {len(right)})")
        ldata, rdata = left.data, right.data
        if ldata.dtype == np.int64 and rdata.dtype == np.int64:
            out = np.empty(len(ldata), np.int64)
        else:
            # mixed leaves (int64 with float64, say) are widened inside the kernel
            out = np.empty(len(ldata), np.float64)
        status = kernels.k_map_binary(op, ldata, rdata, out)
        assert status.ok, status
        return NumericArray(out, _leaf_parameters(left, out))
    if type(a) is not type(b):
        raise StructureMismatchError(path, f"node kinds differ ({type(a).__name__} vs {type(b).__name__})")
    if isinstance(a, EmptyArray):
        return a
    if isinstance(a, ListOffsetArray):
        if not _same_buffer(a.offsets, b.offsets):
            raise StructureMismatchError(path, "list offsets differ")
        n = int(a.offsets[-1]) if len(a.offsets) else 0
        content = _binary(op, truncate(a.content, n), truncate(b.content, n), path + (".content",))
        return ListOffsetArray(a.offsets, content, a.parameters)
    if isinstance(a, RecordArray):
        if a.fields != b.fields:
            raise StructureMismatchError(path, f"record fields differ ({list(a.fields)} vs {list(b.fields)})")
        if len(a) != len(b):
            raise StructureMismatchError(path, f"record lengths differ ({len(a)} vs {len(b)})")
        fields = [
            (name, _binary(op, a.field(name), b.field(name), path + (f"[{name!r}]",)))
            for name in a.fields
        ]
        return RecordArray(fields, len(a), a.parameters)
    if isinstance(a, UnionArray):
        if not (_same_buffer(a.tags, b.tags) and _same_buffer(a.index, b.index)):
            raise StructureMismatchError(path, "union tags or index differ")
        if len(a.contents) != len(b.contents):
            raise StructureMismatchError(path, "unions have different numbers of contents")
        contents = [
            _binary(op, ca, cb, path + (f".contents[{i}]",))
            for i, (ca, cb) in enumerate(zip(a.contents, b.contents))
        ]
        return UnionArray(a.tags, a.index, contents, a.parameters)
    if isinstance(a, IndexedOptionArray):
        if not _same_buffer(a.index, b.index):
            raise StructureMismatchError(path, "missing values are in different places")
        content = _binary(op, a.content, b.content, path + (".content",))
        return IndexedOptionArray(a.index, content, a.parameters)
    raise StructureMismatchError(path, "unsupported node kinds")
