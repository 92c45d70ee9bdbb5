"""Composite selection over layouts.

A selection is a tuple of selectors consumed left to right.  ``Field``
selectors project record fields (they do not change depth) and are applied
first; positional selectors then walk the dimensions of the array:

* ``At`` picks one element and removes the dimension,
* ``Range``, ``FlatIndex`` and ``FlatMask`` select within the dimension,
* ``JaggedIndex`` and ``JaggedMask`` carry one selection per sublist and
  must be the first positional selector.

All data-dependent work is done by kernels; this module only walks the
(small) node tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import kernels
from .datashape import depth, type_of
from .errors import (
    IndexOutOfRangeError,
    JaggedStructureMismatchError,
    MaskLengthMismatchError,
    MissingValueError,
    SelectorError,
    TooManySelectorsError,
)
from .layout import (
    EmptyArray,
    IndexedOptionArray,
    Layout,
    ListOffsetArray,
    NumericArray,
    RecordArray,
    UnionArray,
    _to_values,
    arange,
    as_buffer,
    is_string,
    project_field,
    take,
    truncate,
)


@dataclass(frozen=True)
class Field:
    name: str


@dataclass(frozen=True)
class At:
    index: int


@dataclass(frozen=True)
class Range:
    start: int | None = None
    stop: int | None = None
    step: int | None = None

    def __post_init__(self):
        if self.step == 0:
            raise SelectorError("slice step cannot be zero")


class FlatIndex:
    def __init__(self, indices):
        self.indices = as_buffer(np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                                            dtype=np.int64), "i64")

    def __eq__(self, other):
        return isinstance(other, FlatIndex) and self.indices.tolist() == other.indices.tolist()

    def __repr__(self):
        return f"FlatIndex({self.indices.tolist()})"


class FlatMask:
    def __init__(self, mask):
        self.mask = as_buffer(np.asarray(list(mask) if not isinstance(mask, np.ndarray) else mask,
                                         dtype=np.bool_), "bool8")

    def __eq__(self, other):
        return isinstance(other, FlatMask) and self.mask.tolist() == other.mask.tolist()

    def __repr__(self):
        return f"FlatMask({self.mask.tolist()})"


class _Jagged:
    leaf_dtype: Any = None

    def __init__(self, values):
        if isinstance(values, Layout):
            self.layout = values
        else:
            from .builder import from_values

            self.layout = from_values(list(values))
        self.depth = self._check(self.layout)

    def _check(self, node):
        d = 0
        while isinstance(node, ListOffsetArray) and not is_string(node):
            d += 1
            node = node.content
        ok = isinstance(node, EmptyArray) or (
            isinstance(node, NumericArray) and node.data.dtype == self.leaf_dtype
        )
        if d < 1 or not ok:
            raise SelectorError(
                f"{type(self).__name__} needs uniformly nested lists of "
                f"{'integers' if self.leaf_dtype == np.int64 else 'booleans'}"
            )
        return d

    def __eq__(self, other):
        return type(self) is type(other) and self.layout == other.layout

    def __repr__(self):
        return f"{type(self).__name__}({_to_values(self.layout)})"


class JaggedIndex(_Jagged):
    leaf_dtype = np.dtype(np.int64)


class JaggedMask(_Jagged):
    leaf_dtype = np.dtype(np.bool_)


Selector = Field | At | Range | FlatIndex | FlatMask | JaggedIndex | JaggedMask
_SELECTOR_TYPES = (Field, At, Range, FlatIndex, FlatMask, JaggedIndex, JaggedMask)


def _nesting(value) -> int:
    d = 0
    while isinstance(value, (list, tuple)):
        d += 1
        value = next((v for v in value if isinstance(v, (list, tuple))), None)
    return d


def _leaves(value):
    if isinstance(value, (list, tuple)):
        for v in value:
            yield from _leaves(v)
    else:
        yield value


def to_selector(obj) -> Selector:
    """Convert a natural Python object to a selector.

    ``str`` -> Field, ``int`` -> At, ``slice`` -> Range, a flat list of
    integers or booleans -> FlatIndex or FlatMask, nested lists -> the
    jagged variants.
    """
    if isinstance(obj, _SELECTOR_TYPES):
        return obj
    if isinstance(obj, str):
        return Field(obj)
    if isinstance(obj, (bool, np.bool_)):
        raise SelectorError("a bare boolean is not a selector")
    if isinstance(obj, (int, np.integer)):
        return At(int(obj))
    if isinstance(obj, slice):
        return Range(obj.start, obj.stop, obj.step)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        leaves = list(_leaves(obj))
        is_mask = bool(leaves) and all(isinstance(v, bool) for v in leaves)
        if not is_mask and not all(isinstance(v, int) and not isinstance(v, bool) for v in leaves):
            raise SelectorError("array selectors hold only integers or only booleans")
        if _nesting(obj) <= 1:
            return FlatMask(obj) if is_mask else FlatIndex(obj)
        return JaggedMask(obj) if is_mask else JaggedIndex(obj)
    raise SelectorError(f"cannot use {type(obj).__name__} as a selector")


@dataclass(frozen=True)
class Element:
    """One element of a layout, produced when every dimension is consumed by ``At``."""

    layout: Layout
    index: int

    def to_value(self):
        return _to_values(take(self.layout, np.array([self.index], np.int64)))[0]


def _dims_consumed(sel) -> int:
    if isinstance(sel, (JaggedIndex, JaggedMask)):
        return sel.depth + 1
    return 1


def getitem(node: Layout, selectors=()) -> Layout | Element:
    """Apply a selector tuple to ``node``.

    Returns a layout, or an :class:`Element` when the outermost dimension
    was consumed by ``At`` and the element is not itself a list; use
    :func:`scalar_or_layout` to turn the latter into a plain value.
    """
    if not isinstance(selectors, tuple):
        selectors = (selectors,)
    sels = [to_selector(s) for s in selectors]
    for sel in sels:
        if isinstance(sel, Field):
            node = project_field(node, sel.name)
    positional = [s for s in sels if not isinstance(s, Field)]
    if not positional:
        return node

    if sum(isinstance(s, (FlatIndex, FlatMask)) for s in positional) > 1:
        raise SelectorError("at most one flat index or mask array per selection")
    for s in positional[1:]:
        if isinstance(s, (JaggedIndex, JaggedMask)):
            raise JaggedStructureMismatchError(
                "a jagged selector must be the first positional selector; "
                "jagged selectors are not broadcast across dimensions"
            )
    needed = sum(_dims_consumed(s) for s in positional)
    available = 1 + depth(type_of(node))
    if needed > available:
        raise TooManySelectorsError(needed - available)

    head = positional[0]
    if isinstance(head, (JaggedIndex, JaggedMask)):
        return _apply_jagged(node, head, positional[1:], ())
    wrapped = ListOffsetArray(np.array([0, len(node)], np.int64), node)
    result = _next(wrapped, positional, (), 0)
    if isinstance(head, At):
        return _element(result)
    return truncate(result.content, int(result.offsets[1]))


def _element(node):
    while True:
        if isinstance(node, IndexedOptionArray):
            i = int(node.index[0])
            if i < 0:
                return Element(node, 0)
            node = take(node.content, np.array([i], np.int64))
        elif isinstance(node, UnionArray):
            node = take(node.contents[int(node.tags[0])], np.array([int(node.index[0])], np.int64))
        elif isinstance(node, ListOffsetArray) and not is_string(node):
            start, stop = int(node.offsets[0]), int(node.offsets[1])
            if start == 0:
                return truncate(node.content, stop)
            return take(node.content, arange(start, stop))
        else:
            return Element(node, 0)


def scalar_or_layout(result):
    """Plain value for an :class:`Element`, the layout otherwise."""
    if isinstance(result, Element):
        return result.to_value()
    return result


def _count(fn, *args) -> int:
    out = np.empty(1, np.int64)
    fn(*args, out)
    return int(out[0])


def _sublist_length(offsets, i) -> int:
    return int(offsets[i + 1] - offsets[i])


def _position(i, dim):
    # the wrapper's single sublist is the whole array, not a user-visible sublist
    return None if dim == 0 else i


def _next(node, sels, path, dim):
    """Apply ``sels`` inside every element of ``node`` (an array of list-like elements)."""
    if not sels:
        return node
    head, tail = sels[0], sels[1:]
    if isinstance(node, EmptyArray):
        return node
    if isinstance(node, (NumericArray,)) or is_string(node):
        raise TooManySelectorsError(len(sels), path)
    if isinstance(node, RecordArray):
        n = len(node)
        fields = [
            (name, _next(truncate(content, n), sels, path + (f"[{name!r}]",), dim))
            for name, content in node.items()
        ]
        return RecordArray(fields, n, node.parameters)
    if isinstance(node, IndexedOptionArray):
        present = _count(kernels.k_count_nonnegative, node.index)
        if isinstance(head, At) and present < len(node):
            status = kernels.k_check_index(node.index, len(node.content), False)
            raise MissingValueError(path, status.position)
        nextcarry = np.empty(present, np.int64)
        positions = np.empty(present, np.int64)
        nextindex = np.empty(len(node), np.int64)
        kernels.k_option_compact(node.index, nextcarry, positions, nextindex)
        inner = _next(take(node.content, nextcarry), sels, path, dim)
        return IndexedOptionArray(nextindex, inner, node.parameters)
    if isinstance(node, UnionArray):
        contents = []
        for t, content in enumerate(node.contents):
            nextcarry, _ = _union_part(node, t)
            contents.append(_next(take(content, nextcarry), sels, path + (f".contents[{t}]",), dim))
        nextindex = np.empty(len(node), np.int64)
        kernels.k_union_reindex(node.tags, np.empty(len(node.contents), np.int64), nextindex)
        return UnionArray(node.tags, nextindex, contents, node.parameters)
    if isinstance(node, ListOffsetArray):
        return _next_list(node, head, tail, path, dim)
    raise TypeError(type(node).__name__)


def _union_part(node, t):
    n = _count(kernels.k_count_tag, node.tags, t)
    nextcarry = np.empty(n, np.int64)
    positions = np.empty(n, np.int64)
    kernels.k_union_select(node.tags, node.index, t, nextcarry, positions)
    return nextcarry, positions


def _next_list(node, head, tail, path, dim):
    offsets, content = node.offsets, node.content
    n = len(node)
    here = path + (f"[dim {dim}]",) if dim else path
    if isinstance(head, At):
        nextcarry = np.empty(n, np.int64)
        status = kernels.k_at_per_list(offsets, head.index, nextcarry)
        if not status:
            i = status.position
            raise IndexOutOfRangeError(head.index, _sublist_length(offsets, i), here, _position(i, dim))
        return _next(take(content, nextcarry), tail, path, dim + 1)
    if isinstance(head, Range):
        nextoffsets = np.empty(n + 1, np.int64)
        status = kernels.k_range_per_list(offsets, head.start, head.stop, head.step, nextoffsets)
        if not status:
            raise SelectorError(status.message)
        nextcarry = np.empty(nextoffsets[-1], np.int64)
        kernels.k_range_per_list(offsets, head.start, head.stop, head.step, nextoffsets, nextcarry)
        inner = _next(take(content, nextcarry), tail, path, dim + 1)
        return ListOffsetArray(nextoffsets, inner, node.parameters)
    if isinstance(head, FlatMask):
        m = len(head.mask)
        status = kernels.k_check_list_lengths(offsets, m)
        if not status:
            i = status.position
            raise MaskLengthMismatchError(_sublist_length(offsets, i), m, here, _position(i, dim))
        indices = np.empty(_count(kernels.k_count_nonzero, head.mask), np.int64)
        kernels.k_nonzero(head.mask, indices)
        head = FlatIndex(indices)
    if isinstance(head, FlatIndex):
        indices = head.indices
        nextoffsets = np.empty(n + 1, np.int64)
        nextcarry = np.empty(n * len(indices), np.int64)
        status = kernels.k_index_per_list(offsets, indices, nextoffsets, nextcarry)
        if not status:
            i = status.position
            length = _sublist_length(offsets, i)
            bad = next(j for j in indices.tolist() if not -length <= j < length)
            raise IndexOutOfRangeError(bad, length, here, _position(i, dim))
        inner = _next(take(content, nextcarry), tail, path, dim + 1)
        return ListOffsetArray(nextoffsets, inner, node.parameters)
    raise SelectorError(f"unsupported selector {head!r} here")


def _apply_jagged(node, sel, tail, path):
    """Apply a jagged selector whose outer dimension lines up with ``node``'s."""
    selector = sel.layout
    if len(selector) != len(node):
        raise JaggedStructureMismatchError(
            f"jagged selector has length {len(selector)} but the array has length {len(node)}", path
        )
    if isinstance(node, EmptyArray):
        return node
    if isinstance(node, RecordArray):
        n = len(node)
        fields = [
            (name, _apply_jagged(truncate(content, n), sel, tail, path + (f"[{name!r}]",)))
            for name, content in node.items()
        ]
        return RecordArray(fields, n, node.parameters)
    if isinstance(node, IndexedOptionArray):
        present = _count(kernels.k_count_nonnegative, node.index)
        nextcarry = np.empty(present, np.int64)
        positions = np.empty(present, np.int64)
        nextindex = np.empty(len(node), np.int64)
        kernels.k_option_compact(node.index, nextcarry, positions, nextindex)
        inner = _apply_jagged(take(node.content, nextcarry), _reselect(sel, take(selector, positions)), tail, path)
        return IndexedOptionArray(nextindex, inner, node.parameters)
    if isinstance(node, UnionArray):
        contents = []
        for t, content in enumerate(node.contents):
            nextcarry, positions = _union_part(node, t)
            contents.append(
                _apply_jagged(take(content, nextcarry), _reselect(sel, take(selector, positions)), tail,
                              path + (f".contents[{t}]",))
            )
        nextindex = np.empty(len(node), np.int64)
        kernels.k_union_reindex(node.tags, np.empty(len(node.contents), np.int64), nextindex)
        return UnionArray(node.tags, nextindex, contents, node.parameters)
    if not isinstance(node, ListOffsetArray) or is_string(node):
        raise TooManySelectorsError(1 + len(tail), path)

    # valid offsets start at zero, so equal offsets mean equal sublist lengths
    offsets = node.offsets
    inner_sel = selector.content
    if isinstance(inner_sel, ListOffsetArray) and not is_string(inner_sel):
        _require_same_offsets(offsets, selector.offsets, path)
        total = int(offsets[-1])
        inner = _apply_jagged(
            truncate(node.content, total), _reselect(sel, truncate(inner_sel, total)), tail,
            path + ("[dim 1]",),
        )
        return ListOffsetArray(offsets, inner, node.parameters)

    if isinstance(sel, JaggedMask):
        _require_same_offsets(offsets, selector.offsets, path)
        if isinstance(inner_sel, EmptyArray):
            mask = np.zeros(0, np.bool_)
        else:
            mask = inner_sel.data[: int(offsets[-1])]
        nextoffsets = np.empty(len(offsets), np.int64)
        kernels.k_mask_offsets(selector.offsets, mask, nextoffsets)
        nextcarry = np.empty(int(nextoffsets[-1]), np.int64)
        kernels.k_nonzero(mask, nextcarry)
    else:
        index = np.zeros(0, np.int64) if isinstance(inner_sel, EmptyArray) else inner_sel.data
        sel_offsets = selector.offsets
        nextcarry = np.empty(int(sel_offsets[-1] - sel_offsets[0]), np.int64)
        status = kernels.k_jagged_index(offsets, sel_offsets, index, nextcarry)
        if not status:
            i = status.position
            length = _sublist_length(offsets, i)
            bad = next(j for j in index[sel_offsets[i]:sel_offsets[i + 1]].tolist() if not -length <= j < length)
            raise IndexOutOfRangeError(bad, length, path + ("[dim 1]",), i)
        nextoffsets = sel_offsets
    inner = _next(take(node.content, nextcarry), tail, path, 2)
    return ListOffsetArray(nextoffsets, inner, node.parameters)


def _reselect(sel, layout):
    out = object.__new__(type(sel))
    out.layout = layout
    out.depth = sel.depth
    return out


def _require_same_offsets(offsets, sel_offsets, path):
    status = kernels.k_equal(offsets, sel_offsets)
    if not status:
        raise JaggedStructureMismatchError(
            f"jagged selector sublist {status.position - 1} does not match the array's sublist length",
            path, max(status.position - 1, 0),
        )


def select(node: Layout, *selectors):
    """``scalar_or_layout(getitem(node, selectors))``."""
    return scalar_or_layout(getitem(node, tuple(selectors)))
