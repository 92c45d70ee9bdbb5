"""Flat-buffer kernels.

Every loop whose trip count scales with the number of array elements lives
in this module.  Kernels take read-only input buffers and scalars plus
caller-allocated output buffers; they never allocate, never read past the
declared lengths, fill outputs left to right and report failures through a
:class:`KernelStatus` rather than by raising.

Kernels whose output size depends on the data follow a two-pass contract:
a counting call (output buffer argument ``None`` or a one-element count
buffer) followed by a filling call.

The public ``k_*`` functions check buffer shapes and dtypes (scalar work
only) and dispatch to a jitted core.  Cores return ``-1`` on success or the
position of the first offending element.  The full reference for names,
argument order and semantics is ``docs/kernels.md``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

OK = "ok"
ERROR = "error"


@dataclass(frozen=True)
class KernelStatus:
    code: str = OK
    message: str = ""
    position: int = -1

    @property
    def ok(self) -> bool:
        return self.code == OK

    def __bool__(self) -> bool:
        return self.ok


SUCCESS = KernelStatus()


def _error(message, position=-1) -> KernelStatus:
    return KernelStatus(ERROR, message, int(position))


def _status(position, message) -> KernelStatus:
    if position < 0:
        return SUCCESS
    return _error(message, position)


def _require(buf, dtype, name, length=None):
    if not isinstance(buf, np.ndarray) or buf.ndim != 1:
        raise TypeError(f"{name} must be a one-dimensional numpy array")
    if dtype is not None and buf.dtype != dtype:
        raise TypeError(f"{name} must have dtype {np.dtype(dtype)}, not {buf.dtype}")
    if length is not None and len(buf) != length:
        raise ValueError(f"{name} must have length {length}, not {len(buf)}")


_jit = numba.njit(cache=True, nogil=True)

I64 = np.dtype(np.int64)
F64 = np.dtype(np.float64)
I8 = np.dtype(np.int8)
BOOL = np.dtype(np.bool_)

UNARY_OPS = {"sin": 0, "negate": 1, "abs": 2, "identity": 3}
BINARY_OPS = {"add": 0, "multiply": 1}


# -- list structure ----------------------------------------------------------


@_jit
def _list_lengths(offsets, lengths):
    for i in range(lengths.shape[0]):
        d = offsets[i + 1] - offsets[i]
        if d < 0:
            return i
        lengths[i] = d
    return -1


def k_list_lengths(offsets, lengths) -> KernelStatus:
    """lengths[i] = offsets[i+1] - offsets[i]; error at the first decreasing step."""
    _require(offsets, I64, "offsets")
    _require(lengths, I64, "lengths", max(len(offsets) - 1, 0))
    if len(offsets) == 0:
        return _error("offsets must have at least one entry", 0)
    return _status(_list_lengths(offsets, lengths), "offsets not non-decreasing")


@_jit
def _carry_list_count(offsets, carry, nextoffsets):
    n = offsets.shape[0] - 1
    nextoffsets[0] = 0
    for j in range(carry.shape[0]):
        c = carry[j]
        if c < 0 or c >= n:
            return j
        nextoffsets[j + 1] = nextoffsets[j] + offsets[c + 1] - offsets[c]
    return -1


@_jit
def _carry_list_fill(offsets, carry, nextoffsets, nextcarry):
    n = offsets.shape[0] - 1
    nextoffsets[0] = 0
    k = 0
    for j in range(carry.shape[0]):
        c = carry[j]
        if c < 0 or c >= n:
            return j
        for p in range(offsets[c], offsets[c + 1]):
            nextcarry[k] = p
            k += 1
        nextoffsets[j + 1] = k
    return -1


def k_carry_list(offsets, carry, nextoffsets, nextcarry=None) -> KernelStatus:
    """Select sublists ``carry`` of a list node.

    ``nextoffsets`` receives the compacted offsets of the selected sublists
    (so ``nextoffsets[-1]`` is the total); with ``nextcarry=None`` only the
    offsets are computed (counting pass).  ``nextcarry`` lists the content
    positions of every selected element, in order.
    """
    _require(offsets, I64, "offsets")
    _require(carry, I64, "carry")
    _require(nextoffsets, I64, "nextoffsets", len(carry) + 1)
    pos = _carry_list_count(offsets, carry, nextoffsets)
    if pos >= 0 or nextcarry is None:
        return _status(pos, "carry index out of range")
    _require(nextcarry, I64, "nextcarry")
    if nextoffsets[-1] != len(nextcarry):
        return _error("nextcarry length does not match selected total")
    return _status(_carry_list_fill(offsets, carry, nextoffsets, nextcarry), "carry index out of range")


@_jit
def _normalize_range(length, start, stop, step, has_start, has_stop):
    # Python slice semantics for one sublist of the given length.
    if step > 0:
        lo, hi = 0, length
    else:
        lo, hi = -1, length - 1
    if not has_start:
        a = lo if step > 0 else hi
    else:
        a = start
        if a < 0:
            a += length
            a = max(a, lo)
        elif a > hi:
            a = hi
    if not has_stop:
        b = hi if step > 0 else lo
    else:
        b = stop
        if b < 0:
            b += length
            b = max(b, lo)
        elif b > hi:
            b = hi
    if step > 0:
        count = (b - a + step - 1) // step if b > a else 0
    else:
        count = (a - b + (-step) - 1) // (-step) if a > b else 0
    return a, count


@_jit
def _range_per_list(offsets, start, stop, step, has_start, has_stop, nextoffsets, nextcarry, fill):
    nextoffsets[0] = 0
    k = 0
    for i in range(offsets.shape[0] - 1):
        length = offsets[i + 1] - offsets[i]
        a, count = _normalize_range(length, start, stop, step, has_start, has_stop)
        if fill:
            for t in range(count):
                nextcarry[k + t] = offsets[i] + a + t * step
        k += count
        nextoffsets[i + 1] = k
    return -1


def k_range_per_list(offsets, start, stop, step, nextoffsets, nextcarry=None) -> KernelStatus:
    """Apply ``start:stop:step`` to every sublist.

    ``start``/``stop`` may be ``None``; negative values count from the end of
    each sublist and out-of-range values are clamped.  Counting pass when
    ``nextcarry`` is ``None``; the total is ``nextoffsets[-1]``.
    """
    _require(offsets, I64, "offsets")
    _require(nextoffsets, I64, "nextoffsets", len(offsets))
    step = 1 if step is None else int(step)
    if step == 0:
        return _error("slice step cannot be zero")
    args = (offsets, _i(start), _i(stop), step, start is not None, stop is not None, nextoffsets)
    _range_per_list(*args, nextoffsets, False)
    if nextcarry is None:
        return SUCCESS
    _require(nextcarry, I64, "nextcarry")
    if nextoffsets[-1] != len(nextcarry):
        return _error("nextcarry length does not match selected total")
    _range_per_list(*args, nextcarry, True)
    return SUCCESS


def _i(v):
    return 0 if v is None else int(v)


@_jit
def _at_per_list(offsets, at, nextcarry):
    for i in range(offsets.shape[0] - 1):
        length = offsets[i + 1] - offsets[i]
        j = at + length if at < 0 else at
        if j < 0 or j >= length:
            return i
        nextcarry[i] = offsets[i] + j
    return -1


def k_at_per_list(offsets, at, nextcarry) -> KernelStatus:
    """nextcarry[i] = content position of element ``at`` of sublist i."""
    _require(offsets, I64, "offsets")
    _require(nextcarry, I64, "nextcarry", len(offsets) - 1)
    return _status(_at_per_list(offsets, int(at), nextcarry), "index out of range in sublist")


@_jit
def _index_per_list(offsets, indices, nextoffsets, nextcarry):
    m = indices.shape[0]
    nextoffsets[0] = 0
    k = 0
    for i in range(offsets.shape[0] - 1):
        length = offsets[i + 1] - offsets[i]
        for t in range(m):
            j = indices[t]
            if j < 0:
                j += length
            if j < 0 or j >= length:
                return i
            nextcarry[k] = offsets[i] + j
            k += 1
        nextoffsets[i + 1] = k
    return -1


def k_index_per_list(offsets, indices, nextoffsets, nextcarry) -> KernelStatus:
    """Select the same ``indices`` from every sublist (negative counts from the end)."""
    _require(offsets, I64, "offsets")
    _require(indices, I64, "indices")
    n = len(offsets) - 1
    _require(nextoffsets, I64, "nextoffsets", n + 1)
    _require(nextcarry, I64, "nextcarry", n * len(indices))
    return _status(_index_per_list(offsets, indices, nextoffsets, nextcarry),
                   "index out of range in sublist")


@_jit
def _check_list_lengths(offsets, expected):
    for i in range(offsets.shape[0] - 1):
        if offsets[i + 1] - offsets[i] != expected:
            return i
    return -1


def k_check_list_lengths(offsets, expected) -> KernelStatus:
    """Error at the first sublist whose length differs from ``expected``."""
    _require(offsets, I64, "offsets")
    return _status(_check_list_lengths(offsets, int(expected)), "sublist length mismatch")


@_jit
def _jagged_index(offsets, seloffsets, selindex, nextcarry):
    for i in range(offsets.shape[0] - 1):
        length = offsets[i + 1] - offsets[i]
        for p in range(seloffsets[i], seloffsets[i + 1]):
            j = selindex[p]
            if j < 0:
                j += length
            if j < 0 or j >= length:
                return i
            nextcarry[p - seloffsets[0]] = offsets[i] + j
    return -1


def k_jagged_index(offsets, seloffsets, selindex, nextcarry) -> KernelStatus:
    """Per sublist i, select the elements listed in ``selindex[seloffsets[i]:seloffsets[i+1]]``."""
    _require(offsets, I64, "offsets")
    _require(seloffsets, I64, "seloffsets", len(offsets))
    _require(selindex, I64, "selindex")
    _require(nextcarry, I64, "nextcarry", int(seloffsets[-1] - seloffsets[0]))
    return _status(_jagged_index(offsets, seloffsets, selindex, nextcarry),
                   "jagged index out of range in sublist")


@_jit
def _mask_offsets(seloffsets, mask, nextoffsets):
    nextoffsets[0] = 0
    k = 0
    for i in range(seloffsets.shape[0] - 1):
        for p in range(seloffsets[i], seloffsets[i + 1]):
            if mask[p]:
                k += 1
        nextoffsets[i + 1] = k
    return -1


def k_mask_offsets(seloffsets, mask, nextoffsets) -> KernelStatus:
    """nextoffsets of the true entries of a jagged boolean mask."""
    _require(seloffsets, I64, "seloffsets")
    _require(mask, BOOL, "mask")
    _require(nextoffsets, I64, "nextoffsets", len(seloffsets))
    _mask_offsets(seloffsets, mask, nextoffsets)
    return SUCCESS


# -- flat selection ----------------------------------------------------------


@_jit
def _count_nonzero(mask):
    k = 0
    for i in range(mask.shape[0]):
        if mask[i]:
            k += 1
    return k


def k_count_nonzero(mask, count) -> KernelStatus:
    """Counting pass for :func:`k_nonzero`: count[0] = number of true entries."""
    _require(mask, BOOL, "mask")
    _require(count, I64, "count", 1)
    count[0] = _count_nonzero(mask)
    return SUCCESS


@_jit
def _nonzero(mask, indices):
    k = 0
    for i in range(mask.shape[0]):
        if mask[i]:
            if k >= indices.shape[0]:
                return i
            indices[k] = i
            k += 1
    if k != indices.shape[0]:
        return mask.shape[0]
    return -1


def k_nonzero(mask, indices) -> KernelStatus:
    """indices = ascending positions of the true entries of ``mask``."""
    _require(mask, BOOL, "mask")
    _require(indices, I64, "indices")
    return _status(_nonzero(mask, indices), "indices length does not match true count")


@_jit
def _gather(values, indices, out):
    n = values.shape[0]
    for j in range(indices.shape[0]):
        i = indices[j]
        if i < 0 or i >= n:
            return j
        out[j] = values[i]
    return -1


def k_gather(values, indices, out) -> KernelStatus:
    """out[j] = values[indices[j]]."""
    _require(values, None, "values")
    _require(indices, I64, "indices")
    _require(out, values.dtype, "out", len(indices))
    return _status(_gather(values, indices, out), "gather index out of range")


@_jit
def _iota(start, out):
    for i in range(out.shape[0]):
        out[i] = start + i
    return -1


def k_iota(start, out) -> KernelStatus:
    """out[i] = start + i."""
    _require(out, I64, "out")
    _iota(int(start), out)
    return SUCCESS


@_jit
def _equal(a, b):
    for i in range(a.shape[0]):
        if a[i] != b[i]:
            return i
    return -1


def k_equal(a, b) -> KernelStatus:
    """Error at the first position where two equal-length buffers differ."""
    _require(a, None, "a")
    _require(b, a.dtype, "b", len(a))
    return _status(_equal(a, b), "buffers differ")


# -- options and unions -------------------------------------------------------


@_jit
def _count_nonnegative(index):
    k = 0
    for i in range(index.shape[0]):
        if index[i] >= 0:
            k += 1
    return k


def k_count_nonnegative(index, count) -> KernelStatus:
    """count[0] = number of present (non-negative) entries of an option index."""
    _require(index, I64, "index")
    _require(count, I64, "count", 1)
    count[0] = _count_nonnegative(index)
    return SUCCESS


@_jit
def _option_compact(index, nextcarry, positions, nextindex):
    k = 0
    for i in range(index.shape[0]):
        if index[i] >= 0:
            nextcarry[k] = index[i]
            positions[k] = i
            nextindex[i] = k
            k += 1
        else:
            nextindex[i] = -1
    return -1


def k_option_compact(index, nextcarry, positions, nextindex) -> KernelStatus:
    """Split an option index into present content positions and a dense new index.

    ``nextcarry``/``positions`` have length = present count (see
    :func:`k_count_nonnegative`); ``nextindex[i]`` is -1 for missing entries
    and the running present count otherwise.
    """
    _require(index, I64, "index")
    _require(nextcarry, I64, "nextcarry")
    _require(positions, I64, "positions", len(nextcarry))
    _require(nextindex, I64, "nextindex", len(index))
    if _count_nonnegative(index) != len(nextcarry):
        return _error("nextcarry length does not match present count")
    _option_compact(index, nextcarry, positions, nextindex)
    return SUCCESS


@_jit
def _count_tag(tags, which):
    k = 0
    for i in range(tags.shape[0]):
        if tags[i] == which:
            k += 1
    return k


def k_count_tag(tags, which, count) -> KernelStatus:
    """count[0] = number of entries with tag ``which``."""
    _require(tags, I8, "tags")
    _require(count, I64, "count", 1)
    count[0] = _count_tag(tags, which)
    return SUCCESS


@_jit
def _union_select(tags, index, which, nextcarry, positions):
    k = 0
    for i in range(tags.shape[0]):
        if tags[i] == which:
            nextcarry[k] = index[i]
            positions[k] = i
            k += 1
    return -1


def k_union_select(tags, index, which, nextcarry, positions) -> KernelStatus:
    """Content positions (``nextcarry``) and outer positions of the entries tagged ``which``."""
    _require(tags, I8, "tags")
    _require(index, I64, "index", len(tags))
    _require(nextcarry, I64, "nextcarry")
    _require(positions, I64, "positions", len(nextcarry))
    if _count_tag(tags, which) != len(nextcarry):
        return _error("nextcarry length does not match tag count")
    _union_select(tags, index, which, nextcarry, positions)
    return SUCCESS


@_jit
def _union_reindex(tags, counters, nextindex):
    for t in range(counters.shape[0]):
        counters[t] = 0
    for i in range(tags.shape[0]):
        t = tags[i]
        if t < 0 or t >= counters.shape[0]:
            return i
        nextindex[i] = counters[t]
        counters[t] += 1
    return -1


def k_union_reindex(tags, counters, nextindex) -> KernelStatus:
    """nextindex[i] = number of earlier entries sharing tags[i]; ``counters`` is scratch, one per content."""
    _require(tags, I8, "tags")
    _require(counters, I64, "counters")
    _require(nextindex, I64, "nextindex", len(tags))
    return _status(_union_reindex(tags, counters, nextindex), "tag out of range")


@_jit
def _check_union(tags, index, lengths):
    for i in range(tags.shape[0]):
        t = tags[i]
        if t < 0 or t >= lengths.shape[0]:
            return 1, i
        if index[i] < 0 or index[i] >= lengths[t]:
            return 2, i
    return 0, -1


def k_check_union(tags, index, lengths) -> KernelStatus:
    """Validate union tags against the number of contents and index against content lengths."""
    _require(tags, I8, "tags")
    _require(index, I64, "index", len(tags))
    _require(lengths, I64, "lengths")
    code, pos = _check_union(tags, index, lengths)
    if code == 1:
        return _error("tag out of range", pos)
    if code == 2:
        return _error("index out of range for selected content", pos)
    return SUCCESS


@_jit
def _check_index(index, length, allow_missing):
    for i in range(index.shape[0]):
        j = index[i]
        if j < 0:
            if not (allow_missing and j == -1):
                return i
        elif j >= length:
            return i
    return -1


def k_check_index(index, length, allow_missing) -> KernelStatus:
    """Every entry in [0, length), or -1 when ``allow_missing``."""
    _require(index, I64, "index")
    return _status(_check_index(index, int(length), bool(allow_missing)), "index out of range")


# -- numeric ------------------------------------------------------------------


@_jit
def _int64_to_float64(src, out):
    for i in range(src.shape[0]):
        out[i] = src[i]
    return -1


def k_int64_to_float64(src, out) -> KernelStatus:
    """Exact widening (round to nearest for magnitudes above 2**53)."""
    _require(src, I64, "src")
    _require(out, F64, "out", len(src))
    _int64_to_float64(src, out)
    return SUCCESS


@_jit
def _map_unary(op, src, out):
    for i in range(src.shape[0]):
        x = np.float64(src[i])
        if op == 0:
            out[i] = math.sin(x)
        elif op == 1:
            out[i] = -x
        elif op == 2:
            out[i] = abs(x)
        else:
            out[i] = x
    return -1


def k_map_unary(op, src, out) -> KernelStatus:
    """out[i] = op(src[i]) for op in sin, negate, abs, identity; integers widen first."""
    code = UNARY_OPS.get(op)
    if code is None:
        return _error(f"unknown unary op {op!r}")
    _require(src, None, "src")
    _require(out, F64, "out", len(src))
    _map_unary(code, src, out)
    return SUCCESS


@_jit
def _map_binary(op, left, right, out):
    for i in range(out.shape[0]):
        if op == 0:
            out[i] = left[i] + right[i]
        else:
            out[i] = left[i] * right[i]
    return -1


@_jit
def _map_binary_scalar(op, left, right, out):
    for i in range(out.shape[0]):
        if op == 0:
            out[i] = left[i] + right
        else:
            out[i] = left[i] * right
    return -1


def k_map_binary(op, left, right, out) -> KernelStatus:
    """out[i] = left[i] op right[i]; ``right`` may be a scalar broadcast to every element.

    ``out`` is int64 only when both operands are int64, float64 otherwise.
    """
    code = BINARY_OPS.get(op)
    if code is None:
        return _error(f"unknown binary op {op!r}")
    _require(left, None, "left")
    _require(out, None, "out", len(left))
    if isinstance(right, np.ndarray):
        _require(right, None, "right", len(left))
        _map_binary(code, left, right, out)
    else:
        _map_binary_scalar(code, left, right, out)
    return SUCCESS


# -- numbers-only JSON scanner ---------------------------------------------------

# scanner result codes
SCAN_OK = 0
SCAN_PARSE = 1
SCAN_DEVIATION = 2
SCAN_OVERFLOW = 3

_I64_TENTH = 922337203685477580


@_jit
def _is_ws(c):
    return c == 32 or c == 9 or c == 10 or c == 13


@_jit
def _lex_number(data, i, n):
    # Returns (end, is_real, value, status); status 0 ok, 1 malformed, 3 overflow.
    neg = False
    if data[i] == 45:
        neg = True
        i += 1
        if i >= n:
            return i, False, 0, 1
    c = data[i]
    if c < 48 or c > 57:
        return i, False, 0, 1
    value = 0
    digits = 0
    overflow = False
    if c == 48:
        i += 1
        digits = 1
    else:
        while i < n and 48 <= data[i] <= 57:
            d = data[i] - 48
            if digits < 18:
                value = value * 10 + d
            elif digits == 18:
                if value > _I64_TENTH or (value == _I64_TENTH and d > (8 if neg else 7)):
                    overflow = True
                elif neg:
                    value = -value * 10 - d
                    neg = False
                else:
                    value = value * 10 + d
            else:
                overflow = True
            digits += 1
            i += 1
    is_real = False
    if i < n and data[i] == 46:
        is_real = True
        i += 1
        if i >= n or not (48 <= data[i] <= 57):
            return i, True, 0, 1
        while i < n and 48 <= data[i] <= 57:
            i += 1
    if i < n and (data[i] == 101 or data[i] == 69):
        is_real = True
        i += 1
        if i < n and (data[i] == 43 or data[i] == 45):
            i += 1
        if i >= n or not (48 <= data[i] <= 57):
            return i, True, 0, 1
        while i < n and 48 <= data[i] <= 57:
            i += 1
    if neg:
        value = -value
    if overflow and not is_real:
        return i, False, 0, 3
    return i, is_real, value, 0


@_jit
def _scan_numbers(data, depth, counts, info, flat_offsets, bases, values, fill):
    # counts[L-1]: number of elements at nesting level L (1..depth).
    # info: [has_real, error_offset]
    n = data.shape[0]
    i = 0
    while i < n and _is_ws(data[i]):
        i += 1
    if i >= n:
        info[1] = i
        return SCAN_PARSE
    if data[i] != 91:
        info[1] = i
        c = data[i]
        if c == 123 or c == 34 or c == 116 or c == 102 or c == 110 or c == 45 or (48 <= c <= 57):
            return SCAN_DEVIATION
        return SCAN_PARSE
    for L in range(depth):
        counts[L] = 0
    info[0] = 0
    level = 1
    expect_value = True   # just after '[' or ','
    after_open = True     # just after '[': ']' allowed
    i += 1
    while True:
        while i < n and _is_ws(data[i]):
            i += 1
        if i >= n:
            info[1] = n
            return SCAN_PARSE
        c = data[i]
        if c == 93:  # ']'
            if expect_value and not after_open:
                info[1] = i
                return SCAN_PARSE
            level -= 1
            i += 1
            if level == 0:
                break
            if fill:
                # closing a list at nesting level `level`; its children sit at level+1
                flat_offsets[bases[level - 1] + counts[level - 1]] = counts[level]
            expect_value = False
            after_open = False
            continue
        if c == 44:  # ','
            if expect_value:
                info[1] = i
                return SCAN_PARSE
            expect_value = True
            after_open = False
            i += 1
            continue
        if not expect_value:
            info[1] = i
            return SCAN_PARSE
        if c == 91:  # '['
            if level >= depth:
                info[1] = i
                return SCAN_DEVIATION
            counts[level - 1] += 1
            level += 1
            expect_value = True
            after_open = True
            i += 1
            continue
        if c == 45 or (48 <= c <= 57):
            if level != depth:
                info[1] = i
                return SCAN_DEVIATION
            end, is_real, value, st = _lex_number(data, i, n)
            if st == 1:
                info[1] = end
                return SCAN_PARSE
            if st == 3:
                info[1] = i
                return SCAN_OVERFLOW
            if is_real:
                info[0] = 1
            if fill:
                values[counts[depth - 1]] = value
            counts[depth - 1] += 1
            i = end
            expect_value = False
            after_open = False
            continue
        info[1] = i
        if c == 123 or c == 34 or c == 116 or c == 102 or c == 110:
            return SCAN_DEVIATION
        return SCAN_PARSE
    while i < n and _is_ws(data[i]):
        i += 1
    if i < n:
        info[1] = i
        return SCAN_PARSE
    return SCAN_OK


def k_scan_numbers_json(data, depth, counts, info, flat_offsets=None, bases=None, values=None):
    """Scan JSON text that is exclusively ``depth`` levels of arrays around numbers.

    Counting pass (``flat_offsets`` is ``None``): validates the grammar and
    nesting, fills ``counts[L-1]`` with the number of elements at nesting
    level L and ``info[0]`` with 1 if any literal is lexically real.

    Filling pass: for each level L < depth, the offsets of the lists at level
    L are written to ``flat_offsets[bases[L-1] + 1 : bases[L-1] + counts[L-1] + 1]``
    (the leading zero is the caller's) and integer literals are parsed into
    ``values``.

    The status code is one of SCAN_OK, SCAN_PARSE, SCAN_DEVIATION and
    SCAN_OVERFLOW; the position is the byte offset of the problem.
    """
    _require(data, np.dtype(np.uint8), "data")
    _require(counts, I64, "counts", depth)
    _require(info, I64, "info", 2)
    if depth < 1:
        return _error("depth must be positive")
    if flat_offsets is None:
        # unused placeholders of the right type
        code = _scan_numbers(data, depth, counts, info, counts, counts, counts, False)
    else:
        _require(flat_offsets, I64, "flat_offsets")
        _require(bases, I64, "bases", depth)
        _require(values, I64, "values")
        code = _scan_numbers(data, depth, counts, info, flat_offsets, bases, values, True)
    if code == SCAN_OK:
        return SUCCESS
    messages = {SCAN_PARSE: "parse-error", SCAN_DEVIATION: "structure-deviation",
                SCAN_OVERFLOW: "integer-overflow"}
    return _error(messages[code], info[1])


# -- JSON tokenizer ---------------------------------------------------------------

# token kinds, one per builder event
(TOK_BEGIN_LIST, TOK_END_LIST, TOK_BEGIN_RECORD, TOK_END_RECORD, TOK_KEY,
 TOK_STRING, TOK_INT, TOK_FLOAT, TOK_BOOL, TOK_NULL) = range(10)

# grammar states
(JT_VALUE, JT_VALUE_OR_CLOSE, JT_COMMA_OR_CLOSE, JT_KEY_OR_CLOSE, JT_KEY,
 JT_COLON, JT_TOP, JT_DONE) = range(8)

# tokenizer result codes
(JT_OK, JT_UNEXPECTED, JT_END, JT_DEPTH, JT_OVERFLOW, JT_NOT_ARRAY,
 JT_TRAILING, JT_BAD_STRING, JT_BAD_NUMBER, JT_BAD_CHAR) = range(10)

JT_MESSAGES = {
    JT_UNEXPECTED: "unexpected token",
    JT_END: "unexpected end of input",
    JT_DEPTH: "nesting depth limit exceeded",
    JT_OVERFLOW: "integer-overflow",
    JT_NOT_ARRAY: "top-level value must be an array",
    JT_TRAILING: "unexpected data after the top-level array",
    JT_BAD_STRING: "unterminated or invalid string",
    JT_BAD_NUMBER: "malformed number",
    JT_BAD_CHAR: "invalid character",
}

# slots of the tokenizer's `info` buffer
JT_INFO_STATE, JT_INFO_DEPTH, JT_INFO_CONSUMED, JT_INFO_TOKENS, JT_INFO_REALTEXT, JT_INFO_CODE, JT_INFO_POS = range(7)

_TRUE = np.frombuffer(b"true", np.uint8)
_FALSE = np.frombuffer(b"false", np.uint8)
_NULL = np.frombuffer(b"null", np.uint8)


@_jit
def _string_end(data, i, n):
    # i is at the opening quote; returns the index after the closing quote,
    # -1 if the data ends first, or -2 - p for an invalid byte at p
    i += 1
    while i < n:
        c = data[i]
        if c == 34:
            return i + 1
        if c == 92:
            if i + 1 >= n:
                return -1
            e = data[i + 1]
            if e == 117:
                if i + 5 >= n:
                    return -1
                for k in range(i + 2, i + 6):
                    h = data[k]
                    if not (48 <= h <= 57 or 65 <= h <= 70 or 97 <= h <= 102):
                        return -2 - k
                i += 6
                continue
            if e == 34 or e == 92 or e == 47 or e == 98 or e == 102 or e == 110 or e == 114 or e == 116:
                i += 2
                continue
            return -2 - (i + 1)
        if c < 32:
            return -2 - i
        i += 1
    return -1


@_jit
def _literal_at(data, i, n, lit):
    # 1 match, 0 mismatch, -1 data ends first
    for k in range(lit.shape[0]):
        if i + k >= n:
            return -1
        if data[i + k] != lit[k]:
            return 0
    return 1


@_jit
def _misplaced_code(state):
    if state == JT_TOP:
        return JT_NOT_ARRAY
    if state == JT_DONE:
        return JT_TRAILING
    return JT_UNEXPECTED


@_jit
def _json_tokens(data, eof, ndjson, stack, info, kinds, starts, ends, ivals, realtext, lit_true, lit_false, lit_null):
    n = data.shape[0]
    state = info[JT_INFO_STATE]
    depth = info[JT_INFO_DEPTH]
    depth_limit = stack.shape[0]
    outer = 0 if ndjson else 1
    ntok = 0
    nreal = 0
    code = JT_OK
    errpos = -1
    i = 0
    consumed = 0
    while True:
        while i < n and _is_ws(data[i]):
            i += 1
        consumed = i
        if i >= n:
            break
        c = data[i]
        value_pos = state == JT_VALUE or state == JT_VALUE_OR_CLOSE or (state == JT_TOP and ndjson)
        if c == 91 or c == 123:
            if not (value_pos or (state == JT_TOP and c == 91)):
                code = _misplaced_code(state)
                errpos = i
                break
            if depth >= depth_limit:
                code = JT_DEPTH
                errpos = i
                break
            if depth >= outer:
                kinds[ntok] = TOK_BEGIN_LIST if c == 91 else TOK_BEGIN_RECORD
                starts[ntok] = i
                ends[ntok] = i + 1
                ntok += 1
            stack[depth] = c
            depth += 1
            state = JT_VALUE_OR_CLOSE if c == 91 else JT_KEY_OR_CLOSE
            i += 1
            continue
        if c == 93 or c == 125:
            if depth == 0 or stack[depth - 1] != c - 2:
                code = JT_TRAILING if state == JT_DONE else JT_UNEXPECTED
                errpos = i
                break
            if c == 93 and not (state == JT_VALUE_OR_CLOSE or state == JT_COMMA_OR_CLOSE):
                code = JT_UNEXPECTED
                errpos = i
                break
            if c == 125 and not (state == JT_KEY_OR_CLOSE or state == JT_COMMA_OR_CLOSE):
                code = JT_UNEXPECTED
                errpos = i
                break
            depth -= 1
            if depth >= outer:
                kinds[ntok] = TOK_END_LIST if c == 93 else TOK_END_RECORD
                starts[ntok] = i
                ends[ntok] = i + 1
                ntok += 1
            if depth > 0:
                state = JT_COMMA_OR_CLOSE
            elif ndjson:
                state = JT_TOP
            else:
                state = JT_DONE
            i += 1
            continue
        if c == 44:
            if state != JT_COMMA_OR_CLOSE:
                code = JT_UNEXPECTED
                errpos = i
                break
            state = JT_VALUE if stack[depth - 1] == 91 else JT_KEY
            i += 1
            continue
        if c == 58:
            if state != JT_COLON:
                code = JT_UNEXPECTED
                errpos = i
                break
            state = JT_VALUE
            i += 1
            continue
        if c == 34:
            end = _string_end(data, i, n)
            if end == -1:
                if not eof:
                    break
                code = JT_BAD_STRING
                errpos = i
                break
            if end < -1:
                code = JT_BAD_STRING
                errpos = -2 - end
                break
            if state == JT_KEY or state == JT_KEY_OR_CLOSE:
                kinds[ntok] = TOK_KEY
                state = JT_COLON
            elif value_pos:
                kinds[ntok] = TOK_STRING
                state = JT_COMMA_OR_CLOSE if depth > 0 else JT_TOP
            else:
                code = _misplaced_code(state)
                errpos = i
                break
            starts[ntok] = i
            ends[ntok] = end
            ntok += 1
            i = end
            continue
        if c == 45 or (48 <= c <= 57):
            end, is_real, value, st = _lex_number(data, i, n)
            if end >= n and not eof:
                # the literal may continue in the next chunk
                break
            if not value_pos:
                code = _misplaced_code(state)
                errpos = i
                break
            if st == 1:
                code = JT_BAD_NUMBER
                errpos = end
                break
            if st == 3:
                code = JT_OVERFLOW
                errpos = i
                break
            if is_real:
                kinds[ntok] = TOK_FLOAT
                for k in range(i, end):
                    realtext[nreal] = data[k]
                    nreal += 1
                realtext[nreal] = 32
                nreal += 1
            else:
                kinds[ntok] = TOK_INT
                ivals[ntok] = value
            starts[ntok] = i
            ends[ntok] = end
            ntok += 1
            state = JT_COMMA_OR_CLOSE if depth > 0 else JT_TOP
            i = end
            continue
        if c == 116 or c == 102 or c == 110:
            lit = lit_true if c == 116 else (lit_false if c == 102 else lit_null)
            m = _literal_at(data, i, n, lit)
            if m == -1 and not eof:
                break
            if m == -1:
                code = JT_END
                errpos = n
                break
            if m != 1:
                code = JT_BAD_CHAR
                errpos = i
                break
            if not value_pos:
                code = _misplaced_code(state)
                errpos = i
                break
            if c == 110:
                kinds[ntok] = TOK_NULL
            else:
                kinds[ntok] = TOK_BOOL
                ivals[ntok] = 1 if c == 116 else 0
            starts[ntok] = i
            ends[ntok] = i + lit.shape[0]
            ntok += 1
            state = JT_COMMA_OR_CLOSE if depth > 0 else JT_TOP
            i += lit.shape[0]
            continue
        code = JT_TRAILING if state == JT_DONE else JT_BAD_CHAR
        errpos = i
        break
    if code == JT_OK and eof and (depth > 0 or (state == JT_TOP and not ndjson)):
        code = JT_END
        errpos = n
    info[JT_INFO_STATE] = state
    info[JT_INFO_DEPTH] = depth
    info[JT_INFO_CONSUMED] = consumed
    info[JT_INFO_TOKENS] = ntok
    info[JT_INFO_REALTEXT] = nreal
    info[JT_INFO_CODE] = code
    info[JT_INFO_POS] = errpos
    return code


def k_json_tokens(data, eof, ndjson, stack, info, kinds, starts, ends, ivals, realtext) -> KernelStatus:
    """Tokenize and grammar-check one window of JSON text.

    Emits one token per builder event (brackets of the outermost array are
    skipped unless ``ndjson``) into ``kinds``/``starts``/``ends``; integer
    and boolean values go to ``ivals``, the text of real literals is copied
    space-separated into ``realtext``.  ``stack`` (uint8, one slot per
    allowed nesting level) and ``info`` (int64, 7 slots) carry the parser
    state from one window to the next.  When ``eof`` is false the scan stops
    before a token that may continue past the window; ``info[2]`` holds the
    number of bytes consumed.  Output buffers need ``len(data)`` slots,
    ``realtext`` one more.
    """
    _require(data, np.dtype(np.uint8), "data")
    _require(stack, np.dtype(np.uint8), "stack")
    _require(info, I64, "info", 7)
    n = len(data)
    _require(kinds, I8, "kinds")
    for name, buf in (("starts", starts), ("ends", ends), ("ivals", ivals)):
        _require(buf, I64, name)
    _require(realtext, np.dtype(np.uint8), "realtext")
    if min(len(kinds), len(starts), len(ends), len(ivals)) < n or len(realtext) < n + 1:
        return _error("output buffers too short")
    code = _json_tokens(data, bool(eof), bool(ndjson), stack, info, kinds, starts, ends, ivals,
                        realtext, _TRUE, _FALSE, _NULL)
    if code == JT_OK:
        return SUCCESS
    return _error(JT_MESSAGES[code], info[JT_INFO_POS])
