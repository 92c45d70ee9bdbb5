"""Record-oriented to columnar conversion with type discovery.

An :class:`ArrayBuilder` is filled value by value (``integer``,
``begin_list``, ``field`` ...) and discovers its type as it goes.  Internally
it is a tree of accumulators mirroring the layout node kinds.  Every fill
method of an accumulator returns the accumulator that should take its place,
which is how promotion happens:

* integers followed by a real become reals (one bulk kernel conversion,
  after which the float buffer is used henceforth),
* a value of an incompatible kind turns the accumulator into a tagged
  union that reuses the existing accumulator as its first variant,
* a null turns it into an option over the existing accumulator,
* a record field that is absent from some records becomes an option.

Type dispatch stays here rather than in kernels because the accumulated
arrays are dynamically typed; the bulk int-to-float conversion still runs
through :func:`jagged.kernels.k_int64_to_float64`.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import (
    DuplicateFieldError,
    FillStateError,
    IntegerOverflowError,
    UnsupportedValueError,
)
from .layout import (
    EmptyArray,
    IndexedOptionArray,
    Layout,
    ListOffsetArray,
    NumericArray,
    RecordArray,
    UnionArray,
)

INITIAL_CAPACITY = 1024
INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class GrowableBuffer:
    """Append-only numpy buffer with capacity doubling.

    Elements below ``length`` are never rewritten, so read-only views handed
    out by :meth:`view` stay valid while the buffer keeps growing.
    """

    __slots__ = ("data", "length")

    def __init__(self, dtype, capacity=INITIAL_CAPACITY):
        self.data = np.empty(max(int(capacity), 1), dtype)
        self.length = 0

    @classmethod
    def full(cls, dtype, n, value):
        buf = cls(dtype, max(INITIAL_CAPACITY, n))
        buf.data[:n] = value
        buf.length = n
        return buf

    @classmethod
    def iota(cls, n):
        buf = cls(np.int64, max(INITIAL_CAPACITY, n))
        kernels.k_iota(0, buf.data[:n])
        buf.length = n
        return buf

    @property
    def capacity(self) -> int:
        return len(self.data)

    def _grow(self, needed):
        capacity = len(self.data)
        while capacity < needed:
            capacity *= 2
        data = np.empty(capacity, self.data.dtype)
        data[: self.length] = self.data[: self.length]
        self.data = data

    def append(self, value):
        if self.length == len(self.data):
            self._grow(self.length + 1)
        self.data[self.length] = value
        self.length += 1

    def extend(self, values):
        n = len(values)
        if self.length + n > len(self.data):
            self._grow(self.length + n)
        self.data[self.length : self.length + n] = values
        self.length += n

    def last(self):
        return self.data[self.length - 1]

    def view(self) -> np.ndarray:
        out = self.data[: self.length]
        out.flags.writeable = False
        return out


# -- accumulators ---------------------------------------------------------------


class _Acc:
    """Default behaviour: a value of a foreign kind makes a union, null makes an option."""

    __slots__ = ()
    kind = None

    def active(self) -> bool:
        return False

    def null(self):
        return OptionAcc.wrap(self).null()

    def boolean(self, v):
        return UnionAcc.wrap(self).boolean(v)

    def integer(self, v):
        return UnionAcc.wrap(self).integer(v)

    def real(self, v):
        return UnionAcc.wrap(self).real(v)

    def string(self, v):
        return UnionAcc.wrap(self).string(v)

    def begin_list(self):
        return UnionAcc.wrap(self).begin_list()

    def begin_record(self):
        return UnionAcc.wrap(self).begin_record()

    def end_list(self):
        raise FillStateError("a value or begin_list", "end_list without an open list")

    def field(self, name):
        raise FillStateError("a value", f"field({name!r}) outside a record")

    def end_record(self):
        raise FillStateError("a value", "end_record without an open record")


class UnknownAcc(_Acc):
    __slots__ = ()
    length = 0

    def boolean(self, v):
        return BoolAcc().boolean(v)

    def integer(self, v):
        return IntAcc().integer(v)

    def real(self, v):
        return FloatAcc().real(v)

    def string(self, v):
        return StringAcc().string(v)

    def begin_list(self):
        return ListAcc().begin_list()

    def begin_record(self):
        return RecordAcc().begin_record()

    def snapshot(self):
        return EmptyArray()


class BoolAcc(_Acc):
    __slots__ = ("buffer",)
    kind = "bool"

    def __init__(self):
        self.buffer = GrowableBuffer(np.bool_)

    @property
    def length(self):
        return self.buffer.length

    def boolean(self, v):
        self.buffer.append(v)
        return self

    def snapshot(self):
        return NumericArray(self.buffer.view())


class IntAcc(_Acc):
    __slots__ = ("buffer",)
    kind = "number"

    def __init__(self):
        self.buffer = GrowableBuffer(np.int64)

    @property
    def length(self):
        return self.buffer.length

    def integer(self, v):
        self.buffer.append(v)
        return self

    def real(self, v):
        return FloatAcc.from_ints(self).real(v)

    def snapshot(self):
        return NumericArray(self.buffer.view())


class FloatAcc(_Acc):
    __slots__ = ("buffer",)
    kind = "number"

    def __init__(self, buffer=None):
        self.buffer = GrowableBuffer(np.float64) if buffer is None else buffer

    @classmethod
    def from_ints(cls, ints: IntAcc):
        n = ints.buffer.length
        buffer = GrowableBuffer(np.float64, ints.buffer.capacity)
        status = kernels.k_int64_to_float64(ints.buffer.data[:n], buffer.data[:n])
        assert status.ok, status
        buffer.length = n
        return cls(buffer)

    @property
    def length(self):
        return self.buffer.length

    def integer(self, v):
        self.buffer.append(v)
        return self

    def real(self, v):
        self.buffer.append(v)
        return self

    def snapshot(self):
        return NumericArray(self.buffer.view())


class StringAcc(_Acc):
    __slots__ = ("chars", "offsets")
    kind = "string"

    def __init__(self):
        self.offsets = GrowableBuffer(np.int64)
        self.offsets.append(0)
        self.chars = GrowableBuffer(np.uint8)

    @property
    def length(self):
        return self.offsets.length - 1

    def string(self, v):
        raw = v.encode("utf-8") if isinstance(v, str) else bytes(v)
        self.chars.extend(np.frombuffer(raw, np.uint8))
        self.offsets.append(self.chars.length)
        return self

    def snapshot(self):
        return ListOffsetArray(
            self.offsets.view(), NumericArray(self.chars.view()), {"__class__": "string"}
        )


class ListAcc(_Acc):
    __slots__ = ("begun", "content", "offsets")
    kind = "list"

    def __init__(self):
        self.offsets = GrowableBuffer(np.int64)
        self.offsets.append(0)
        self.content = UnknownAcc()
        self.begun = False

    @property
    def length(self):
        return self.offsets.length - 1

    def active(self):
        return self.begun

    def null(self):
        if self.begun:
            self.content = self.content.null()
            return self
        return OptionAcc.wrap(self).null()

    def boolean(self, v):
        if self.begun:
            self.content = self.content.boolean(v)
            return self
        return UnionAcc.wrap(self).boolean(v)

    def integer(self, v):
        if self.begun:
            self.content = self.content.integer(v)
            return self
        return UnionAcc.wrap(self).integer(v)

    def real(self, v):
        if self.begun:
            self.content = self.content.real(v)
            return self
        return UnionAcc.wrap(self).real(v)

    def string(self, v):
        if self.begun:
            self.content = self.content.string(v)
            return self
        return UnionAcc.wrap(self).string(v)

    def begin_list(self):
        if self.begun:
            self.content = self.content.begin_list()
        else:
            self.begun = True
        return self

    def end_list(self):
        if not self.begun:
            return _Acc.end_list(self)
        if self.content.active():
            self.content = self.content.end_list()
        else:
            self.offsets.append(self.content.length)
            self.begun = False
        return self

    def begin_record(self):
        if self.begun:
            self.content = self.content.begin_record()
            return self
        return UnionAcc.wrap(self).begin_record()

    def field(self, name):
        if not self.begun:
            return _Acc.field(self, name)
        if not self.content.active():
            raise FillStateError("a value or end_list", f"field({name!r}) inside a list")
        self.content = self.content.field(name)
        return self

    def end_record(self):
        if not self.begun:
            return _Acc.end_record(self)
        if not self.content.active():
            raise FillStateError("a value or end_list", "end_record inside a list")
        self.content = self.content.end_record()
        return self

    def snapshot(self):
        return ListOffsetArray(self.offsets.view(), self.content.snapshot())


class RecordAcc(_Acc):
    __slots__ = ("begun", "contents", "current", "filled", "length")
    kind = "record"

    def __init__(self):
        self.contents = {}
        self.length = 0
        self.begun = False
        self.current = None
        self.filled = set()

    def active(self):
        return self.begun

    def _await_value(self, what):
        if self.current is None:
            raise FillStateError("field(name) or end_record", what)

    def _settle(self):
        if not self.contents[self.current].active():
            self.filled.add(self.current)
            self.current = None

    def _forward(self, method, *args):
        self._await_value(method)
        name = self.current
        self.contents[name] = getattr(self.contents[name], method)(*args)
        self._settle()
        return self

    def null(self):
        if self.begun:
            return self._forward("null")
        return OptionAcc.wrap(self).null()

    def boolean(self, v):
        if self.begun:
            return self._forward("boolean", v)
        return UnionAcc.wrap(self).boolean(v)

    def integer(self, v):
        if self.begun:
            return self._forward("integer", v)
        return UnionAcc.wrap(self).integer(v)

    def real(self, v):
        if self.begun:
            return self._forward("real", v)
        return UnionAcc.wrap(self).real(v)

    def string(self, v):
        if self.begun:
            return self._forward("string", v)
        return UnionAcc.wrap(self).string(v)

    def begin_list(self):
        if self.begun:
            return self._forward("begin_list")
        return UnionAcc.wrap(self).begin_list()

    def end_list(self):
        if self.begun and self.current is not None and self.contents[self.current].active():
            return self._forward("end_list")
        return _Acc.end_list(self)

    def begin_record(self):
        if not self.begun:
            self.begun = True
            self.current = None
            self.filled = set()
            return self
        return self._forward("begin_record")

    def field(self, name):
        if not self.begun:
            return _Acc.field(self, name)
        if self.current is not None:
            if self.contents[self.current].active():
                return self._forward("field", name)
            raise FillStateError(f"a value for field {self.current!r}", f"field({name!r})")
        if name in self.filled:
            raise DuplicateFieldError(name)
        if name not in self.contents:
            # earlier records lack this field
            self.contents[name] = OptionAcc.missing(self.length) if self.length else UnknownAcc()
        self.current = name
        return self

    def end_record(self):
        if not self.begun:
            return _Acc.end_record(self)
        if self.current is not None:
            if self.contents[self.current].active():
                return self._forward("end_record")
            raise FillStateError(f"a value for field {self.current!r}", "end_record")
        for name, acc in self.contents.items():
            if name not in self.filled:
                self.contents[name] = acc.null()
        self.length += 1
        self.begun = False
        self.filled = set()
        return self

    def snapshot(self):
        return RecordArray(
            [(name, acc.snapshot()) for name, acc in self.contents.items()], self.length
        )


class OptionAcc(_Acc):
    __slots__ = ("content", "index")

    def __init__(self, index, content):
        self.index = index
        self.content = content

    @classmethod
    def wrap(cls, acc):
        return cls(GrowableBuffer.iota(acc.length), acc)

    @classmethod
    def missing(cls, n):
        return cls(GrowableBuffer.full(np.int64, n, -1), UnknownAcc())

    @property
    def length(self):
        return self.index.length

    def active(self):
        return self.content.active()

    def _forward(self, method, *args):
        content = self.content = getattr(self.content, method)(*args)
        if not content.active():
            self.index.append(content.length - 1)
        return self

    def null(self):
        if self.content.active():
            self.content = self.content.null()
        else:
            self.index.append(-1)
        return self

    def boolean(self, v):
        return self._forward("boolean", v)

    def integer(self, v):
        return self._forward("integer", v)

    def real(self, v):
        return self._forward("real", v)

    def string(self, v):
        return self._forward("string", v)

    def begin_list(self):
        return self._forward("begin_list")

    def end_list(self):
        return self._forward("end_list")

    def begin_record(self):
        return self._forward("begin_record")

    def field(self, name):
        self.content = self.content.field(name)
        return self

    def end_record(self):
        return self._forward("end_record")

    def snapshot(self):
        return IndexedOptionArray(self.index.view(), self.content.snapshot())


def _accepts(acc, kind) -> bool:
    if kind in ("int", "real"):
        return acc.kind == "number"
    return acc.kind == kind


class UnionAcc(_Acc):
    __slots__ = ("contents", "current", "index", "tags")

    def __init__(self, tags, index, contents):
        self.tags = tags
        self.index = index
        self.contents = contents
        self.current = -1

    @classmethod
    def wrap(cls, acc):
        n = acc.length
        return cls(GrowableBuffer.full(np.int8, n, 0), GrowableBuffer.iota(n), [acc])

    @property
    def length(self):
        return self.tags.length

    def active(self):
        return self.current >= 0

    def _settle(self, t):
        content = self.contents[t]
        if content.active():
            self.current = t
        else:
            self.current = -1
            self.tags.append(t)
            self.index.append(content.length - 1)
        return self

    def _dispatch(self, kind, method, *args):
        if self.current >= 0:
            t = self.current
        else:
            for t, acc in enumerate(self.contents):
                if _accepts(acc, kind):
                    break
            else:
                if len(self.contents) >= 127:
                    raise FillStateError("at most 127 union variants", kind)
                self.contents.append(UnknownAcc())
                t = len(self.contents) - 1
        self.contents[t] = getattr(self.contents[t], method)(*args)
        return self._settle(t)

    def null(self):
        if self.current >= 0:
            return self._dispatch(None, "null")
        return OptionAcc.wrap(self).null()

    def boolean(self, v):
        return self._dispatch("bool", "boolean", v)

    def integer(self, v):
        return self._dispatch("int", "integer", v)

    def real(self, v):
        return self._dispatch("real", "real", v)

    def string(self, v):
        return self._dispatch("string", "string", v)

    def begin_list(self):
        return self._dispatch("list", "begin_list")

    def begin_record(self):
        return self._dispatch("record", "begin_record")

    def _forward_active(self, method, *args):
        if self.current < 0:
            return getattr(_Acc, method)(self, *args)
        return self._dispatch(None, method, *args)

    def end_list(self):
        return self._forward_active("end_list")

    def field(self, name):
        if self.current < 0:
            return _Acc.field(self, name)
        t = self.current
        self.contents[t] = self.contents[t].field(name)
        return self

    def end_record(self):
        return self._forward_active("end_record")

    def snapshot(self):
        return UnionArray(self.tags.view(), self.index.view(), [c.snapshot() for c in self.contents])


# -- public interface ---------------------------------------------------------------


class ArrayBuilder:
    """Fill values one at a time; :meth:`snapshot` returns the columnar layout.

    >>> from jagged.layout import to_values
    >>> b = ArrayBuilder()
    >>> b.integer(1); b.integer(2); b.real(3.3)
    >>> to_values(b.snapshot())
    [1.0, 2.0, 3.3]
    """

    def __init__(self):
        self._root = UnknownAcc()

    def __len__(self):
        return self._root.length

    @property
    def accumulator(self):
        """The root accumulator (for inspection; do not modify)."""
        return self._root

    def null_(self):
        self._root = self._root.null()

    def boolean(self, v: bool):
        self._root = self._root.boolean(bool(v))

    def integer(self, v: int):
        if not INT64_MIN <= v <= INT64_MAX:
            raise IntegerOverflowError(v)
        self._root = self._root.integer(v)

    def real(self, v: float):
        self._root = self._root.real(float(v))

    def string_(self, v: str):
        self._root = self._root.string(v)

    def begin_list(self):
        self._root = self._root.begin_list()

    def end_list(self):
        self._root = self._root.end_list()

    def begin_record(self):
        self._root = self._root.begin_record()

    def field(self, name: str):
        if not isinstance(name, str):
            raise UnsupportedValueError(name)
        self._root = self._root.field(name)

    def end_record(self):
        self._root = self._root.end_record()

    # aliases without the trailing underscore
    null = null_
    string = string_

    def snapshot(self) -> Layout:
        if self._root.active():
            raise FillStateError("a balanced fill state", "snapshot inside an open list or record")
        return self._root.snapshot()


def fill(builder: ArrayBuilder, value):
    """Drive ``builder`` with the structural events of one nested value."""
    if value is None:
        builder.null_()
    elif isinstance(value, (bool, np.bool_)):
        builder.boolean(bool(value))
    elif isinstance(value, (int, np.integer)):
        builder.integer(int(value))
    elif isinstance(value, (float, np.floating)):
        builder.real(float(value))
    elif isinstance(value, str):
        builder.string_(value)
    elif isinstance(value, (list, tuple)):
        builder.begin_list()
        for item in value:
            fill(builder, item)
        builder.end_list()
    elif isinstance(value, dict):
        builder.begin_record()
        for key, item in value.items():
            if not isinstance(key, str):
                raise UnsupportedValueError(key)
            builder.field(key)
            fill(builder, item)
        builder.end_record()
    else:
        raise UnsupportedValueError(value)


def from_values(values) -> Layout:
    """Columnar layout of a list of JSON-representable values."""
    if not isinstance(values, (list, tuple)):
        raise UnsupportedValueError(values)
    builder = ArrayBuilder()
    for value in values:
        fill(builder, value)
    return builder.snapshot()
