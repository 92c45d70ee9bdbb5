"""Logical array types and their DataShape-style rendering.

>>> render(3, VarList(Record({"x": Primitive("int64"), "y": VarList(Primitive("float64"))})))
'3 * var * {"x": int64, "y": var * float64}'
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .layout import (
    EmptyArray,
    IndexedOptionArray,
    Layout,
    ListOffsetArray,
    NumericArray,
    RecordArray,
    UnionArray,
    is_string,
)

PRIMITIVE_NAMES = {"bool8": "bool", "i8": "int8", "u8": "uint8", "i64": "int64", "f64": "float64"}


class ArrayType:
    """Base class; ``typestr`` (from a ``__str__`` parameter) overrides rendering."""

    typestr: str | None


@dataclass(frozen=True)
class Primitive(ArrayType):
    name: str
    typestr: str | None = None


@dataclass(frozen=True)
class VarList(ArrayType):
    item: ArrayType
    typestr: str | None = None


@dataclass(frozen=True)
class Record(ArrayType):
    fields: tuple[tuple[str, ArrayType], ...]
    typestr: str | None = None

    def __init__(self, fields, typestr=None):
        items = tuple(fields.items()) if isinstance(fields, dict) else tuple(tuple(f) for f in fields)
        object.__setattr__(self, "fields", items)
        object.__setattr__(self, "typestr", typestr)

    def field(self, name) -> ArrayType:
        return dict(self.fields)[name]


@dataclass(frozen=True)
class Union(ArrayType):
    members: tuple[ArrayType, ...]
    typestr: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.members) < 2:
            raise ValueError("a union needs at least two members")
        if len(set(self.members)) != len(self.members):
            raise ValueError("union members must be distinct")
        if any(isinstance(m, Union) for m in self.members):
            raise ValueError("union members cannot be unions")


@dataclass(frozen=True)
class Option(ArrayType):
    item: ArrayType
    typestr: str | None = None

    def __post_init__(self):
        if isinstance(self.item, Option):
            raise ValueError("option of option; use make_option")


@dataclass(frozen=True)
class Unknown(ArrayType):
    typestr: str | None = None


@dataclass(frozen=True)
class String(ArrayType):
    typestr: str | None = None


def make_option(item: ArrayType) -> ArrayType:
    return item if isinstance(item, Option) else Option(item)


def make_union(members) -> ArrayType:
    """Flatten nested unions and drop duplicates; a single survivor is returned bare."""
    flat = []
    for m in members:
        for sub in (m.members if isinstance(m, Union) else (m,)):
            if sub not in flat:
                flat.append(sub)
    return flat[0] if len(flat) == 1 else Union(tuple(flat))


def type_of(node: Layout) -> ArrayType:
    """The element type of a layout (its outer length is not part of the type)."""
    typestr = node.parameter("__str__")
    if isinstance(node, EmptyArray):
        return Unknown(typestr)
    if isinstance(node, NumericArray):
        return Primitive(PRIMITIVE_NAMES[node.dtype], typestr)
    if isinstance(node, ListOffsetArray):
        if is_string(node):
            return String(typestr)
        return VarList(type_of(node.content), typestr)
    if isinstance(node, RecordArray):
        return Record(tuple((name, type_of(c)) for name, c in node.items()), typestr)
    if isinstance(node, UnionArray):
        t = make_union(type_of(c) for c in node.contents)
        return _with_typestr(t, typestr)
    if isinstance(node, IndexedOptionArray):
        return _with_typestr(make_option(type_of(node.content)), typestr)
    raise TypeError(type(node).__name__)


def _with_typestr(t, typestr):
    if typestr is None:
        return t
    return replace(t, typestr=typestr)


def render_type(t: ArrayType) -> str:
    if t.typestr is not None:
        return t.typestr
    if isinstance(t, Primitive):
        return t.name
    if isinstance(t, VarList):
        return "var * " + render_type(t.item)
    if isinstance(t, Record):
        inner = ", ".join(f"{json.dumps(name)}: {render_type(ft)}" for name, ft in t.fields)
        return "{" + inner + "}"
    if isinstance(t, Union):
        return "union[" + ", ".join(render_type(m) for m in t.members) + "]"
    if isinstance(t, Option):
        return "?" + render_type(t.item)
    if isinstance(t, Unknown):
        return "unknown"
    if isinstance(t, String):
        return "string"
    raise TypeError(type(t).__name__)


def render(length: int, t: ArrayType) -> str:
    return f"{length} * {render_type(t)}"


def typestr(node: Layout) -> str:
    """Rendered type of a layout including its length, e.g. ``'2 * var * float64'``."""
    return render(len(node), type_of(node))


UNBOUNDED = 1 << 30


def depth(t: ArrayType) -> int:
    """Minimum number of positional dimensions inside one element of type ``t``."""
    if isinstance(t, VarList):
        return 1 + depth(t.item)
    if isinstance(t, Option):
        return depth(t.item)
    if isinstance(t, Record):
        return min((depth(ft) for _, ft in t.fields), default=0)
    if isinstance(t, Union):
        return min(depth(m) for m in t.members)
    if isinstance(t, Unknown):
        # no elements, so any number of selectors selects nothing
        return UNBOUNDED
    return 0


def is_subtype(narrow: ArrayType, wide: ArrayType) -> bool:
    """Whether every value of ``narrow`` is representable in ``wide`` under builder promotion."""
    if narrow == wide or isinstance(narrow, Unknown):
        return True
    if isinstance(wide, Option):
        inner = narrow.item if isinstance(narrow, Option) else narrow
        return is_subtype(inner, wide.item)
    if isinstance(narrow, Option):
        return False
    if isinstance(wide, Union):
        members = narrow.members if isinstance(narrow, Union) else (narrow,)
        return all(any(is_subtype(m, w) for w in wide.members) for m in members)
    if isinstance(narrow, Union):
        return False
    if isinstance(narrow, Primitive) and isinstance(wide, Primitive):
        return narrow.name == "int64" and wide.name == "float64"
    if isinstance(narrow, VarList) and isinstance(wide, VarList):
        return is_subtype(narrow.item, wide.item)
    if isinstance(narrow, Record) and isinstance(wide, Record):
        wide_fields = dict(wide.fields)
        narrow_fields = dict(narrow.fields)
        for name, wt in wide_fields.items():
            if name in narrow_fields:
                if not is_subtype(narrow_fields[name], wt):
                    return False
            elif not isinstance(wt, Option):
                return False
        return set(narrow_fields) <= set(wide_fields)
    return False
