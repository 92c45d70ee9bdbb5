"""Jagged arrays: nested, variable-length data in flat columnar buffers.

The most used names are re-exported here; the submodules hold the rest.
"""

from __future__ import annotations

from .builder import ArrayBuilder, from_values
from .datashape import type_of, typestr
from .errors import JaggedError
from .jsonio import from_json, from_json_numbers, to_json
from .layout import (
    EmptyArray,
    IndexedOptionArray,
    Layout,
    ListOffsetArray,
    NumericArray,
    RecordArray,
    UnionArray,
    to_values,
    validate,
)
from .slicing import At, Field, FlatIndex, FlatMask, JaggedIndex, JaggedMask, Range, getitem, select
from .storage import read, write
from .ufunc import map_binary, map_unary

__version__ = "0.1.0"

__all__ = [
    "ArrayBuilder", "At", "EmptyArray", "Field", "FlatIndex", "FlatMask", "IndexedOptionArray",
    "JaggedError", "JaggedIndex", "JaggedMask", "Layout", "ListOffsetArray", "NumericArray",
    "Range", "RecordArray", "UnionArray", "from_json", "from_json_numbers", "from_values",
    "getitem", "map_binary", "map_unary", "read", "select", "to_json", "to_values", "type_of",
    "typestr", "validate", "write",
]
