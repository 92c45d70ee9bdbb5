"""Type discovery while filling a builder, one call per value."""

from __future__ import annotations

from jagged.builder import ArrayBuilder, from_values
from jagged.datashape import typestr
from jagged.errors import FillStateError
from jagged.layout import to_values

b = ArrayBuilder()
b.integer(1)
b.integer(2)
print(typestr(b.snapshot()))
b.real(3.3)  # ints are promoted to float once, in place
print(typestr(b.snapshot()), to_values(b.snapshot()))
b.string("four")  # incompatible kind: the float column becomes union variant 0
print(typestr(b.snapshot()), to_values(b.snapshot()))
b.null()
print(typestr(b.snapshot()))

# Records back-fill fields they have not seen with nulls.
print(typestr(from_values([{"a": 1}, {"b": "x"}])))

b = ArrayBuilder()
b.begin_list()
try:
    b.end_record()
except FillStateError as err:
    print("error:", err)
