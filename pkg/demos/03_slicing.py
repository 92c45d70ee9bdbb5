"""Selections on the example: fields, ranges, integer arrays and jagged selectors."""

from __future__ import annotations

from jagged.builder import from_values
from jagged.datashape import typestr
from jagged.errors import IndexOutOfRangeError
from jagged.layout import to_values
from jagged.slicing import getitem, select

events = from_values([
    [{"x": 1, "y": [1.1]}, {"x": 2, "y": [2.0, 0.2]}],
    [],
    [{"x": 3, "y": [3.0, 0.3, 3.3]}],
])

# Field first, then one selector per dimension.
picked = getitem(events, ("y", [0, 2], slice(None), slice(1, None)))
print(typestr(picked), to_values(picked))

print(to_values(getitem(events, ("x",))))
print(to_values(getitem(events, (slice(None), slice(0, 1), "x"))))
print(select(events, 2, 0, "y", -1))

# A jagged mask keeps the selected records inside each event.
mask = [[True, False], [], [True]]
print(to_values(getitem(events, (mask, "x"))))

try:
    getitem(events, (slice(None), 1))
except IndexOutOfRangeError as err:
    print("error:", err)
