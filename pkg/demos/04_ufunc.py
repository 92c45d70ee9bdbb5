"""Elementwise math keeps the structure and only replaces the leaves."""

from __future__ import annotations

from jagged.builder import from_values
from jagged.datashape import typestr
from jagged.layout import to_values
from jagged.ufunc import map_binary, map_unary

events = from_values([
    [{"x": 1, "y": [1.1]}, {"x": 2, "y": [2.0, 0.2]}],
    [],
    [{"x": 3, "y": [3.0, 0.3, 3.3]}],
])

s = map_unary("sin", events)
print(typestr(s))
print(to_values(s)[0][0])
print("offsets shared:", s.offsets is events.offsets)

print(to_values(map_binary("multiply", from_values([[1, 2], None, [3]]), 10)))
print(to_values(map_binary("add", events, events))[2])
