"""Build the three-event example straight from its buffers and look around."""

from __future__ import annotations

import numpy as np

from jagged.datashape import typestr
from jagged.layout import ListOffsetArray, NumericArray, RecordArray, iter_buffers, set_parameter, to_values

# Each event holds a list of records; each record has an int and a list of floats.
y = ListOffsetArray(
    np.array([0, 1, 3, 6]),
    NumericArray(np.array([1.1, 2.0, 0.2, 3.0, 0.3, 3.3])),
)
x = NumericArray(np.array([1, 2, 3]))
events = ListOffsetArray(np.array([0, 2, 2, 3]), RecordArray([("x", x), ("y", y)], 3))

print(typestr(events))
print(to_values(events))
print("buffers:", [b.tolist() for b in iter_buffers(events)])

# Strings are byte lists with a parameter; dropping it exposes the bytes.
raw = "onetwothree".encode()
words = ListOffsetArray([0, 3, 6, 11], NumericArray(np.frombuffer(raw, np.uint8)), {"__class__": "string"})
print(to_values(words))
print(to_values(set_parameter(words, "__class__", None)))

# A display name replaces the structural type in the rendering.
print(typestr(ListOffsetArray(events.offsets, set_parameter(events.content, "__str__", "P"))))
