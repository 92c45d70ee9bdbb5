"""JSON in and out, including the numbers-only fast path."""

from __future__ import annotations

import time

import numpy as np

from jagged.datashape import typestr
from jagged.errors import ParseError
from jagged.jsonio import from_json, from_json_numbers, to_json

text = '[{"name": "a", "hits": [1, 2]}, {"name": "b", "hits": [], "extra": true}]'
layout = from_json(text)
print(typestr(layout))
print(to_json(layout))

print(typestr(from_json('{"n": 1}\n{"n": 2.5}\n', ndjson=True)))

try:
    from_json("[1, 2,, 3]")
except ParseError as err:
    print("error:", err)

rng = np.random.default_rng(0)
doc = "[" + ", ".join(
    "[" + ", ".join(repr(float(v)) for v in rng.normal(size=rng.integers(0, 10))) + "]" for _ in range(50_000)
) + "]"
for name, fn in (("from_json", from_json), ("from_json_numbers", lambda d: from_json_numbers(d, 2))):
    fn("[[1.0]]")
    t0 = time.perf_counter()
    out = fn(doc)
    dt = time.perf_counter() - t0
    print(f"{name}: {typestr(out)} in {dt:.3f} s ({len(doc) / 1e6 / dt:.1f} MB/s)")
