"""Write a layout to a container directory and read it back."""

from __future__ import annotations

import tempfile
from pathlib import Path

from jagged import storage
from jagged.builder import from_values
from jagged.datashape import typestr
from jagged.layout import set_parameter, to_values

layout = set_parameter(from_values([[{"x": 1, "tag": "a"}], [], [None]]), "__doc__", "demo")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "demo.jagged"
    storage.write(layout, path)
    for p in sorted(path.iterdir()):
        print(p.name, p.stat().st_size)
    back = storage.read(path)
    print(typestr(back), to_values(back), back.parameters)
    print("equal:", back == layout)
