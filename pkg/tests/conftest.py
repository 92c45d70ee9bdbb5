from __future__ import annotations

import os
import sys
from pathlib import Path

# allocation statistics must be switched on before numba is first imported
os.environ.setdefault("NUMBA_NRT_STATS", "1")

sys.path.insert(0, str(Path(__file__).parent))

import numpy as np  # noqa: E402
import pytest  # noqa: E402
from hypothesis import HealthCheck, settings  # noqa: E402

from jagged.layout import ListOffsetArray, NumericArray, RecordArray  # noqa: E402

settings.register_profile(
    "default", max_examples=100, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

EXAMPLE_VALUES = [
    [{"x": 1, "y": [1.1]}, {"x": 2, "y": [2.0, 0.2]}],
    [],
    [{"x": 3, "y": [3.0, 0.3, 3.3]}],
]
EXAMPLE_TYPE = '3 * var * {"x": int64, "y": var * float64}'


def build_example():
    """The three-event example assembled directly from its buffers."""
    y = ListOffsetArray(
        np.array([0, 1, 3, 6], np.int64),
        NumericArray(np.array([1.1, 2.0, 0.2, 3.0, 0.3, 3.3])),
    )
    x = NumericArray(np.array([1, 2, 3], np.int64))
    return ListOffsetArray(np.array([0, 2, 2, 3], np.int64), RecordArray([("x", x), ("y", y)], 3))


@pytest.fixture
def example():
    return build_example()


@pytest.fixture
def example_values():
    return EXAMPLE_VALUES
