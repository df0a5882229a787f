"""Mixed scalar/matrix value model.

A Value is either a Python float or a 2-D float64 numpy array. All stored
values are "constrained": every element is finite and lies in [-1, 1].
Matrices are never empty (rows >= 1 and cols >= 1). Row-major element order
is the single convention for every flattening and indexing operation.

Values are treated as immutable: no function in this package mutates a
matrix it received or handed out.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

Value = Union[float, np.ndarray]


def is_matrix(v: Value) -> bool:
    return isinstance(v, np.ndarray)


def matrix(rows) -> np.ndarray:
    """Build a 2-D float64 matrix from nested lists (test/construction aid)."""
    m = np.asarray(rows, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"matrix must be 2-D and non-empty, got shape {m.shape}")
    return m


def constrain(v: Value) -> Value:
    """Replace non-finite elements with 0, clamp the rest to [-1, 1]."""
    if isinstance(v, np.ndarray):
        clipped = np.minimum(1.0, np.maximum(-1.0, v))
        return np.where(np.isfinite(v), clipped, 0.0)
    v = float(v)
    if not math.isfinite(v):
        return 0.0
    return min(1.0, max(-1.0, v))


def scalar_of(v: Value) -> float:
    """Scalar view of a value: identity on scalars, element mean on matrices."""
    if isinstance(v, np.ndarray):
        return float(np.sum(v)) / v.size
    return float(v)


def crop_to_common(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Crop both matrices to their common top-left (min rows, min cols) block."""
    rows = min(a.shape[0], b.shape[0])
    cols = min(a.shape[1], b.shape[1])
    return a[:rows, :cols], b[:rows, :cols]


def index_from_unit(u: float, length: int) -> int:
    """Map u in [0, 1] to a valid index: floor(u * length), clamped at length-1."""
    return min(int(math.floor(u * length)), length - 1)
