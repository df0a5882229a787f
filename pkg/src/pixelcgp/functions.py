"""The 53-entry mixed-type node function set.

Every function accepts any combination of scalar and matrix operands.
Broadcasting functions apply their scalar formula element-wise (two-matrix
operands are first cropped to their common top-left block). Non-broadcasting
functions that require matrix input act as a wire when x is scalar: the
scalar passes through untouched by the formula. Where a scalar y is needed
but a matrix arrives, the matrix mean is used instead.

A node's output is always constrain(p * f(x, y, p)): the parameter weights
the function result element-wise and the result is clamped to [-1, 1] with
non-finite elements replaced by 0. Division by zero, undefined moments of
constant vectors and similar hazards are absorbed by that constraining step;
apply() never raises.

Scalar formulas use math.*; matrix formulas use the corresponding numpy
ufuncs and plain np.sum reductions. Both choices are deterministic, so any
reimplementation using the same primitives reproduces results bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .values import Value, crop_to_common, index_from_unit, scalar_of

_SQRT2 = math.sqrt(2.0)
_EXP_DEN = math.e - 1.0


@dataclass(frozen=True)
class FunctionSpec:
    id: int
    name: str
    arity: int
    broadcasting: bool
    impl: Callable[[Value, Value, float], Value] = field(repr=False)
    needs_matrix: bool = False   # wire-through when x is scalar
    can_nonfinite: bool = False  # result may contain NaN/inf before constraining
    trace_x: bool = True
    trace_y: bool = False


def _unit(g: float) -> float:
    """Map a [-1, 1] gene/operand to a [0, 1] fractional position."""
    return (g + 1.0) / 2.0


def _flat(m: np.ndarray) -> np.ndarray:
    return m.reshape(1, -1)


def _as_row(v: Value) -> np.ndarray:
    if isinstance(v, np.ndarray):
        return v.reshape(-1)
    return np.array([v], dtype=np.float64)


def _elems(m: np.ndarray) -> list:
    return m.reshape(-1).tolist()


def _scalar_y(y: Value) -> float:
    return scalar_of(y) if isinstance(y, np.ndarray) else float(y)


def _bin(x: Value, y: Value, sf, mf) -> Value:
    """Dispatch a broadcasting binary op: sf on two scalars, mf otherwise."""
    xm = isinstance(x, np.ndarray)
    ym = isinstance(y, np.ndarray)
    if xm and ym:
        x, y = crop_to_common(x, y)
        return mf(x, y)
    if xm or ym:
        return mf(x, y)
    return sf(x, y)


def _un(x: Value, sf, mf) -> Value:
    """Dispatch a broadcasting unary op: sf on a scalar, mf on a matrix."""
    return mf(x) if isinstance(x, np.ndarray) else sf(x)


# --- mathematical -----------------------------------------------------------

def _add(x, y, p):
    return _bin(x, y, lambda a, b: (a + b) / 2.0, lambda a, b: (a + b) / 2.0)


def _aminus(x, y, p):
    return _bin(x, y, lambda a, b: abs(a - b) / 2.0,
                lambda a, b: np.abs(a - b) / 2.0)


def _mult(x, y, p):
    return _bin(x, y, lambda a, b: a * b, lambda a, b: a * b)


def _cmult(x, y, p):
    return x * p


def _inv_scalar(a: float) -> float:
    if a == 0.0:
        return math.inf
    return 1.0 / a


def _inv(x, y, p):
    if isinstance(x, np.ndarray):
        with np.errstate(divide="ignore", over="ignore"):
            return 1.0 / x
    return _inv_scalar(x)


def _abs(x, y, p):
    return np.abs(x) if isinstance(x, np.ndarray) else abs(x)


def _sqrt(x, y, p):
    if isinstance(x, np.ndarray):
        return np.sqrt(np.abs(x))
    return math.sqrt(abs(x))


def _cpow(x, y, p):
    return _un(x, lambda e: math.pow(abs(e), p + 1.0),
               lambda m: np.power(np.abs(m), p + 1.0))


def _ypow(x, y, p):
    return _bin(x, y, lambda a, b: math.pow(abs(a), abs(b)),
                lambda a, b: np.power(np.abs(a), np.abs(b)))


def _expx(x, y, p):
    return _un(x, lambda e: (math.exp(e) - 1.0) / _EXP_DEN,
               lambda m: (np.exp(m) - 1.0) / _EXP_DEN)


def _sinx(x, y, p):
    return _un(x, math.sin, np.sin)


def _sqrtxy(x, y, p):
    return _bin(x, y,
                lambda a, b: math.sqrt(a * a + b * b) / _SQRT2,
                lambda a, b: np.sqrt(a * a + b * b) / _SQRT2)


def _acos(x, y, p):
    return _un(x, lambda e: math.acos(e) / math.pi,
               lambda m: np.arccos(m) / math.pi)


def _asin(x, y, p):
    return _un(x, lambda e: 2.0 * math.asin(e) / math.pi,
               lambda m: 2.0 * np.arcsin(m) / math.pi)


def _atan(x, y, p):
    return _un(x, lambda e: 4.0 * math.atan(e) / math.pi,
               lambda m: 4.0 * np.arctan(m) / math.pi)


# --- statistical (matrix-requiring, wire on scalar x) -----------------------

def _stddev(x, y, p):
    n = x.size
    if n < 2:
        return math.nan
    d = x - (float(np.sum(x)) / n)
    return math.sqrt(float(np.sum(d * d)) / (n - 1))


def _central_moments(x: np.ndarray) -> tuple[float, float, float]:
    n = x.size
    d = x - (float(np.sum(x)) / n)
    d2 = d * d
    m2 = float(np.sum(d2)) / n
    m3 = float(np.sum(d2 * d)) / n
    m4 = float(np.sum(d2 * d2)) / n
    return m2, m3, m4


def _skew(x, y, p):
    m2, m3, _ = _central_moments(x)
    den = math.pow(m2, 1.5)
    # den can underflow to 0 for tiny nonzero m2; NaN constrains to 0 either way
    if den == 0.0:
        return math.nan
    return m3 / den


def _kurtosis(x, y, p):
    m2, _, m4 = _central_moments(x)
    den = m2 * m2
    if den == 0.0:
        return math.nan
    return m4 / den - 3.0


def _mean(x, y, p):
    return float(np.sum(x)) / x.size


def _range(x, y, p):
    return float(np.max(x)) - float(np.min(x)) - 1.0


def _round(x, y, p):
    return np.rint(x)


def _ceil(x, y, p):
    return np.ceil(x)


def _floor(x, y, p):
    return np.floor(x)


def _max1(x, y, p):
    return float(np.max(x))


def _min1(x, y, p):
    return float(np.min(x))


# --- comparison -------------------------------------------------------------

def _lt(x, y, p):
    return _bin(x, y, lambda a, b: 1.0 if a < b else 0.0,
                lambda a, b: np.less(a, b).astype(np.float64))


def _gt(x, y, p):
    return _bin(x, y, lambda a, b: 1.0 if a > b else 0.0,
                lambda a, b: np.greater(a, b).astype(np.float64))


def _max2(x, y, p):
    return _bin(x, y, lambda a, b: max(a, b), np.maximum)


def _min2(x, y, p):
    return _bin(x, y, lambda a, b: min(a, b), np.minimum)


# --- list processing (matrix-requiring, wire on scalar x) -------------------

def _split_before(x, y, p):
    flat = _flat(x)
    i = index_from_unit(_unit(p), flat.shape[1])
    return flat[:, : i + 1]


def _split_after(x, y, p):
    flat = _flat(x)
    i = index_from_unit(_unit(p), flat.shape[1])
    return flat[:, i:]


def _range_in(x, y, p):
    flat = _flat(x)
    n = flat.shape[1]
    lo = index_from_unit(_unit(_scalar_y(y)), n)
    hi = index_from_unit(_unit(p), n)
    if lo > hi:
        lo, hi = hi, lo
    return flat[:, lo : hi + 1]


def _index_y(x, y, p):
    flat = x.reshape(-1)
    return float(flat[index_from_unit(_unit(_scalar_y(y)), flat.shape[0])])


def _index_p(x, y, p):
    flat = x.reshape(-1)
    return float(flat[index_from_unit(_unit(p), flat.shape[0])])


def _vectorize(x, y, p):
    return _flat(x)


def _first(x, y, p):
    return float(x.reshape(-1)[0])


def _last(x, y, p):
    return float(x.reshape(-1)[-1])


def _differences(x, y, p):
    if x.size < 2:
        return 0.0
    return np.diff(_flat(x))


def _avg_differences(x, y, p):
    if x.size < 2:
        return 0.0
    diffs = np.diff(x.reshape(-1))
    return float(np.sum(diffs)) / diffs.size


def _rotate(x, y, p):
    k = math.floor(p * x.size)
    return np.roll(x.reshape(-1), k).reshape(x.shape)


def _reverse(x, y, p):
    return x.reshape(-1)[::-1].reshape(x.shape)


# Concatenation is the one function that can grow state without bound
# (a PUSH_BACK node reading its own output doubles every step), so its
# result keeps at most this many leading elements.
MAX_PUSH_ELEMENTS = 65536


def _push_back(x, y, p):
    out = np.concatenate([_as_row(x), _as_row(y)])
    return out[:MAX_PUSH_ELEMENTS].reshape(1, -1)


def _push_front(x, y, p):
    out = np.concatenate([_as_row(y), _as_row(x)])
    return out[:MAX_PUSH_ELEMENTS].reshape(1, -1)


def _set(x, y, p):
    xm = isinstance(x, np.ndarray)
    ym = isinstance(y, np.ndarray)
    if not xm and ym:
        return np.full(y.shape, x, dtype=np.float64)
    if xm and not ym:
        return np.full(x.shape, y, dtype=np.float64)
    return x


def _sum(x, y, p):
    return float(np.sum(x))


def _transpose(x, y, p):
    return x.T


def _vecfromdouble(x, y, p):
    if isinstance(x, np.ndarray):
        return x
    return np.array([[x]], dtype=np.float64)


# --- miscellaneous ----------------------------------------------------------

def _ywire(x, y, p):
    return y


def _nop(x, y, p):
    return x


def _const(x, y, p):
    return p


def _constvectord(x, y, p):
    return np.full(x.shape, p, dtype=np.float64)


def _zeros(x, y, p):
    return np.zeros(x.shape, dtype=np.float64)


def _ones(x, y, p):
    return np.ones(x.shape, dtype=np.float64)


def _spec(fid, name, arity, broadcasting, impl, *, needs_matrix=False,
          can_nonfinite=False, trace_x=None, trace_y=None) -> FunctionSpec:
    if trace_x is None:
        trace_x = arity >= 1
    if trace_y is None:
        trace_y = arity >= 2
    return FunctionSpec(fid, name, arity, broadcasting, impl,
                        needs_matrix=needs_matrix, can_nonfinite=can_nonfinite,
                        trace_x=trace_x, trace_y=trace_y)


_TABLE = [
    # mathematical
    ("ADD", 2, True, _add, {}),
    ("AMINUS", 2, True, _aminus, {}),
    ("MULT", 2, True, _mult, {}),
    ("CMULT", 1, True, _cmult, {}),
    ("INV", 1, True, _inv, {"can_nonfinite": True}),
    ("ABS", 1, True, _abs, {}),
    ("SQRT", 1, True, _sqrt, {}),
    ("CPOW", 1, True, _cpow, {}),
    ("YPOW", 2, True, _ypow, {}),
    ("EXPX", 1, True, _expx, {}),
    ("SINX", 1, True, _sinx, {}),
    ("SQRTXY", 2, True, _sqrtxy, {}),
    ("ACOS", 1, True, _acos, {}),
    ("ASIN", 1, True, _asin, {}),
    ("ATAN", 1, True, _atan, {}),
    # statistical
    ("STDDEV", 1, False, _stddev, {"needs_matrix": True, "can_nonfinite": True}),
    ("SKEW", 1, False, _skew, {"needs_matrix": True, "can_nonfinite": True}),
    ("KURTOSIS", 1, False, _kurtosis, {"needs_matrix": True, "can_nonfinite": True}),
    ("MEAN", 1, False, _mean, {"needs_matrix": True}),
    ("RANGE", 1, False, _range, {"needs_matrix": True}),
    ("ROUND", 1, False, _round, {"needs_matrix": True}),
    ("CEIL", 1, False, _ceil, {"needs_matrix": True}),
    ("FLOOR", 1, False, _floor, {"needs_matrix": True}),
    ("MAX1", 1, False, _max1, {"needs_matrix": True}),
    ("MIN1", 1, False, _min1, {"needs_matrix": True}),
    # comparison
    ("LT", 2, True, _lt, {}),
    ("GT", 2, True, _gt, {}),
    ("MAX2", 2, True, _max2, {}),
    ("MIN2", 2, True, _min2, {}),
    # list processing
    ("SPLIT_BEFORE", 1, False, _split_before, {"needs_matrix": True}),
    ("SPLIT_AFTER", 1, False, _split_after, {"needs_matrix": True}),
    ("RANGE_IN", 2, False, _range_in, {"needs_matrix": True}),
    ("INDEX_Y", 2, False, _index_y, {"needs_matrix": True}),
    ("INDEX_P", 1, False, _index_p, {"needs_matrix": True}),
    ("VECTORIZE", 1, False, _vectorize, {"needs_matrix": True}),
    ("FIRST", 1, False, _first, {"needs_matrix": True}),
    ("LAST", 1, False, _last, {"needs_matrix": True}),
    ("DIFFERENCES", 1, False, _differences, {"needs_matrix": True}),
    ("AVG_DIFFERENCES", 1, False, _avg_differences, {"needs_matrix": True}),
    ("ROTATE", 1, False, _rotate, {"needs_matrix": True}),
    ("REVERSE", 1, False, _reverse, {"needs_matrix": True}),
    ("PUSH_BACK", 2, False, _push_back, {}),
    ("PUSH_FRONT", 2, False, _push_front, {}),
    ("SET", 2, False, _set, {}),
    ("SUM", 1, False, _sum, {"needs_matrix": True}),
    ("TRANSPOSE", 1, False, _transpose, {"needs_matrix": True}),
    ("VECFROMDOUBLE", 1, False, _vecfromdouble, {}),
    # miscellaneous
    ("YWIRE", 1, False, _ywire, {"trace_x": False, "trace_y": True}),
    ("NOP", 1, False, _nop, {}),
    ("CONST", 0, False, _const, {}),
    ("CONSTVECTORD", 1, False, _constvectord, {"needs_matrix": True}),
    ("ZEROS", 1, False, _zeros, {"needs_matrix": True}),
    ("ONES", 1, False, _ones, {"needs_matrix": True}),
]

FUNCTIONS: list[FunctionSpec] = [
    _spec(i, name, arity, bc, impl, **kw)
    for i, (name, arity, bc, impl, kw) in enumerate(_TABLE)
]

N_FUNCTIONS = len(FUNCTIONS)
assert N_FUNCTIONS == 53

FUNCTIONS_BY_NAME = {f.name: f for f in FUNCTIONS}


def function_from_gene(f_gene: float) -> FunctionSpec:
    """Decode a [0, 1) function gene to its table entry."""
    return FUNCTIONS[int(f_gene * N_FUNCTIONS)]


def apply(spec: FunctionSpec, x: Value, y: Value, p: float) -> Value:
    """Evaluate a node function: constrain(p * f(x, y, p)), never raising."""
    if spec.needs_matrix and not isinstance(x, np.ndarray):
        raw = x  # wire: scalar passes through (the p weight still applies)
    else:
        raw = spec.impl(x, y, p)
    if isinstance(raw, np.ndarray):
        scaled = p * raw
        clipped = np.minimum(1.0, np.maximum(-1.0, scaled))
        if spec.can_nonfinite:
            return np.where(np.isfinite(scaled), clipped, 0.0)
        return clipped
    scaled = p * raw
    if not math.isfinite(scaled):
        return 0.0
    return min(1.0, max(-1.0, scaled))
