"""Exact rational matrix helpers.

Matrices are numpy object arrays holding :class:`fractions.Fraction` entries,
so ``@``, ``+`` and ``==`` work elementwise without any float conversion.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction or numeric string to a Fraction; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rational weights")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def is_rational_vector(values: Iterable) -> bool:
    return all(isinstance(v, Rational) and not isinstance(v, bool) for v in values)


def frac_array(rows: Sequence[Sequence]) -> np.ndarray:
    arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            arr[i, j] = to_fraction(v)
    return arr


def frac_vector(values: Sequence) -> np.ndarray:
    arr = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        arr[i] = to_fraction(v)
    return arr


def zeros(n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    arr = np.empty((n, m), dtype=object)
    arr.fill(Fraction(0))
    return arr


def identity(n: int) -> np.ndarray:
    arr = zeros(n)
    for i in range(n):
        arr[i, i] = Fraction(1)
    return arr


def trace(a: np.ndarray) -> Fraction:
    return sum((a[i, i] for i in range(a.shape[0])), Fraction(0))


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # object-dtype matmul sums with int 0 start; normalise back to Fraction
    out = a @ b
    if out.ndim == 0:
        return Fraction(out)
    flat = out.reshape(-1)
    for k, v in enumerate(flat):
        flat[k] = Fraction(v)
    return out


def matpow(a: np.ndarray, k: int) -> np.ndarray:
    result = identity(a.shape[0])
    for _ in range(k):
        result = matmul(result, a)
    return result


def rank(a: np.ndarray) -> int:
    """Rank by fraction-exact Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in np.asarray(a, dtype=object)]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        for i in range(r + 1, rows):
            if m[i][c] != 0:
                factor = m[i][c] / p
                row_i, row_r = m[i], m[r]
                for k in range(c, cols):
                    row_i[k] -= factor * row_r[k]
        r += 1
        if r == rows:
            break
    return r


def is_zero(a: np.ndarray) -> bool:
    return all(v == 0 for v in np.asarray(a, dtype=object).reshape(-1))


def to_float(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=object).astype(float)


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a
