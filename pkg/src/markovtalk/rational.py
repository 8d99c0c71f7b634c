"""Exact rational helpers shared by every module.

Matrices are tuples of tuples of :class:`fractions.Fraction`. Nothing here
touches floating point except :func:`to_float_matrix`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, strings ("3/4", "0.7", "-2") or floats.

    Floats go through their decimal repr so that ``0.7`` becomes ``7/10``
    rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not payoffs")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to a rational")


def vector(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


def matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vector(r) for r in rows)


def fmt(x: Fraction) -> str:
    """Lossless "num/den" string."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_matrix(a: Sequence[Sequence[Fraction]]) -> list[list[str]]:
    return [[fmt(v) for v in row] for row in a]


def to_float_matrix(a: Sequence[Sequence[Fraction]]):
    import numpy as np

    return np.array([[float(v) for v in row] for row in a], dtype=float)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a)


def vecmat(v: Sequence[Fraction], a: Sequence[Sequence[Fraction]]) -> Vector:
    """Row vector times matrix."""
    n = len(a[0])
    out = [Fraction(0)] * n
    for vi, row in zip(v, a):
        if vi:
            for j, x in enumerate(row):
                if x:
                    out[j] += vi * x
    return tuple(out)


def matvec(a: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def matpow(a: Sequence[Sequence[Fraction]], k: int) -> Matrix:
    result = identity(len(a))
    base = tuple(tuple(r) for r in a)
    while k:
        if k & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        k >>= 1
    return result


def l1(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Fraction:
    return sum((abs(x - y) for ra, rb in zip(a, b) for x, y in zip(ra, rb)), Fraction(0))


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vector:
    """Solve the square system ``a x = b`` by Gauss-Jordan elimination.

    Raises:
        ValueError: if ``a`` is singular.
    """
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(row[n] for row in aug)
