"""Exact convex polygons in the plane."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[Fraction, Fraction]


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence]) -> list[Point]:
    """Counterclockwise hull without collinear points (Andrew's monotone chain).

    Starts at the lexicographically smallest point. Degenerate inputs give a
    single point or the two endpoints of a segment.
    """
    pts = sorted({(Fraction(p[0]), Fraction(p[1])) for p in points})
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull


def minkowski_sum(a: Sequence[Point], b: Sequence[Point]) -> list[Point]:
    return convex_hull((p[0] + q[0], p[1] + q[1]) for p in a for q in b)


@dataclass(frozen=True)
class Polygon2D:
    """Convex polygon with counterclockwise exact vertices.

    ``witnesses[i]``, when present, is a strategy whose payoff is ``vertices[i]``.
    """

    vertices: tuple[Point, ...]
    witnesses: tuple = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_point(self) -> bool:
        return len(self.vertices) == 1

    def contains(self, point: Sequence) -> bool:
        q = (Fraction(point[0]), Fraction(point[1]))
        v = self.vertices
        if len(v) == 1:
            return q == v[0]
        if len(v) == 2:
            a, b = v
            if cross(a, b, q) != 0:
                return False
            return min(a[0], b[0]) <= q[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= q[1] <= max(a[1], b[1])
        return all(cross(v[i], v[(i + 1) % len(v)], q) >= 0 for i in range(len(v)))

    def witness_for(self, point: Sequence):
        q = (Fraction(point[0]), Fraction(point[1]))
        for vert, w in zip(self.vertices, self.witnesses):
            if vert == q:
                return w
        return None
