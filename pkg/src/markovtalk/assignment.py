"""Exact linear assignment (Hungarian method) over the rationals."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Sequence

Perm = tuple[int, ...]


def solve_assignment(weights: Sequence[Sequence[Fraction]], maximize: bool = True) -> tuple[Fraction, Perm]:
    """Optimal permutation for a square weight matrix.

    Uses the O(n^3) shortest-augmenting-path form of the Hungarian algorithm
    with row/column potentials. Entries may be ``None`` to forbid a cell.

    Args:
        weights: ``weights[i][j]`` is the value of assigning row i to column j.
        maximize: maximize the total weight (default) or minimize it.

    Returns:
        ``(value, perm)`` with ``perm[i]`` the column assigned to row i.

    Raises:
        ValueError: if forbidden cells leave no perfect assignment.
    """
    n = len(weights)
    if n == 0:
        return Fraction(0), ()
    big = None
    finite = [abs(Fraction(w)) for row in weights for w in row if w is not None]
    big = (sum(finite) + 1) * (n + 1)
    sign = -1 if maximize else 1
    cost = [[big if w is None else sign * Fraction(w) for w in row] for row in weights]

    # 1-indexed arrays as in the classical formulation
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [None] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = None
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                    if minv[j] is None or cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if delta is None or minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    perm = [0] * n
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    if any(weights[i][perm[i]] is None for i in range(n)):
        raise ValueError("no feasible assignment")
    value = sum((Fraction(weights[i][perm[i]]) for i in range(n)), Fraction(0))
    return value, tuple(perm)


def lexicographic_argmax(weights: Sequence[Sequence[Fraction]]) -> tuple[Fraction, Perm]:
    """Maximum-weight assignment, ties broken toward the lexicographically smallest permutation."""
    n = len(weights)
    best, _ = solve_assignment(weights)
    fixed: list[int] = []
    w = [list(row) for row in weights]
    for i in range(n):
        for j in range(n):
            if j in fixed or w[i][j] is None:
                continue
            trial = [row[:] for row in w]
            trial[i] = [None] * n
            trial[i][j] = w[i][j]
            for r in range(n):
                if r != i:
                    trial[r][j] = None
            try:
                val, _ = solve_assignment(trial)
            except ValueError:
                continue
            if val == best:
                w = trial
                fixed.append(j)
                break
    return best, tuple(fixed)


def best_non_identity(weights: Sequence[Sequence[Fraction]]) -> tuple[Fraction, Perm] | None:
    """Best assignment among permutations other than the identity.

    A permutation differs from the identity iff some row avoids its diagonal
    cell, so the maximum over n restricted problems (diagonal cell i
    forbidden) is the answer. Returns None when n < 2.
    """
    n = len(weights)
    if n < 2:
        return None
    result = None
    for i in range(n):
        w = [list(row) for row in weights]
        w[i][i] = None
        val, perm = solve_assignment(w)
        if result is None or val > result[0] or (val == result[0] and perm < result[1]):
            result = (val, perm)
    return result


def brute_force_assignment(weights: Sequence[Sequence[Fraction]]) -> dict[Perm, Fraction]:
    """Value of every permutation; test oracle for small n."""
    n = len(weights)
    return {
        perm: sum((Fraction(weights[i][perm[i]]) for i in range(n)), Fraction(0))
        for perm in permutations(range(n))
    }
