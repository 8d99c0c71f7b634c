"""The copula polytope: joint laws on S x S whose two margins both equal m."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .game import mu_zero
from .rational import Matrix, l1

_ZERO = Fraction(0)

DEFAULT_VERTEX_CAP = 5


class CopulaError(ValueError):
    pass


def is_copula(mu, m: Sequence[Fraction]) -> bool:
    n = len(m)
    if len(mu) != n or any(len(r) != n for r in mu):
        return False
    if any(x < 0 for r in mu for x in r):
        return False
    rows_ok = all(sum(mu[s]) == m[s] for s in range(n))
    cols_ok = all(sum(mu[s][a] for s in range(n)) == m[a] for a in range(n))
    return rows_ok and cols_ok


def is_doubly_stochastic(J) -> bool:
    n = len(J)
    return (
        all(len(r) == n for r in J)
        and all(x >= 0 for r in J for x in r)
        and all(sum(r) == 1 for r in J)
        and all(sum(J[i][j] for i in range(n)) == 1 for j in range(n))
    )


def to_bistochastic(mu, m) -> Matrix:
    """``J = mu + I - mu0``; doubly stochastic whenever mu is a copula for m."""
    n = len(m)
    return tuple(tuple(mu[s][a] + (1 - m[s] if s == a else 0) for a in range(n)) for s in range(n))


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    n = len(perm)
    return tuple(tuple(Fraction(int(perm[i] == j)) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class BirkhoffDecomposition:
    terms: tuple[tuple[Fraction, tuple[int, ...]], ...]

    def reconstruct(self) -> Matrix:
        n = len(self.terms[0][1])
        out = [[_ZERO] * n for _ in range(n)]
        for w, perm in self.terms:
            for i, j in enumerate(perm):
                out[i][j] += w
        return tuple(tuple(r) for r in out)


def _perfect_matching(support: list[list[bool]]) -> list[int] | None:
    """Kuhn's augmenting-path matching; returns row -> column or None."""
    n = len(support)
    match_col = [-1] * n

    def augment(i, seen):
        for j in range(n):
            if support[i][j] and not seen[j]:
                seen[j] = True
                if match_col[j] < 0 or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    perm = [0] * n
    for j, i in enumerate(match_col):
        perm[i] = j
    return perm


def birkhoff_decompose(J) -> BirkhoffDecomposition:
    """Write a doubly-stochastic matrix as a convex combination of permutations.

    Each step extracts the permutation whose smallest entry is largest (a
    bottleneck matching found by thresholding the distinct positive values),
    and subtracts that entry along it. At least one entry hits zero per step.

    Raises:
        CopulaError: if J is not doubly stochastic.
    """
    if not is_doubly_stochastic(J):
        raise CopulaError("input is not doubly stochastic")
    n = len(J)
    work = [list(r) for r in J]
    terms = []
    remaining = Fraction(1)
    while remaining > 0:
        values = sorted({x for r in work for x in r if x > 0}, reverse=True)
        perm = None
        lo, hi = 0, len(values) - 1
        # largest threshold admitting a perfect matching; binary search over the sorted values
        while lo <= hi:
            mid = (lo + hi) // 2
            cand = _perfect_matching([[x >= values[mid] for x in r] for r in work])
            if cand is not None:
                perm = cand
                hi = mid - 1
            else:
                lo = mid + 1
        if perm is None:  # pragma: no cover - Birkhoff's theorem guarantees a matching
            raise CopulaError("no positive permutation found")
        w = min(work[i][perm[i]] for i in range(n))
        for i in range(n):
            work[i][perm[i]] -= w
        remaining -= w
        terms.append((w, tuple(perm)))
    return BirkhoffDecomposition(tuple(terms))


def copula_from_decomposition(decomp: BirkhoffDecomposition, m) -> Matrix:
    """Invert :func:`to_bistochastic`: ``mu = mu0 - I + sum_phi w_phi P_phi``."""
    J = decomp.reconstruct()
    n = len(m)
    return tuple(tuple(J[s][a] - (1 - m[s] if s == a else 0) for a in range(n)) for s in range(n))


def extreme_points(m: Sequence[Fraction], cap: int = DEFAULT_VERTEX_CAP) -> list[Matrix]:
    """All vertices of the copula polytope for margins m.

    A vertex of a transportation polytope has a forest as support, and such a
    forest always has a leaf line. Setting a cell to the min of its row and
    column residuals and deleting the saturated line(s) therefore reaches
    every vertex when all cells are tried at every step (a northwest-corner
    rule with free order). Residual subproblems are memoized.

    Raises:
        CopulaError: if m is not strictly positive or ``len(m) > cap``.
    """
    m = tuple(Fraction(x) for x in m)
    n = len(m)
    if n > cap:
        raise CopulaError(f"vertex enumeration capped at {cap} states (got {n})")
    if any(x <= 0 for x in m) or sum(m) != 1:
        raise CopulaError("margin must be a strictly positive probability vector")

    @lru_cache(maxsize=None)
    def solve(rows: tuple, cols: tuple) -> frozenset:
        # rows/cols: tuples of (index, residual) with residual > 0
        if not rows:
            return frozenset([frozenset()])
        out = set()
        for ri, (i, r) in enumerate(rows):
            for ci, (j, c) in enumerate(cols):
                v = min(r, c)
                nrows = rows[:ri] + ((i, r - v),) + rows[ri + 1 :]
                ncols = cols[:ci] + ((j, c - v),) + cols[ci + 1 :]
                nrows = tuple(x for x in nrows if x[1] > 0)
                ncols = tuple(x for x in ncols if x[1] > 0)
                for rest in solve(nrows, ncols):
                    out.add(rest | {(i, j, v)})
        return frozenset(out)

    verts = solve(tuple(enumerate(m)), tuple(enumerate(m)))
    result = []
    for cells in verts:
        mu = [[_ZERO] * n for _ in range(n)]
        for i, j, v in cells:
            mu[i][j] += v
        result.append(tuple(tuple(r) for r in mu))
    result.sort()
    return result


def l1_distance(mu, nu) -> Fraction:
    return l1(mu, nu)


def swap_copula(m: Sequence[Fraction], i: int = 0, j: int = 1) -> Matrix:
    """Copula exchanging reports of states i and j (a copula only if m[i] == m[j])."""
    n = len(m)
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    return tuple(tuple(Fraction(m[s]) if a == perm[s] else _ZERO for a in range(n)) for s in range(n))


def sample_copula(m: Sequence[Fraction], seed, denominator: int = 64, cap: int = DEFAULT_VERTEX_CAP) -> Matrix:
    """Random copula: a convex combination of vertices with rational weights.

    Weights are drawn as integer counts over ``denominator`` so the result is
    exact. Above ``cap`` states the truthful and the independent copula
    stand in for the vertex list.
    """
    rng = np.random.default_rng(seed)
    m = tuple(Fraction(x) for x in m)
    n = len(m)
    if n <= cap:
        verts = extreme_points(m, cap)
    else:
        verts = [mu_zero(m), tuple(tuple(x * y for y in m) for x in m)]
    counts = rng.multinomial(denominator, rng.dirichlet(np.ones(len(verts))))
    mu = [[_ZERO] * n for _ in range(n)]
    for c, v in zip(counts, verts):
        if c:
            w = Fraction(int(c), denominator)
            for s in range(n):
                for a in range(n):
                    if v[s][a]:
                        mu[s][a] += w * v[s][a]
    return tuple(tuple(r) for r in mu)


def is_vertex(mu, m) -> bool:
    """LP-free vertex test: the support graph of mu must be a forest.

    For a point of a transportation polytope this is equivalent to being an
    extreme point (the support columns are then linearly independent).
    """
    n = len(m)
    parent = list(range(2 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in range(n):
        for a in range(n):
            if mu[s][a] > 0:
                rs, ra = find(s), find(n + a)
                if rs == ra:
                    return False
                parent[rs] = ra
    return True
