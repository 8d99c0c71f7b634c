"""Finite Markov chain analysis in exact arithmetic.

Transition matrices are row-indexed: ``p[s][t]`` is the probability of moving
from ``s`` to ``t``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .rational import Matrix, Vector, matrix, solve


class ChainError(ValueError):
    """Malformed transition matrix."""


class NotIrreducible(ChainError):
    """The chain has no unique invariant measure with full support."""


def transition_matrix(rows) -> Matrix:
    """Validate and convert a transition matrix to exact rationals."""
    p = matrix(rows)
    n = len(p)
    if n == 0 or any(len(r) != n for r in p):
        raise ChainError("transition matrix must be square and non-empty")
    for s, row in enumerate(p):
        if any(x < 0 or x > 1 for x in row):
            raise ChainError(f"row {s} has an entry outside [0, 1]")
        if sum(row) != 1:
            raise ChainError(f"row {s} sums to {sum(row)}, not 1")
    return p


def _reachable(adj: list[list[int]], start: int) -> set[int]:
    seen = {start}
    todo = [start]
    while todo:
        u = todo.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


@dataclass(frozen=True)
class Ergodicity:
    irreducible: bool
    aperiodic: bool
    period: int


def check_ergodic(p: Sequence[Sequence[Fraction]]) -> Ergodicity:
    """Irreducibility and period of the positive-entry digraph.

    Irreducible means strongly connected. The period is the gcd of
    ``level[u] + 1 - level[v]`` over edges inside the class of state 0, with
    BFS levels from state 0; it is reported for that class even when the
    chain is reducible.
    """
    n = len(p)
    adj = [[t for t in range(n) if p[s][t] > 0] for s in range(n)]
    radj = [[s for s in range(n) if p[s][t] > 0] for t in range(n)]
    fwd = _reachable(adj, 0)
    bwd = _reachable(radj, 0)
    irreducible = len(fwd) == n and len(bwd) == n
    scc = fwd & bwd

    level = {0: 0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in scc and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    period = 0
    for u in scc:
        for v in adj[u]:
            if v in scc:
                period = gcd(period, level[u] + 1 - level[v])
    return Ergodicity(irreducible, period == 1, period)


def invariant_measure(p: Sequence[Sequence[Fraction]]) -> Vector:
    """Unique stationary distribution of an irreducible chain.

    Solves ``m (P - I) = 0`` with one balance equation replaced by
    ``sum(m) = 1``.

    Raises:
        NotIrreducible: if the chain is reducible.
    """
    n = len(p)
    if not check_ergodic(p).irreducible:
        raise NotIrreducible("chain is reducible; the invariant measure is not unique")
    a = [[p[s][t] - (1 if s == t else 0) for s in range(n)] for t in range(n)]
    a[-1] = [Fraction(1)] * n
    b = [Fraction(0)] * (n - 1) + [Fraction(1)]
    return solve(a, b)


@dataclass(frozen=True)
class AssumptionAResult:
    """Either a witness ``alpha`` or a violating triple.

    ``violation`` is ``(s, s1, s2)`` with ``p[s][s1] != p[s2][s1]``: two rows
    other than ``s1`` disagree on the probability of moving into ``s1``.
    """

    holds: bool
    alpha: Vector | None = None
    violation: tuple[int, int, int] | None = None

    def __bool__(self) -> bool:
        return self.holds


def check_assumption_A(p: Sequence[Sequence[Fraction]]) -> AssumptionAResult:
    """Test whether off-diagonal transitions depend only on the destination."""
    n = len(p)
    for s in range(n):
        for s1 in range(n):
            if s1 == s:
                continue
            for s2 in range(n):
                if s2 in (s, s1):
                    continue
                if p[s][s1] != p[s2][s1]:
                    return AssumptionAResult(False, violation=(s, s1, s2))
    alpha = tuple(p[(t + 1) % n][t] for t in range(n)) if n > 1 else (Fraction(0),)
    total = sum(alpha)
    if any(total - alpha[s] > 1 for s in range(n)):  # pragma: no cover - implied by row sums
        return AssumptionAResult(False)
    return AssumptionAResult(True, alpha=alpha)


def reconstruct_from_alpha(alpha: Sequence[Fraction]) -> Matrix:
    """Transition matrix with ``p(t|s) = alpha[t]`` off the diagonal."""
    n = len(alpha)
    total = sum(alpha, Fraction(0))
    return tuple(
        tuple(alpha[t] if t != s else 1 - (total - alpha[s]) for t in range(n)) for s in range(n)
    )


def quota_distribution(m: Sequence[Fraction], N: int) -> tuple[int, ...]:
    """Integer quotas ``N * m_N(s)`` by largest-remainder rounding.

    Ties between equal remainders go to the lower state index. The result
    minimizes the L1 distance to ``N * m`` among integer vectors summing to N.

    Returns:
        quotas whose sum is N; ``m_N(s) = quotas[s] / N``.
    """
    if N < 1:
        raise ValueError("block length must be at least 1")
    scaled = [Fraction(x) * N for x in m]
    base = [int(x.numerator // x.denominator) for x in scaled]
    left = N - sum(base)
    order = sorted(range(len(m)), key=lambda s: (-(scaled[s] - base[s]), s))
    for s in order[:left]:
        base[s] += 1
    return tuple(base)


def sample_path(p, n: int, seed, initial=None) -> np.ndarray:
    """Draw ``n`` consecutive states.

    Args:
        p: transition matrix.
        n: number of states to draw.
        seed: anything accepted by :func:`numpy.random.default_rng`.
        initial: distribution of the first state; defaults to the invariant measure.
    """
    if n < 1:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(seed)
    return sample_paths(p, n, rng, 1, initial)[0]


def sample_paths(p, n: int, rng: np.random.Generator, count: int, initial=None) -> np.ndarray:
    """``count`` independent paths of length ``n`` as an integer array."""
    pf = np.array([[float(x) for x in row] for row in p])
    if initial is None:
        initial = invariant_measure(p)
    init = np.array([float(x) for x in initial])
    cum = np.cumsum(pf, axis=1)
    cum[:, -1] = 1.0
    cinit = np.cumsum(init)
    cinit[-1] = 1.0
    u = rng.random((count, n))
    out = np.empty((count, n), dtype=np.int64)
    out[:, 0] = np.searchsorted(cinit, u[:, 0], side="right")
    for k in range(1, n):
        out[:, k] = (u[:, k, None] >= cum[out[:, k - 1]]).sum(axis=1)
    return out
