"""Exact two-phase primal simplex over the rationals with Bland's rule.

Solves::

    maximize    c . x
    subject to  A_ub x <= b_ub
                A_eq x == b_eq
                x >= 0

Every quantity is a :class:`fractions.Fraction`, so optimal values and the
sign of slacks are exact. Bland's smallest-index rule for both the entering
and the leaving variable rules out cycling on degenerate problems, which
are the norm here (the strategy polytopes have many tight constraints at
the babbling point).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)


class LPError(RuntimeError):
    """Raised when a problem that must be feasible and bounded is not."""


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.rows = rows  # each row: ncols coefficients followed by rhs
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        inv = 1 / prow[c]
        if inv != 1:
            prow = [x * inv if x else x for x in prow]
            self.rows[r] = prow
        nz = [j for j, x in enumerate(prow) if x]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
        self.basis[r] = c

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        """c_j - c_B B^-1 A_j for every column (maximization form)."""
        red = list(cost) + [_ZERO]
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[r]
                for j, x in enumerate(row):
                    if x:
                        red[j] -= cb * x
        return red

    def optimize(self, cost: Sequence[Fraction], allowed: int) -> str:
        """Maximize ``cost`` using only the first ``allowed`` columns as entering candidates."""
        red = self.reduced_costs(cost)
        while True:
            enter = next((j for j in range(allowed) if red[j] > 0), None)
            if enter is None:
                return OPTIMAL
            leave = None
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                return UNBOUNDED
            self.pivot(leave, enter)
            # update reduced costs with the new pivot row instead of recomputing
            f = red[enter]
            prow = self.rows[leave]
            for j, x in enumerate(prow):
                if x:
                    red[j] -= f * x


def linprog(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """Maximize ``c . x`` over the polyhedron; see module docstring."""
    n = len(c)
    cost = [Fraction(v) for v in c]
    rows: list[list[Fraction]] = []
    kinds: list[str] = []
    for a, b in zip(A_ub, b_ub):
        row = [Fraction(v) for v in a]
        rhs = Fraction(b)
        if rhs < 0:
            rows.append([-v for v in row] + [-rhs])
            kinds.append("ge")
        else:
            rows.append(row + [rhs])
            kinds.append("le")
    for a, b in zip(A_eq, b_eq):
        row = [Fraction(v) for v in a]
        rhs = Fraction(b)
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        rows.append(row + [rhs])
        kinds.append("eq")

    m = len(rows)
    n_slack = sum(k != "eq" for k in kinds)
    n_art = sum(k != "le" for k in kinds)
    total = n + n_slack + n_art
    tab_rows: list[list[Fraction]] = []
    basis: list[int] = []
    slack_j, art_j = n, n + n_slack
    for row, kind in zip(rows, kinds):
        full = row[:n] + [_ZERO] * (n_slack + n_art) + [row[n]]
        if kind == "le":
            full[slack_j] = Fraction(1)
            basis.append(slack_j)
            slack_j += 1
        else:
            if kind == "ge":
                full[slack_j] = Fraction(-1)
                slack_j += 1
            full[art_j] = Fraction(1)
            basis.append(art_j)
            art_j += 1
        tab_rows.append(full)

    tab = _Tableau(tab_rows, basis, total)
    first_art = n + n_slack
    if n_art:
        phase1 = [_ZERO] * first_art + [Fraction(-1)] * n_art
        tab.optimize(phase1, total)
        infeas = sum((row[-1] for row, b in zip(tab.rows, tab.basis) if b >= first_art), _ZERO)
        if infeas > 0:
            return LPResult(INFEASIBLE)
        # drive zero-valued artificials out of the basis; drop redundant rows
        keep = []
        for i in range(m):
            if tab.basis[i] >= first_art:
                col = next((j for j in range(first_art) if tab.rows[i][j] != 0), None)
                if col is None:
                    continue
                tab.pivot(i, col)
            keep.append(i)
        tab.rows = [tab.rows[i][:first_art] + [tab.rows[i][-1]] for i in keep]
        tab.basis = [tab.basis[i] for i in keep]
        tab.ncols = first_art

    status = tab.optimize(cost + [_ZERO] * n_slack, first_art)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [_ZERO] * first_art
    for row, b in zip(tab.rows, tab.basis):
        x[b] = row[-1]
    sol = tuple(x[:n])
    value = sum((ci * xi for ci, xi in zip(cost, sol)), _ZERO)
    return LPResult(OPTIMAL, sol, value)


def lexmax(
    objectives: Sequence[Sequence],
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """Lexicographic maximization: each objective is optimized over the optimal face of the previous ones.

    The returned ``value`` is the optimum of the first objective.
    """
    A_eq = [list(r) for r in A_eq]
    b_eq = list(b_eq)
    first = None
    res = None
    for obj in objectives:
        res = linprog(obj, A_ub, b_ub, A_eq, b_eq)
        if not res.ok:
            return res
        if first is None:
            first = res.value
        A_eq.append(list(obj))
        b_eq.append(res.value)
    return LPResult(OPTIMAL, res.x, first)
