"""The limit equilibrium payoff set E(M) and the genericity machinery around it.

Strategies are flattened to ``x[a * n_b + b] = y(b|a)``. The feasible set of
strategies is the polytope cut out by the simplex rows, one sender
incentive inequality per non-identity permutation of the states, and the
receiver's individual rationality inequality. Everything is solved with the
exact simplex in :mod:`markovtalk.lp`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from . import lp
from .assignment import best_non_identity, solve_assignment
from .copula import extreme_points, l1_distance
from .game import (
    GameSpec,
    babbling_payoffs,
    babbling_strategy,
    babbling_value,
    check_C1,
    check_C2,
    check_D1,
    check_D2,
    identity_value,
    is_constant,
    is_one_to_one,
    mu_zero,
    payoff_U,
    report_matrix,
)
from .polygon import Polygon2D, convex_hull, cross, minkowski_sum
from .rational import Matrix

log = logging.getLogger(__name__)

_ZERO = Fraction(0)

#: permutation rows are written out up to this many states; above it they are generated lazily
MATERIALIZE_LIMIT = 4
#: default perturbation size in :func:`theorem3_pipeline`
DEFAULT_EPS = Fraction(1, 100)


class PreconditionError(ValueError):
    """An operation was called on a game or strategy outside its domain."""


class StrategyPolytope:
    """Linear description of the strategies satisfying C1 (permutation form) and C2.

    Args:
        game: the game.
        lazy: generate permutation rows on demand through an assignment
            oracle. Defaults to True above :data:`MATERIALIZE_LIMIT` states.
    """

    def __init__(self, game: GameSpec, lazy: bool | None = None):
        self.game = game
        self.n_s, self.n_b = game.n_states, game.n_actions
        self.dim = self.n_s * self.n_b
        self.lazy = self.n_s > MATERIALIZE_LIMIT if lazy is None else lazy
        m = game.m
        self.g1 = tuple(m[a] * game.u1[a][b] for a in range(self.n_s) for b in range(self.n_b))
        self.g2 = tuple(m[a] * game.u2[a][b] for a in range(self.n_s) for b in range(self.n_b))
        self.v2 = babbling_value(game)
        ident = tuple(range(self.n_s))
        if self.lazy:
            self.perms: list[tuple[int, ...]] = []
        else:
            self.perms = [p for p in permutations(range(self.n_s)) if p != ident]

    def perm_row(self, phi: Sequence[int]) -> list[Fraction]:
        """Coefficients of ``sum_s u1(s, y(.|phi(s))) - sum_s u1(s, y(.|s))``."""
        row = [_ZERO] * self.dim
        u1 = self.game.u1
        for s in range(self.n_s):
            if phi[s] == s:
                continue
            for b in range(self.n_b):
                row[phi[s] * self.n_b + b] += u1[s][b]
                row[s * self.n_b + b] -= u1[s][b]
        return row

    def constraints(self, slack: bool = False, extra_dims: int = 0):
        """``(A_ub, b_ub, A_eq, b_eq)``; with ``slack`` the last variable t tightens C1 and C2."""
        width = self.dim + extra_dims + (1 if slack else 0)
        A_ub, b_ub = [], []
        for phi in self.perms:
            row = self.perm_row(phi) + [_ZERO] * (width - self.dim)
            if slack:
                row[-1] = Fraction(1)
            A_ub.append(row)
            b_ub.append(_ZERO)
        c2 = [-g for g in self.g2] + [_ZERO] * (width - self.dim)
        if slack:
            c2[-1] = Fraction(1)
        A_ub.append(c2)
        b_ub.append(-self.v2)
        A_eq, b_eq = [], []
        for a in range(self.n_s):
            row = [_ZERO] * width
            for b in range(self.n_b):
                row[a * self.n_b + b] = Fraction(1)
            A_eq.append(row)
            b_eq.append(Fraction(1))
        return A_ub, b_ub, A_eq, b_eq

    def unflatten(self, x: Sequence[Fraction]) -> Matrix:
        return tuple(tuple(x[a * self.n_b + b] for b in range(self.n_b)) for a in range(self.n_s))

    def _violated_perm(self, y: Matrix, t: Fraction = _ZERO):
        M = report_matrix(y, self.game)
        best = best_non_identity(M)
        if best is not None and best[0] - identity_value(y, self.game) + t > 0:
            return best[1]
        return None

    def solve(self, objectives: Sequence[Sequence[Fraction]], slack: bool = False) -> lp.LPResult:
        """Lexicographically maximize ``objectives`` over the polytope.

        In lazy mode, violated permutation rows are appended until the
        optimum satisfies all of them.
        """
        while True:
            A_ub, b_ub, A_eq, b_eq = self.constraints(slack)
            res = lp.lexmax(objectives, A_ub, b_ub, A_eq, b_eq)
            if not res.ok:
                raise lp.LPError(f"strategy polytope LP is {res.status}; the babbling strategy should be feasible")
            if not self.lazy:
                return res
            y = self.unflatten(res.x)
            t = res.x[self.dim] if slack else _ZERO
            phi = self._violated_perm(y, t)
            if phi is None:
                return res
            self.perms.append(phi)

    def payoff(self, x: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
        return (
            sum((g * v for g, v in zip(self.g1, x)), _ZERO),
            sum((g * v for g, v in zip(self.g2, x)), _ZERO),
        )

    def direction(self, d: Sequence[Fraction]) -> list[Fraction]:
        return [d[0] * g1 + d[1] * g2 for g1, g2 in zip(self.g1, self.g2)]


def compute_E_polygon(game: GameSpec, lazy: bool | None = None) -> Polygon2D:
    """E(M) as an exact polygon in payoff space.

    Support-direction sweep: extreme points in the four axis directions seed
    a hull; for each hull edge the LP is maximized along the outward normal
    and either certifies the edge (optimum on the chord) or yields a new
    vertex beyond it, after which both halves are refined. Every LP is
    lexicographic (normal first, then the normal rotated by +90 degrees), so
    each returned point is a vertex of the image.
    """
    poly = StrategyPolytope(game, lazy)
    found: dict[tuple, Matrix] = {}

    def extreme(d):
        obj = poly.direction(d)
        tie = poly.direction((-d[1], d[0]))
        res = poly.solve([obj, tie])
        pt = poly.payoff(res.x)
        found.setdefault(pt, poly.unflatten(res.x))
        return pt

    one, zero = Fraction(1), _ZERO
    for d in ((one, zero), (zero, one), (-one, zero), (zero, -one)):
        extreme(d)
    hull = convex_hull(found)
    if len(hull) == 2:
        edges = [(hull[0], hull[1]), (hull[1], hull[0])]
    elif len(hull) > 2:
        edges = [(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull))]
    else:
        edges = []
    while edges:
        a, b = edges.pop()
        normal = (b[1] - a[1], a[0] - b[0])
        pt = extreme(normal)
        if normal[0] * pt[0] + normal[1] * pt[1] > normal[0] * a[0] + normal[1] * a[1]:
            edges.append((a, pt))
            edges.append((pt, b))
    hull = convex_hull(found)
    log.debug("E(M) polygon for %s: %d vertices, %d LP points", game.label, len(hull), len(found))
    return Polygon2D(tuple(hull), tuple(found[v] for v in hull))


def feasible_polygon(game: GameSpec) -> Polygon2D:
    """Convex hull of ``U(mu0, y)`` over all strategies (no incentive constraints).

    It is the Minkowski sum over states of ``m(s)`` times the payoff vectors
    available in that state.
    """
    acc = [(_ZERO, _ZERO)]
    for s in range(game.n_states):
        pts = [(game.m[s] * game.u1[s][b], game.m[s] * game.u2[s][b]) for b in range(game.n_actions)]
        acc = minkowski_sum(acc, convex_hull(pts))
    return Polygon2D(tuple(acc))


@dataclass(frozen=True)
class EHatResult:
    nonempty: bool
    witness: Matrix
    slack: Fraction

    def __bool__(self) -> bool:
        return self.nonempty


def E_hat_nonempty(game: GameSpec, lazy: bool | None = None) -> EHatResult:
    """Largest uniform slack t in the strict versions of C1 and C2.

    The strict set is nonempty iff the optimal t is positive.
    """
    poly = StrategyPolytope(game, lazy)
    obj = [_ZERO] * poly.dim + [Fraction(1)]
    res = poly.solve([obj], slack=True)
    t = res.x[poly.dim]
    return EHatResult(t > 0, poly.unflatten(res.x[: poly.dim]), t)


@dataclass(frozen=True)
class ConditionBResult:
    holds: bool
    witness: Matrix | None
    gap: Fraction

    def __bool__(self) -> bool:
        return self.holds


def check_condition_B(game: GameSpec, lazy: bool | None = None) -> ConditionBResult:
    """Search for a non-constant feasible strategy.

    Maximizes ``y(b|s) - y(b|s')`` for every ordered pair of states and every
    action, stopping at the first strictly positive optimum.
    """
    poly = StrategyPolytope(game, lazy)
    nb = poly.n_b
    for s in range(poly.n_s):
        for s2 in range(poly.n_s):
            if s2 == s:
                continue
            for b in range(nb):
                obj = [_ZERO] * poly.dim
                obj[s * nb + b] = Fraction(1)
                obj[s2 * nb + b] = Fraction(-1)
                res = poly.solve([obj])
                if res.value > 0:
                    return ConditionBResult(True, poly.unflatten(res.x), res.value)
    return ConditionBResult(False, None, _ZERO)


def max_receiver_payoff(game: GameSpec, lazy: bool | None = None) -> tuple[Fraction, Matrix]:
    """Highest ``U2(mu0, y)`` over feasible strategies, with a maximizer."""
    poly = StrategyPolytope(game, lazy)
    res = poly.solve([list(poly.g2), list(poly.g1)])
    return res.value, poly.unflatten(res.x)


# --- perturbations toward a game with a nonempty strict set -------------------------


def perturb_u2(game: GameSpec, y: Matrix, eps) -> GameSpec:
    """Add ``eps * P(s,b) / (P(s) P(b))`` to the receiver's payoffs, ``P(s,b) = m(s) y(b|s)``.

    This raises the babbling value by exactly eps and the payoff of any
    non-constant y by strictly more.

    Raises:
        PreconditionError: y constant or failing C2.
    """
    eps = Fraction(eps)
    if is_constant(y):
        raise PreconditionError("the u2 perturbation needs a non-constant strategy")
    if not check_C2(y, game):
        raise PreconditionError("strategy violates the receiver's participation constraint")
    if eps == 0:
        return game
    m = game.m
    Pb = [sum((m[s] * y[s][b] for s in range(game.n_states)), _ZERO) for b in range(game.n_actions)]
    u2 = tuple(
        tuple(
            game.u2[s][b] + (eps * m[s] * y[s][b] / (m[s] * Pb[b]) if Pb[b] > 0 else 0)
            for b in range(game.n_actions)
        )
        for s in range(game.n_states)
    )
    new = game.with_payoffs(u2=u2)
    assert check_D2(y, new), "u2 perturbation failed to make C2 strict"
    return new


def perturb_u1(game: GameSpec, y: Matrix, eps) -> GameSpec:
    """Add ``eps * y(b|s)`` to the sender's payoffs, making truth-telling strictly optimal.

    Raises:
        PreconditionError: y not one-to-one or failing C1.
    """
    eps = Fraction(eps)
    if not is_one_to_one(y):
        raise PreconditionError("the u1 perturbation needs a one-to-one strategy")
    if not check_C1(y, game):
        raise PreconditionError("strategy violates sender incentive compatibility")
    if eps == 0:
        return game
    u1 = tuple(tuple(game.u1[s][b] + eps * y[s][b] for b in range(game.n_actions)) for s in range(game.n_states))
    new = game.with_payoffs(u1=u1)
    assert check_D1(y, new), "u1 perturbation failed to make C1 strict"
    return new


def distinct_points(n_s: int, n_b: int) -> list[tuple[Fraction, ...]]:
    """``n_s`` distinct mixed actions: vertex ``s mod n_b`` pulled toward the barycenter by weight ``s/n_s``."""
    if n_b == 1 and n_s > 1:
        raise PreconditionError("a single receiver action admits no one-to-one strategy")
    out = []
    for s in range(n_s):
        w = Fraction(s, n_s)
        v = s % n_b
        out.append(tuple((1 - w) * int(b == v) + w / n_b for b in range(n_b)))
    return out


def make_one_to_one(game: GameSpec, y: Matrix, eps) -> Matrix:
    """Nearby one-to-one strategy that keeps C1.

    Mixes y with distinct mixed actions assigned to states by the sender's
    optimal assignment (so the mixture still satisfies the permutation test).
    If the mixture happens to merge two rows, eps is halved until it does not.
    """
    eps = Fraction(eps)
    if not check_C1(y, game):
        raise PreconditionError("strategy violates sender incentive compatibility")
    z = distinct_points(game.n_states, game.n_actions)
    weights = [[sum((game.u1[s][b] * z[j][b] for b in range(game.n_actions)), _ZERO) for j in range(len(z))] for s in range(game.n_states)]
    _, psi = solve_assignment(weights)
    z_tilde = [z[psi[s]] for s in range(game.n_states)]
    if eps == 0:
        return tuple(tuple(r) for r in y)
    for _ in range(64):
        cand = tuple(tuple((1 - eps) * y[s][b] + eps * z_tilde[s][b] for b in range(game.n_actions)) for s in range(game.n_states))
        if is_one_to_one(cand):
            return cand
        eps /= 2
    raise PreconditionError("could not separate the strategy rows")  # pragma: no cover


@dataclass(frozen=True)
class Theorem3Result:
    perturbed_game: GameSpec
    witness: Matrix
    distance: Fraction
    eps_used: Fraction


def payoff_distance(g1: GameSpec, g2: GameSpec) -> Fraction:
    """Sup-norm distance between the payoff functions of two games."""
    return max(
        abs(a - b)
        for ua, ub in ((g1.u1, g2.u1), (g1.u2, g2.u2))
        for ra, rb in zip(ua, ub)
        for a, b in zip(ra, rb)
    )


def theorem3_pipeline(game: GameSpec, eps=DEFAULT_EPS, lazy: bool | None = None) -> Theorem3Result:
    """Perturb a Condition-B game into a nearby game with a nonempty strict set.

    Order: strict receiver participation on the Condition-B witness, then a
    one-to-one repair small enough to keep it strict, then the sender
    perturbation that makes truth-telling strictly optimal.

    Raises:
        PreconditionError: if Condition B fails (every nearby game is babbling-only).
    """
    eps = Fraction(eps)
    cb = check_condition_B(game, lazy)
    if not cb:
        raise PreconditionError("Condition B fails: only constant strategies are feasible, so no nearby game has a strict equilibrium witness")
    y = cb.witness
    g2 = perturb_u2(game, y, eps)
    mix = eps
    while True:
        y1 = make_one_to_one(game, y, mix)
        if check_D2(y1, g2):
            break
        mix /= 2
    g3 = perturb_u1(g2, y1, eps)
    assert check_D1(y1, g3) and check_D2(y1, g3)
    return Theorem3Result(g3, y1, payoff_distance(game, g3), eps)


# --- the constants behind the "near-optimal reports are mostly truthful" bound ------


@dataclass(frozen=True)
class Lemma2Constants:
    c1: Fraction
    c2: Fraction
    y0: Matrix
    epsilon: Fraction


@dataclass(frozen=True)
class Lemma2Check:
    lhs: Fraction
    rhs: Fraction
    holds: bool
    constants: Lemma2Constants


def lemma2_constants(game: GameSpec, y0: Matrix, eps) -> Lemma2Constants:
    """``c1`` = smallest sender loss of y0 at a non-truthful vertex; ``c2`` = largest L1 distance of a vertex from mu0."""
    mu0 = mu_zero(game.m)
    base = payoff_U(mu0, y0, game).v1
    verts = [v for v in extreme_points(game.m) if v != mu0]
    c1 = min(base - payoff_U(v, y0, game).v1 for v in verts)
    c2 = max(l1_distance(v, mu0) for v in verts)
    if c1 <= 0:
        raise PreconditionError("y0 is not a strict witness (c1 <= 0)")
    return Lemma2Constants(c1, c2, y0, Fraction(eps))


def lemma2_bound_check(game: GameSpec, y0: Matrix, y_bar: Matrix, eps, mu, constants: Lemma2Constants | None = None) -> Lemma2Check:
    """Evaluate ``U1(mu0,y) - U1(mu,y) >= (eps c1 / c2) |mu - mu0|_1`` for ``y = eps y0 + (1-eps) y_bar``."""
    eps = Fraction(eps)
    k = constants or lemma2_constants(game, y0, eps)
    y = mix_strategies(y0, y_bar, eps)
    mu0 = mu_zero(game.m)
    lhs = payoff_U(mu0, y, game).v1 - payoff_U(mu, y, game).v1
    rhs = eps * k.c1 / k.c2 * l1_distance(mu, mu0)
    return Lemma2Check(lhs, rhs, lhs >= rhs, k)


def mix_strategies(y0: Matrix, y1: Matrix, eps) -> Matrix:
    """``eps * y0 + (1 - eps) * y1``."""
    eps = Fraction(eps)
    return tuple(tuple(eps * a + (1 - eps) * b for a, b in zip(r0, r1)) for r0, r1 in zip(y0, y1))


def nearest_copula(mu_hat, m) -> tuple[Matrix, Fraction]:
    """L1 projection of a matrix onto the copula polytope for m (exact LP)."""
    n = len(m)
    k = n * n
    # variables: mu (k), e (k) with e >= |mu - mu_hat|
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i in range(k):
        s, a = divmod(i, n)
        row = [_ZERO] * (2 * k)
        row[i], row[k + i] = Fraction(1), Fraction(-1)
        A_ub.append(row)
        b_ub.append(Fraction(mu_hat[s][a]))
        row = [_ZERO] * (2 * k)
        row[i], row[k + i] = Fraction(-1), Fraction(-1)
        A_ub.append(row)
        b_ub.append(-Fraction(mu_hat[s][a]))
    for s in range(n):
        row = [_ZERO] * (2 * k)
        for a in range(n):
            row[s * n + a] = Fraction(1)
        A_eq.append(row)
        b_eq.append(Fraction(m[s]))
    for a in range(n):
        row = [_ZERO] * (2 * k)
        for s in range(n):
            row[s * n + a] = Fraction(1)
        A_eq.append(row)
        b_eq.append(Fraction(m[a]))
    obj = [_ZERO] * k + [Fraction(-1)] * k
    res = lp.linprog(obj, A_ub, b_ub, A_eq, b_eq)
    if not res.ok:  # pragma: no cover
        raise lp.LPError("projection LP failed")
    mu = tuple(tuple(res.x[s * n + a] for a in range(n)) for s in range(n))
    return mu, -res.value


def babbling_point(game: GameSpec) -> tuple[Fraction, Fraction]:
    """Payoff of the babbling equilibrium (lowest-index receiver-optimal action)."""
    p1, p2 = babbling_payoffs(game)
    b = p2.index(max(p2))
    return (p1[b], p2[b])


__all__ = [
    "ConditionBResult",
    "EHatResult",
    "Lemma2Check",
    "Lemma2Constants",
    "PreconditionError",
    "StrategyPolytope",
    "Theorem3Result",
    "E_hat_nonempty",
    "babbling_point",
    "babbling_strategy",
    "check_condition_B",
    "compute_E_polygon",
    "cross",
    "feasible_polygon",
    "lemma2_bound_check",
    "lemma2_constants",
    "make_one_to_one",
    "max_receiver_payoff",
    "mix_strategies",
    "nearest_copula",
    "perturb_u1",
    "perturb_u2",
    "theorem3_pipeline",
]
