"""Dynamic sender-receiver games and the stationary-strategy payoff map.

A game has states S (which double as the sender's messages), receiver
actions B, payoff matrices ``u1`` (sender) and ``u2`` (receiver) indexed
``[state][action]``, and a transition matrix over S.

A stationary receiver strategy ``y`` is a matrix ``y[a][b]``: the probability
of action b after announcement a. A copula ``mu[s][a]`` is a joint law of
(state, announcement).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import chain
from .assignment import best_non_identity, lexicographic_argmax
from .rational import Matrix, Vector, matrix

_ZERO = Fraction(0)


class GameError(ValueError):
    """Inconsistent game or strategy data."""


class PayoffPoint(NamedTuple):
    v1: Fraction
    v2: Fraction


@dataclass(frozen=True)
class GameSpec:
    u1: Matrix
    u2: Matrix
    p: Matrix
    states: tuple[str, ...] = ()
    actions: tuple[str, ...] = ()
    label: str = ""
    m: Vector = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        u1, u2 = matrix(self.u1), matrix(self.u2)
        p = chain.transition_matrix(self.p)
        n_s, n_b = len(u1), len(u1[0]) if u1 else 0
        if n_s < 2:
            raise GameError("a game needs at least two states")
        if n_b < 1 or any(len(r) != n_b for r in u1) or len(u2) != n_s or any(len(r) != n_b for r in u2):
            raise GameError("payoff matrices must both be |S| x |B|")
        if len(p) != n_s:
            raise GameError("transition matrix size does not match the number of states")
        erg = chain.check_ergodic(p)
        if not erg.irreducible:
            raise chain.NotIrreducible("transition matrix is reducible")
        if not erg.aperiodic:
            raise chain.ChainError(f"transition matrix is periodic (period {erg.period})")
        states = tuple(self.states) or tuple(f"s{i}" for i in range(n_s))
        actions = tuple(self.actions) or tuple(f"b{j}" for j in range(n_b))
        if len(states) != n_s or len(actions) != n_b:
            raise GameError("state/action names do not match matrix sizes")
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "m", chain.invariant_measure(p))

    @property
    def n_states(self) -> int:
        return len(self.u1)

    @property
    def n_actions(self) -> int:
        return len(self.u1[0])

    def with_payoffs(self, u1=None, u2=None) -> "GameSpec":
        return replace(self, u1=self.u1 if u1 is None else u1, u2=self.u2 if u2 is None else u2)


def strategy(rows, game: GameSpec | None = None) -> Matrix:
    """Validate a stationary strategy and convert it to exact rationals."""
    y = matrix(rows)
    for a, row in enumerate(y):
        if any(x < 0 for x in row) or sum(row) != 1:
            raise GameError(f"row {a} of the strategy is not a probability vector")
    if game is not None and (len(y) != game.n_states or any(len(r) != game.n_actions for r in y)):
        raise GameError("strategy must be |S| x |B|")
    return y


def pure_strategy(actions: Sequence[int], n_actions: int) -> Matrix:
    """Strategy playing ``actions[a]`` after announcement a."""
    return tuple(tuple(Fraction(int(b == j)) for j in range(n_actions)) for b in actions)


def constant_strategy(row: Sequence, n_states: int) -> Matrix:
    r = tuple(Fraction(x) for x in row)
    return tuple(r for _ in range(n_states))


def is_constant(y: Sequence[Sequence[Fraction]]) -> bool:
    return all(tuple(r) == tuple(y[0]) for r in y)


def is_one_to_one(y: Sequence[Sequence[Fraction]]) -> bool:
    return len({tuple(r) for r in y}) == len(y)


def expected_payoff(u: Sequence[Sequence[Fraction]], s: int, dist: Sequence[Fraction]) -> Fraction:
    """``u(s, dist)`` for a mixed action ``dist``."""
    return sum((d * x for d, x in zip(dist, u[s]) if d), _ZERO)


def payoff_U(mu, y, game: GameSpec) -> PayoffPoint:
    """``U(mu, y) = sum_{s,a} mu(s,a) u(s, y(.|a))`` for both players."""
    n = game.n_states
    if len(mu) != n or any(len(r) != n for r in mu) or len(y) != n:
        raise GameError("dimension mismatch between copula, strategy and game")
    v1 = v2 = _ZERO
    for s in range(n):
        for a in range(n):
            w = mu[s][a]
            if w:
                v1 += w * expected_payoff(game.u1, s, y[a])
                v2 += w * expected_payoff(game.u2, s, y[a])
    return PayoffPoint(v1, v2)


def mu_zero(m: Sequence[Fraction]) -> Matrix:
    """The truthful copula: ``mu0(s, s) = m(s)``."""
    n = len(m)
    return tuple(tuple(Fraction(m[s]) if s == a else _ZERO for a in range(n)) for s in range(n))


def babbling_value(game: GameSpec) -> Fraction:
    """``v2 = max_b sum_s m(s) u2(s, b)``."""
    return max(babbling_payoffs(game)[1])


def babbling_payoffs(game: GameSpec) -> tuple[Vector, Vector]:
    """Ex-ante payoff of each constant action for both players."""
    m = game.m
    cols = range(game.n_actions)
    return (
        tuple(sum((m[s] * game.u1[s][b] for s in range(game.n_states)), _ZERO) for b in cols),
        tuple(sum((m[s] * game.u2[s][b] for s in range(game.n_states)), _ZERO) for b in cols),
    )


def babbling_strategy(game: GameSpec) -> Matrix:
    """Constant strategy on the lowest-index receiver-optimal action."""
    vals = babbling_payoffs(game)[1]
    best = vals.index(max(vals))
    return pure_strategy([best] * game.n_states, game.n_actions)


def report_matrix(y, game: GameSpec) -> Matrix:
    """``M[s][a] = u1(s, y(.|a))``, the sender's payoff from reporting a in state s."""
    n = game.n_states
    return tuple(tuple(expected_payoff(game.u1, s, y[a]) for a in range(n)) for s in range(n))


def identity_value(y, game: GameSpec) -> Fraction:
    return sum((expected_payoff(game.u1, s, y[s]) for s in range(game.n_states)), _ZERO)


@dataclass(frozen=True)
class C1Result:
    holds: bool
    worst_permutation: tuple[int, ...]
    identity_value: Fraction
    worst_value: Fraction

    def __bool__(self) -> bool:
        return self.holds


def check_C1(y, game: GameSpec) -> C1Result:
    """Sender incentive compatibility via the permutation test.

    Truth-telling is optimal against every copula iff the identity maximizes
    ``sum_s u1(s, y(.|phi(s)))`` over permutations phi, which is an assignment
    problem on :func:`report_matrix`. ``worst_permutation`` is the
    lexicographically smallest maximizer.
    """
    M = report_matrix(y, game)
    best, perm = lexicographic_argmax(M)
    ident = identity_value(y, game)
    return C1Result(ident == best, perm, ident, best)


def check_D1(y, game: GameSpec) -> bool:
    """True iff the identity is the unique optimal assignment."""
    M = report_matrix(y, game)
    other = best_non_identity(M)
    return other is None or identity_value(y, game) > other[0]


def check_C2(y, game: GameSpec) -> bool:
    return payoff_U(mu_zero(game.m), y, game).v2 >= babbling_value(game)


def check_D2(y, game: GameSpec) -> bool:
    return payoff_U(mu_zero(game.m), y, game).v2 > babbling_value(game)


@dataclass(frozen=True)
class Membership:
    in_E: bool
    payoff: PayoffPoint
    c1: bool
    c2: bool


def membership_in_E(y, game: GameSpec) -> Membership:
    """Whether ``U(mu0, y)`` is a limit equilibrium payoff witnessed by y."""
    c1 = check_C1(y, game).holds
    c2 = check_C2(y, game)
    return Membership(c1 and c2, payoff_U(mu_zero(game.m), y, game), c1, c2)


def one_shot_embed(sigma, tau, game: GameSpec | None = None) -> Matrix:
    """Stationary strategy induced by a one-shot profile.

    The receiver replays the one-shot sender rule on a truthful report and
    then the one-shot receiver rule: ``y(.|s) = sum_a sigma(a|s) tau(a)``.
    ``sigma[s][a]`` and ``tau[a][b]`` are row-stochastic.
    """
    sigma, tau = matrix(sigma), matrix(tau)
    n_b = len(tau[0])
    y = tuple(
        tuple(sum((sigma[s][a] * tau[a][b] for a in range(len(tau))), _ZERO) for b in range(n_b))
        for s in range(len(sigma))
    )
    return strategy(y, game)
