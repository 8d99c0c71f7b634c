"""Block equilibrium machinery: quota automata, sender best replies, block payoffs.

Play is cut into blocks of N stages. In each block the receiver runs a
deterministic machine that maps the sender's announcements to mixed actions
(the mixing is done by a public device, so the machine itself is pure). The
sender best-replies inside the block by backward induction.

Machines expose a tiny protocol, all indexed by the stage ``n`` (1-based):

* ``initial()`` - machine state at stage 1,
* ``act(n, state, a)`` - mixed action played after announcement a,
* ``step(n, state, a)`` - machine state at stage n + 1,
* ``theta(n, state, a)`` - the announcement the receiver acts on (or None),
* ``schedule(n, state)`` - mixed actions for stages n..N when announcements
  no longer matter, else None.

Expected stage payoffs are used everywhere, which integrates out the
device's draw.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, prod
from typing import Sequence

import numpy as np

from . import chain
from .copula import l1_distance
from .equilibrium import E_hat_nonempty, PreconditionError, mix_strategies
from .game import GameSpec, babbling_value, expected_payoff, mu_zero, PayoffPoint
from .rational import Matrix, matpow, solve, vecmat

log = logging.getLogger(__name__)

_ZERO = Fraction(0)

#: largest number of (stage, machine state) pairs the sender DP will visit
DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


def fictitious_schedule(counts: Sequence[int], quotas: Sequence[int], remaining: int) -> tuple[int, ...]:
    """Quota-completing tail: each state in ascending order, repeated ``quota - count`` times.

    Args:
        counts: announcements per state strictly before the bust stage.
        quotas: N * m_N(s) per state.
        remaining: number of stages from the bust stage to N, inclusive.
    """
    residual = [q - c for q, c in zip(quotas, counts)]
    if any(r < 0 for r in residual) or sum(residual) != remaining:
        raise AssertionError(f"residual quotas {residual} do not fill {remaining} stages")
    return tuple(s for s, r in enumerate(residual) for _ in range(r))


def theta_sequence(announcements: Sequence[int], quotas: Sequence[int]) -> tuple[int, ...]:
    """Full announcement sequence the receiver acts on for one block."""
    N = sum(quotas)
    if len(announcements) != N:
        raise ValueError("need one announcement per stage")
    counts = [0] * len(quotas)
    out = []
    for n, a in enumerate(announcements):
        if counts[a] + 1 > quotas[a]:
            return tuple(out) + fictitious_schedule(counts, quotas, N - n)
        counts[a] += 1
        out.append(a)
    return tuple(out)


class BlockAutomaton:
    """The receiver's quota machine.

    State is ``(counts, tail)``: announcements used so far, and once the
    quotas have been broken, the remaining fictitious schedule. At the bust
    stage the offending announcement is discarded and the schedule starts.
    """

    def __init__(self, y: Matrix, quotas: Sequence[int]):
        self.y = tuple(tuple(r) for r in y)
        self.quotas = tuple(int(q) for q in quotas)
        if len(self.quotas) != len(self.y):
            raise ValueError("one quota per state")
        if any(q < 0 for q in self.quotas):
            raise ValueError("quotas must be nonnegative")
        self.N = sum(self.quotas)
        if self.N < 1:
            raise ValueError("quotas must sum to at least 1")

    @classmethod
    def for_game(cls, game: GameSpec, y: Matrix, N: int) -> "BlockAutomaton":
        return cls(y, chain.quota_distribution(game.m, N))

    @property
    def m_N(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(q, self.N) for q in self.quotas)

    def n_states_bound(self) -> int:
        return prod(q + 2 for q in self.quotas) * self.N

    def initial(self):
        return (tuple(0 for _ in self.quotas), None)

    def _resolve(self, n, state, a):
        counts, tail = state
        if tail is None and counts[a] + 1 > self.quotas[a]:
            tail = fictitious_schedule(counts, self.quotas, self.N - n + 1)
        return counts, tail

    def theta(self, n, state, a) -> int:
        counts, tail = self._resolve(n, state, a)
        return a if tail is None else tail[0]

    def act(self, n, state, a):
        return self.y[self.theta(n, state, a)]

    def step(self, n, state, a):
        counts, tail = self._resolve(n, state, a)
        if tail is None:
            return (counts[:a] + (counts[a] + 1,) + counts[a + 1 :], None)
        return (counts, tail[1:])

    def schedule(self, n, state):
        tail = state[1]
        if tail is None:
            return None
        return tuple(self.y[t] for t in tail)


class AlternationMachine:
    """Two-stage machine: listen in stage 1, then play a fixed reply to the stage-1 action.

    Args:
        first: pure action after each announcement in stage 1.
        second: pure action in stage 2 as a function of the stage-1 action.
        n_actions: size of the action set.
    """

    N = 2

    def __init__(self, first: Sequence[int], second: Sequence[int], n_actions: int):
        self.first = tuple(first)
        self.second = tuple(second)
        self.n_actions = n_actions

    def _pure(self, b):
        return tuple(Fraction(int(j == b)) for j in range(self.n_actions))

    def initial(self):
        return None

    def theta(self, n, state, a):
        return a if n == 1 else None

    def act(self, n, state, a):
        return self._pure(self.first[a] if n == 1 else self.second[state])

    def step(self, n, state, a):
        return self.first[a] if n == 1 else None

    def schedule(self, n, state):
        if n == 2:
            return (self._pure(self.second[state]),)
        return None


class ConstantMachine:
    """Ignore announcements and play ``row`` every stage (babbling)."""

    def __init__(self, row: Sequence[Fraction], N: int = 1):
        self.row = tuple(Fraction(x) for x in row)
        self.N = N

    def initial(self):
        return None

    def theta(self, n, state, a):
        return None

    def act(self, n, state, a):
        return self.row

    def step(self, n, state, a):
        return None

    def schedule(self, n, state):
        return tuple(self.row for _ in range(self.N - n + 1))


def sec3_alternation(game: GameSpec) -> AlternationMachine:
    """Listen and match in odd stages, play the other action in even stages (2 actions)."""
    return AlternationMachine(first=(0, 1), second=(1, 0), n_actions=game.n_actions)


# --- sender best reply ----------------------------------------------------------------


@dataclass
class SenderPolicy:
    """Pure sender strategy inside a block.

    ``choice[(n, state, s)]`` is the announcement; stages whose
    announcements are ignored are absent and default to message 0.
    ``value[s]`` is the sender's discounted block value from state s.
    """

    choice: dict
    value: tuple[Fraction, ...] = ()
    delta: Fraction | None = None

    def __call__(self, n, state, s) -> int:
        return self.choice.get((n, state, s), 0)


class TruthfulPolicy(SenderPolicy):
    def __init__(self):
        super().__init__({})

    def __call__(self, n, state, s) -> int:
        return s


def _tail_values(game: GameSpec, rows: tuple, delta: Fraction, u, memo: dict) -> tuple[Fraction, ...]:
    """``W(s) = u(s, rows[0]) + delta * sum_t p(t|s) W_next(t)`` along a fixed schedule."""
    if not rows:
        return tuple(_ZERO for _ in range(game.n_states))
    key = (id(u), rows)
    if key in memo:
        return memo[key]
    nxt = _tail_values(game, rows[1:], delta, u, memo)
    p = game.p
    out = tuple(
        expected_payoff(u, s, rows[0]) + delta * sum((p[s][t] * nxt[t] for t in range(game.n_states) if p[s][t]), _ZERO)
        for s in range(game.n_states)
    )
    memo[key] = out
    return out


def best_reply_sender(game: GameSpec, machine, delta, budget: int = DEFAULT_BUDGET) -> SenderPolicy:
    """Sender's optimal pure strategy in the N-stage delta-discounted block.

    Backward induction over (stage, machine state, chain state), memoized on
    reachable states. Once the machine ignores announcements, the remaining
    value is a fixed-schedule recursion. Ties go to the lowest message.

    Raises:
        BudgetExceeded: more than ``budget`` (stage, machine state) pairs.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("discount factor must lie in (0, 1)")
    n_s, p, u1 = game.n_states, game.p, game.u1
    N = machine.N
    memo: dict = {}
    tails: dict = {}
    choice: dict = {}
    seen: set = set()

    def value(n, state):
        if n > N:
            return tuple(_ZERO for _ in range(n_s))
        key = (n, state)
        if key in memo:
            return memo[key]
        sched = machine.schedule(n, state)
        if sched is not None:
            out = _tail_values(game, sched, delta, u1, tails)
            memo[key] = out
            return out
        seen.add(key)
        if len(seen) > budget:
            raise BudgetExceeded(f"sender DP exceeded {budget} machine states")
        conts = []
        for a in range(n_s):
            nxt = value(n + 1, machine.step(n, state, a))
            conts.append((machine.act(n, state, a), nxt))
        out = []
        for s in range(n_s):
            best, best_a = None, 0
            for a, (row, nxt) in enumerate(conts):
                v = expected_payoff(u1, s, row) + delta * sum((p[s][t] * nxt[t] for t in range(n_s) if p[s][t]), _ZERO)
                if best is None or v > best:
                    best, best_a = v, a
            choice[(n, state, s)] = best_a
            out.append(best)
        out = tuple(out)
        memo[key] = out
        return out

    v = value(1, machine.initial())
    log.debug("sender DP: %d machine states, delta=%s", len(seen), delta)
    return SenderPolicy(choice, v, delta)


# --- evaluation of a fixed profile ----------------------------------------------------


class BlockEvaluation:
    """Discounted within-block values of a fixed profile for both players.

    ``values(n, state)`` gives the pair of vectors (sender, receiver) indexed
    by the chain state at stage n, before the stage-n announcement, counting
    stages n..N only. Values are computed on demand and memoized.
    """

    def __init__(self, game: GameSpec, machine, policy, delta):
        self.game, self.machine, self.policy = game, machine, policy
        self.delta = Fraction(delta)
        self.N = machine.N
        self.q1: dict = {}
        self.q2: dict = {}
        self._tails: dict = {}

    def values(self, n, state) -> tuple[tuple, tuple]:
        game, machine, delta = self.game, self.machine, self.delta
        n_s, p = game.n_states, game.p
        if n > self.N:
            zero = tuple(_ZERO for _ in range(n_s))
            return zero, zero
        key = (n, state)
        if key in self.q1:
            return self.q1[key], self.q2[key]
        sched = machine.schedule(n, state)
        if sched is not None:
            v1 = _tail_values(game, sched, delta, game.u1, self._tails)
            v2 = _tail_values(game, sched, delta, game.u2, self._tails)
        else:
            r1, r2 = [], []
            for s in range(n_s):
                a = self.policy(n, state, s)
                row = machine.act(n, state, a)
                n1, n2 = self.values(n + 1, machine.step(n, state, a))
                c1 = sum((p[s][t] * n1[t] for t in range(n_s) if p[s][t]), _ZERO)
                c2 = sum((p[s][t] * n2[t] for t in range(n_s) if p[s][t]), _ZERO)
                r1.append(expected_payoff(game.u1, s, row) + delta * c1)
                r2.append(expected_payoff(game.u2, s, row) + delta * c2)
            v1, v2 = tuple(r1), tuple(r2)
        self.q1[key], self.q2[key] = v1, v2
        return v1, v2

    def block_values(self) -> tuple[tuple, tuple]:
        return self.values(1, self.machine.initial())


def evaluate_profile(game: GameSpec, machine, policy, delta) -> BlockEvaluation:
    """Backward evaluation of (policy, machine) inside one block."""
    ev = BlockEvaluation(game, machine, policy, delta)
    ev.block_values()
    return ev


def future_block_values(game: GameSpec, G: Sequence[Fraction], delta: Fraction, N: int) -> tuple[Fraction, ...]:
    """``W = (I - delta^N P^N)^{-1} G``: unnormalized value of all blocks from a block start in state s."""
    n = game.n_states
    PN = matpow(game.p, N)
    dN = delta**N
    A = [[(1 if i == j else 0) - dN * PN[i][j] for j in range(n)] for i in range(n)]
    return solve(A, list(G))


def discounted_payoff(game: GameSpec, machine, policy, delta, initial=None) -> PayoffPoint:
    """Exact normalized discounted payoff of the block-periodic profile.

    ``(1 - delta) * pi0 (I - delta^N P^N)^{-1} G`` with G the within-block
    values per starting state; the chain is exogenous, so block starts
    follow ``P^N``.
    """
    delta = Fraction(delta)
    ev = evaluate_profile(game, machine, policy, delta)
    G1, G2 = ev.block_values()
    pi0 = game.m if initial is None else tuple(Fraction(x) for x in initial)
    W1 = future_block_values(game, G1, delta, machine.N)
    W2 = future_block_values(game, G2, delta, machine.N)
    v1 = (1 - delta) * sum((a * b for a, b in zip(pi0, W1)), _ZERO)
    v2 = (1 - delta) * sum((a * b for a, b in zip(pi0, W2)), _ZERO)
    return PayoffPoint(v1, v2)


@dataclass(frozen=True)
class DeviationCheck:
    profitable: bool
    best_values: tuple[Fraction, ...]
    truthful_values: tuple[Fraction, ...]
    gain: Fraction
    deviation: tuple | None


def sender_deviation_check(game: GameSpec, machine, delta, reference=None) -> DeviationCheck:
    """Compare the sender's best block value with the value of ``reference`` (truth-telling by default).

    ``deviation`` is the first (stage, machine state, chain state, message)
    at which the best reply departs from the reference and gains strictly.
    """
    delta = Fraction(delta)
    reference = reference or TruthfulPolicy()
    best = best_reply_sender(game, machine, delta)
    ev = evaluate_profile(game, machine, reference, delta)
    ref = ev.block_values()[0]
    gain = max(b - r for b, r in zip(best.value, ref))
    dev = None
    if gain > 0:
        for (n, state, s), a in sorted(best.choice.items(), key=lambda kv: (kv[0][0], repr(kv[0][1]), kv[0][2])):
            if a != reference(n, state, s) and (n, state) in ev.q1:
                dev = (n, state, s, a)
                break
    return DeviationCheck(gain > 0, best.value, ref, gain, dev)


# --- forward recursion ----------------------------------------------------------------


@dataclass
class JointDistribution:
    """Expected block frequencies of (state, acted-on announcement), plus per-stage laws."""

    mu_hat: Matrix
    stage_laws: list = field(repr=False, default_factory=list)

    def column_margin(self):
        n = len(self.mu_hat)
        return tuple(sum((self.mu_hat[s][a] for s in range(n)), _ZERO) for a in range(n))

    def row_margin(self):
        return tuple(sum(r, _ZERO) for r in self.mu_hat)


def stage_laws(game: GameSpec, machine, policy, initial=None) -> list[dict]:
    """Law of (machine state, chain state) before each stage's announcement, stages 1..N."""
    n_s, p = game.n_states, game.p
    init = game.m if initial is None else tuple(Fraction(x) for x in initial)
    cur = {(machine.initial(), s): init[s] for s in range(n_s) if init[s]}
    laws = [cur]
    for n in range(1, machine.N):
        nxt: dict = {}
        for (state, s), w in cur.items():
            a = policy(n, state, s)
            ns = machine.step(n, state, a)
            for t in range(n_s):
                if p[s][t]:
                    k = (ns, t)
                    nxt[k] = nxt.get(k, _ZERO) + w * p[s][t]
        cur = nxt
        laws.append(cur)
    return laws


def exact_joint_distribution(game: GameSpec, machine, policy, initial=None) -> JointDistribution:
    """``mu_hat(s, a) = E[(1/N) sum_n 1{s_n = s, theta_n = a}]`` by forward recursion."""
    n_s = game.n_states
    laws = stage_laws(game, machine, policy, initial)
    mu = [[_ZERO] * n_s for _ in range(n_s)]
    N = machine.N
    for n, law in enumerate(laws, start=1):
        for (state, s), w in law.items():
            th = machine.theta(n, state, policy(n, state, s))
            if th is None:
                raise ValueError("machine does not expose acted-on announcements")
            mu[s][th] += w / N
    return JointDistribution(tuple(tuple(r) for r in mu), laws)


def block_average_payoff(game: GameSpec, machine, policy) -> PayoffPoint:
    """Undiscounted average payoff over one block, started from m."""
    v1 = v2 = _ZERO
    for n, law in enumerate(stage_laws(game, machine, policy), start=1):
        for (state, s), w in law.items():
            row = machine.act(n, state, policy(n, state, s))
            v1 += w * expected_payoff(game.u1, s, row)
            v2 += w * expected_payoff(game.u2, s, row)
    return PayoffPoint(v1 / machine.N, v2 / machine.N)


# --- receiver incentives --------------------------------------------------------------


def receiver_deviation_bound(game: GameSpec, belief, delta, n: int = 1, tol: float = 1e-12) -> Fraction:
    """``(1 - delta) sum_{k>=n} delta^{k-n} max_b u2(p_k, b)`` with ``p_{k+1} = p_k P``.

    Terms are summed exactly until ``|p_k - m|_1 * max|u2| < tol``; the rest
    of the series is closed with ``p_k = m`` (value v2), which is exact when
    the belief reaches m and within tol otherwise. ``n`` only fixes the stage
    the belief refers to: the bound depends on the belief, not on the date.
    """
    delta = Fraction(delta)
    m = game.m
    v2 = babbling_value(game)
    umax = max(abs(x) for r in game.u2 for x in r) or Fraction(1)
    b = tuple(Fraction(x) for x in belief)
    total, weight = _ZERO, 1 - delta
    for _ in range(100_000):
        dist = sum((abs(x - y) for x, y in zip(b, m)), _ZERO)
        if dist == 0 or float(dist * umax) < tol:
            break
        best = max(sum((b[s] * game.u2[s][j] for s in range(game.n_states)), _ZERO) for j in range(game.n_actions))
        total += weight * best
        weight *= delta
        b = vecmat(b, game.p)
    # remaining series with p_k = m: (1 - delta) * sum_{k>=K} delta^(k-n) v2 = weight / (1 - delta) * v2
    return total + weight / (1 - delta) * v2


@dataclass(frozen=True)
class GapReport:
    sender_gap: Fraction
    receiver_gap: Fraction
    certified: bool
    worst_cell: tuple | None
    receiver_value: Fraction
    sender_value: Fraction


def equilibrium_gap_report(game: GameSpec, y: Matrix, N: int, delta, policy: SenderPolicy | None = None) -> GapReport:
    """Receiver incentive diagnostic for the block profile at (N, delta).

    For every reachable (stage, machine state, announcement) the receiver's
    belief about the current state is computed exactly, and the babbling
    deviation bound is compared with the on-path continuation (rest of the
    block plus all later blocks), both normalized by ``1 - delta``. The gap
    is the largest difference; a negative gap certifies the receiver
    incentive at every such cell. The sender gap is zero because the sender
    plays an exact best reply.
    """
    delta = Fraction(delta)
    machine = BlockAutomaton.for_game(game, y, N)
    policy = policy or best_reply_sender(game, machine, delta)
    ev = evaluate_profile(game, machine, policy, delta)
    G1, G2 = ev.block_values()
    W2 = future_block_values(game, G2, delta, N)
    n_s, p = game.n_states, game.p
    # value of blocks after the current one, seen from stage n and state s
    future = {}
    for n in range(1, N + 2):
        k = N - n + 1
        Pk = matpow(game.p, k)
        future[n] = tuple(delta**k * sum((Pk[s][t] * W2[t] for t in range(n_s)), _ZERO) for s in range(n_s))
    laws = stage_laws(game, machine, policy)
    worst, worst_cell = None, None
    bound_cache: dict = {}
    for n, law in enumerate(laws, start=1):
        cells: dict = {}
        for (state, s), w in law.items():
            a = policy(n, state, s)
            cells.setdefault((state, a), [_ZERO] * n_s)[s] += w
        for (state, a), weights in cells.items():
            total = sum(weights)
            belief = tuple(x / total for x in weights)
            row = machine.act(n, state, a)
            nxt = machine.step(n, state, a)
            q2n = ev.values(n + 1, nxt)[1]
            cont = _ZERO
            for s in range(n_s):
                if belief[s]:
                    inner = sum((p[s][t] * (q2n[t] + future[n + 1][t]) for t in range(n_s) if p[s][t]), _ZERO)
                    cont += belief[s] * (expected_payoff(game.u2, s, row) + delta * inner)
            cont *= 1 - delta
            if belief not in bound_cache:
                bound_cache[belief] = receiver_deviation_bound(game, belief, delta, n)
            gap = bound_cache[belief] - cont
            if worst is None or gap > worst:
                worst, worst_cell = gap, (n, state, a)
    pay = discounted_payoff(game, machine, policy, delta)
    return GapReport(_ZERO, worst, worst < 0, worst_cell, pay.v2, pay.v1)


# --- experiments ----------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    N: int
    delta: Fraction
    distance: Fraction
    sender_value: Fraction
    receiver_value: Fraction


def lemma3_convergence_sweep(game: GameSpec, y: Matrix, N_list: Sequence[int], delta_list: Sequence) -> list[SweepRow]:
    """``|mu_hat - mu0|_1`` for the sender's best reply over a grid of (N, delta)."""
    mu0 = mu_zero(game.m)
    rows = []
    for N in N_list:
        machine = BlockAutomaton.for_game(game, y, N)
        for d in delta_list:
            d = Fraction(d)
            pol = best_reply_sender(game, machine, d)
            jd = exact_joint_distribution(game, machine, pol)
            pay = discounted_payoff(game, machine, pol, d)
            rows.append(SweepRow(N, d, l1_distance(jd.mu_hat, mu0), pay.v1, pay.v2))
    return rows


def strict_mixture(game: GameSpec, y_bar: Matrix, eps=Fraction(1, 10)) -> Matrix:
    """``eps * y0 + (1 - eps) * y_bar`` with y0 the strict witness.

    Raises:
        PreconditionError: the strict set is empty.
    """
    eh = E_hat_nonempty(game)
    if not eh:
        raise PreconditionError("no strict witness: the strict equilibrium set is empty")
    return mix_strategies(eh.witness, y_bar, eps)


# --- Monte Carlo ----------------------------------------------------------------------


@dataclass
class CompiledProfile:
    """Reachable (stage, machine state) pairs as integer tables for vectorized simulation."""

    next_id: np.ndarray
    pay1: np.ndarray
    pay2: np.ndarray
    theta: np.ndarray
    n_ids: int


def compile_profile(game: GameSpec, machine, policy) -> CompiledProfile:
    n_s = game.n_states
    N = machine.N
    ids = {}
    order = []
    start = (1, machine.initial())
    ids[start] = 0
    order.append(start)
    i = 0
    while i < len(order):
        n, state = order[i]
        i += 1
        if n == N:
            continue
        for s in range(n_s):
            a = policy(n, state, s)
            key = (n + 1, machine.step(n, state, a))
            if key not in ids:
                ids[key] = len(order)
                order.append(key)
    k = len(order)
    next_id = np.zeros((k, n_s), dtype=np.int64)
    pay1 = np.zeros((k, n_s))
    pay2 = np.zeros((k, n_s))
    theta = np.full((k, n_s), -1, dtype=np.int64)
    for idx, (n, state) in enumerate(order):
        for s in range(n_s):
            a = policy(n, state, s)
            row = machine.act(n, state, a)
            pay1[idx, s] = float(expected_payoff(game.u1, s, row))
            pay2[idx, s] = float(expected_payoff(game.u2, s, row))
            th = machine.theta(n, state, a)
            theta[idx, s] = -1 if th is None else th
            next_id[idx, s] = 0 if n == N else ids[(n + 1, machine.step(n, state, a))]
    return CompiledProfile(next_id, pay1, pay2, theta, k)


@dataclass(frozen=True)
class MonteCarloPayoff:
    mean: tuple[float, float]
    stderr: tuple[float, float]
    truncation: float
    horizon: int
    replications: int

    def within(self, exact, k: float = 3.0) -> bool:
        return all(abs(float(e) - m) <= k * se + self.truncation + 1e-12 for e, m, se in zip(exact, self.mean, self.stderr))


def monte_carlo_payoff(game: GameSpec, machine, policy, delta, horizon: int, replications: int, seed) -> MonteCarloPayoff:
    """Normalized discounted payoff over ``horizon`` stages, averaged over replications.

    The ignored tail is at most ``delta**horizon * (max u - min u)`` per player.
    """
    if replications < 1:
        raise ValueError("need at least one replication")
    prof = compile_profile(game, machine, policy)
    rng = np.random.default_rng(seed)
    paths = chain.sample_paths(game.p, horizon, rng, replications)
    d = float(delta)
    ids = np.zeros(replications, dtype=np.int64)
    acc1 = np.zeros(replications)
    acc2 = np.zeros(replications)
    w = 1.0 - d
    for k in range(horizon):
        s = paths[:, k]
        acc1 += w * prof.pay1[ids, s]
        acc2 += w * prof.pay2[ids, s]
        ids = prof.next_id[ids, s]
        w *= d
    rng_u = max(float(max(max(r) for r in u) - min(min(r) for r in u)) for u in (game.u1, game.u2))
    se = lambda a: float(a.std(ddof=1) / np.sqrt(len(a))) if len(a) > 1 else float("inf")
    return MonteCarloPayoff(
        (float(acc1.mean()), float(acc2.mean())),
        (se(acc1), se(acc2)),
        d**horizon * rng_u,
        horizon,
        replications,
    )


@dataclass(frozen=True)
class TruthfulBoundCheck:
    xi: float
    failure_rate: float
    distance: Fraction
    bound: float
    holds: bool


def truthful_bound_check(game: GameSpec, y: Matrix, N: int, xi: float, replications: int, seed) -> TruthfulBoundCheck:
    """Truth-telling against the quota machine stays close to truthful reporting.

    Estimates the probability that some state's count over the first
    ``floor((1 - xi) N)`` stages exceeds its quota; when that probability is
    at most xi, the exact distance ``|mu_truth - mu0|_1`` should not exceed
    ``(|S| + 2) xi``.
    """
    machine = BlockAutomaton.for_game(game, y, N)
    jd = exact_joint_distribution(game, machine, TruthfulPolicy())
    dist = l1_distance(jd.mu_hat, mu_zero(game.m))
    rng = np.random.default_rng(seed)
    L = max(1, floor((1 - xi) * N))
    paths = chain.sample_paths(game.p, L, rng, replications)
    counts = np.stack([(paths == s).sum(axis=1) for s in range(game.n_states)], axis=1)
    fail = float((counts > np.array(machine.quotas)).any(axis=1).mean())
    bound = (game.n_states + 2) * xi
    return TruthfulBoundCheck(xi, fail, dist, bound, fail <= xi and float(dist) <= bound)


__all__ = [
    "AlternationMachine",
    "BlockAutomaton",
    "BudgetExceeded",
    "ConstantMachine",
    "DeviationCheck",
    "GapReport",
    "JointDistribution",
    "MonteCarloPayoff",
    "SenderPolicy",
    "SweepRow",
    "TruthfulPolicy",
    "best_reply_sender",
    "block_average_payoff",
    "compile_profile",
    "discounted_payoff",
    "equilibrium_gap_report",
    "evaluate_profile",
    "exact_joint_distribution",
    "fictitious_schedule",
    "future_block_values",
    "lemma3_convergence_sweep",
    "monte_carlo_payoff",
    "receiver_deviation_bound",
    "sec3_alternation",
    "sender_deviation_check",
    "stage_laws",
    "strict_mixture",
    "theta_sequence",
    "truthful_bound_check",
]
