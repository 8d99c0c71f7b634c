"""Fictitious-state couplings: a sender who lies according to a copula without being detected.

Given a copula mu, the sender draws a fictitious state t_n next to each real
state s_n so that (t_n) has the same law as the chain and each pair
(s_n, t_n) has law mu. Feeding t_n to a truthful strategy then yields the
payoff ``U(mu, y)`` against any stationary receiver y. The construction
needs the linear compatibility condition checked by :func:`check_property_P`.

Conditional laws are written ``mu(s | t) = mu(s, t) / m(t)`` (column margin m).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import numpy as np

from . import chain, lp
from .copula import extreme_points, is_copula
from .game import GameSpec, babbling_value, expected_payoff, mu_zero, payoff_U
from .rational import Matrix

log = logging.getLogger(__name__)

_ZERO = Fraction(0)


class CouplingError(ValueError):
    pass


def _cond(mu, m, s, t) -> Fraction:
    return mu[s][t] / m[t]


def property_P_residuals(mu, p, m) -> Matrix:
    """``r[s][t] = sum_s' mu(s'|t) p(s|s') - sum_t' mu(s|t') p(t'|t)``."""
    n = len(m)
    return tuple(
        tuple(
            sum((_cond(mu, m, s2, t) * p[s2][s] for s2 in range(n)), _ZERO)
            - sum((_cond(mu, m, s, t2) * p[t][t2] for t2 in range(n)), _ZERO)
            for t in range(n)
        )
        for s in range(n)
    )


@dataclass(frozen=True)
class PropertyPResult:
    holds: bool
    worst_violation: Fraction
    worst_pair: tuple[int, int] | None

    def __bool__(self) -> bool:
        return self.holds


def check_property_P(mu, p, m=None) -> PropertyPResult:
    """Exact test of the compatibility condition for every (s, t)."""
    m = chain.invariant_measure(p) if m is None else m
    if not is_copula(mu, m):
        raise CouplingError("mu is not a copula for the chain's invariant measure")
    r = property_P_residuals(mu, p, m)
    worst, pair = _ZERO, None
    for s, row in enumerate(r):
        for t, x in enumerate(row):
            if abs(x) > worst:
                worst, pair = abs(x), (s, t)
    return PropertyPResult(worst == 0, worst, pair)


@dataclass(frozen=True)
class ViolationSearch:
    violation: Fraction
    copula: Matrix
    pair: tuple[int, int]


def max_property_P_violation(p, m=None) -> ViolationSearch:
    """Largest ``|residual(s, t)|`` over all copulas, one exact LP per (s, t, sign).

    A positive value certifies that the compatible copulas form a strict
    subset of the copula polytope.
    """
    m = chain.invariant_measure(p) if m is None else m
    n = len(m)
    k = n * n
    A_eq, b_eq = [], []
    for s in range(n):
        A_eq.append([Fraction(int(i // n == s)) for i in range(k)])
        b_eq.append(Fraction(m[s]))
    for t in range(n):
        A_eq.append([Fraction(int(i % n == t)) for i in range(k)])
        b_eq.append(Fraction(m[t]))
    best = None
    for s in range(n):
        for t in range(n):
            c = [_ZERO] * k
            for s2 in range(n):
                c[s2 * n + t] += p[s2][s] / m[t]
            for t2 in range(n):
                c[s * n + t2] -= p[t][t2] / m[t2]
            for sign in (1, -1):
                res = lp.linprog([sign * x for x in c], A_eq=A_eq, b_eq=b_eq)
                if not res.ok:  # pragma: no cover - the polytope is nonempty and bounded
                    raise lp.LPError("violation LP failed")
                if best is None or res.value > best.violation:
                    mu = tuple(tuple(res.x[i * n + j] for j in range(n)) for i in range(n))
                    best = ViolationSearch(res.value, mu, (s, t))
    return best


@dataclass(frozen=True)
class CouplingKernel:
    """``bar[t'][s][t] = mu(s, t) p(t|t') m(t') / m(t)``: law of (t_{n-1}, s_n, t_n)."""

    bar: tuple
    mu: Matrix
    p: Matrix
    m: tuple

    @property
    def n(self) -> int:
        return len(self.m)

    def margin12(self):
        n = self.n
        return tuple(tuple(sum((self.bar[a][b][c] for c in range(n)), _ZERO) for b in range(n)) for a in range(n))

    def margin13(self):
        n = self.n
        return tuple(tuple(sum((self.bar[a][b][c] for b in range(n)), _ZERO) for c in range(n)) for a in range(n))

    def margin23(self):
        n = self.n
        return tuple(tuple(sum((self.bar[a][b][c] for a in range(n)), _ZERO) for c in range(n)) for b in range(n))

    def claims(self) -> tuple[bool, bool, bool, bool]:
        """The four structural identities of the kernel, checked exactly."""
        n, mu, p, m = self.n, self.mu, self.p, self.m
        c1 = self.margin23() == tuple(tuple(r) for r in mu)
        m13 = self.margin13()
        c2 = all(m13[a][c] == m[a] * p[a][c] for a in range(n) for c in range(n))
        m12 = self.margin12()
        c3 = all(
            m12[a][b] == sum((mu[s][a] * p[s][b] for s in range(n)), _ZERO) for a in range(n) for b in range(n)
        )
        c4 = all(
            self.bar[a][b][c] * m[c] == mu[b][c] * m13[a][c]
            for a in range(n)
            for b in range(n)
            for c in range(n)
            if m13[a][c]
        )
        return c1, c2, c3, c4

    def next_law(self, t_prev: int, s: int) -> tuple[Fraction, ...]:
        """Law of t_n given (t_{n-1}, s_n)."""
        row = self.bar[t_prev][s]
        total = sum(row, _ZERO)
        if total == 0:
            raise CouplingError(f"conditioning event (t'={t_prev}, s={s}) has probability zero")
        return tuple(x / total for x in row)

    def initial_law(self, s: int) -> dict:
        """Law of (t_0, t_1) given s_1."""
        n = self.n
        return {(a, c): self.bar[a][s][c] / self.m[s] for a in range(n) for c in range(n) if self.bar[a][s][c]}


def raw_kernel(mu, p, m=None) -> CouplingKernel:
    """Kernel formula without any check (used to study incompatible copulas)."""
    m = chain.invariant_measure(p) if m is None else tuple(Fraction(x) for x in m)
    n = len(m)
    bar = tuple(
        tuple(tuple(mu[s][t] * p[tp][t] * m[tp] / m[t] for t in range(n)) for s in range(n)) for tp in range(n)
    )
    return CouplingKernel(bar, tuple(tuple(r) for r in mu), tuple(tuple(r) for r in p), m)


def build_kernel(mu, p, m=None) -> CouplingKernel:
    """Kernel of a compatible copula, with its four identities asserted.

    Raises:
        CouplingError: mu is not a copula, or fails the compatibility condition.
    """
    m = chain.invariant_measure(p) if m is None else tuple(Fraction(x) for x in m)
    if any(x <= 0 for x in m):
        raise CouplingError("invariant measure must be strictly positive")
    res = check_property_P(mu, p, m)
    if not res:
        raise CouplingError(f"copula fails the compatibility condition (violation {res.worst_violation} at {res.worst_pair})")
    k = raw_kernel(mu, p, m)
    c = k.claims()
    assert all(c), f"kernel identities failed: {c}"
    return k


# --- sampling -------------------------------------------------------------------------


def _cumulative(weights) -> np.ndarray:
    w = np.array([float(x) for x in weights])
    tot = w.sum()
    if tot <= 0:
        return None
    c = np.cumsum(w / tot)
    c[-1] = 1.0
    return c


class _Tables:
    def __init__(self, kernel: CouplingKernel):
        n = kernel.n
        self.n = n
        self.init = []
        for s in range(n):
            law = kernel.initial_law(s)
            keys = sorted(law)
            self.init.append((np.array([c for _, c in keys]), _cumulative([law[k] for k in keys])))
        self.step = np.full((n, n, n), np.nan)
        self.ok = np.zeros((n, n), dtype=bool)
        for a in range(n):
            for s in range(n):
                c = _cumulative(kernel.bar[a][s])
                if c is not None:
                    self.step[a, s] = c
                    self.ok[a, s] = True


def sample_fictitious_many(kernel: CouplingKernel, s_paths: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Fictitious paths t_1..t_n for each row of ``s_paths`` (t_0 is drawn and dropped)."""
    tab = _Tables(kernel)
    R, T = s_paths.shape
    out = np.empty((R, T), dtype=np.int64)
    u = rng.random((R, T))
    s1 = s_paths[:, 0]
    for s in range(kernel.n):
        idx = np.nonzero(s1 == s)[0]
        if len(idx):
            vals, cum = tab.init[s]
            out[idx, 0] = vals[np.searchsorted(cum, u[idx, 0], side="right")]
    for k in range(1, T):
        prev, s = out[:, k - 1], s_paths[:, k]
        if not tab.ok[prev, s].all():
            raise CouplingError("state path has a transition the kernel cannot follow")
        cum = tab.step[prev, s]
        out[:, k] = (u[:, k, None] >= cum).sum(axis=1)
    return out


@dataclass(frozen=True)
class FictitiousPath:
    t: tuple[int, ...]


def sample_fictitious(kernel: CouplingKernel, s_path: Sequence[int], seed) -> FictitiousPath:
    """Fictitious path aligned with ``s_path``; deterministic given the seed.

    Raises:
        CouplingError: a conditioning event has probability zero.
    """
    if len(s_path) == 0:
        return FictitiousPath(())
    s = np.asarray(s_path, dtype=np.int64)[None, :]
    t = sample_fictitious_many(kernel, s, np.random.default_rng(seed))
    return FictitiousPath(tuple(int(x) for x in t[0]))


# --- exact law verification -----------------------------------------------------------


@dataclass
class LawReport:
    """Per-property verdicts of the exact small-horizon law check."""

    horizon: int
    results: dict = field(default_factory=dict)

    def record(self, name: str, violation: Fraction, where=None):
        r = self.results.setdefault(name, {"holds": True, "worst_violation": _ZERO, "first_failure": None})
        if violation > 0:
            r["holds"] = False
            if r["first_failure"] is None:
                r["first_failure"] = where
        if violation > r["worst_violation"]:
            r["worst_violation"] = violation

    @property
    def all_hold(self) -> bool:
        return all(r["holds"] for r in self.results.values())


MAX_EXACT_HORIZON = 6


def joint_path_law(kernel: CouplingKernel, n: int, strict: bool = True) -> dict:
    """Exact law of ``(s_1..s_n, t_0..t_n)`` keyed by ``(s_path, t_path)``.

    With ``strict=False`` mass reaching a zero-probability conditioning
    event is dropped instead of raising, so the law may sum to less than 1.
    """
    k = kernel
    law: dict = {}
    for s in range(k.n):
        for (t0, t1), w in k.initial_law(s).items():
            law[((s,), (t0, t1))] = k.m[s] * w
    for _ in range(1, n):
        nxt: dict = {}
        for (sp, tp), w in law.items():
            for s in range(k.n):
                ps = k.p[sp[-1]][s]
                if not ps:
                    continue
                row = k.bar[tp[-1]][s]
                total = sum(row, _ZERO)
                if total == 0:
                    if strict:
                        raise CouplingError(f"reachable conditioning event (t'={tp[-1]}, s={s}) has probability zero")
                    continue
                for t in range(k.n):
                    if row[t]:
                        key = (sp + (s,), tp + (t,))
                        nxt[key] = nxt.get(key, _ZERO) + w * ps * row[t] / total
        law = nxt
    return law


def _marginal(law: dict, f) -> dict:
    out: dict = {}
    for key, w in law.items():
        k2 = f(*key)
        out[k2] = out.get(k2, _ZERO) + w
    return out


def exact_law_check(kernel: CouplingKernel, n: int) -> LawReport:
    """Verify the four coupling properties and the triple-law identity exactly up to horizon n.

    * P1: given s_k, (t_1..t_k) is independent of (s_{k+1}..s_n).
    * P2: (t_1..t_n) has the law of the chain.
    * P3: each (s_k, t_k) has law mu.
    * P4: the law of s_k given t_1..t_k is mu(. | t_k).
    * triple: each (t_{k-1}, s_k, t_k) has law bar mu.
    * feasible: no probability is lost at impossible conditioning events.

    A failing marginal is reported as ``(property, stage, key)``.
    """
    if not 1 <= n <= MAX_EXACT_HORIZON:
        raise ValueError(f"exact law check needs 1 <= n <= {MAX_EXACT_HORIZON}")
    k = kernel
    ns = k.n
    law = joint_path_law(k, n, strict=False)
    rep = LawReport(n)
    for name in ("feasible", "P1", "P2", "P3", "P4", "triple"):
        rep.record(name, _ZERO)
    rep.record("feasible", 1 - sum(law.values(), _ZERO), ("feasible", n, None))

    # P2: law of t_1..t_n against the chain
    tlaw = _marginal(law, lambda sp, tp: tp[1:])
    for path in product(range(ns), repeat=n):
        w = k.m[path[0]]
        for a, b in zip(path, path[1:]):
            w *= k.p[a][b]
        got = tlaw.get(path, _ZERO)
        rep.record("P2", abs(got - w), ("P2", n, path))

    for stage in range(1, n + 1):
        j = stage - 1
        # P3
        pair = _marginal(law, lambda sp, tp: (sp[j], tp[j + 1]))
        for s in range(ns):
            for t in range(ns):
                rep.record("P3", abs(pair.get((s, t), _ZERO) - k.mu[s][t]), ("P3", stage, (s, t)))
        # triple law
        tri = _marginal(law, lambda sp, tp: (tp[j], sp[j], tp[j + 1]))
        for a in range(ns):
            for s in range(ns):
                for t in range(ns):
                    rep.record("triple", abs(tri.get((a, s, t), _ZERO) - k.bar[a][s][t]), ("triple", stage, (a, s, t)))
        # P4
        hist = _marginal(law, lambda sp, tp: (tp[1 : j + 2], sp[j]))
        tot = _marginal(law, lambda sp, tp: tp[1 : j + 2])
        for (th, s), w in hist.items():
            cond = w / tot[th]
            rep.record("P4", abs(cond - k.mu[s][th[-1]] / k.m[th[-1]]), ("P4", stage, (th, s)))
        # P1: P(t_1..t_k, future | s_k) = P(t_1..t_k | s_k) P(future | s_k)
        joint = _marginal(law, lambda sp, tp: (sp[j], tp[1 : j + 2], sp[j + 1 :]))
        a_marg = _marginal(law, lambda sp, tp: (sp[j], tp[1 : j + 2]))
        f_marg = _marginal(law, lambda sp, tp: (sp[j], sp[j + 1 :]))
        s_marg = _marginal(law, lambda sp, tp: sp[j])
        for (s, th), wa in a_marg.items():
            for (s2, fut), wf in f_marg.items():
                if s2 != s:
                    continue
                lhs = joint.get((s, th, fut), _ZERO)
                rep.record("P1", abs(lhs - wa * wf / s_marg[s]), ("P1", stage, (s, th, fut)))
    return rep


# --- the deviation and the payoff identity --------------------------------------------


class FictitiousSender:
    """Plays ``sigma`` on the fictitious history instead of the real one.

    ``sigma`` maps the tuple of (fictitious) states seen so far to a message.
    """

    def __init__(self, sigma: Callable[[tuple], int], kernel: CouplingKernel, seed):
        self.sigma = sigma
        self.kernel = kernel
        self.rng = np.random.default_rng(seed)
        self.t_hist: list[int] = []
        self._t_prev: int | None = None

    def _draw(self, law: Sequence[Fraction]) -> int:
        c = _cumulative(law)
        return int(np.searchsorted(c, self.rng.random(), side="right"))

    def announce(self, s: int) -> int:
        if self._t_prev is None:
            law = self.kernel.initial_law(s)
            keys = sorted(law)
            t0, t1 = keys[self._draw([law[k] for k in keys])]
            self._t_prev = t1
        else:
            self._t_prev = self._draw(self.kernel.next_law(self._t_prev, s))
        self.t_hist.append(self._t_prev)
        return self.sigma(tuple(self.t_hist))


def truthful(history: tuple) -> int:
    return history[-1]


def deviation_strategy(sigma: Callable[[tuple], int], kernel: CouplingKernel, seed=None) -> FictitiousSender:
    """The sender deviation that replays sigma on fictitious states."""
    return FictitiousSender(sigma, kernel, seed)


@dataclass(frozen=True)
class PayoffIdentity:
    simulated: tuple[float, float]
    analytic: tuple[Fraction, Fraction]
    gap: float
    bound: float
    stderr: tuple[float, float]

    @property
    def within(self) -> bool:
        return self.gap <= self.bound


def payoff_identity_check(game: GameSpec, y: Matrix, mu, delta, T: int, seed, replications: int = 2000) -> PayoffIdentity:
    """Monte Carlo discounted payoff of truthful-on-fictitious reporting against y, versus ``U(mu, y)``.

    The bound is 3 standard errors plus the truncation ``delta**T * range``
    (per player; the gap is the larger of the two player gaps).
    """
    kernel = build_kernel(mu, game.p, game.m)
    rng = np.random.default_rng(seed)
    s = chain.sample_paths(game.p, T, rng, replications)
    t = sample_fictitious_many(kernel, s, rng)
    n = game.n_states
    u1 = np.array([[float(expected_payoff(game.u1, a, y[b])) for b in range(n)] for a in range(n)])
    u2 = np.array([[float(expected_payoff(game.u2, a, y[b])) for b in range(n)] for a in range(n)])
    d = float(delta)
    w = (1 - d) * d ** np.arange(T)
    v1 = (u1[s, t] * w).sum(axis=1)
    v2 = (u2[s, t] * w).sum(axis=1)
    exact = payoff_U(mu, y, game)
    se = (float(v1.std(ddof=1) / np.sqrt(replications)), float(v2.std(ddof=1) / np.sqrt(replications)))
    rng_u = max(float(max(max(r) for r in u) - min(min(r) for r in u)) for u in (game.u1, game.u2))
    trunc = d**T * rng_u
    gaps = (abs(float(v1.mean()) - float(exact.v1)), abs(float(v2.mean()) - float(exact.v2)))
    # 1e-9 absorbs float summation error when a player's payoff is deterministic
    bounds = (3 * se[0] + trunc + 1e-9, 3 * se[1] + trunc + 1e-9)
    # report the player whose gap uses the largest share of its bound
    i = 0 if gaps[0] * bounds[1] >= gaps[1] * bounds[0] else 1
    return PayoffIdentity((float(v1.mean()), float(v2.mean())), (exact.v1, exact.v2), gaps[i], bounds[i], se)


@dataclass(frozen=True)
class NecessityReport:
    max_gain: Fraction
    best_copula: Matrix
    c2_holds: bool
    outside_E: bool


def verify_theorem2_necessity(game: GameSpec, y: Matrix) -> NecessityReport:
    """Largest sender gain ``U1(mu, y) - U1(mu0, y)`` over the vertices of the copula polytope.

    A positive gain means some copula deviation beats truth-telling against
    y, so no equilibrium induces y. Requires the destination-only
    transition structure, under which every copula can be coupled.

    Raises:
        CouplingError: the chain violates that structure.
    """
    a = chain.check_assumption_A(game.p)
    if not a:
        raise CouplingError(
            f"transition matrix fails the destination-only assumption at {a.violation}; "
            "copula deviations may not be implementable (see the 5-cycle example)"
        )
    mu0 = mu_zero(game.m)
    base = payoff_U(mu0, y, game)
    best, arg = None, mu0
    for v in extreme_points(game.m):
        g = payoff_U(v, y, game).v1 - base.v1
        if best is None or g > best:
            best, arg = g, v
    c2 = base.v2 >= babbling_value(game)
    return NecessityReport(best, arg, c2, best > 0 or not c2)


__all__ = [
    "CouplingError",
    "CouplingKernel",
    "FictitiousPath",
    "FictitiousSender",
    "LawReport",
    "NecessityReport",
    "PayoffIdentity",
    "PropertyPResult",
    "ViolationSearch",
    "build_kernel",
    "check_property_P",
    "deviation_strategy",
    "exact_law_check",
    "joint_path_law",
    "max_property_P_violation",
    "payoff_identity_check",
    "property_P_residuals",
    "raw_kernel",
    "sample_fictitious",
    "sample_fictitious_many",
    "truthful",
    "verify_theorem2_necessity",
]
