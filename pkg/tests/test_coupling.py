from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import assumption_a_chain, positive_chain
from markovtalk import chain, coupling as K, games
from markovtalk.copula import sample_copula, swap_copula
from markovtalk.game import GameSpec, mu_zero

seeds = st.integers(0, 2**32 - 1)
PERSIST = games.persistent_chain()
HALF = (F(1, 2), F(1, 2))


@pytest.mark.parametrize("n", [2, 3])
def test_destination_only_chains_make_every_copula_compatible(n):
    """Symbolic oracle: the residual vanishes identically for a generic copula."""
    alpha = sympy.symbols(f"a0:{n}", positive=True)
    A = sum(alpha)
    m = [a / A for a in alpha]
    p = [[alpha[t] if t != s else 1 - (A - alpha[s]) for t in range(n)] for s in range(n)]
    x = sympy.symbols(f"x0:{(n - 1) ** 2}")
    mu = [[None] * n for _ in range(n)]
    for i in range(n - 1):
        for j in range(n - 1):
            mu[i][j] = x[i * (n - 1) + j]
    for i in range(n - 1):
        mu[i][n - 1] = m[i] - sum(mu[i][: n - 1])
    for j in range(n):
        mu[n - 1][j] = m[j] - sum(mu[i][j] for i in range(n - 1))
    for s in range(n):
        for t in range(n):
            r = sum(mu[s2][t] / m[t] * p[s2][s] for s2 in range(n)) - sum(mu[s][t2] / m[t2] * p[t][t2] for t2 in range(n))
            assert sympy.simplify(r) == 0


@settings(max_examples=40)
@given(st.integers(2, 4).flatmap(assumption_a_chain), seeds)
def test_random_copulas_compatible_under_destination_only(p, seed):
    m = chain.invariant_measure(p)
    mu = sample_copula(m, seed)
    assert K.check_property_P(mu, p, m).holds
    k = K.build_kernel(mu, p, m)
    assert all(k.claims())


@settings(max_examples=15)
@given(st.just(2).flatmap(assumption_a_chain), seeds)
def test_exact_laws_hold_for_compatible_copulas(p, seed):
    m = chain.invariant_measure(p)
    k = K.build_kernel(sample_copula(m, seed), p, m)
    rep = K.exact_law_check(k, 4)
    assert rep.all_hold, rep.results


def test_exact_laws_three_states():
    p = games.illustration_4_3().p
    m = chain.invariant_measure(p)
    k = K.build_kernel(sample_copula(m, 9), p, m)
    assert K.exact_law_check(k, 3).all_hold


def test_truthful_copula_always_compatible():
    for p in (PERSIST, games.example7_game().p):
        m = chain.invariant_measure(p)
        assert K.check_property_P(mu_zero(m), p, m).holds


def test_five_cycle_has_incompatible_copulas():
    p = games.example7_game().p
    res = K.max_property_P_violation(p)
    assert res.violation > 0
    assert not K.check_property_P(res.copula, p).holds
    with pytest.raises(K.CouplingError):
        K.build_kernel(res.copula, p)
    rep = K.exact_law_check(K.raw_kernel(res.copula, p), 3)
    assert not rep.all_hold


@settings(max_examples=20)
@given(st.integers(2, 3).flatmap(positive_chain))
def test_violation_search_consistent(p):
    res = K.max_property_P_violation(p)
    if res.violation == 0:
        assert chain.check_assumption_A(p).holds or len(p) == 2
    assert K.check_property_P(res.copula, p).worst_violation == res.violation


def test_non_copula_rejected():
    with pytest.raises(K.CouplingError):
        K.check_property_P(((F(1, 2), F(1, 2)), (F(0), F(0))), PERSIST)


def test_fictitious_frequencies_match_copula():
    mu = ((F(3, 8), F(1, 8)), (F(1, 8), F(3, 8)))
    k = K.build_kernel(mu, PERSIST)
    rng = np.random.default_rng(0)
    s = chain.sample_paths(PERSIST, 50, rng, 4000)
    t = K.sample_fictitious_many(k, s, rng)
    freq = np.zeros((2, 2))
    np.add.at(freq, (s.ravel(), t.ravel()), 1)
    freq /= freq.sum()
    assert np.allclose(freq, np.array(mu, float), atol=0.01)
    # t must itself move like the chain: stays about 3/4 of the time
    assert abs(np.mean(t[:, 1:] == t[:, :-1]) - 0.75) < 0.01


def test_single_path_sampler_and_streaming_sender_agree_in_law():
    k = K.build_kernel(swap_copula(HALF), PERSIST)
    path = K.sample_fictitious(k, [0, 0, 1, 1, 0], seed=4)
    # the swap copula lies deterministically
    assert list(path.t) == [1, 1, 0, 0, 1]
    snd = K.deviation_strategy(K.truthful, k, seed=1)
    assert [snd.announce(s) for s in (0, 1, 1)] == [1, 0, 0]


def test_payoff_identity():
    g = GameSpec(u1=((1, 0), (0, 1)), u2=((1, 0), (0, 1)), p=PERSIST)
    y = ((F(3, 4), F(1, 4)), (F(1, 4), F(3, 4)))
    mu = ((F(3, 8), F(1, 8)), (F(1, 8), F(3, 8)))
    res = K.payoff_identity_check(g, y, mu, F(95, 100), 400, seed=3)
    assert res.within
    assert res.analytic == (F(5, 8), F(5, 8))


def test_necessity_report():
    g = games.illustration_4_3()
    good = K.verify_theorem2_necessity(g, games.y2_4_3())
    assert good.max_gain == 0 and good.c2_holds and not good.outside_E
    bad = K.verify_theorem2_necessity(g, ((0, 1, 0), (1, 0, 0), (0, 0, 1)))
    assert bad.max_gain > 0 and bad.outside_E
    with pytest.raises(K.CouplingError):
        K.verify_theorem2_necessity(games.example7_game(), games.match_strategy(5))


def test_law_check_horizon_guard():
    k = K.build_kernel(mu_zero(HALF), PERSIST)
    with pytest.raises(ValueError):
        K.exact_law_check(k, K.MAX_EXACT_HORIZON + 1)


def test_truthful_kernel_reproduces_states():
    k = K.build_kernel(mu_zero(HALF), PERSIST)
    rng = np.random.default_rng(2)
    s = chain.sample_paths(PERSIST, 20, rng, 50)
    assert np.array_equal(K.sample_fictitious_many(k, s, rng), s)
    c = Counter(K.sample_fictitious(k, list(s[0]), 0).t)
    assert sum(c.values()) == 20
