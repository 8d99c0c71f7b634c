import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import prob_vector, random_game
from markovtalk import game as G
from markovtalk import games
from markovtalk.copula import sample_copula


@st.composite
def game_and_strategy(draw, max_states=3):
    g = draw(random_game(max_states=max_states))
    y = tuple(draw(prob_vector(g.n_actions, positive=False)) for _ in range(g.n_states))
    return g, y


def brute_C1(y, g):
    n = g.n_states
    M = G.report_matrix(y, g)
    vals = {p: sum(M[s][p[s]] for s in range(n)) for p in itertools.permutations(range(n))}
    return vals[tuple(range(n))] == max(vals.values())


def test_game_validation():
    with pytest.raises(G.GameError):
        G.GameSpec(u1=((1, 2),), u2=((1, 2),), p=((1,),))
    with pytest.raises(G.GameError):
        G.GameSpec(u1=((1, 2), (0, 1)), u2=((1,), (0,)), p=games.FAIR_IID)
    with pytest.raises(G.GameError):
        G.strategy(((F(1, 2), F(1, 3)), (F(1), F(0))))


def test_babbling_values():
    assert G.babbling_value(games.illustration_4_3()) == F(1, 3)
    assert G.babbling_value(games.example6()) == 1
    assert G.babbling_value(games.device_6_2()) == 1
    g = games.sec3_game()
    assert G.babbling_value(g) == 1
    assert G.payoff_U(G.mu_zero(g.m), G.babbling_strategy(g), g) == (2, 1)


def test_alternation_game_truthful_profile():
    g = games.sec3_game()
    match = games.match_strategy(2)
    assert G.payoff_U(G.mu_zero(g.m), match, g) == ((F(3, 2) + 2) / 2, F(3, 2))
    # one-shot, the sender in L would rather announce R ...
    M = G.report_matrix(match, g)
    assert M[0][1] > M[0][0]
    # ... but over the long run the report frequencies are pinned, so truth passes C1
    assert G.check_C1(match, g).holds


@given(game_and_strategy(), st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1), st.fractions(0, 1))
def test_payoff_is_bilinear_in_copula(gy, s1, s2, alpha):
    g, y = gy
    mu, nu = sample_copula(g.m, s1), sample_copula(g.m, s2)
    mix = tuple(tuple(alpha * a + (1 - alpha) * b for a, b in zip(r, q)) for r, q in zip(mu, nu))
    u, v, w = G.payoff_U(mu, y, g), G.payoff_U(nu, y, g), G.payoff_U(mix, y, g)
    assert w.v1 == alpha * u.v1 + (1 - alpha) * v.v1
    assert w.v2 == alpha * u.v2 + (1 - alpha) * v.v2


@given(game_and_strategy(max_states=5))
def test_C1_matches_enumeration(gy):
    g, y = gy
    assert G.check_C1(y, g).holds == brute_C1(y, g)


@given(game_and_strategy(max_states=4))
def test_D1_is_strict_C1(gy):
    g, y = gy
    n = g.n_states
    M = G.report_matrix(y, g)
    ident = sum(M[s][s] for s in range(n))
    others = [sum(M[s][p[s]] for s in range(n)) for p in itertools.permutations(range(n)) if p != tuple(range(n))]
    assert G.check_D1(y, g) == (ident > max(others))


@given(random_game(), st.integers(0, 2**32 - 1), st.data())
def test_constant_strategy_ignores_copula(g, seed, data):
    row = data.draw(prob_vector(g.n_actions, positive=False))
    y = G.constant_strategy(row, g.n_states)
    assert G.is_constant(y)
    mu = sample_copula(g.m, seed)
    assert G.payoff_U(mu, y, g) == G.payoff_U(G.mu_zero(g.m), y, g)
    assert G.payoff_U(G.mu_zero(g.m), y, g).v2 <= G.babbling_value(g)


@given(random_game(max_states=4))
def test_babbling_strategy_is_in_E(g):
    mem = G.membership_in_E(G.babbling_strategy(g), g)
    assert mem.in_E and mem.c1 and mem.c2


@given(random_game(), st.data())
def test_one_shot_embedding_preserves_payoff(g, data):
    n, k = g.n_states, g.n_actions
    sigma = tuple(data.draw(prob_vector(n, positive=False)) for _ in range(n))
    tau = tuple(data.draw(prob_vector(k, positive=False)) for _ in range(n))
    y = G.one_shot_embed(sigma, tau, g)
    one_shot = sum(
        g.m[s] * sigma[s][a] * tau[a][b] * g.u1[s][b] for s in range(n) for a in range(n) for b in range(k)
    )
    assert G.payoff_U(G.mu_zero(g.m), y, g).v1 == one_shot


def test_example7_match_strategy():
    g = games.example7_game()
    y = games.match_strategy(5)
    res = G.check_C1(y, g)
    assert not res.holds
    assert res.identity_value == 5
    assert res.worst_value == 2 * F(6, 5) + 3


def one_shot_equilibria(g, grid=(F(0), F(1, 4), F(1, 2), F(3, 4), F(1))):
    """Oracle: enumerate one-shot cheap-talk profiles on a rational grid and keep the equilibria.

    Two states, two messages, two actions. sigma[s] = P(message 0 | s),
    tau[a] = P(action 0 | message a).
    """
    found = []
    for sig in itertools.product(grid, repeat=2):
        sigma = tuple((x, 1 - x) for x in sig)
        for ta in itertools.product(grid, repeat=2):
            tau = tuple((x, 1 - x) for x in ta)
            ok = True
            for s in range(2):
                vals = [G.expected_payoff(g.u1, s, tau[a]) for a in range(2)]
                ok &= all(vals[a] == max(vals) for a in range(2) if sigma[s][a])
            for a in range(2):
                w = [g.m[s] * sigma[s][a] for s in range(2)]
                if sum(w) == 0:
                    continue
                vals = [sum(w[s] * g.u2[s][b] for s in range(2)) for b in range(2)]
                ok &= all(vals[b] == max(vals) for b in range(2) if tau[a][b])
            if ok:
                found.append((sigma, tau))
    return found


def test_one_shot_equilibria_embed_into_E():
    g = games.example6()
    eqs = one_shot_equilibria(g)
    assert any(any(0 < x < 1 for r in s + t for x in r) for s, t in eqs)
    for sigma, tau in eqs:
        assert G.membership_in_E(G.one_shot_embed(sigma, tau, g), g).in_E


def test_one_shot_embed_trivial_cases():
    g = games.illustration_4_3()
    y2 = games.y2_4_3()
    assert G.one_shot_embed(games.match_strategy(3), y2, g) == y2
    pool = tuple((F(1), F(0), F(0)) for _ in range(3))
    assert G.one_shot_embed(pool, y2, g) == (y2[0],) * 3


def test_membership_examples():
    g = games.example6()
    mem = G.membership_in_E(games.y_example6(), g)
    assert mem.in_E and mem.payoff == (F(3, 4), 1)
    assert not G.membership_in_E(games.match_strategy(5), games.example7_game()).in_E
