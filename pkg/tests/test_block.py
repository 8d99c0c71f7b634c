from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markovtalk import block as B
from markovtalk import equilibrium as E
from markovtalk import games
from markovtalk.game import babbling_payoffs, babbling_value, expected_payoff, mu_zero, payoff_U


@st.composite
def quotas_and_announcements(draw):
    n = draw(st.integers(2, 4))
    q = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n).filter(lambda q: sum(q) > 0))
    ann = draw(st.lists(st.integers(0, n - 1), min_size=sum(q), max_size=sum(q)))
    return tuple(q), tuple(ann)


@given(quotas_and_announcements())
def test_theta_fills_quotas_exactly(qa):
    q, ann = qa
    th = B.theta_sequence(ann, q)
    assert len(th) == sum(q)
    assert Counter(th) == Counter({s: k for s, k in enumerate(q) if k})
    # before the first bust the receiver follows the sender
    counts = Counter()
    for a, t in zip(ann, th):
        counts[a] += 1
        if counts[a] > q[a]:
            break
        assert a == t


@given(quotas_and_announcements())
def test_automaton_replays_theta_sequence(qa):
    q, ann = qa
    y = tuple(tuple(F(int(i == j)) for j in range(len(q))) for i in range(len(q)))
    mach = B.BlockAutomaton(y, q)
    state = mach.initial()
    out = []
    for n, a in enumerate(ann, start=1):
        out.append(mach.theta(n, state, a))
        state = mach.step(n, state, a)
    assert tuple(out) == B.theta_sequence(ann, q)


def test_bust_discards_announcement_and_fills_in_order():
    assert B.theta_sequence((0, 0, 0, 0), (2, 1, 1)) == (0, 0, 1, 2)
    assert B.theta_sequence((2, 2, 0, 1), (1, 2, 1)) == (2, 0, 1, 1)
    with pytest.raises(AssertionError):
        B.fictitious_schedule((3, 0), (2, 1), 1)


def naive_sender_value(game, y, quotas, delta):
    """Oracle: backward induction on full announcement histories, no machine, no memo."""
    N = sum(quotas)
    n_s = game.n_states

    def acted(hist):
        return B.theta_sequence(hist + (0,) * (N - len(hist)), quotas)[len(hist) - 1]

    def busted(hist):
        c = Counter(hist)
        return any(c[s] > quotas[s] for s in c)

    def V(hist, s):
        if len(hist) == N:
            return F(0)
        best = None
        for a in range(n_s):
            h = hist + (a,)
            if busted(hist):
                # announcements no longer matter; fix message 0
                if a:
                    continue
            row = y[acted(h)]
            v = expected_payoff(game.u1, s, row) + delta * sum(game.p[s][t] * V(h, t) for t in range(n_s) if game.p[s][t])
            best = v if best is None or v > best else best
        return best

    return tuple(V((), s) for s in range(n_s))


@pytest.mark.parametrize("make, N", [(games.illustration_4_3, 3), (games.illustration_4_3, 4), (games.sec3_game, 4), (games.device_6_2, 3)])
def test_sender_dp_matches_history_oracle(make, N):
    g = make()
    y = E.E_hat_nonempty(g).witness
    mach = B.BlockAutomaton.for_game(g, y, N)
    d = F(9, 10)
    pol = B.best_reply_sender(g, mach, d)
    assert pol.value == naive_sender_value(g, y, mach.quotas, d)


@pytest.mark.parametrize("N, delta", [(3, F(1, 2)), (6, F(9, 10)), (9, F(99, 100))])
def test_best_reply_dominates_truth(N, delta):
    g = games.illustration_4_3()
    y = E.mix_strategies(E.E_hat_nonempty(g).witness, games.y2_4_3(), F(1, 10))
    mach = B.BlockAutomaton.for_game(g, y, N)
    chk = B.sender_deviation_check(g, mach, delta)
    assert all(b >= t for b, t in zip(chk.best_values, chk.truthful_values))
    best = B.discounted_payoff(g, mach, B.best_reply_sender(g, mach, delta), delta)
    truth = B.discounted_payoff(g, mach, B.TruthfulPolicy(), delta)
    assert best.v1 >= truth.v1


@pytest.mark.parametrize("delta", [F(6, 10), F(7, 10), F(9, 10)])
def test_alternation_closed_forms(delta):
    c = F(3, 2)
    g = games.sec3_game(c)
    pay = B.discounted_payoff(g, B.sec3_alternation(g), B.TruthfulPolicy(), delta)
    assert pay.v1 == (((2 + c) / 2) + delta * (5 + c) / 4) / (1 + delta)
    assert pay.v2 == (F(3, 2) + F(3, 4) * delta) / (1 + delta)


def test_alternation_deviation_threshold():
    g = games.sec3_game()
    m = B.sec3_alternation(g)
    low = B.sender_deviation_check(g, m, F(6, 10))
    assert low.profitable and low.gain == F(1, 20)
    assert low.deviation[:3] == (1, None, 0) and low.deviation[3] == 1
    assert not B.sender_deviation_check(g, m, F(7, 10)).profitable
    # the threshold: lying in L gains 1/2 now and loses delta*(3/4) later
    assert not B.sender_deviation_check(g, m, F(2, 3)).profitable
    assert B.sender_deviation_check(g, m, F(2, 3) - F(1, 1000)).profitable


@given(st.fractions(F(1, 20), F(19, 20)))
@settings(max_examples=20)
def test_constant_machine_gives_babbling_payoff(delta):
    g = games.device_6_2()
    u1b, u2b = babbling_payoffs(g)
    row = (F(0), F(0), F(1))
    mach = B.ConstantMachine(row, N=3)
    pay = B.discounted_payoff(g, mach, B.TruthfulPolicy(), delta)
    assert pay == (u1b[2], u2b[2])


@pytest.mark.parametrize("N", [2, 5, 7])
def test_joint_distribution_margins(N):
    g = games.illustration_4_3()
    y = E.E_hat_nonempty(g).witness
    mach = B.BlockAutomaton.for_game(g, y, N)
    for pol in (B.TruthfulPolicy(), B.best_reply_sender(g, mach, F(9, 10)), B.SenderPolicy({})):
        jd = B.exact_joint_distribution(g, mach, pol)
        assert jd.column_margin() == mach.m_N
        assert jd.row_margin() == g.m


def test_truthful_block_is_truthful_when_quotas_exact():
    # N = 1 with two i.i.d. fair states gives quotas (1, 0): not exact
    g = games.sec3_game()
    mach = B.BlockAutomaton.for_game(g, games.match_strategy(2), 1)
    assert mach.quotas == (1, 0)
    jd = B.exact_joint_distribution(g, mach, B.TruthfulPolicy())
    assert jd.mu_hat == ((F(1, 2), F(0)), (F(1, 2), F(0)))


def test_block_average_payoff_under_truth_with_large_quotas():
    g = games.illustration_4_3()
    y = games.y2_4_3()
    mach = B.BlockAutomaton(y, (4, 4, 4))
    avg = B.block_average_payoff(g, mach, B.TruthfulPolicy())
    jd = B.exact_joint_distribution(g, mach, B.TruthfulPolicy())
    assert avg == payoff_U(jd.mu_hat, y, g)


def test_report_distance_shrinks_with_block_length():
    g = games.illustration_4_3()
    y = B.strict_mixture(g, games.y2_4_3())
    rows = B.lemma3_convergence_sweep(g, y, [6, 12], [F(9, 10)])
    assert rows[1].distance < rows[0].distance
    assert abs(float(rows[0].distance) - 0.2708) < 1e-4
    assert abs(float(rows[1].distance) - 0.1951) < 1e-4


def test_lemma2_corollary_on_block_law():
    g = games.illustration_4_3()
    y0 = E.E_hat_nonempty(g).witness
    eps = F(1, 10)
    y = E.mix_strategies(y0, games.y2_4_3(), eps)
    mach = B.BlockAutomaton.for_game(g, y, 6)
    jd = B.exact_joint_distribution(g, mach, B.best_reply_sender(g, mach, F(9, 10)))
    mu, _ = E.nearest_copula(jd.mu_hat, g.m)
    assert E.lemma2_bound_check(g, y0, games.y2_4_3(), eps, mu).holds


def test_receiver_bound_against_float_series():
    g = games.device_6_2()
    belief = (F(1), F(0))
    d = F(9, 10)
    b = np.array([1.0, 0.0])
    P = np.array(g.p, float)
    u2 = np.array(g.u2, float)
    total = 0.0
    for k in range(2000):
        total += (1 - 0.9) * 0.9**k * max(b @ u2)
        b = b @ P
    assert abs(float(B.receiver_deviation_bound(g, belief, d)) - total) < 1e-10
    assert B.receiver_deviation_bound(g, g.m, d) == babbling_value(g)


def test_gap_report_certifies_at_high_patience():
    g = games.illustration_4_3()
    y = B.strict_mixture(g, games.y2_4_3())
    rep = B.equilibrium_gap_report(g, y, 12, F(999, 1000))
    assert rep.certified and rep.receiver_gap < 0 and rep.sender_gap == 0


def test_gap_report_flags_impatient_receiver():
    g = games.illustration_4_3()
    y = B.strict_mixture(g, games.y2_4_3())
    rep = B.equilibrium_gap_report(g, y, 6, F(1, 2))
    assert not rep.certified and rep.worst_cell is not None


def test_monte_carlo_matches_exact():
    g = games.illustration_4_3()
    y = B.strict_mixture(g, games.y2_4_3())
    mach = B.BlockAutomaton.for_game(g, y, 6)
    d = F(9, 10)
    pol = B.best_reply_sender(g, mach, d)
    exact = B.discounted_payoff(g, mach, pol, d)
    mc = B.monte_carlo_payoff(g, mach, pol, d, 300, 10_000, seed=5)
    assert mc.within(exact)
    again = B.monte_carlo_payoff(g, mach, pol, d, 300, 10_000, seed=5)
    assert again.mean == mc.mean


def test_truthful_bound():
    g = games.illustration_4_3()
    chk = B.truthful_bound_check(g, games.y2_4_3(), 30, 0.2, 4000, seed=2)
    assert chk.holds


def test_budget_guard():
    g = games.illustration_4_3()
    mach = B.BlockAutomaton.for_game(g, games.y2_4_3(), 12)
    with pytest.raises(B.BudgetExceeded):
        B.best_reply_sender(g, mach, F(9, 10), budget=10)


def test_strict_mixture_needs_strict_set():
    with pytest.raises(E.PreconditionError):
        B.strict_mixture(games.example5(), games.match_strategy(2))


def test_initial_distribution_override():
    g = games.sec3_game()
    m = B.sec3_alternation(g)
    d = F(7, 10)
    from_L = B.discounted_payoff(g, m, B.TruthfulPolicy(), d, initial=(1, 0))
    from_R = B.discounted_payoff(g, m, B.TruthfulPolicy(), d, initial=(0, 1))
    avg = B.discounted_payoff(g, m, B.TruthfulPolicy(), d)
    assert (from_L.v1 + from_R.v1) / 2 == avg.v1
    assert mu_zero(g.m)[0][0] == F(1, 2)


def test_long_block_distance():
    g = games.illustration_4_3()
    y = B.strict_mixture(g, games.y2_4_3())
    row = B.lemma3_convergence_sweep(g, y, [30], [F(99, 100)])[0]
    assert row.distance < F(1, 5)


def test_patient_payoff_near_block_average():
    g = games.illustration_4_3()
    y = B.strict_mixture(g, games.y2_4_3())
    mach = B.BlockAutomaton.for_game(g, y, 12)
    d = F(999, 1000)
    pol = B.best_reply_sender(g, mach, d)
    exact = B.discounted_payoff(g, mach, pol, d)
    jd = B.exact_joint_distribution(g, mach, pol)
    target = payoff_U(jd.mu_hat, y, g)
    assert B.block_average_payoff(g, mach, pol) == target
    assert abs(exact.v1 - target.v1) < F(1, 20) and abs(exact.v2 - target.v2) < F(1, 20)


def test_receiver_bound_iid_closed_form():
    g = games.device_6_2()
    d = F(4, 5)
    for belief in ((F(1), F(0)), (F(1, 3), F(2, 3)), (F(0), F(1))):
        now = max(sum(belief[s] * g.u2[s][b] for s in range(2)) for b in range(3))
        assert B.receiver_deviation_bound(g, belief, d) == (1 - d) * now + d * babbling_value(g)


def test_receiver_gap_at_moderate_patience():
    # at N=12 the receiver incentive is not yet certified at delta=0.99; it is at 0.999
    g = games.illustration_4_3()
    y = B.strict_mixture(g, games.y2_4_3())
    rep = B.equilibrium_gap_report(g, y, 12, F(99, 100))
    assert 0 < rep.receiver_gap < F(1, 1000)
