from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import assumption_a_chain, positive_chain, prob_vector
from markovtalk import chain, games
from markovtalk.rational import vecmat


def sympy_invariant(p):
    """Independent oracle: left null vector of P - I via sympy."""
    n = len(p)
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in p]).T - sympy.eye(n)
    v = M.nullspace()[0]
    v = v / sum(v)
    return tuple(F(int(x.p), int(x.q)) for x in v)


def test_invariant_measure_known_values():
    assert chain.invariant_measure(games.persistent_chain()) == (F(1, 2), F(1, 2))
    assert chain.invariant_measure(games.illustration_4_3().p) == (F(1, 3),) * 3
    assert chain.invariant_measure(((F(1, 2), F(1, 2)), (F(1, 4), F(3, 4)))) == (F(1, 3), F(2, 3))


@given(st.integers(2, 5).flatmap(positive_chain))
def test_invariant_measure_is_fixed_point(p):
    m = chain.invariant_measure(p)
    assert vecmat(m, p) == m
    assert sum(m) == 1
    assert m == sympy_invariant(p)


def test_reducible_and_periodic_chains():
    red = ((F(1), F(0)), (F(1, 2), F(1, 2)))
    assert not chain.check_ergodic(red).irreducible
    with pytest.raises(chain.NotIrreducible):
        chain.invariant_measure(red)
    flip = ((F(0), F(1)), (F(1), F(0)))
    erg = chain.check_ergodic(flip)
    assert erg.irreducible and not erg.aperiodic and erg.period == 2
    # the three-state switching chain has cycles of length 2 and 3
    assert chain.check_ergodic(games.illustration_4_3().p).aperiodic


def test_transition_matrix_rejects_bad_rows():
    with pytest.raises(chain.ChainError):
        chain.transition_matrix(((F(1, 2), F(1, 3)), (F(1, 2), F(1, 2))))
    with pytest.raises(chain.ChainError):
        chain.transition_matrix(((F(3, 2), F(-1, 2)), (F(1, 2), F(1, 2))))


def test_assumption_a_examples():
    assert chain.check_assumption_A(games.illustration_4_3().p).alpha == (F(1, 2),) * 3
    assert chain.check_assumption_A(games.persistent_chain()).holds
    res = chain.check_assumption_A(games.example7_game().p)
    assert not res.holds
    s, s1, s2 = res.violation
    p = games.example7_game().p
    assert s1 not in (s, s2) and p[s][s1] != p[s2][s1]


@given(st.integers(2, 5).flatmap(assumption_a_chain))
def test_assumption_a_witness_reconstructs(p):
    res = chain.check_assumption_A(p)
    assert res.holds
    assert chain.reconstruct_from_alpha(res.alpha) == p


@given(st.integers(2, 5).flatmap(prob_vector), st.integers(1, 200))
def test_quota_distribution_rounding(m, N):
    q = chain.quota_distribution(m, N)
    assert sum(q) == N
    assert all(abs(k - N * x) < 1 for k, x in zip(q, m))


def test_quota_ties_go_to_lower_index():
    assert chain.quota_distribution((F(1, 3),) * 3, 4) == (2, 1, 1)
    with pytest.raises(ValueError):
        chain.quota_distribution((F(1, 2), F(1, 2)), 0)


def test_sample_path_reproducible_and_ergodic():
    p = games.persistent_chain()
    a = chain.sample_path(p, 5000, 7)
    b = chain.sample_path(p, 5000, 7)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, chain.sample_path(p, 5000, 8))
    # persistence 3/4: stays about three times in four
    stay = np.mean(a[1:] == a[:-1])
    assert abs(stay - 0.75) < 0.03
