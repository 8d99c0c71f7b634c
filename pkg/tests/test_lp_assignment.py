"""Exact simplex and assignment solvers against float and brute-force oracles."""

import itertools
from fractions import Fraction as F

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog as scipy_linprog

from markovtalk import lp
from markovtalk.assignment import best_non_identity, lexicographic_argmax, solve_assignment

fracs = st.integers(-5, 5).map(F)


@st.composite
def bounded_lp(draw):
    n = draw(st.integers(1, 4))
    k = draw(st.integers(1, 4))
    c = draw(st.lists(fracs, min_size=n, max_size=n))
    A = [draw(st.lists(fracs, min_size=n, max_size=n)) for _ in range(k)]
    b = draw(st.lists(st.integers(-2, 6).map(F), min_size=k, max_size=k))
    # box keeps every instance bounded
    A += [[F(int(i == j)) for j in range(n)] for i in range(n)]
    b += [F(10)] * n
    return c, A, b


@given(bounded_lp())
def test_linprog_matches_scipy(inst):
    c, A, b = inst
    res = lp.linprog(c, A_ub=A, b_ub=b)
    ref = scipy_linprog([-float(x) for x in c], A_ub=np.array(A, float), b_ub=np.array(b, float), bounds=(0, None), method="highs")
    if ref.status == 2:
        assert res.status == lp.INFEASIBLE
        return
    assert res.ok
    assert abs(float(res.value) + ref.fun) < 1e-7
    x = res.x
    assert all(v >= 0 for v in x)
    assert all(sum(a * v for a, v in zip(row, x)) <= bb for row, bb in zip(A, b))


def test_linprog_equalities_and_unbounded():
    res = lp.linprog([F(1), F(1)], A_eq=[[F(1), F(2)]], b_eq=[F(4)])
    assert res.ok and res.value == 4 and res.x == (F(4), F(0))
    assert lp.linprog([F(1)], A_ub=[[F(-1)]], b_ub=[F(0)]).status == lp.UNBOUNDED
    assert lp.linprog([F(1)], A_ub=[[F(1)]], b_ub=[F(-1)]).status == lp.INFEASIBLE


def test_lexmax_breaks_ties():
    # max x+y on the simplex x+y<=1 is a whole edge; second objective picks y
    res = lp.lexmax([[F(1), F(1)], [F(0), F(1)]], A_ub=[[F(1), F(1)]], b_ub=[F(1)])
    assert res.value == 1 and res.x == (F(0), F(1))


def brute(w):
    n = len(w)
    return {perm: sum(w[i][perm[i]] for i in range(n)) for perm in itertools.permutations(range(n))}


square = st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(fracs, min_size=n, max_size=n), min_size=n, max_size=n))


@given(square)
def test_assignment_matches_enumeration(w):
    table = brute(w)
    val, perm = solve_assignment(w)
    assert val == max(table.values()) == table[perm]
    val, perm = solve_assignment(w, maximize=False)
    assert val == min(table.values()) == table[perm]


@given(square)
def test_lexicographic_argmax_is_first_best(w):
    table = brute(w)
    best = max(table.values())
    val, perm = lexicographic_argmax(w)
    assert val == best
    assert perm == min(p for p, v in table.items() if v == best)


@given(square)
def test_best_non_identity(w):
    n = len(w)
    table = brute(w)
    ident = tuple(range(n))
    res = best_non_identity(w)
    if n == 1:
        assert res is None
        return
    val, perm = res
    assert perm != ident
    assert val == max(v for p, v in table.items() if p != ident) == table[perm]
