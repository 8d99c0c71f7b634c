"""Shared hypothesis strategies: random rational chains, games and copulas."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from markovtalk.game import GameSpec

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.large_base_example, HealthCheck.data_too_large],
)
settings.load_profile("default")


@st.composite
def prob_vector(draw, n, positive=True, denominator=12):
    """Rational probability vector with common denominator."""
    lo = 1 if positive else 0
    while True:
        w = draw(st.lists(st.integers(lo, denominator), min_size=n, max_size=n))
        if sum(w) > 0:
            return tuple(Fraction(x, sum(w)) for x in w)


@st.composite
def positive_chain(draw, n):
    """Transition matrix with all entries positive (hence ergodic)."""
    return tuple(draw(prob_vector(n)) for _ in range(n))


@st.composite
def small_ints_matrix(draw, rows, cols, lo=-3, hi=3):
    return tuple(tuple(Fraction(draw(st.integers(lo, hi))) for _ in range(cols)) for _ in range(rows))


@st.composite
def random_game(draw, min_states=2, max_states=3, max_actions=3):
    n = draw(st.integers(min_states, max_states))
    k = draw(st.integers(2, max_actions))
    return GameSpec(
        u1=draw(small_ints_matrix(n, k)),
        u2=draw(small_ints_matrix(n, k)),
        p=draw(positive_chain(n)),
    )


@st.composite
def assumption_a_chain(draw, n):
    """Chain whose off-diagonal moves depend only on the destination."""
    while True:
        w = draw(st.lists(st.integers(1, 6), min_size=n, max_size=n))
        d = draw(st.integers(sum(w), 3 * sum(w)))
        alpha = [Fraction(x, d) for x in w]
        total = sum(alpha)
        rows = tuple(tuple(alpha[t] if t != s else 1 - (total - alpha[s]) for t in range(n)) for s in range(n))
        if all(x > 0 for r in rows for x in r):
            return rows


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance verdicts, one line per criterion, when that module ran."""
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
