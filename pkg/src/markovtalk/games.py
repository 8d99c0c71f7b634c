"""The games worked out in the literature this package reproduces.

Each constructor returns a :class:`~markovtalk.game.GameSpec`; the same
games ship as JSON files under ``markovtalk/games/``.
"""

from __future__ import annotations

from fractions import Fraction

from .game import GameSpec

_HALF = Fraction(1, 2)
FAIR_IID = ((_HALF, _HALF), (_HALF, _HALF))


def sec3_game(c=Fraction(3, 2)) -> GameSpec:
    """Two i.i.d. states; the sender always prefers r, the receiver wants to match.

    The one-shot game only has babbling equilibria, yet the dynamic game
    supports payoffs near ``((2 + c)/2, 3/2)``.
    """
    c = Fraction(c)
    return GameSpec(
        u1=((c, 2), (1, 2)),
        u2=((2, 1), (-1, 1)),
        p=FAIR_IID,
        states=("L", "R"),
        actions=("l", "r"),
        label=f"sec3(c={c})",
    )


def illustration_4_3() -> GameSpec:
    """Three states that always switch; the equilibrium set is a triangle."""
    return GameSpec(
        u1=((1, 0, 0), (0, 1, 0), (0, 0, 1)),
        u2=((1, 0, 0), (0, 0, 1), (0, 1, 0)),
        p=((0, _HALF, _HALF), (_HALF, 0, _HALF), (_HALF, _HALF, 0)),
        states=("s0", "s1", "s2"),
        actions=("L", "M", "R"),
        label="illustration_4_3",
    )


def example5() -> GameSpec:
    """State-independent payoffs: only constant strategies are feasible."""
    return GameSpec(
        u1=((1, 0), (1, 0)),
        u2=((1, 0), (1, 0)),
        p=FAIR_IID,
        states=("L", "R"),
        actions=("l", "r"),
        label="example5",
    )


def example6() -> GameSpec:
    """Informative equilibria exist in the limit set but not in any discounted game."""
    return GameSpec(
        u1=((_HALF, 1), (0, 1)),
        u2=((1, 1), (0, 1)),
        p=FAIR_IID,
        states=("L", "R"),
        actions=("l", "r"),
        label="example6",
    )


def example7_game(c=Fraction(6, 5)) -> GameSpec:
    """Random walk on a 5-cycle; the sender gains c by confusing states 0 and 1.

    The chain violates the destination-only transition assumption, and the
    match-the-announcement strategy is not incentive compatible once c > 1.
    """
    c = Fraction(c)
    n = 5
    u1 = [[Fraction(0)] * n for _ in range(n)]
    u2 = [[Fraction(0)] * n for _ in range(n)]
    for s in range(n):
        u1[s][s] = u2[s][s] = Fraction(1)
    u1[0][1] = u1[1][0] = c
    p = [[_HALF if (t - s) % n in (1, n - 1) else 0 for t in range(n)] for s in range(n)]
    return GameSpec(
        u1=u1,
        u2=u2,
        p=p,
        states=tuple(str(s) for s in range(n)),
        actions=tuple(str(b) for b in range(n)),
        label=f"example7(c={c})",
    )


def device_6_2() -> GameSpec:
    """Two i.i.d. states, three actions; a mixed strategy reaches (2, 7/6)."""
    return GameSpec(
        u1=((3, 0, 2), (1, 4, 2)),
        u2=((0, 4, 1), (-5, -4, 1)),
        p=FAIR_IID,
        states=("L", "R"),
        actions=("l", "m", "r"),
        label="device_6_2",
    )


def persistent_chain(stay=Fraction(3, 4)) -> tuple:
    """Symmetric 2-state chain staying put with probability ``stay``."""
    stay = Fraction(stay)
    return ((stay, 1 - stay), (1 - stay, stay))


# reference strategies from the worked examples
def y2_4_3():
    """Match the announcement: L, M, R after s0, s1, s2."""
    one, zero = Fraction(1), Fraction(0)
    return ((one, zero, zero), (zero, one, zero), (zero, zero, one))


def y1_4_3():
    """L after s0, an even mix of M and R otherwise."""
    one, zero = Fraction(1), Fraction(0)
    return ((one, zero, zero), (zero, _HALF, _HALF), (zero, _HALF, _HALF))


def y_example6():
    return ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def y_star_6_2():
    return ((Fraction(2, 3), Fraction(1, 3), Fraction(0)), (Fraction(0), Fraction(0), Fraction(1)))


def match_strategy(n: int):
    return tuple(tuple(Fraction(int(a == b)) for b in range(n)) for a in range(n))


BUNDLED = {
    "sec3_example": sec3_game,
    "illustration_4_3": illustration_4_3,
    "example5": example5,
    "example6": example6,
    "example7": example7_game,
    "device_6_2": device_6_2,
}
