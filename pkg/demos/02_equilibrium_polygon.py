"""
The limit equilibrium payoff set as an exact polygon
=====================================================

Payoffs U(mu0, y) of stationary receiver strategies y that pass two tests:
truth-telling beats every relabeling of reports (an assignment problem), and
the receiver does at least as well as babbling. The set is the image of a
polytope under a linear map, so its support function in any direction is an
LP; sweeping directions recovers every vertex exactly.
"""

from markovtalk import equilibrium as E
from markovtalk import games
from markovtalk.game import babbling_value, membership_in_E
from markovtalk.rational import fmt


def show(g):
    poly = E.compute_E_polygon(g)
    print(f"{g.label}: v2 = {fmt(babbling_value(g))}")
    for v, w in zip(poly.vertices, poly.witnesses):
        print(f"  vertex ({fmt(v[0])}, {fmt(v[1])})  witness rows {[[fmt(x) for x in r] for r in w]}")
        assert membership_in_E(w, g).in_E
    print(f"  babbling point inside: {poly.contains(E.babbling_point(g))}")
    return poly


# three switching states: a triangle
show(games.illustration_4_3())

# the feasible region is larger: the receiver's constraint and the sender's
# incentives cut it down to the triangle above
fp = E.feasible_polygon(games.illustration_4_3())
print("  feasible vertices:", [(fmt(x), fmt(y)) for x, y in fp.vertices])

# two i.i.d. states where no informative one-shot equilibrium exists
show(games.sec3_game())

# a three-action game whose best receiver payoff needs a mixed strategy
g = games.device_6_2()
show(g)
best, y = E.max_receiver_payoff(g)
print("  best receiver payoff", fmt(best), "at", [[fmt(x) for x in r] for r in y])

# five states: 120 permutation constraints, added lazily as cuts
show(games.example7_game())
