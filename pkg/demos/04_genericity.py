"""
Strict equilibria, Condition B and nearby games
===============================================

When the strict version of the equilibrium tests has a solution, the
equilibrium payoff set is robust. When only constant strategies are
feasible (Condition B fails), every nearby game is babbling-only. In
between, a small payoff perturbation produces a strict witness.
"""

from fractions import Fraction as F

import numpy as np

from markovtalk import equilibrium as E
from markovtalk import games
from markovtalk.game import check_D1, check_D2
from markovtalk.rational import fmt

for make in (games.illustration_4_3, games.example5, games.example6, games.device_6_2):
    g = make()
    eh = E.E_hat_nonempty(g)
    cb = E.check_condition_B(g)
    print(f"{g.label:20s} strict set nonempty: {eh.nonempty!s:5s} (slack {fmt(eh.slack)})  Condition B: {cb.holds}")

# the knife-edge game: informative play exists but nothing is strict
g = games.example6()
res = E.theorem3_pipeline(g, F(1, 20))
print("\nperturbing", g.label, "by at most", fmt(res.distance))
print("  strict witness:", [[fmt(x) for x in r] for r in res.witness])
print("  strict tests:", check_D1(res.witness, res.perturbed_game), check_D2(res.witness, res.perturbed_game))

# the babbling-only game stays babbling-only under small noise
g = games.example5()
rng = np.random.default_rng(0)
kept = 0
for _ in range(20):
    noise = rng.integers(-100, 101, size=(2, 2, 2))
    h = g.with_payoffs(
        u1=tuple(tuple(x + F(int(d), 10_000) for x, d in zip(r, dr)) for r, dr in zip(g.u1, noise[0])),
        u2=tuple(tuple(x + F(int(d), 10_000) for x, d in zip(r, dr)) for r, dr in zip(g.u2, noise[1])),
    )
    kept += not E.check_condition_B(h).holds
print(f"\n{g.label}: {kept}/20 perturbations of size <= 1/100 keep Condition B false")
