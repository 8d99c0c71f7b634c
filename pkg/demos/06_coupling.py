"""
Undetectable lies: coupling a fictitious chain to the real one
==============================================================

A sender who wants the long-run (state, report) law to be a copula mu can
draw a fictitious state t_n next to each real state s_n and report t_n. If
mu passes a linear compatibility test, the fictitious sequence moves exactly
like the real chain, so the receiver cannot tell, and the sender earns
U(mu, y) against any stationary y.
"""

from fractions import Fraction as F

from markovtalk import chain, coupling, games
from markovtalk.game import GameSpec
from markovtalk.rational import fmt, fmt_matrix

p = games.persistent_chain(F(3, 4))
mu = ((F(3, 8), F(1, 8)), (F(1, 8), F(3, 8)))
print("compatible:", coupling.check_property_P(mu, p).holds)
k = coupling.build_kernel(mu, p)
print("kernel identities:", k.claims())

rep = coupling.exact_law_check(k, 4)
for name, r in sorted(rep.results.items()):
    print(f"  {name:8s} holds={r['holds']}")

# one simulated path
real = [int(x) for x in chain.sample_path(p, 15, seed=3)]
path = coupling.sample_fictitious(k, real, seed=3)
print("real      ", "".join(map(str, real)))
print("fictitious", "".join(map(str, path.t)))

# the payoff identity by simulation
g = GameSpec(u1=((1, 0), (0, 1)), u2=((1, 0), (0, 1)), p=p)
y = ((F(3, 4), F(1, 4)), (F(1, 4), F(3, 4)))
res = coupling.payoff_identity_check(g, y, mu, F(95, 100), 400, seed=0)
print(f"\nU(mu, y) = ({fmt(res.analytic[0])}, {fmt(res.analytic[1])}); simulated ({res.simulated[0]:.4f}, {res.simulated[1]:.4f})")
print(f"gap {res.gap:.4f} within bound {res.bound:.4f}: {res.within}")

# on the 5-cycle some copulas cannot be coupled
p7 = games.example7_game().p
v = coupling.max_property_P_violation(p7)
print("\n5-cycle: largest compatibility violation", fmt(v.violation), "at", v.pair)
print(fmt_matrix(v.copula))
bad = coupling.exact_law_check(coupling.raw_kernel(v.copula, p7), 3)
print("first failure of the naive kernel:", bad.results["P2"]["first_failure"])
