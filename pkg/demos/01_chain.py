"""
Markov states: invariant measure, the destination-only assumption, quotas
=========================================================================

The sender observes an ergodic chain. Three facts about the chain drive
everything else: its invariant measure m, whether off-diagonal moves depend
only on the destination, and how m is rounded into block quotas.
"""

from fractions import Fraction as F

import numpy as np

from markovtalk import chain, games
from markovtalk.rational import fmt

# three states that never stay put
p = games.illustration_4_3().p
print("invariant measure:", [fmt(x) for x in chain.invariant_measure(p)])

# off-diagonal moves all have probability 1/2, so the assumption holds
res = chain.check_assumption_A(p)
print("destination-only:", res.holds, "alpha =", [fmt(x) for x in res.alpha])
assert chain.reconstruct_from_alpha(res.alpha) == p

# the random walk on a 5-cycle breaks it: from 0 you can reach 1, from 3 you cannot
res = chain.check_assumption_A(games.example7_game().p)
print("5-cycle destination-only:", res.holds, "witness (s, s1, s2) =", res.violation)

# a lopsided chain and its quotas for a few block lengths
q = ((F(1, 2), F(1, 2)), (F(1, 4), F(3, 4)))
m = chain.invariant_measure(q)
print("\nm =", [fmt(x) for x in m])
for N in (1, 2, 5, 10, 24):
    print(f"  N={N:3d} quotas {chain.quota_distribution(m, N)}")

# sample paths are reproducible from a seed
path = chain.sample_path(q, 20_000, seed=1)
print("\nempirical frequency of state 1:", np.mean(path == 1).round(4), "(exact", fmt(m[1]) + ")")
