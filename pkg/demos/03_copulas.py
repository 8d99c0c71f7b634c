"""
Copulas: joint laws of (state, report) with both margins equal to m
===================================================================

A long-run report distribution must match the state distribution, so any
deviation the sender can sustain is a copula. Their set is a
transportation polytope; adding I - mu0 turns a copula into a doubly
stochastic matrix, which splits into permutations.
"""

from fractions import Fraction as F

from markovtalk import copula as C
from markovtalk.game import mu_zero
from markovtalk.rational import fmt_matrix

m = (F(1, 5), F(3, 10), F(1, 2))
verts = C.extreme_points(m)
print(f"{len(verts)} vertices of the copula polytope for m = {[str(x) for x in m]}")
for v in verts:
    print("  ", fmt_matrix(v), "distance to truth", C.l1_distance(v, mu_zero(m)))

mu = C.sample_copula(m, seed=0)
print("\nrandom copula:", fmt_matrix(mu))
J = C.to_bistochastic(mu, m)
d = C.birkhoff_decompose(J)
print("as a mixture of permutations:")
for w, perm in d.terms:
    print(f"  {w} x {perm}")
assert C.copula_from_decomposition(d, m) == mu

# for uniform margins the vertices are exactly the scaled permutation matrices
print("\nuniform 4 states:", len(C.extreme_points((F(1, 4),) * 4)), "vertices")
