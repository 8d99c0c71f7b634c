"""
Block play: quota machines, sender best replies, payoffs
========================================================

The receiver listens in blocks of N stages. Each state may be reported at
most its quota of times; once a quota is broken the machine stops listening
and acts on a schedule that fills the remaining quotas. Against this machine
the sender best-replies by backward induction, and reports become
approximately truthful as N grows and players become patient.
"""

from fractions import Fraction as F

from markovtalk import block as B
from markovtalk import games
from markovtalk.game import mu_zero, payoff_U
from markovtalk.rational import fmt

# two i.i.d. states: listen in odd stages, play the other action in even ones
g = games.sec3_game()
mach = B.sec3_alternation(g)
for d in (F(6, 10), F(2, 3), F(7, 10), F(9, 10)):
    pay = B.discounted_payoff(g, mach, B.TruthfulPolicy(), d)
    chk = B.sender_deviation_check(g, mach, d)
    print(f"delta={fmt(d):6s} payoff ({fmt(pay.v1)}, {fmt(pay.v2)})  profitable lie: {chk.profitable} (gain {fmt(chk.gain)})")

# the illustration game with a strict mixture of the matching strategy
g = games.illustration_4_3()
y = B.strict_mixture(g, games.y2_4_3(), F(1, 10))
print("\ntarget payoff U(mu0, y) =", tuple(fmt(x) for x in payoff_U(mu_zero(g.m), y, g)))
print(" N  delta   |mu_hat - mu0|   sender      receiver")
for row in B.lemma3_convergence_sweep(g, y, [6, 12, 24], [F(9, 10), F(99, 100)]):
    print(f"{row.N:2d}  {float(row.delta):.2f}    {float(row.distance):.4f}        {float(row.sender_value):.4f}      {float(row.receiver_value):.4f}")

# receiver incentives: a negative gap certifies every reachable cell
for N, d in ((12, F(99, 100)), (12, F(999, 1000))):
    rep = B.equilibrium_gap_report(g, y, N, d)
    print(f"\nN={N} delta={float(d)}: receiver gap {float(rep.receiver_gap):+.4f}, certified {rep.certified}")

# exact aggregation against simulation
mach = B.BlockAutomaton.for_game(g, y, 6)
pol = B.best_reply_sender(g, mach, F(9, 10))
exact = B.discounted_payoff(g, mach, pol, F(9, 10))
mc = B.monte_carlo_payoff(g, mach, pol, F(9, 10), horizon=300, replications=10_000, seed=0)
print(f"\nexact sender payoff {float(exact.v1):.5f}, simulated {mc.mean[0]:.5f} +- {mc.stderr[0]:.5f}")
