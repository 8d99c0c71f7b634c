"""Exact tools for dynamic sender-receiver games driven by a Markov chain.

The state follows an ergodic chain, the sender reports it, the receiver acts.
Everything that can be exact uses ``fractions.Fraction``; only the Monte Carlo
helpers use floats.
"""

from .block import (
    BlockAutomaton,
    best_reply_sender,
    discounted_payoff,
    equilibrium_gap_report,
    exact_joint_distribution,
    lemma3_convergence_sweep,
    monte_carlo_payoff,
    sender_deviation_check,
)
from .chain import ChainError, check_assumption_A, check_ergodic, invariant_measure, quota_distribution
from .copula import CopulaError, birkhoff_decompose, extreme_points, is_copula
from .coupling import CouplingError, build_kernel, check_property_P, exact_law_check, payoff_identity_check
from .equilibrium import (
    PreconditionError,
    E_hat_nonempty,
    check_condition_B,
    compute_E_polygon,
    feasible_polygon,
    theorem3_pipeline,
)
from .game import GameError, GameSpec, babbling_value, check_C1, check_C2, mu_zero, payoff_U
from .io import load_bundled, load_game

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
