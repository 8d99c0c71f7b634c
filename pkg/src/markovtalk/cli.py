"""Command-line front end.

Exit codes: 0 ok, 1 example mismatch, 2 unreadable game file, 3 invalid
chain, 4 failed precondition, 5 invalid copula.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import block, chain, coupling, equilibrium, games
from .copula import CopulaError, is_copula, sample_copula, swap_copula
from .game import GameError, babbling_value, check_C1, identity_value, mu_zero, payoff_U
from .io import GameFileError, ReportBundle, csv_text, encode, float_cell, load_bundled, load_game
from .rational import fmt, matrix

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_CHAIN, EXIT_PRECONDITION, EXIT_COPULA = range(6)

class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path) -> "games.GameSpec":
    try:
        return load_game(path)
    except FileNotFoundError as exc:
        raise CliError(EXIT_PARSE, f"no such file: {path}") from exc
    except (GameFileError, GameError) as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    except chain.ChainError as exc:
        raise CliError(EXIT_CHAIN, str(exc)) from exc


def analyze(game) -> dict:
    a = chain.check_assumption_A(game.p)
    poly = equilibrium.compute_E_polygon(game)
    eh = equilibrium.E_hat_nonempty(game)
    cb = equilibrium.check_condition_B(game)
    return {
        "label": game.label,
        "m": game.m,
        "v2": babbling_value(game),
        "assumption_A": {"holds": a.holds, "alpha": a.alpha, "violation": a.violation},
        "E_polygon": poly.vertices,
        "E_witnesses": poly.witnesses,
        "feasible_polygon": equilibrium.feasible_polygon(game).vertices,
        "E_hat": {"nonempty": eh.nonempty, "slack": eh.slack, "witness": eh.witness},
        "condition_B": {"holds": cb.holds, "witness": cb.witness},
    }


def cmd_analyze(args) -> int:
    game = _load(args.file)
    print(ReportBundle.build(analyze=analyze(game)).to_json())
    return EXIT_OK


SIM_HEADER = [
    "N", "delta", "distance_L1", "sender_value", "receiver_value", "receiver_gap", "seed",
    "mc_sender_value", "mc_receiver_value", "mc_stderr_sender", "mc_stderr_receiver",
]


def simulate_row(game, N: int, delta: Fraction, seed: int, replications: int, force: bool = False, eps=Fraction(1, 10)):
    eh = equilibrium.E_hat_nonempty(game)
    if not eh and not force:
        raise CliError(EXIT_PRECONDITION, "the strict equilibrium set is empty; rerun with --force")
    y = eh.witness
    machine = block.BlockAutomaton.for_game(game, y, N)
    pol = block.best_reply_sender(game, machine, delta)
    jd = block.exact_joint_distribution(game, machine, pol)
    gap = block.equilibrium_gap_report(game, y, N, delta, policy=pol)
    dist = sum((abs(a - b) for ra, rb in zip(jd.mu_hat, mu_zero(game.m)) for a, b in zip(ra, rb)), Fraction(0))
    row = [N, fmt(delta), fmt(dist), fmt(gap.sender_value), fmt(gap.receiver_value), float_cell(gap.receiver_gap), seed]
    if replications > 0:
        horizon = min(20_000, max(machine.N, math.ceil(math.log(1e-6) / math.log(float(delta)))))
        mc = block.monte_carlo_payoff(game, machine, pol, delta, horizon, replications, seed)
        row += [float_cell(mc.mean[0]), float_cell(mc.mean[1]), float_cell(mc.stderr[0]), float_cell(mc.stderr[1])]
    else:
        row += ["", "", "", ""]
    return row


def cmd_simulate(args) -> int:
    game = _load(args.file)
    try:
        delta = Fraction(args.delta)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad discount factor {args.delta!r}") from exc
    if not 0 < delta < 1 or args.N < 1 or args.replications < 0:
        raise CliError(EXIT_PRECONDITION, "need 0 < delta < 1, N >= 1 and replications >= 0")
    row = simulate_row(game, args.N, delta, args.seed, args.replications, args.force)
    sys.stdout.write(csv_text(SIM_HEADER, [row]))
    return EXIT_OK


def _copula_arg(game, spec: str, seed: int):
    n = game.n_states
    if spec == "swap":
        if game.m[0] != game.m[1]:
            raise CliError(EXIT_COPULA, "swap copula needs m(0) == m(1)")
        return swap_copula(game.m, 0, 1)
    if spec == "truthful":
        return mu_zero(game.m)
    if spec == "random":
        if n > 5:
            raise CliError(EXIT_COPULA, "random copulas are sampled from vertices, capped at 5 states")
        return sample_copula(game.m, seed)
    if spec == "search":
        return coupling.max_property_P_violation(game.p, game.m).copula
    try:
        mu = matrix(json.loads(Path(spec).read_text()))
    except (OSError, ValueError, TypeError) as exc:
        raise CliError(EXIT_COPULA, f"cannot read copula {spec!r}: {exc}") from exc
    if not is_copula(mu, game.m):
        raise CliError(EXIT_COPULA, "matrix is not a copula for the chain's invariant measure")
    return mu


def coupling_report(game, mu, horizon: int, seed: int, delta=Fraction(95, 100), T: int = 400, replications: int = 2000) -> dict:
    pp = coupling.check_property_P(mu, game.p, game.m)
    out = {
        "copula": mu,
        "property_P": {"holds": pp.holds, "worst_violation": pp.worst_violation, "worst_pair": pp.worst_pair},
    }
    if pp.holds:
        kernel = coupling.build_kernel(mu, game.p, game.m)
        out["kernel_claims"] = dict(zip(("claim1", "claim2", "claim3", "claim4"), kernel.claims()))
    else:
        kernel = coupling.raw_kernel(mu, game.p, game.m)
        out["kernel_claims"] = None
    law = coupling.exact_law_check(kernel, horizon)
    out["law_check"] = law.results
    if pp.holds:
        y = equilibrium.E_hat_nonempty(game).witness
        pi = coupling.payoff_identity_check(game, y, mu, delta, T, seed, replications)
        out["payoff_identity"] = {
            "receiver_strategy": y,
            "analytic": pi.analytic,
            "simulated": pi.simulated,
            "gap": pi.gap,
            "bound": pi.bound,
            "within": pi.within,
        }
    return out


def cmd_coupling(args) -> int:
    game = _load(args.file)
    if not 1 <= args.horizon <= coupling.MAX_EXACT_HORIZON:
        raise CliError(EXIT_PRECONDITION, f"--horizon must be between 1 and {coupling.MAX_EXACT_HORIZON}")
    mu = _copula_arg(game, args.copula, args.seed)
    print(ReportBundle.build(coupling=coupling_report(game, mu, args.horizon, args.seed)).to_json())
    return EXIT_OK


# --- bundled examples -----------------------------------------------------------------


def _check(results, game, name, expected, got):
    results.append({"game": game, "check": name, "ok": expected == got, "expected": encode(expected), "got": encode(got)})


def run_examples(directory=None) -> list[dict]:
    """Recompute the published values for each bundled game and compare exactly."""

    def load(name):
        if directory is None:
            return load_bundled(name)
        return load_game(Path(directory) / f"{name}.json")

    F = Fraction
    res: list[dict] = []

    g = load("illustration_4_3")
    _check(res, "illustration_4_3", "E polygon", {(F(1, 3), F(1, 3)), (F(2, 3), F(2, 3)), (F(1), F(1, 3))}, set(equilibrium.compute_E_polygon(g).vertices))
    _check(res, "illustration_4_3", "v2", F(1, 3), babbling_value(g))
    feas = {(F(0), F(0)), (F(0), F(2, 3)), (F(1, 3), F(1)), (F(2, 3), F(0)), (F(1), F(1, 3))}
    _check(res, "illustration_4_3", "feasible vertices", feas, set(equilibrium.feasible_polygon(g).vertices))

    g = load("example5")
    _check(res, "example5", "E polygon", [(F(1), F(1))], list(equilibrium.compute_E_polygon(g).vertices))
    _check(res, "example5", "E_hat nonempty", False, equilibrium.E_hat_nonempty(g).nonempty)
    _check(res, "example5", "condition B", False, equilibrium.check_condition_B(g).holds)

    g = load("example6")
    _check(res, "example6", "(3/4,1) in E", True, equilibrium.compute_E_polygon(g).contains((F(3, 4), F(1))))
    _check(res, "example6", "v2", F(1), babbling_value(g))
    _check(res, "example6", "E_hat nonempty", False, equilibrium.E_hat_nonempty(g).nonempty)

    g = load("device_6_2")
    _check(res, "device_6_2", "v2", F(1), babbling_value(g))
    _check(res, "device_6_2", "U(mu0,y*)", (F(2), F(7, 6)), tuple(payoff_U(mu_zero(g.m), games.y_star_6_2(), g)))
    _check(res, "device_6_2", "(2,7/6) in E", True, equilibrium.compute_E_polygon(g).contains((F(2), F(7, 6))))
    _check(res, "device_6_2", "E_hat nonempty", True, equilibrium.E_hat_nonempty(g).nonempty)
    _check(res, "device_6_2", "max U2", F(7, 6), equilibrium.max_receiver_payoff(g)[0])

    g = load("example7")
    c = g.u1[0][1]
    a = chain.check_assumption_A(g.p)
    _check(res, "example7", "assumption A", False, a.holds)
    y = games.match_strategy(g.n_states)
    c1 = check_C1(y, g)
    _check(res, "example7", "match strategy C1", False, c1.holds)
    _check(res, "example7", "identity value", F(5), identity_value(y, g))
    _check(res, "example7", "best assignment value", 2 * c + 3, c1.worst_value)
    _check(res, "example7", "property P violated", True, coupling.max_property_P_violation(g.p, g.m).violation > 0)

    g = load("sec3_example")
    c = g.u1[0][0]
    mach = block.sec3_alternation(g)
    for d in (F(6, 10), F(7, 10), F(9, 10)):
        closed = (((2 + c) / 2 + d * (5 + c) / 4) / (1 + d), (F(3, 2) + F(3, 4) * d) / (1 + d))
        _check(res, "sec3_example", f"alternation payoff delta={d}", closed, tuple(block.discounted_payoff(g, mach, block.TruthfulPolicy(), d)))
    _check(res, "sec3_example", "deviation at delta=3/5", True, block.sender_deviation_check(g, mach, F(6, 10)).profitable)
    _check(res, "sec3_example", "deviation at delta=7/10", False, block.sender_deviation_check(g, mach, F(7, 10)).profitable)
    return res


def cmd_examples(args) -> int:
    try:
        results = run_examples(args.dir)
    except (GameFileError, GameError, FileNotFoundError) as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    except chain.ChainError as exc:
        raise CliError(EXIT_CHAIN, str(exc)) from exc
    failed = [r for r in results if not r["ok"]]
    if args.json:
        print(ReportBundle.build(examples=results, passed=not failed).to_json())
    else:
        for r in results:
            print(f"{'PASS' if r['ok'] else 'FAIL'}  {r['game']}: {r['check']}")
        for r in failed:
            print(f"  {r['game']} / {r['check']}: expected {r['expected']}, got {r['got']}", file=sys.stderr)
    return EXIT_MISMATCH if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="markovtalk", description="Dynamic sender-receiver games with Markov states.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="invariant measure, babbling value, E(M) polygon and genericity tests")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="block equilibrium at one (N, delta), as a CSV row")
    p.add_argument("file")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--delta", required=True, help='e.g. 0.99 or "99/100"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=int, default=0)
    p.add_argument("--force", action="store_true", help="run even when the strict set is empty")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("coupling", help="fictitious-state coupling report for a copula")
    p.add_argument("file")
    p.add_argument("--copula", default="swap", help="swap, truthful, random, search, or a JSON matrix file")
    p.add_argument("--horizon", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("examples", help="recompute the published values of the bundled games")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dir", default=None, help="read the game files from this directory instead")
    p.set_defaults(func=cmd_examples)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except equilibrium.PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (CopulaError, coupling.CouplingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COPULA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
