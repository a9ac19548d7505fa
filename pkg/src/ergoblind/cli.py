"""Command-line interface.

Exit codes: 0 success or property holds, 1 property fails (e.g. not
ergodic), 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .abstraction import build_abstract_game
from .errors import BudgetExceededError, ErgoError, NotErgodicError
from .ergodicity import n_epsilon, verify_ergodic
from .game import make_belief
from .io import dump_game, game_to_dict, parse_game, parse_pfa
from .matrix import classify, tau1
from .numeric import EXACT, MODES, Budget, to_number
from .oracles import CyclicSequence, UniformRandom, coupling_profile, payoff_gap_check, simulate
from .pfa import acceptance_probability, exists_word_above_half, reduce_to_blind_mdp
from .solver import SolverParams, approximate_uniform_value

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class Failed(Exception):
    """The command ran but the checked property does not hold."""

    def __init__(self, outputs: dict):
        self.outputs = outputs


def _num_out(x):
    return None if x is None else float(x)


def _exact_out(x):
    return str(x) if isinstance(x, Fraction) else None


def _budget(args) -> Budget:
    return Budget(
        max_patterns=args.max_patterns,
        max_products=args.max_products,
        max_states=args.max_states,
        max_seconds=args.max_seconds,
    )


def _belief(args, game):
    if args.belief:
        return make_belief(args.belief.split(","), game.mode, game.num_states)
    return game.default_belief()


def _eps(args):
    return to_number(args.eps, args.mode)


def _certificate_dict(cert, game) -> dict:
    return {
        "verdict": cert.verdict,
        "n0": cert.n0,
        "tau_bar": _num_out(cert.tau_bar),
        "tau_bar_exact": _exact_out(cert.tau_bar),
        "paz_bound": cert.paz_bound,
        "counterexample": None
        if cert.counterexample is None
        else [game.pair_name(a) for a in cert.counterexample],
    }


def cmd_validate(args, timings):
    game = parse_game(args.game, args.mode)
    return {
        "valid": True,
        "states": game.num_states,
        "actions1": len(game.actions1),
        "actions2": len(game.actions2),
    }


def cmd_classify(args, timings):
    game = parse_game(args.game, args.mode)
    out = []
    for a, m in enumerate(game.transitions):
        report = classify(m).as_dict()
        report["pair"] = game.pair_name(a)
        report["tau1"] = float(tau1(m))
        out.append(report)
    return {"matrices": out}


def cmd_check_ergodic(args, timings):
    game = parse_game(args.game, args.mode)
    t0 = time.perf_counter()
    cert = verify_ergodic(game, _budget(args), threads=args.threads)
    timings["verify_ergodic"] = (time.perf_counter() - t0) * 1e3
    out = _certificate_dict(cert, game)
    if not cert.ergodic:
        raise Failed(out)
    return out


def cmd_n_eps(args, timings):
    game = parse_game(args.game, args.mode)
    cert = verify_ergodic(game, _budget(args), threads=args.threads)
    if not cert.ergodic:
        raise Failed(_certificate_dict(cert, game))
    return {
        "n0": cert.n0,
        "tau_bar": _num_out(cert.tau_bar),
        "eps": float(_eps(args)),
        "n_eps": n_epsilon(game, cert, _eps(args)),
    }


def _not_ergodic(exc: NotErgodicError, game):
    return Failed(_certificate_dict(exc.certificate, game) if exc.certificate else {"verdict": "NotErgodic"})


def cmd_build_abstract(args, timings):
    game = parse_game(args.game, args.mode)
    t0 = time.perf_counter()
    try:
        g = build_abstract_game(game, _belief(args, game), _eps(args), budget=_budget(args))
    except NotErgodicError as exc:
        raise _not_ergodic(exc, game) from exc
    timings["build_abstract_game"] = (time.perf_counter() - t0) * 1e3
    states = [
        {"id": s, "base": [str(x) if isinstance(x, Fraction) else x for x in x_.base], "prefix": [game.pair_name(a) for a in x_.prefix]}
        for s, x_ in enumerate(g.states)
    ]
    edges = []
    for s in range(g.num_states):
        for a in range(g.num_pairs):
            i, j = game.pair_of(a)
            edges.append(
                {"from": s, "i": game.actions1[i], "j": game.actions2[j], "to": g.next_state[s][a], "reward": float(g.reward[s][a])}
            )
    return {"n_eps": g.n, "num_states": g.num_states, "num_beliefs": g.num_beliefs, "states": states, "edges": edges}


def cmd_solve(args, timings):
    game = parse_game(args.game, args.mode)
    params = SolverParams(tol=args.tol, n_max=args.n_max, budget=_budget(args), threads=args.threads)
    try:
        report = approximate_uniform_value(game, _belief(args, game), _eps(args), params)
    except NotErgodicError as exc:
        raise _not_ergodic(exc, game) from exc
    timings.update(report.timings)
    out = report.as_dict()
    out["paz_bound"] = report.certificate.paz_bound
    return out


def cmd_reduce_pfa(args, timings):
    pfa = parse_pfa(args.pfa, args.mode)
    game = reduce_to_blind_mdp(pfa, to_number(args.theta, args.mode))
    if args.output:
        dump_game(game, args.output)
        return {"written": args.output, "states": game.num_states, "actions1": len(game.actions1)}
    return {"game": game_to_dict(game)}


def cmd_pfa_search(args, timings):
    pfa = parse_pfa(args.pfa, args.mode)
    word = exists_word_above_half(pfa, args.max_len)
    if word is None:
        raise Failed({"word": None, "max_len": args.max_len})
    acc = acceptance_probability(pfa, word)
    return {"word": list(word), "acceptance": float(acc), "acceptance_exact": _exact_out(acc)}


def cmd_oracle_check(args, timings):
    game = parse_game(args.game, args.mode)
    b1 = _belief(args, game)
    eps = _eps(args)
    cert = verify_ergodic(game, _budget(args), threads=args.threads)
    if not cert.ergodic:
        raise Failed(_certificate_dict(cert, game))
    n = n_epsilon(game, cert, eps)
    length = args.length if args.length is not None else 3 * n
    profile, exhaustive = coupling_profile(game, b1, eps, length, args.max_walks, args.seed, cert)
    dev = max(profile)
    gap = payoff_gap_check(game, b1, eps, args.horizon, cert, _budget(args))
    bound = 4 * eps
    out = {
        "eps": float(eps),
        "n_eps": n,
        "bound": float(bound),
        "coupling": {"length": length, "exhaustive": exhaustive, "max_deviation": float(dev), "pass": dev <= bound},
        "payoff_gap": {"horizon": args.horizon, "gap": float(gap), "pass": gap <= bound},
    }
    if not (dev <= bound and gap <= bound):
        raise Failed(out)
    return out


def _strategy(spec: str, names: tuple):
    if spec == "uniform":
        return UniformRandom()
    if spec.startswith("cycle:"):
        acts = []
        for name in spec[len("cycle:"):].split(","):
            if name not in names:
                raise argparse.ArgumentTypeError(f"unknown action {name!r} in strategy {spec!r}")
            acts.append(names.index(name))
        return CyclicSequence(tuple(acts))
    raise argparse.ArgumentTypeError(f"strategy must be 'uniform' or 'cycle:a,b,...', got {spec!r}")


def cmd_simulate(args, timings):
    game = parse_game(args.game, args.mode)
    s1 = _strategy(args.strategy1, game.actions1)
    s2 = _strategy(args.strategy2, game.actions2)
    trace = simulate(game, _belief(args, game), s1, s2, args.horizon, args.seed)
    return {
        "seed": trace.seed,
        "rng": trace.rng,
        "history": [game.pair_name(a) for a in trace.history],
        "states": [game.states[k] for k in trace.states],
        "rewards": [float(r) for r in trace.rewards],
        "mean_reward": float(sum(trace.rewards) / len(trace.rewards)) if trace.rewards else None,
        "beliefs": [[float(x) for x in b] for b in trace.beliefs],
    }


COMMANDS = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "check-ergodic": cmd_check_ergodic,
    "n-eps": cmd_n_eps,
    "build-abstract": cmd_build_abstract,
    "solve": cmd_solve,
    "reduce-pfa": cmd_reduce_pfa,
    "pfa-search": cmd_pfa_search,
    "oracle-check": cmd_oracle_check,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, default=EXACT, help="numeric mode (env ERGO_MODE overrides)")
    common.add_argument("--json", action="store_true", help="print the machine-readable run report")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--max-patterns", type=int, default=Budget.max_patterns)
    common.add_argument("--max-products", type=int, default=Budget.max_products)
    common.add_argument("--max-states", type=int, default=Budget.max_states)
    common.add_argument("--max-seconds", type=float, default=None)

    parser = argparse.ArgumentParser(prog="ergoblind", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def game_cmd(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("game", help="game JSON file")
        return p

    game_cmd("validate", "validate a game file")
    game_cmd("classify", "classify every transition matrix")
    game_cmd("check-ergodic", "decide ergodicity and print the certificate")
    p = game_cmd("n-eps", "block length for a target eps")
    p.add_argument("--eps", required=True)
    p = game_cmd("build-abstract", "emit the abstract game graph")
    p.add_argument("--eps", required=True)
    p.add_argument("--belief", help="comma-separated initial belief")
    p = game_cmd("solve", "approximate the uniform value")
    p.add_argument("--eps", required=True)
    p.add_argument("--belief")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--n-max", type=int, default=2**20)
    p = game_cmd("oracle-check", "check the coupling and payoff-gap bounds")
    p.add_argument("--eps", required=True)
    p.add_argument("--belief")
    p.add_argument("--length", type=int, default=None, help="walk length (default 3 * n_eps)")
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--max-walks", type=int, default=1 << 16)
    p.add_argument("--seed", type=int, default=0)
    p = game_cmd("simulate", "sample one play")
    p.add_argument("--belief")
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy1", default="uniform", help="'uniform' or 'cycle:a,b,...'")
    p.add_argument("--strategy2", default="uniform")

    p = sub.add_parser("reduce-pfa", parents=[common], help="reduce a PFA to a Markov blind MDP")
    p.add_argument("pfa")
    p.add_argument("--theta", default="1/2")
    p.add_argument("-o", "--output")
    p = sub.add_parser("pfa-search", parents=[common], help="bounded search for a word accepted w.p. > 1/2")
    p.add_argument("pfa")
    p.add_argument("--max-len", type=int, default=6)
    return parser


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _print_human(command: str, outputs: dict, out) -> None:
    if command == "reduce-pfa" and "game" in outputs:
        print(json.dumps(outputs["game"], indent=2), file=out)
        return
    for key, value in outputs.items():
        if isinstance(value, (list, dict)):
            value = json.dumps(value, default=_jsonable)
        print(f"{key}: {value}", file=out)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    env_mode = os.environ.get("ERGO_MODE")
    if env_mode:
        if env_mode not in MODES:
            print(f"error: ERGO_MODE must be one of {MODES}", file=sys.stderr)
            return EXIT_INPUT
        args.mode = env_mode
    inputs = {k: v for k, v in vars(args).items() if k not in ("json", "command")}
    timings: dict = {}
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        outputs = COMMANDS[args.command](args, timings)
    except Failed as f:
        outputs, code = f.outputs, EXIT_FAIL
    except BudgetExceededError as exc:
        outputs, code = {"error": "BudgetExceededError", "message": str(exc)}, EXIT_BUDGET
    except (ErgoError, ValueError, argparse.ArgumentTypeError, ZeroDivisionError) as exc:
        outputs, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_INPUT
    timings["total"] = (time.perf_counter() - t0) * 1e3
    if args.json:
        report = {"command": args.command, "inputs": inputs, "outputs": outputs, "timings": timings, "mode": args.mode}
        print(json.dumps(report, indent=2, default=_jsonable), file=out)
    else:
        _print_human(args.command, outputs, out)
    if code == EXIT_INPUT:
        print(f"error: {outputs['message']}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
