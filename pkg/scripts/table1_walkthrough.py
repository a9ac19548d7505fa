"""Walk through the machine-maintenance game: tau values, certificate, n_eps and value."""

import argparse
from fractions import Fraction

from ergoblind.abstraction import build_abstract_game
from ergoblind.ergodicity import n_epsilon, verify_ergodic
from ergoblind.examples import load_game
from ergoblind.game import uniform_belief
from ergoblind.matrix import classify, tau1
from ergoblind.errors import BudgetExceededError
from ergoblind.numeric import Budget
from ergoblind.solver import SolverParams, approximate_uniform_value


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="19/20", help="accuracy, as a fraction or decimal")
    ap.add_argument("--max-states", type=int, default=20_000, help="abstract state budget")
    args = ap.parse_args()
    eps = Fraction(args.eps)

    game = load_game("machine_maintenance")
    for a, m in enumerate(game.transitions):
        c = classify(m)
        print(f"{game.pair_name(a):10s} tau1={tau1(m)}  markov={c.is_markov}  scrambling={c.is_scrambling}")

    cert = verify_ergodic(game)
    print(f"verdict={cert.verdict} n0={cert.n0} tau_bar={cert.tau_bar}")
    for e in (Fraction(1, 10), Fraction(1, 2), eps):
        print(f"n_eps({e}) = {n_epsilon(game, cert, e)}")

    b1 = uniform_belief(3)
    budget = Budget(max_states=args.max_states)
    try:
        g = build_abstract_game(game, b1, eps, cert, budget)
    except BudgetExceededError as e:
        print(f"abstract game at eps={eps} exceeds the state budget: {e}")
        return
    print(f"abstract game at eps={eps}: {g.num_states} states, {g.num_beliefs} beliefs")
    rep = approximate_uniform_value(game, b1, eps, SolverParams(budget=Budget(max_states=args.max_states)))
    print(f"root value {rep.root_value} (~{float(rep.root_value):.6f}) via {rep.method}")


if __name__ == "__main__":
    main()
