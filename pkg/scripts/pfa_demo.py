"""Reduce a PFA to a blind MDP and compare block payoffs with acceptance probabilities."""

import argparse
import itertools
from fractions import Fraction

from ergoblind.examples import load_pfa
from ergoblind.ergodicity import verify_ergodic
from ergoblind.io import parse_pfa
from ergoblind.oracles import monte_carlo_block_payoff
from ergoblind.pfa import acceptance_probability, cyclic_block_payoff, exists_word_above_half, reduce_to_blind_mdp


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("pfa", nargs="?", help="PFA JSON file (default: bundled coin automaton)")
    ap.add_argument("--theta", default="1/2")
    ap.add_argument("--max-len", type=int, default=3)
    ap.add_argument("--blocks", type=int, default=100_000)
    args = ap.parse_args()
    pfa = parse_pfa(args.pfa) if args.pfa else load_pfa("coin_pfa")
    theta = Fraction(args.theta)

    game = reduce_to_blind_mdp(pfa, theta)
    cert = verify_ergodic(game)
    print(f"reduced game: {game.num_states} states, verdict={cert.verdict}, n0={cert.n0}")
    print("word      accept    block payoff")
    for n in range(1, args.max_len + 1):
        for w in itertools.product(pfa.symbols, repeat=n):
            acc, pay = acceptance_probability(pfa, w), cyclic_block_payoff(pfa, theta, w)
            mark = "*" if pay > Fraction(1, 2) else " "
            print(f"{''.join(w):9s} {float(acc):.4f}    {float(pay):.4f} {mark}")
    word = exists_word_above_half(pfa, args.max_len)
    if word is None:
        print("no word accepted above 1/2")
        return
    mean, se = monte_carlo_block_payoff(pfa, theta, word, args.blocks, seed=0)
    exact = cyclic_block_payoff(pfa, theta, word)
    print(f"witness {''.join(word)}: exact {exact} ~ {float(exact):.6f}, simulated {mean:.6f} +- {se:.6f}")


if __name__ == "__main__":
    main()
