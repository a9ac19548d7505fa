"""Sweep random ergodic games and report the worst belief-coupling distance against 4 eps."""

import argparse
from fractions import Fraction

from ergoblind.corpus import ergodic_corpus
from ergoblind.ergodicity import n_epsilon
from ergoblind.oracles import coupling_profile_vectorized


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--games", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", nargs="+", default=["1/10", "3/10", "1/2"])
    ap.add_argument("--max-walks", type=int, default=1 << 22)
    args = ap.parse_args()
    epsilons = [Fraction(e) for e in args.eps]

    def small_enough(game, cert):
        n = n_epsilon(game, cert, min(epsilons))
        return None if game.num_pairs ** (3 * n) <= args.max_walks else "walk tree too large"

    corpus = ergodic_corpus(seed=args.seed, size=args.games, accept=small_enough)
    print(f"{len(corpus.items)} games, rejected {corpus.reasons}")
    print("eps    n_eps  worst/eps  max dist")
    for eps in epsilons:
        worst, n_max = 0.0, 0
        for game, cert, b1 in corpus.items:
            n = n_epsilon(game, cert, eps)
            n_max = max(n_max, n)
            worst = max(worst, max(coupling_profile_vectorized(game, b1, n, 3 * n)))
        print(f"{float(eps):<6} {n_max:<6} {worst / float(eps):<10.4f} {worst:.3e}")


if __name__ == "__main__":
    main()
