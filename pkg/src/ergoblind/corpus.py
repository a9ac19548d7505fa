"""Seeded random instances for property tests and experiment scripts."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ergodicity import verify_ergodic
from .game import BlindGame
from .numeric import Budget
from .pfa import PFA


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def grid_row(rng: np.random.Generator, k: int, grid: int = 4) -> tuple:
    """Distribution over k states with entries in {0, 1/grid, ..., 1}."""
    counts = rng.multinomial(grid, [1.0 / k] * k)
    return tuple(Fraction(int(c), grid) for c in counts)


def grid_matrix(rng: np.random.Generator, k: int, grid: int = 4) -> tuple:
    return tuple(grid_row(rng, k, grid) for _ in range(k))


def float_matrix(rng: np.random.Generator, k: int, sparsity: float = 0.0) -> np.ndarray:
    m = rng.dirichlet(np.ones(k), size=k)
    if sparsity:
        mask = rng.random((k, k)) < sparsity
        mask[np.arange(k), rng.integers(k, size=k)] = False
        m = np.where(mask, 0.0, m)
        m /= m.sum(axis=1, keepdims=True)
    return m


def random_game(
    rng: np.random.Generator, k: int, n1: int, n2: int = 1, grid: int = 4
) -> BlindGame:
    pairs = n1 * n2
    mats = tuple(grid_matrix(rng, k, grid) for _ in range(pairs))
    rews = tuple(tuple(Fraction(int(x), grid) for x in rng.integers(0, grid + 1, size=k)) for _ in range(pairs))
    return BlindGame(
        tuple(f"k{s}" for s in range(k)),
        tuple(f"i{s}" for s in range(n1)),
        tuple(f"j{s}" for s in range(n2)) if n2 > 1 else ("*",),
        mats,
        rews,
    )


def random_ergodic_game(rng, k: int, n1: int, n2: int = 1, grid: int = 4, max_tries: int = 10_000):
    """Rejection-sample a random grid game until it verifies ergodic."""
    for _ in range(max_tries):
        g = random_game(rng, k, n1, n2, grid)
        cert = verify_ergodic(g, Budget(max_products=10_000))
        if cert.ergodic:
            return g, cert
    raise RuntimeError("no ergodic game found")


def random_belief(rng: np.random.Generator, k: int, grid: int = 4) -> tuple:
    return grid_row(rng, k, grid)


def random_pfa(rng: np.random.Generator, k: int, n_symbols: int, grid: int = 4, max_tries: int = 10_000) -> PFA:
    """Random grid PFA whose accepting states are all nonabsorbing (possibly none)."""
    for _ in range(max_tries):
        mats = tuple(grid_matrix(rng, k, grid) for _ in range(n_symbols))
        accepting = frozenset(int(s) for s in np.nonzero(rng.random(k) < 0.5)[0])
        if any(all(m[b][b] == 1 for m in mats) for b in accepting):
            continue
        return PFA(
            tuple(f"q{s}" for s in range(k)),
            tuple("abcdefgh"[s] for s in range(n_symbols)),
            mats,
            accepting,
            int(rng.integers(k)),
        )
    raise RuntimeError("no valid PFA found")


@dataclass
class Corpus:
    """Accepted (game, certificate, belief) triples plus how many draws were rejected."""

    items: list
    rejected: int = 0
    reasons: dict = field(default_factory=dict)


def ergodic_corpus(
    seed: int,
    size: int,
    max_states: int = 3,
    max_pairs: int = 2,
    concurrent: bool = False,
    accept=None,
) -> Corpus:
    """Random ergodic grid games; ``accept(game, cert)`` may veto a draw with a reason string."""
    rng = rng_for(seed)
    out = Corpus([])
    while len(out.items) < size:
        k = int(rng.integers(1 if not concurrent else 2, max_states + 1))
        if concurrent:
            n1 = n2 = 2
        else:
            n1, n2 = int(rng.integers(1, max_pairs + 1)), 1
        game = random_game(rng, k, n1, n2)
        cert = verify_ergodic(game, Budget(max_products=10_000))
        reason = None if cert.ergodic else "not ergodic"
        if reason is None and accept is not None:
            reason = accept(game, cert)
        if reason is not None:
            out.rejected += 1
            out.reasons[reason] = out.reasons.get(reason, 0) + 1
            continue
        out.items.append((game, cert, random_belief(rng, k)))
    return out
