"""Deciding ergodicity of a blind game and sizing the block length n_eps.

A game is ergodic iff every forward product of some length n0 (at most the
Paz bound) is scrambling, i.e. has tau1 < 1. Scrambling is a property of the
sign pattern alone, so the search runs over deduplicated boolean patterns.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceededError, DomainError, NotErgodicError
from .game import BlindGame
from .matrix import is_scrambling_pattern, pattern_of, pattern_product, tau1
from .numeric import Budget, Number, matmul

ERGODIC = "Ergodic"
NOT_ERGODIC = "NotErgodic"

MAX_PAZ_STATES = 4096


def paz_bound(k: int) -> int:
    """(3^k - 2^(k+1) + 1) / 2, the largest block length needed to certify ergodicity."""
    if k < 1:
        raise DomainError(f"number of states must be >= 1, got {k}")
    if k > MAX_PAZ_STATES:
        raise OverflowError(f"Paz bound for {k} states is beyond any feasible search")
    return (3**k - 2 ** (k + 1) + 1) // 2


def search_bound(k: int) -> int:
    # the formula gives 0 for a single state, where length-1 products already qualify
    return max(1, paz_bound(k))


@dataclass(frozen=True)
class ErgodicityCertificate:
    verdict: str
    paz_bound: int
    n0: int | None = None
    tau_bar: Number | None = None
    counterexample: tuple | None = None
    layer_sizes: tuple = field(default=(), compare=False)

    @property
    def ergodic(self) -> bool:
        return self.verdict == ERGODIC


class _Clock:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.start = time.monotonic()

    def check(self, what: str):
        limit = self.budget.max_seconds
        if limit is not None and time.monotonic() - self.start > limit:
            raise BudgetExceededError(f"{what}: time budget of {limit}s exhausted")


def pattern_layers(game: BlindGame, depth: int, budget: Budget | None = None):
    """Yield ``(n, layer)`` for n = 1..depth, where ``layer`` maps each distinct
    pattern of a length-n product to a back-pointer ``(parent_pattern, action)``."""
    budget = budget or Budget()
    clock = _Clock(budget)
    letters = [pattern_of(m) for m in game.transitions]
    layer = {}
    for a, p in enumerate(letters):
        layer.setdefault(p, (None, a))
    stored = len(layer)
    yield 1, layer
    for n in range(2, depth + 1):
        nxt = {}
        for p in layer:
            for a, q in enumerate(letters):
                r = pattern_product(p, q)
                if r not in nxt:
                    nxt[r] = (p, a)
            clock.check("pattern search")
        stored += len(nxt)
        if stored > budget.max_patterns:
            raise BudgetExceededError(
                f"pattern search stored {stored} patterns, over the budget of {budget.max_patterns}"
            )
        layer = nxt
        yield n, layer


def verify_ergodic(
    game: BlindGame,
    budget: Budget | None = None,
    with_tau_bar: bool = True,
    threads: int = 1,
) -> ErgodicityCertificate:
    bound = paz_bound(game.num_states)
    depth = search_bound(game.num_states)
    layers = []
    sizes = []
    for n, layer in pattern_layers(game, depth, budget):
        layers.append(layer)
        sizes.append(len(layer))
        if all(is_scrambling_pattern(p) for p in layer):
            tb = tau_bar(game, n, budget, threads) if with_tau_bar else None
            return ErgodicityCertificate(ERGODIC, bound, n0=n, tau_bar=tb, layer_sizes=tuple(sizes))
    witness = next(p for p in layers[-1] if not is_scrambling_pattern(p))
    seq = []
    for layer in reversed(layers):
        parent, a = layer[witness]
        seq.append(a)
        witness = parent
    return ErgodicityCertificate(
        NOT_ERGODIC, bound, counterexample=tuple(reversed(seq)), layer_sizes=tuple(sizes)
    )


def _max_tau_from(game: BlindGame, prefix_matrix, remaining: int) -> Number:
    best = None
    stack = [(prefix_matrix, remaining)]
    while stack:
        m, r = stack.pop()
        if r == 0:
            t = tau1(m)
            if best is None or t > best:
                best = t
            continue
        for p in game.transitions:
            stack.append((matmul(m, p), r - 1))
    return best


def tau_bar(game: BlindGame, n0: int, budget: Budget | None = None, threads: int = 1) -> Number:
    """Exact maximum of tau1 over all products of length ``n0``.

    With ``threads > 1`` the first letter is fanned out over worker processes;
    the max-reduction makes the result independent of the worker count.
    """
    if n0 < 1:
        raise DomainError(f"block length must be >= 1, got {n0}")
    budget = budget or Budget()
    count = game.num_pairs**n0
    if count > budget.max_products:
        raise BudgetExceededError(
            f"{count} products of length {n0} exceed the budget of {budget.max_products}"
        )
    firsts = list(game.transitions)
    if threads > 1 and count >= 4096:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_max_tau_from, [game] * len(firsts), firsts, [n0 - 1] * len(firsts)))
    else:
        parts = [_max_tau_from(game, m, n0 - 1) for m in firsts]
    return max(parts)


def _smallest_power_count(tb: Number, eps: Number) -> int:
    """Smallest r >= 1 with tb**r <= eps, i.e. ceil(ln eps / ln tb) clamped to 1."""
    r = max(1, math.ceil(math.log(eps) / math.log(tb)))
    # repair float rounding of the logarithm ratio with an exact comparison
    while r > 1 and tb ** (r - 1) <= eps:
        r -= 1
    while tb**r > eps:
        r += 1
    return r


def n_epsilon(game: BlindGame, cert: ErgodicityCertificate, eps: Number) -> int:
    """Block length after which every product has tau1 <= eps: n0 * ceil(ln eps / ln tau_bar)."""
    if not cert.ergodic:
        raise NotErgodicError("n_eps is only defined for ergodic games", cert)
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    tb = cert.tau_bar if cert.tau_bar is not None else tau_bar(game, cert.n0)
    if tb == 0:
        return cert.n0
    if isinstance(tb, Fraction) and not isinstance(eps, Fraction):
        eps = Fraction(repr(float(eps)))
    return cert.n0 * _smallest_power_count(tb, eps)
