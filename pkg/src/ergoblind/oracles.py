"""Brute-force and Monte-Carlo baselines for the abstraction and the reduction."""

from __future__ import annotations

import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .abstraction import (
    AbstractGame,
    AbstractState,
    StableMatrixFamily,
    abstract_update,
    build_abstract_game,
    make_family,
    proj,
)
from .errors import BudgetExceededError, DomainError
from .ergodicity import ErgodicityCertificate
from .game import BlindGame, belief_step, check_belief, stage_reward
from .numeric import Budget, Number, l1_distance
from .pfa import PFA, reduce_to_blind_mdp
from .solver import matrix_game_value, shapley_iterate

RNG_NAME = "numpy.PCG64"


def brute_force_value_N(game: BlindGame, b1: Sequence[Number], horizon: int, budget: Budget | None = None) -> Number:
    """N-stage value by backward induction over the full action-history tree.

    Each history is a one-shot matrix game whose entries are the stage reward
    at the current belief plus the continuation value of the extended history.
    """
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    budget = budget or Budget()
    nodes = sum(game.num_pairs**m for m in range(horizon + 1))
    if nodes > budget.max_products:
        raise BudgetExceededError(f"history tree has {nodes} nodes, over the budget")
    n1, n2 = len(game.actions1), len(game.actions2)

    def total(b, remaining):
        if remaining == 0:
            return 0 * b[0]
        q = [stage_reward(game, b, a) + total(belief_step(game, b, a), remaining - 1) for a in range(game.num_pairs)]
        return matrix_game_value([q[i * n2 : (i + 1) * n2] for i in range(n1)], game.mode).value

    return total(tuple(b1), horizon) / horizon


def _scrambling_by_overlap(m) -> bool:
    k = len(m)
    return all(
        any(m[r][c] > 0 and m[t][c] > 0 for c in range(k)) for r in range(k) for t in range(r + 1, k)
    )


def brute_force_ergodic(game: BlindGame, max_len: int) -> int | None:
    """Smallest n <= max_len with every length-n product scrambling, else None.

    Multiplies out all |A|^n products numerically; no sign-pattern reasoning.
    """
    k = game.num_states
    layer = [tuple(tuple(Fraction(int(r == c)) for c in range(k)) for r in range(k))]
    mats = [tuple(tuple(Fraction(x) for x in row) for row in m) for m in game.transitions]
    for n in range(1, max_len + 1):
        layer = [
            tuple(tuple(sum(t[r][l] * m[l][c] for l in range(k)) for c in range(k)) for r in range(k))
            for t in layer
            for m in mats
        ]
        if all(_scrambling_by_overlap(t) for t in layer):
            return n
    return None


def belief_tree_game(game: BlindGame, b1: Sequence[Number], depth: int) -> AbstractGame:
    """The unabstracted belief game unrolled to ``depth`` as a deterministic graph.

    Leaves self-loop, so horizons up to ``depth`` are exact.
    """
    states = [AbstractState(tuple(b1), ())]
    next_state, reward = [], []
    s = 0
    while s < len(states):
        x = states[s]
        reward.append([stage_reward(game, x.base, a) for a in range(game.num_pairs)])
        if len(x.prefix) == depth:
            next_state.append([s] * game.num_pairs)
        else:
            succ = []
            for a in range(game.num_pairs):
                succ.append(len(states))
                states.append(AbstractState(belief_step(game, x.base, a), x.prefix + (a,)))
            next_state.append(succ)
        s += 1
    return AbstractGame(
        states=states,
        num_actions1=len(game.actions1),
        num_actions2=len(game.actions2),
        next_state=next_state,
        reward=reward,
        n=depth,
        eps=0,
        num_beliefs=len(states),
        truncated=True,
        max_depth=depth,
    )


# strategies


@dataclass(frozen=True)
class CyclicSequence:
    actions: tuple

    def __post_init__(self):
        if not self.actions:
            raise DomainError("a cyclic strategy needs at least one action")
        object.__setattr__(self, "actions", tuple(self.actions))

    def choose(self, stage: int, abstract_state, u: float, n_actions: int) -> int:
        return self.actions[stage % len(self.actions)]


@dataclass(frozen=True)
class UniformRandom:
    def choose(self, stage: int, abstract_state, u: float, n_actions: int) -> int:
        return min(int(u * n_actions), n_actions - 1)


@dataclass
class AbstractStationary:
    """Mixed action per abstract state index; play tracks the abstract state."""

    game: AbstractGame
    policy: Mapping[int, Sequence[float]]
    _cum: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for s, p in self.policy.items():
            if any(x < 0 for x in p) or abs(float(sum(p)) - 1.0) > 1e-9:
                raise DomainError(f"policy at state {s} is not a distribution")
            self._cum[s] = list(itertools.accumulate(float(x) for x in p))

    def choose(self, stage: int, abstract_state, u: float, n_actions: int) -> int:
        cum = self._cum[abstract_state]
        return min(bisect_right(cum, u * cum[-1]), n_actions - 1)


@dataclass
class PlayTrace:
    seed: int
    rng: str
    history: tuple
    states: tuple
    rewards: tuple
    beliefs: tuple | None


def simulate(
    game: BlindGame,
    b1: Sequence[Number],
    strat1,
    strat2,
    horizon: int,
    seed: int,
    track_beliefs: bool = True,
) -> PlayTrace:
    """Sample one play; the same seed always reproduces the same trace."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n1, n2 = len(game.actions1), len(game.actions2)
    cum_rows = [[list(itertools.accumulate(float(x) for x in row)) for row in m] for m in game.transitions]
    cum_b1 = list(itertools.accumulate(float(x) for x in b1))
    u = rng.random((horizon + 1, 3))
    tracker = next((s.game for s in (strat1, strat2) if isinstance(s, AbstractStationary)), None)

    def draw(cum, x):
        return min(bisect_right(cum, x * cum[-1]), len(cum) - 1)

    k = draw(cum_b1, u[0, 0])
    b = tuple(b1)
    x = 0
    history, states, rewards = [], [k], []
    beliefs = [b] if track_beliefs else None
    for m in range(horizon):
        i = strat1.choose(m, x, u[m + 1, 0], n1)
        j = strat2.choose(m, x, u[m + 1, 1], n2)
        a = i * n2 + j
        history.append(a)
        rewards.append(game.rewards[a][k])
        k = draw(cum_rows[a][k], u[m + 1, 2])
        states.append(k)
        if track_beliefs:
            b = belief_step(game, b, a)
            beliefs.append(b)
        if tracker is not None:
            x = tracker.next_state[x][a]
    return PlayTrace(seed, RNG_NAME, tuple(history), tuple(states), tuple(rewards), None if beliefs is None else tuple(beliefs))


def monte_carlo_block_payoff(pfa: PFA, theta, word: Sequence, blocks: int, seed: int) -> tuple[float, float]:
    """Mean and standard error of the per-block average reward of (word, Restart) cycles."""
    game = reduce_to_blind_mdp(pfa, theta).to_mode("float")
    w = pfa.word(word)
    restart = len(pfa.symbols)
    cycle = CyclicSequence(w + (restart,))
    length = len(w) + 1
    trace = simulate(game, game.initial_belief, cycle, CyclicSequence((0,)), blocks * length, seed, track_beliefs=False)
    per_block = np.asarray(trace.rewards, dtype=float).reshape(blocks, length).mean(axis=1)
    return float(per_block.mean()), float(per_block.std(ddof=1) / math.sqrt(blocks))


# coupling checks


def _walks(num_pairs: int, length: int, max_walks: int, seed: int):
    total = num_pairs**length
    if total <= max_walks:
        return itertools.product(range(num_pairs), repeat=length), True
    rng = np.random.Generator(np.random.PCG64(seed))
    return (tuple(int(a) for a in rng.integers(num_pairs, size=length)) for _ in range(max_walks)), False


def coupling_profile(
    game: BlindGame,
    b1: Sequence[Number],
    eps: Number,
    length: int,
    max_walks: int = 1 << 16,
    seed: int = 0,
    cert: ErgodicityCertificate | None = None,
    family: StableMatrixFamily | None = None,
) -> tuple[list, bool]:
    """Per-step maximum of ||b_m - proj(x_m)||_1 over walks of ``length`` pairs.

    Entry m is the gap after m action pairs. Walks are exhaustive when
    |A|^length <= max_walks (second return value True), else sampled.
    """
    check_belief(b1, game.mode, game.num_states)
    family = family or make_family(game, eps, cert)
    walks, exhaustive = _walks(game.num_pairs, length, max_walks, seed)
    worst = [0 * b1[0]] * (length + 1)
    if exhaustive:
        # depth-first over the prefix tree, sharing work between walks
        stack = [(tuple(b1), AbstractState(tuple(b1), ()), 0)]
        while stack:
            b, x, m = stack.pop()
            d = l1_distance(b, proj(x, family))
            if d > worst[m]:
                worst[m] = d
            if m < length:
                for a in range(game.num_pairs):
                    stack.append((belief_step(game, b, a), abstract_update(x, a, family, game), m + 1))
        return worst, True
    for seq in walks:
        b, x = tuple(b1), AbstractState(tuple(b1), ())
        for m in range(length + 1):
            d = l1_distance(b, proj(x, family))
            if d > worst[m]:
                worst[m] = d
            if m < length:
                b = belief_step(game, b, seq[m])
                x = abstract_update(x, seq[m], family, game)
    return worst, False


def coupling_profile_vectorized(
    game: BlindGame, b1: Sequence[Number], n: int, length: int, chunk: int = 1 << 18
) -> list[float]:
    """Exhaustive float coupling profile for block length ``n``, batched in numpy.

    Independent of the abstraction code: alongside each walk's belief and
    projected belief it carries u * T(partial block) for the uniform vector u,
    which at a block boundary is exactly the column mean of the block product.
    """
    if n < 1 or length < 0:
        raise DomainError("need n >= 1 and length >= 0")
    k = game.num_states
    mats = np.asarray([[[float(x) for x in row] for row in m] for m in game.transitions])
    uniform = np.full(k, 1.0 / k)
    worst = [0.0] * (length + 1)

    def expand(s, m):
        # s[0], s[1], s[2] hold belief, projected belief and u * T(partial block)
        while True:
            worst[m] = max(worst[m], float(np.abs(s[0] - s[1]).sum(axis=1).max()))
            if m == length:
                return
            w = s.shape[1]
            if w * len(mats) > chunk and w > 1:
                expand(s[:, : w // 2], m)
                s = s[:, w // 2 :]
                continue
            s = (s[None] @ mats[:, None]).transpose(1, 0, 2, 3).reshape(3, -1, k)
            m += 1
            if m % n == 0:
                s[1] = s[2]
                s[2] = uniform

    b0 = np.asarray([float(v) for v in b1])
    expand(np.stack([b0, b0, uniform])[:, None, :], 0)
    return worst


def coupling_check(game, b1, eps, length, max_walks: int = 1 << 16, seed: int = 0, cert=None) -> Number:
    return max(coupling_profile(game, b1, eps, length, max_walks, seed, cert)[0])


def payoff_gap_check(
    game: BlindGame,
    b1: Sequence[Number],
    eps: Number,
    horizon: int,
    cert: ErgodicityCertificate | None = None,
    budget: Budget | None = None,
) -> Number:
    """|v_N(b1) - v*_N(root)| between the blind game and its abstraction."""
    brute = brute_force_value_N(game, b1, horizon, budget)
    g = build_abstract_game(game, b1, eps, cert, budget, max_depth=horizon)
    return abs(brute - shapley_iterate(g, horizon).root_value)
