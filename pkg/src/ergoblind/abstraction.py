"""Finite abstract game built from stable approximations of length-n products.

States are ``(base, prefix)`` pairs: an abstract belief and the action pairs
played since the last block boundary. After ``n`` pairs the state jumps to
the common row of the stable approximation of the block's product, which does
not depend on where the block started.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BudgetExceededError, DomainError, NotErgodicError
from .ergodicity import ErgodicityCertificate, n_epsilon, verify_ergodic
from .game import BlindGame, check_belief
from .matrix import _check_square, tau1
from .numeric import Budget, Matrix, Number, Vector, belief_key, dot, identity, matmul, vecmat


def stable_approximation(m: Matrix) -> Matrix:
    """Replace every row by the column-mean row."""
    k = _check_square(m)
    if isinstance(m[0][0], float):
        row = tuple(sum(col) / k for col in zip(*m))
    else:
        row = tuple(sum(col) / Fraction(k) for col in zip(*m))
    return (row,) * k


class StableMatrixFamily:
    """Lazily materialized products T^m(a^m) and stable approximations of T^n.

    ``entries`` maps each length-n sequence seen so far to ``(T^n, T~^n)``;
    ``complete`` is set once all |A|^n sequences are present.
    """

    def __init__(self, game: BlindGame, eps: Number, n: int):
        if n < 1:
            raise DomainError(f"block length must be >= 1, got {n}")
        self.game = game
        self.eps = eps
        self.n = n
        self.entries: dict = {}
        self.complete = False
        self._products = {(): identity(game.num_states, game.mode)}

    def product(self, seq: tuple) -> Matrix:
        cached = self._products.get(seq)
        if cached is None:
            cached = matmul(self.product(seq[:-1]), self.game.transitions[seq[-1]])
            self._products[seq] = cached
        return cached

    def entry(self, seq: tuple) -> tuple[Matrix, Matrix]:
        if len(seq) != self.n:
            raise DomainError(f"family entries have length {self.n}, got {len(seq)}")
        e = self.entries.get(seq)
        if e is None:
            t = self.product(seq)
            e = (t, stable_approximation(t))
            self.entries[seq] = e
        return e

    def stable_row(self, seq: tuple) -> Vector:
        return self.entry(seq)[1][0]

    def materialize(self, budget: Budget | None = None) -> "StableMatrixFamily":
        budget = budget or Budget()
        total = self.game.num_pairs**self.n
        if total > budget.max_products:
            raise BudgetExceededError(f"{total} sequences of length {self.n} exceed the product budget")
        for seq in itertools.product(range(self.game.num_pairs), repeat=self.n):
            self.entry(seq)
        self.complete = True
        return self

    def max_tau1(self) -> Number:
        return max(tau1(t) for t, _ in self.entries.values())


def make_family(
    game: BlindGame, eps: Number, cert: ErgodicityCertificate | None = None, budget: Budget | None = None
) -> StableMatrixFamily:
    cert = cert or verify_ergodic(game, budget)
    if not cert.ergodic:
        raise NotErgodicError(f"game is not ergodic; witness {cert.counterexample}", cert)
    return StableMatrixFamily(game, eps, n_epsilon(game, cert, eps))


def abstract_belief_set(
    game: BlindGame,
    b1: Sequence[Number],
    eps: Number,
    cert: ErgodicityCertificate | None = None,
    budget: Budget | None = None,
    family: StableMatrixFamily | None = None,
) -> list[Vector]:
    """b1 followed by the distinct common rows of all stable approximations."""
    family = family or make_family(game, eps, cert, budget)
    family.materialize(budget)
    out, seen = [tuple(b1)], {belief_key(b1)}
    for _, st in family.entries.values():
        row = st[0]
        key = belief_key(row)
        if key not in seen:
            seen.add(key)
            out.append(row)
    return out


class AbstractState(NamedTuple):
    base: tuple
    prefix: tuple


def proj(x: AbstractState, family: StableMatrixFamily, game: BlindGame | None = None) -> Vector:
    if not x.prefix:
        return x.base
    return vecmat(x.base, family.product(x.prefix))


def abstract_update(x: AbstractState, pair, family: StableMatrixFamily, game: BlindGame | None = None) -> AbstractState:
    game = game or family.game
    a = game.action_index(pair)
    seq = x.prefix + (a,)
    if len(seq) < family.n:
        return AbstractState(x.base, seq)
    return AbstractState(family.stable_row(seq), ())


@dataclass
class AbstractGame:
    """Deterministic finite game on the reachable abstract states.

    ``next_state[s][a]`` and ``reward[s][a]`` give the successor index and
    stage reward of flat action pair ``a`` at state index ``s``; state 0 is
    the root ``(b1, ())``. ``truncated`` marks a depth-limited closure whose
    frontier states self-loop, which is only valid for horizons up to
    ``max_depth``.
    """

    states: list
    num_actions1: int
    num_actions2: int
    next_state: list
    reward: list
    n: int
    eps: Number
    num_beliefs: int
    truncated: bool = False
    max_depth: int | None = None
    family: StableMatrixFamily | None = field(default=None, repr=False)
    _arrays: tuple | None = field(default=None, repr=False)

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_pairs(self) -> int:
        return self.num_actions1 * self.num_actions2

    @property
    def is_single_player(self) -> bool:
        return self.num_actions1 == 1 or self.num_actions2 == 1

    @property
    def exact(self) -> bool:
        return bool(self.reward) and isinstance(self.reward[0][0], Fraction)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if self._arrays is None:
            nxt = np.asarray(self.next_state, dtype=np.int64).reshape(self.num_states, self.num_pairs)
            rew = np.asarray([[float(r) for r in row] for row in self.reward], dtype=float)
            self._arrays = (nxt, rew.reshape(self.num_states, self.num_pairs))
        return self._arrays

    def index_of(self, x: AbstractState) -> int:
        key = (belief_key(x.base), x.prefix)
        for s, y in enumerate(self.states):
            if (belief_key(y.base), y.prefix) == key:
                return s
        raise KeyError(x)


def build_abstract_game(
    game: BlindGame,
    b1: Sequence[Number],
    eps: Number,
    cert: ErgodicityCertificate | None = None,
    budget: Budget | None = None,
    max_depth: int | None = None,
    family: StableMatrixFamily | None = None,
) -> AbstractGame:
    """Breadth-first reachable closure of the abstract game from ``(b1, ())``."""
    budget = budget or Budget()
    b1 = tuple(b1)
    check_belief(b1, game.mode, game.num_states)
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    family = family or make_family(game, eps, cert, budget)
    root = AbstractState(b1, ())
    states = [root]
    beliefs = [b1]
    index = {(belief_key(b1), ()): 0}
    depth = [0]
    belief_keys = {belief_key(b1)}
    next_state, reward = [], []
    pairs = range(game.num_pairs)
    queue = deque([0])
    truncated = False
    while queue:
        s = queue.popleft()
        x = states[s]
        b = beliefs[s]
        reward.append(None)
        next_state.append(None)
        reward[s] = [dot(b, game.rewards[a]) for a in pairs]
        if max_depth is not None and depth[s] >= max_depth:
            next_state[s] = [s] * game.num_pairs
            truncated = True
            continue
        succ = []
        for a in pairs:
            y = abstract_update(x, a, family, game)
            key = (belief_key(y.base), y.prefix)
            t = index.get(key)
            if t is None:
                t = len(states)
                if t >= budget.max_states:
                    raise BudgetExceededError(
                        f"abstract game exceeds the state budget of {budget.max_states}"
                    )
                index[key] = t
                states.append(y)
                beliefs.append(proj(y, family))
                depth.append(depth[s] + 1)
                belief_keys.add(belief_key(y.base))
                queue.append(t)
            succ.append(t)
        next_state[s] = succ
    return AbstractGame(
        states=states,
        num_actions1=len(game.actions1),
        num_actions2=len(game.actions2),
        next_state=next_state,
        reward=reward,
        n=family.n,
        eps=eps,
        num_beliefs=len(belief_keys),
        truncated=truncated,
        max_depth=max_depth,
        family=family,
    )
