"""Blind stochastic games, beliefs and forward products of transition matrices.

Action pairs ``(i, j)`` are flattened to a single index ``a = i * |J| + j``;
a blind MDP is the special case ``|J| = 1``. An action sequence is a tuple of
flat indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    InvalidBeliefError,
    NegativeEntryError,
    RewardRangeError,
    RowSumError,
    ShapeError,
    UnknownActionError,
)
from .numeric import (
    BELIEF_TOL,
    EXACT,
    FLOAT,
    ROW_SUM_TOL,
    Matrix,
    Number,
    Vector,
    check_mode,
    dot,
    identity,
    matmul,
    one,
    to_number,
    vecmat,
    zero,
)

PAIR_SEP = "|"


@dataclass(frozen=True)
class BlindGame:
    """Finite zero-sum blind stochastic game.

    ``transitions[a]`` is the |K|x|K| matrix P(i, j) and ``rewards[a]`` the
    vector g(., i, j) for the flat pair index ``a``. Entries are coerced to
    the numeric ``mode`` and the whole game is validated on construction.
    """

    states: tuple
    actions1: tuple
    actions2: tuple
    transitions: tuple
    rewards: tuple
    mode: str = EXACT
    initial_belief: tuple | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        check_mode(self.mode)
        conv = lambda x: to_number(x, self.mode)  # noqa: E731
        set_ = object.__setattr__
        set_(self, "states", tuple(str(s) for s in self.states))
        set_(self, "actions1", tuple(str(s) for s in self.actions1))
        set_(self, "actions2", tuple(str(s) for s in self.actions2))
        try:
            set_(self, "transitions", tuple(tuple(tuple(conv(x) for x in row) for row in m) for m in self.transitions))
            set_(self, "rewards", tuple(tuple(conv(x) for x in r) for r in self.rewards))
            if self.initial_belief is not None:
                set_(self, "initial_belief", tuple(conv(x) for x in self.initial_belief))
        except TypeError as exc:
            raise ShapeError(f"malformed numeric table: {exc}") from exc
        validate_game(self)
        if self.initial_belief is not None:
            check_belief(self.initial_belief, self.mode, self.num_states)
        index = {}
        for a in range(self.num_pairs):
            index[self.pair_name(a)] = a
        set_(self, "_index", index)

    @classmethod
    def from_tables(
        cls,
        states: Sequence[str],
        actions1: Sequence[str],
        actions2: Sequence[str] | None,
        transitions: Mapping,
        rewards: Mapping,
        mode: str = EXACT,
        initial_belief: Sequence | None = None,
    ) -> "BlindGame":
        """Build a game from maps keyed by ``(i, j)`` name pairs or ``"i|j"``.

        A missing second action set means a blind MDP with the single
        placeholder action ``"*"``; keys may then be plain action names.
        """
        actions2 = tuple(actions2) if actions2 else ("*",)
        mats, rews = [], []
        for i in actions1:
            for j in actions2:
                mats.append(_lookup(transitions, i, j, actions2, "transitions"))
                rews.append(_lookup(rewards, i, j, actions2, "rewards"))
        return cls(tuple(states), tuple(actions1), actions2, tuple(mats), tuple(rews), mode, initial_belief)

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_pairs(self) -> int:
        return len(self.actions1) * len(self.actions2)

    @property
    def is_single_player(self) -> bool:
        return len(self.actions1) == 1 or len(self.actions2) == 1

    def pair_of(self, a: int) -> tuple[int, int]:
        return divmod(a, len(self.actions2))

    def pair_name(self, a: int) -> str:
        i, j = self.pair_of(a)
        return f"{self.actions1[i]}{PAIR_SEP}{self.actions2[j]}"

    def action_index(self, action) -> int:
        """Resolve a flat index, an ``(i, j)`` pair (indices or names) or ``"i|j"``."""
        n1, n2 = len(self.actions1), len(self.actions2)
        if isinstance(action, bool):
            raise UnknownActionError(f"invalid action {action!r}")
        if isinstance(action, int):
            if 0 <= action < n1 * n2:
                return action
            raise UnknownActionError(f"action index {action} out of range [0, {n1 * n2})")
        if isinstance(action, str):
            if action in self._index:
                return self._index[action]
            if n2 == 1 and f"{action}{PAIR_SEP}{self.actions2[0]}" in self._index:
                return self._index[f"{action}{PAIR_SEP}{self.actions2[0]}"]
            raise UnknownActionError(f"unknown action {action!r}")
        if isinstance(action, tuple) and len(action) == 2:
            i, j = action
            i = _resolve(i, self.actions1, "player 1")
            j = _resolve(j, self.actions2, "player 2")
            return i * n2 + j
        raise UnknownActionError(f"invalid action {action!r}")

    def sequence(self, seq: Iterable) -> tuple[int, ...]:
        return tuple(self.action_index(a) for a in seq)

    def to_mode(self, mode: str) -> "BlindGame":
        if mode == self.mode:
            return self
        if mode == EXACT:
            raise ValueError("float games cannot be promoted to exact mode")
        conv = float
        return BlindGame(
            self.states,
            self.actions1,
            self.actions2,
            tuple(tuple(tuple(conv(x) for x in row) for row in m) for m in self.transitions),
            tuple(tuple(conv(x) for x in r) for r in self.rewards),
            FLOAT,
            None if self.initial_belief is None else tuple(conv(x) for x in self.initial_belief),
        )

    def with_initial_belief(self, b: Sequence) -> "BlindGame":
        return replace(self, initial_belief=tuple(b))

    def default_belief(self) -> Vector:
        return self.initial_belief if self.initial_belief is not None else uniform_belief(self.num_states, self.mode)


def _resolve(x, names: tuple, who: str) -> int:
    if isinstance(x, int) and not isinstance(x, bool):
        if 0 <= x < len(names):
            return x
    elif x in names:
        return names.index(x)
    raise UnknownActionError(f"unknown {who} action {x!r}")


def _lookup(table: Mapping, i: str, j: str, actions2: tuple, what: str):
    for key in ((i, j), f"{i}{PAIR_SEP}{j}"):
        if key in table:
            return table[key]
    if len(actions2) == 1 and i in table:
        return table[i]
    raise ShapeError(f"{what} missing entry for action pair {i}{PAIR_SEP}{j}")


def validate_game(game: BlindGame) -> None:
    """Raise if any structural or stochastic invariant of ``game`` fails."""
    k = game.num_states
    if k < 1:
        raise ShapeError("a game needs at least one state")
    if not game.actions1 or not game.actions2:
        raise ShapeError("both action sets must be nonempty")
    if len(game.transitions) != game.num_pairs:
        raise ShapeError(f"expected {game.num_pairs} transition matrices, got {len(game.transitions)}")
    if len(game.rewards) != game.num_pairs:
        raise ShapeError(f"expected {game.num_pairs} reward vectors, got {len(game.rewards)}")
    exact = game.mode == EXACT
    for a, (m, r) in enumerate(zip(game.transitions, game.rewards)):
        name = game.pair_name(a)
        if len(m) != k or any(len(row) != k for row in m):
            raise ShapeError(f"transition matrix for {name} is not {k}x{k}")
        if len(r) != k:
            raise ShapeError(f"reward vector for {name} has length {len(r)}, expected {k}")
        for row_idx, row in enumerate(m):
            if any(x < 0 for x in row):
                raise NegativeEntryError(f"negative entry in row {game.states[row_idx]} of {name}")
            s = sum(row)
            if (s != 1) if exact else abs(s - 1.0) > ROW_SUM_TOL:
                raise RowSumError(
                    f"row {game.states[row_idx]} of {name} sums to {s}, not 1", pair=name, row=row_idx
                )
        for state, x in zip(game.states, r):
            if x < 0 or x > 1:
                raise RewardRangeError(f"reward g({state}, {name}) = {x} outside [0, 1]")


def check_belief(b: Sequence[Number], mode: str, k: int | None = None) -> None:
    if k is not None and len(b) != k:
        raise InvalidBeliefError(f"belief has length {len(b)}, expected {k}")
    if any(x < 0 for x in b):
        raise InvalidBeliefError("belief has a negative weight")
    s = sum(b)
    if (s != 1) if mode == EXACT else abs(s - 1.0) > BELIEF_TOL:
        raise InvalidBeliefError(f"belief sums to {s}, not 1")


def make_belief(weights: Sequence, mode: str = EXACT, k: int | None = None) -> Vector:
    b = tuple(to_number(x, mode) for x in weights)
    check_belief(b, mode, k)
    return b


def uniform_belief(k: int, mode: str = EXACT) -> Vector:
    w = Fraction(1, k) if mode == EXACT else 1.0 / k
    return (w,) * k


def dirac(k: int, idx: int, mode: str = EXACT) -> Vector:
    z, o = zero(mode), one(mode)
    return tuple(o if s == idx else z for s in range(k))


def forward_product(game: BlindGame, seq: Iterable) -> Matrix:
    """Left-to-right product P(a_1)...P(a_n); identity for the empty sequence."""
    out = None
    for a in game.sequence(seq):
        out = game.transitions[a] if out is None else matmul(out, game.transitions[a])
    return identity(game.num_states, game.mode) if out is None else out


def belief_step(game: BlindGame, b: Sequence[Number], pair) -> Vector:
    """Bayes update of a blind belief: the row vector b^T P(i, j).

    Float-mode beliefs are renormalized after the step to stop mass drift.
    """
    nxt = vecmat(b, game.transitions[game.action_index(pair)])
    if game.mode == FLOAT:
        s = sum(nxt)
        nxt = tuple(x / s for x in nxt)
    return nxt


def stage_reward(game: BlindGame, b: Sequence[Number], pair) -> Number:
    return dot(b, game.rewards[game.action_index(pair)])


def belief_trajectory(game: BlindGame, b1: Sequence[Number], seq: Iterable) -> list:
    out = [tuple(b1)]
    for a in seq:
        out.append(belief_step(game, out[-1], a))
    return out
