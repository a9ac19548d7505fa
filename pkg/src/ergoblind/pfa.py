"""Probabilistic finite automata and their reduction to Markov blind MDPs.

The reduction adds a sink state reached with probability ``theta`` on every
symbol and a ``Restart`` action back to the initial state. Playing a word
followed by ``Restart`` cyclically earns strictly more than 1/2 per block
exactly when the word is accepted with probability strictly above 1/2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BudgetExceededError, DomainError, PFAError, RowSumError, ShapeError, UnknownSymbolError
from .game import BlindGame, dirac
from .numeric import EXACT, ROW_SUM_TOL, Number, check_mode, one, to_number, vecmat, zero

RESTART = "Restart"
SINK = "sink"


@dataclass(frozen=True)
class PFA:
    """``transitions[i]`` is the |K|x|K| row-stochastic matrix of symbol i."""

    states: tuple
    symbols: tuple
    transitions: tuple
    accepting: frozenset
    initial: int
    mode: str = EXACT

    def __post_init__(self):
        check_mode(self.mode)
        set_ = object.__setattr__
        set_(self, "states", tuple(str(s) for s in self.states))
        set_(self, "symbols", tuple(str(s) for s in self.symbols))
        set_(
            self,
            "transitions",
            tuple(tuple(tuple(to_number(x, self.mode) for x in row) for row in m) for m in self.transitions),
        )
        set_(self, "accepting", frozenset(self.accepting))
        k = len(self.states)
        if k == 0 or not self.symbols:
            raise ShapeError("a PFA needs at least one state and one symbol")
        if len(self.transitions) != len(self.symbols):
            raise ShapeError("one transition matrix per symbol is required")
        for sym, m in zip(self.symbols, self.transitions):
            if len(m) != k or any(len(r) != k for r in m):
                raise ShapeError(f"transition matrix of {sym!r} is not {k}x{k}")
            for r, row in enumerate(m):
                s = sum(row)
                bad = s != 1 if self.mode == EXACT else abs(s - 1.0) > ROW_SUM_TOL
                if any(x < 0 for x in row) or bad:
                    raise RowSumError(f"row {self.states[r]} of symbol {sym!r} is not a distribution", sym, r)
        if not all(isinstance(b, int) and 0 <= b < k for b in self.accepting):
            raise ShapeError("accepting states must be state indices")
        if not 0 <= self.initial < k:
            raise ShapeError("initial state out of range")

    @property
    def num_states(self) -> int:
        return len(self.states)

    def symbol_index(self, s) -> int:
        if isinstance(s, int) and not isinstance(s, bool):
            if 0 <= s < len(self.symbols):
                return s
        elif s in self.symbols:
            return self.symbols.index(s)
        raise UnknownSymbolError(f"unknown symbol {s!r}")

    def word(self, w: Iterable) -> tuple[int, ...]:
        return tuple(self.symbol_index(s) for s in w)

    def absorbing_accepting(self) -> list[int]:
        return [
            b for b in sorted(self.accepting) if all(m[b][b] == 1 for m in self.transitions)
        ]


def validate_pfa(pfa: PFA) -> None:
    """Accepting states must be nonabsorbing: some symbol moves mass off each of them."""
    bad = pfa.absorbing_accepting()
    if bad:
        names = ", ".join(pfa.states[b] for b in bad)
        raise PFAError(f"accepting states must be nonabsorbing; absorbing: {names}")


def _distribution(pfa: PFA, word: Sequence[int]):
    b = dirac(pfa.num_states, pfa.initial, pfa.mode)
    for s in word:
        b = vecmat(b, pfa.transitions[s])
    return b


def acceptance_probability(pfa: PFA, word: Iterable) -> Number:
    b = _distribution(pfa, pfa.word(word))
    return sum((b[k] for k in pfa.accepting), zero(pfa.mode))


def _check_theta(theta) -> None:
    if not 0 < theta < 1:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")


def reduce_to_blind_mdp(pfa: PFA, theta=Fraction(1, 2)) -> BlindGame:
    """Markov blind MDP with states K + [sink] and actions symbols + [Restart]."""
    mode = pfa.mode
    theta = to_number(theta, mode)
    _check_theta(theta)
    k = pfa.num_states
    z, o = zero(mode), one(mode)
    half = Fraction(1, 2) if mode == EXACT else 0.5
    mats, rews = [], []
    for m in pfa.transitions:
        rows = [tuple((o - theta) * x for x in m[r]) + (theta,) for r in range(k)]
        rows.append((z,) * k + (o,))
        mats.append(tuple(rows))
        rews.append((half,) * (k + 1))
    restart = tuple(tuple(o if c == pfa.initial else z for c in range(k + 1)) for _ in range(k + 1))
    mats.append(restart)
    rews.append(tuple(o if r in pfa.accepting else z for r in range(k)) + (half,))
    sink = SINK
    while sink in pfa.states:
        sink += "'"
    restart_name = RESTART
    while restart_name in pfa.symbols:
        restart_name += "'"
    return BlindGame(
        pfa.states + (sink,),
        pfa.symbols + (restart_name,),
        ("*",),
        tuple(mats),
        tuple(rews),
        mode,
        dirac(k + 1, pfa.initial, mode),
    )


def cyclic_block_payoff(pfa: PFA, theta, word: Iterable) -> Number:
    """Expected average reward over one block (word, Restart) from the initial state.

    [N/2 + (1 - (1-theta)^N)/2 + (1-theta)^N * acceptance(word)] / (N + 1)
    """
    w = pfa.word(word)
    n = len(w)
    if n < 1:
        raise DomainError("the cyclic strategy needs a nonempty word")
    theta = to_number(theta, pfa.mode)
    _check_theta(theta)
    half = Fraction(1, 2) if pfa.mode == EXACT else 0.5
    survive = (1 - theta) ** n
    acc = acceptance_probability(pfa, w)
    return (n * half + (1 - survive) * half + survive * acc) / (n + 1)


def exists_word_above_half(pfa: PFA, max_len: int, max_words: int = 1_000_000):
    """First word (shortlex order) of length <= max_len accepted with probability > 1/2.

    Returns the word as a tuple of symbol names, or None.
    """
    if max_len < 0:
        raise DomainError("max_len must be >= 0")
    half = Fraction(1, 2) if pfa.mode == EXACT else 0.5
    seen = 0
    for length in range(max_len + 1):
        for w in itertools.product(range(len(pfa.symbols)), repeat=length):
            seen += 1
            if seen > max_words:
                raise BudgetExceededError(f"word search exceeded {max_words} words")
            if acceptance_probability(pfa, w) > half:
                return tuple(pfa.symbols[s] for s in w)
    return None
