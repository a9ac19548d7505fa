"""Ergodicity coefficient, sign patterns and the stochastic matrix classes.

A sign pattern is a tuple of row bitmasks: bit ``c`` of ``pattern[r]`` is set
iff entry ``(r, c)`` of the underlying matrix is strictly positive. Sign
decisions are exact in rational mode and use ``entry > 1e-12`` for floats.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import ShapeError
from .numeric import Matrix, Number, is_positive

Pattern = tuple  # tuple[int, ...] of row bitmasks


def _check_square(m: Sequence[Sequence]) -> int:
    k = len(m)
    if k == 0 or any(len(row) != k for row in m):
        raise ShapeError("expected a nonempty square matrix")
    return k


def tau1(m: Matrix) -> Number:
    """Half the largest L1 distance between two rows of ``m``."""
    k = _check_square(m)
    best = 0 * m[0][0]
    for r, s in combinations(range(k), 2):
        d = sum(abs(x - y) for x, y in zip(m[r], m[s]))
        if d > best:
            best = d
    return best / 2


def is_stable(m: Matrix) -> bool:
    """True iff all rows coincide (pairwise within 1e-12 for float entries)."""
    _check_square(m)
    first = m[0]
    if isinstance(first[0], float):
        return all(abs(x - y) <= 1e-12 for row in m[1:] for x, y in zip(row, first))
    return all(row == first for row in m[1:])


def pattern_of(m: Matrix) -> Pattern:
    _check_square(m)
    return tuple(sum(1 << c for c, x in enumerate(row) if is_positive(x)) for row in m)


def identity_pattern(k: int) -> Pattern:
    return tuple(1 << r for r in range(k))


def pattern_product(p: Pattern, q: Pattern) -> Pattern:
    """Boolean matrix product: row r of the result is the OR of q's rows selected by p[r]."""
    if len(p) != len(q):
        raise ShapeError(f"pattern sizes differ: {len(p)} vs {len(q)}")
    out = []
    for bits in p:
        acc = 0
        c = 0
        while bits:
            if bits & 1:
                acc |= q[c]
            bits >>= 1
            c += 1
        out.append(acc)
    return tuple(out)


def pattern_bits(p: Pattern) -> list[list[bool]]:
    k = len(p)
    return [[bool(row >> c & 1) for c in range(k)] for row in p]


def _reach_mask(p: Pattern, mask: int) -> int:
    acc = 0
    r = 0
    while mask:
        if mask & 1:
            acc |= p[r]
        mask >>= 1
        r += 1
    return acc


def reach_set(p: Pattern, q: Iterable[int]) -> set[int]:
    """States reachable in one step from some state of ``q``."""
    mask = 0
    for r in q:
        mask |= 1 << r
    out = _reach_mask(p, mask)
    return {c for c in range(len(p)) if out >> c & 1}


def is_markov_pattern(p: Pattern) -> bool:
    acc = (1 << len(p)) - 1
    for row in p:
        acc &= row
    return acc != 0


def is_scrambling_pattern(p: Pattern) -> bool:
    return all(p[r] & p[s] for r, s in combinations(range(len(p)), 2))


def is_sarymsakov_pattern(p: Pattern) -> bool:
    k = len(p)
    full = (1 << k) - 1
    for q in range(1, full + 1):
        fq = _reach_mask(p, q)
        rest = full & ~q
        sub = rest
        while sub:
            fs = _reach_mask(p, sub)
            if not (fq & fs) and bin(fq | fs).count("1") <= bin(q | sub).count("1"):
                return False
            sub = (sub - 1) & rest
    return True


def is_sia_pattern(p: Pattern, max_power: int | None = None) -> bool:
    """Decide SIA by looking for a scrambling power P, P^2, ..., P^m.

    ``m`` defaults to the Paz bound for ``len(p)`` states. The walk stops
    early once a power repeats, since the sequence is then periodic.
    """
    from .ergodicity import search_bound

    m = search_bound(len(p)) if max_power is None else max_power
    seen = set()
    cur = p
    for _ in range(m):
        if is_scrambling_pattern(cur):
            return True
        if cur in seen:
            return False
        seen.add(cur)
        cur = pattern_product(cur, p)
    return False


@dataclass(frozen=True)
class MatrixClassReport:
    """Membership flags for the Markov, scrambling, Sarymsakov and SIA classes.

    Class C2 has no membership procedure and is deliberately absent.
    """

    is_markov: bool
    is_scrambling: bool
    is_sarymsakov: bool
    is_sia: bool
    is_stable: bool

    def as_dict(self) -> dict:
        return asdict(self)


def classify(m: Matrix) -> MatrixClassReport:
    p = pattern_of(m)
    return MatrixClassReport(
        is_markov=is_markov_pattern(p),
        is_scrambling=is_scrambling_pattern(p),
        is_sarymsakov=is_sarymsakov_pattern(p),
        is_sia=is_sia_pattern(p),
        is_stable=is_stable(m),
    )
