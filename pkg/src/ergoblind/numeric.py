"""Scalar, vector and matrix helpers shared by the exact and float modes.

Matrices are tuples of row tuples, vectors are tuples. In exact mode every
entry is a :class:`fractions.Fraction`; in float mode every entry is a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Sequence, Union

Number = Union[Fraction, float]
Vector = tuple
Matrix = tuple

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

# float-mode tolerances
ROW_SUM_TOL = 1e-9
BELIEF_TOL = 1e-12
POSITIVE_TOL = 1e-12
QUANT_DIGITS = 12


@dataclass(frozen=True)
class Budget:
    """Resource limits for the exponential search procedures."""

    max_patterns: int = 1_000_000
    max_products: int = 1_000_000
    max_states: int = 1_000_000
    max_seconds: float | None = None


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def to_number(x, mode: str = EXACT) -> Number:
    """Coerce ``x`` (int, float, Fraction, "p/q" or decimal string) to ``mode``.

    Floats headed for exact mode go through their shortest repr, so ``0.9``
    becomes ``9/10`` rather than the nearest binary fraction.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if mode == EXACT:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, Rational):
            return Fraction(x)
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"non-finite value {x!r}")
            return Fraction(repr(x))
        if isinstance(x, str):
            return Fraction(x.strip())
        if isinstance(x, Real):
            return Fraction(repr(float(x)))
        raise TypeError(f"cannot interpret {x!r} as a number")
    if isinstance(x, str):
        return float(Fraction(x.strip()))
    if isinstance(x, (Real,)):
        v = float(x)
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {x!r}")
        return v
    raise TypeError(f"cannot interpret {x!r} as a number")


def mode_of(x) -> str:
    return FLOAT if isinstance(x, float) else EXACT


def zero(mode: str) -> Number:
    return Fraction(0) if mode == EXACT else 0.0


def one(mode: str) -> Number:
    return Fraction(1) if mode == EXACT else 1.0


def is_positive(x: Number) -> bool:
    """Strict positivity used for every sign decision."""
    if isinstance(x, float):
        return x > POSITIVE_TOL
    return x > 0


def identity(k: int, mode: str = EXACT) -> Matrix:
    z, o = zero(mode), one(mode)
    return tuple(tuple(o if r == c else z for c in range(k)) for r in range(k))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def vecmat(v: Sequence[Number], m: Matrix) -> Vector:
    k = len(m[0])
    out = [v[0] * x for x in m[0]]
    for weight, row in zip(v[1:], m[1:]):
        if weight:
            for c in range(k):
                out[c] += weight * row[c]
    return tuple(out)


def dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return sum(x * y for x, y in zip(u, v))


def l1_distance(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return sum(abs(x - y) for x, y in zip(u, v))


def belief_key(b: Sequence[Number]) -> tuple:
    """Canonical hashable identity of a belief (quantized in float mode)."""
    if b and isinstance(b[0], float):
        return tuple(round(x, QUANT_DIGITS) + 0.0 for x in b)
    return tuple(b)


def as_float(x) -> float:
    return float(x)


def exact_str(x) -> str:
    """Render a number as "p/q" (or an integer string) in exact mode."""
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))
