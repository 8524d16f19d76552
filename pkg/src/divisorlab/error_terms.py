"""Exact evaluation of the divisor and circle error terms.

delta(x)      = D(x) - x(log x + 2*gamma - 1)
delta-star(x) = -delta(x) + 2*delta(2x) - delta(4x)/2
circle(x)     = R(x) - pi*x

The step part is exact integer arithmetic; the smooth part is evaluated in
80-bit extended precision, so absolute error stays below 1e-6 for x up to
1e9.  The piecewise-segment view (step constant minus a smooth function on
each unit or quarter-unit interval) is what the moments engine integrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from .errors import RangeError
from .numerics import EULER_GAMMA, PI_LD
from .sieves import alternating_summatory_d, summatory_d, summatory_r


class ErrorTermKind(Enum):
    DELTA = "delta"
    DELTA_STAR = "delta-star"
    CIRCLE = "circle"

    @classmethod
    def parse(cls, name: str) -> "ErrorTermKind":
        for kind in cls:
            if kind.value == name:
                return kind
        known = ", ".join(sorted(k.value for k in cls))
        raise ValueError(f"unknown error-term kind {name!r} (known: {known})")


@dataclass(frozen=True)
class SmoothPart:
    """Coefficients of the smooth function c_xlogx*x*log(x) + c_x*x + c_const
    subtracted from the step sum on a segment."""
    xlogx: float
    x: float
    const: float = 0.0


_SMOOTH = {
    ErrorTermKind.DELTA: SmoothPart(xlogx=1.0, x=float(2 * EULER_GAMMA - 1)),
    ErrorTermKind.DELTA_STAR: SmoothPart(xlogx=1.0, x=float(2 * EULER_GAMMA - 1)),
    ErrorTermKind.CIRCLE: SmoothPart(xlogx=0.0, x=float(PI_LD)),
}


@dataclass(frozen=True)
class PiecewiseErrorSegment:
    """One maximal interval on which the step part is constant.

    error(x) = constant_part - smooth(x) for left <= x < right, where
    smooth is described by ``smooth_part``.  constant_part is an integer for
    delta/circle and a half-integer for delta-star; both are exactly
    representable as floats at any supported scale.
    """
    kind: ErrorTermKind
    left: float
    right: float
    constant_part: float
    smooth_part: SmoothPart


def smooth_main_term(kind: ErrorTermKind, x) -> np.longdouble:
    """The smooth function subtracted from the step sum, in longdouble.

    Accepts a scalar or array; the product x*log(x) is where doubles shed
    the digits that matter, so it is formed entirely in extended precision.
    """
    xl = np.asarray(x, dtype=np.longdouble)
    if kind is ErrorTermKind.CIRCLE:
        return PI_LD * xl
    return xl * (np.log(xl) + (2 * EULER_GAMMA - 1))


def step_sum(kind: ErrorTermKind, x) -> float:
    """The exact step part of the error term at x (integer or half-integer)."""
    if kind is ErrorTermKind.DELTA:
        return float(summatory_d(x))
    if kind is ErrorTermKind.CIRCLE:
        return float(summatory_r(x))
    # delta-star: -D(x) + 2 D(2x) - D(4x)/2, with each floor taken exactly
    n1 = summatory_d(x)
    n2 = summatory_d(2 * x)
    n4 = summatory_d(4 * x)
    return -n1 + 2 * n2 - 0.5 * n4


def error_term(kind: ErrorTermKind, x) -> float:
    """Evaluate the requested error term at a single point x >= 1."""
    if x < 1:
        raise RangeError(f"error terms are defined for x >= 1, got {x}")
    step = np.longdouble(step_sum(kind, x))
    return float(step - smooth_main_term(kind, np.longdouble(x)))


def delta_star_identity_residual(x) -> float:
    """Residual of the alternating-sum identity for delta-star at x.

    Returns 0.5*sum_{n<=4x}(-1)^n d(n) - x(log x + 2*gamma - 1) - delta-star(x),
    which must vanish to ~1e-12; the integer parts cancel exactly and the two
    smooth evaluations share one code path.
    """
    if x < 1:
        raise RangeError(f"identity is checked for x >= 1, got {x}")
    alt = np.longdouble(alternating_summatory_d(x)) / 2
    lhs = alt - smooth_main_term(ErrorTermKind.DELTA, np.longdouble(x))
    return float(lhs - np.longdouble(error_term(ErrorTermKind.DELTA_STAR, x)))


def _breakpoint_grid(kind: ErrorTermKind, a: float, b: float) -> np.ndarray:
    """Ascending jump locations of the step part inside (a, b)."""
    # delta/circle jump at integers; delta-star jumps at quarter-integers
    # (the union of the jump sets of D(x), D(2x), D(4x)).
    denom = 4 if kind is ErrorTermKind.DELTA_STAR else 1
    first = math.floor(a * denom) + 1
    last = math.ceil(b * denom) - 1
    return np.arange(first, last + 1, dtype=np.int64) / denom


def segments(kind: ErrorTermKind, a: float, b: float) -> Iterator[PiecewiseErrorSegment]:
    """Stream the piecewise segments covering [a, b], in ascending order.

    Consecutive segments differ in constant_part by the jump of the
    underlying step sum at the shared breakpoint.
    """
    if not 1 <= a < b:
        raise RangeError(f"need 1 <= a < b, got [{a}, {b}]")
    smooth = _SMOOTH[kind]
    cuts = [a] + [float(t) for t in _breakpoint_grid(kind, a, b)] + [b]
    for left, right in zip(cuts[:-1], cuts[1:]):
        yield PiecewiseErrorSegment(
            kind=kind, left=left, right=right,
            constant_part=step_sum(kind, left),
            smooth_part=smooth,
        )
