"""Truncated cosine-sum expansions of the error terms and their empirical
remainder statistics.

The three series share the shape

    amplitude * x^(1/4) * sum_{n<=N} w(n) * n^(-3/4) * cos(f*sqrt(n*x) + phase)

with
    delta:       amplitude  1/(pi*sqrt(2)),  w(n) = d(n),        f = 4*pi, phase = -pi/4
    delta-star:  amplitude  1/(pi*sqrt(2)),  w(n) = (-1)^n d(n), f = 4*pi, phase = -pi/4
    circle:      amplitude -1/pi,            w(n) = r(n),        f = 2*pi, phase = +pi/4

Phases are formed in 80-bit extended precision before the cosine: sqrt(n*x)
reaches 1e6 at desk scale, and a double-precision product would surrender
six digits of the phase.  Argument folding mod 2*pi happens at the same
precision, so reduced and unreduced evaluations agree far below 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .error_terms import ErrorTermKind, error_term
from .errors import RangeError
from .numerics import PI_LD, TWO_PI_LD
from .sieves import DivisorTable, TableKind, sieve_divisors, sieve_r

_SQRT2_LD = np.sqrt(np.longdouble(2))


@dataclass(frozen=True)
class VoronoiSeries:
    """Frozen coefficients and constants of one truncated expansion."""
    kind: ErrorTermKind
    truncation: int
    coefficients: np.ndarray   # w(n) * n^(-3/4), n = 1..N (longdouble)
    amplitude: float
    phase: float
    frequency_scale: float

    @property
    def N(self) -> int:
        return self.truncation


@dataclass(frozen=True)
class RemainderStats:
    """Sampled remainder of truncation N against the exact error term."""
    kind: ErrorTermKind
    X: float
    truncation: int
    sample_count: int
    seed: int
    rms: float
    sup: float


def build_series(kind: ErrorTermKind, truncation: int,
                 table: DivisorTable | None = None) -> VoronoiSeries:
    """Assemble the coefficient table and constants for one series."""
    if truncation < 2:
        raise ValueError(f"truncation length must be >= 2, got {truncation}")
    if kind is ErrorTermKind.CIRCLE:
        if table is None or table.kind is not TableKind.SUM_OF_TWO_SQUARES \
                or table.limit < truncation:
            table = sieve_r(truncation)
        weights = table.values[1:truncation + 1].astype(np.longdouble)
        amplitude = -1 / float(PI_LD)
        phase = float(PI_LD / 4)
        freq = 2 * float(PI_LD)
    else:
        if table is None or table.kind is not TableKind.DIVISOR \
                or table.limit < truncation:
            table = sieve_divisors(truncation)
        weights = table.values[1:truncation + 1].astype(np.longdouble)
        if kind is ErrorTermKind.DELTA_STAR:
            signs = np.where(np.arange(1, truncation + 1) % 2 == 0, 1, -1)
            weights = weights * signs.astype(np.longdouble)
        amplitude = 1 / float(PI_LD * _SQRT2_LD)
        phase = -float(PI_LD / 4)
        freq = 4 * float(PI_LD)
    ns = np.arange(1, truncation + 1, dtype=np.longdouble)
    coeffs = weights * ns ** np.longdouble(-0.75)
    return VoronoiSeries(kind=kind, truncation=truncation, coefficients=coeffs,
                         amplitude=amplitude, phase=phase, frequency_scale=freq)


def phases(series: VoronoiSeries, x, reduce_mod_2pi: bool = True) -> np.ndarray:
    """f*sqrt(n*x) + phase for n = 1..N, in longdouble, optionally folded.

    The unreduced variant exists so tests can confirm the folding step is
    lossless; both run at the same extended precision.
    """
    ns = np.arange(1, series.truncation + 1, dtype=np.longdouble)
    t = np.longdouble(series.frequency_scale) * np.sqrt(ns * np.longdouble(x))
    if reduce_mod_2pi:
        t = t - TWO_PI_LD * np.floor(t / TWO_PI_LD)
    return t + np.longdouble(series.phase)


def evaluate_series(series: VoronoiSeries, x) -> float:
    """Evaluate the truncated expansion at one point x >= 1."""
    if x < 1:
        raise RangeError(f"series is evaluated for x >= 1, got {x}")
    t = phases(series, x)
    total = np.sum(series.coefficients * np.cos(t))
    return float(np.longdouble(series.amplitude)
                 * np.longdouble(x) ** np.longdouble(0.25) * total)


def truncated(kind: ErrorTermKind, truncation: int, x,
              table: DivisorTable | None = None) -> float:
    """One-shot evaluation of the truncated expansion (builds coefficients)."""
    return evaluate_series(build_series(kind, truncation, table), x)


def evaluate_block(series: VoronoiSeries, xs, block_size: int = 64) -> np.ndarray:
    """Evaluate the series on an x-grid, blocked so the n-loop stays in numpy.

    Results are bit-identical to per-point evaluation for any block size
    (the per-x reduction over n is a fixed-shape pairwise sum).
    """
    xs_arr = np.asarray(xs, dtype=float)
    flat = xs_arr.ravel()
    if flat.size and flat.min() < 1:
        raise RangeError("series is evaluated for x >= 1")
    ns = np.arange(1, series.truncation + 1, dtype=np.longdouble)
    freq = np.longdouble(series.frequency_scale)
    amp = np.longdouble(series.amplitude)
    out = np.empty(flat.shape, dtype=float)
    for start in range(0, flat.size, block_size):
        xb = flat[start:start + block_size].astype(np.longdouble)[:, None]
        t = freq * np.sqrt(ns[None, :] * xb)
        t -= TWO_PI_LD * np.floor(t / TWO_PI_LD)
        t += np.longdouble(series.phase)
        sums = np.sum(series.coefficients[None, :] * np.cos(t), axis=1)
        vals = amp * xb.ravel() ** np.longdouble(0.25) * sums
        out[start:start + block_size] = vals.astype(float)
    return out.reshape(xs_arr.shape)


def remainder_stats(kind: ErrorTermKind, truncation: int, X: float,
                    sample_count: int = 100, seed: int = 0,
                    table: DivisorTable | None = None) -> RemainderStats:
    """rms and sup of (exact error term - truncated series) on [X, 2X].

    Sample points are uniform in [X, 2X] from a seeded generator, so a rerun
    with the same seed reproduces the statistics bit for bit.  The side
    condition N <= X is enforced here: remainder shapes are only meaningful
    while the truncation stays below the sampling scale.
    """
    if sample_count < 100:
        raise ValueError(f"sample_count must be >= 100, got {sample_count}")
    if truncation > X:
        raise RangeError(f"need truncation N <= X (N={truncation}, X={X})")
    series = build_series(kind, truncation, table)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(X, 2 * X, size=sample_count)
    approx = evaluate_block(series, xs)
    gaps = np.empty(sample_count)
    for i, x in enumerate(xs):
        gaps[i] = error_term(kind, float(x)) - approx[i]
    rms = float(np.sqrt(np.mean(gaps * gaps)))
    sup = float(np.max(np.abs(gaps)))
    return RemainderStats(kind=kind, X=float(X), truncation=truncation,
                          sample_count=sample_count, seed=seed, rms=rms, sup=sup)
