"""Kernel selection and scaled-integer setup for chord-sequence DTW.

The DP runs on integers: chord-pair distances (s - 2*tp) / s and the gap
penalty are multiplied by a common denominator (the lcm of the penalty's
denominator and every possible pitch-count sum s), so the compiled int64
kernel computes exact costs. When the accumulated cost could exceed int64,
or the extension is unavailable, the pure-Python core runs instead on
arbitrary-precision ints. Both cores produce identical results.

Set MV2H_NO_NATIVE=1 to force the pure core.
"""

from __future__ import annotations

import os
from array import array
from fractions import Fraction
from math import lcm
from typing import Sequence

from . import _dtw_py

try:
    from . import _dtw_c
except ImportError:  # extension not built
    _dtw_c = None

HAVE_NATIVE = _dtw_c is not None
_DISABLED = bool(os.environ.get("MV2H_NO_NATIVE"))
_INT64_LIMIT = 2**62

Step = tuple[int | None, int | None]


def _fits_int64(n: int, m: int, denom: int, gap_scaled: int) -> bool:
    # Any complete path has at most n + m steps, each costing at most
    # max(denom, gap_scaled); keep slack below the signed 64-bit edge.
    return (n + m) * max(denom, gap_scaled) < _INT64_LIMIT


def _flatten(chords: Sequence[tuple[int, ...]]) -> tuple[list[int], list[int]]:
    pitches: list[int] = []
    offsets = [0]
    for chord in chords:
        pitches.extend(chord)
        offsets.append(len(pitches))
    return pitches, offsets


def _traceback(back: Sequence[int], n: int, m: int) -> list[Step]:
    width = m + 1
    steps: list[Step] = []
    i, j = n, m
    while i > 0 or j > 0:
        move = back[i * width + j]
        if move == 1:
            steps.append((i - 1, j - 1))
            i -= 1
            j -= 1
        elif move == 2:
            steps.append((None, j - 1))
            j -= 1
        else:
            steps.append((i - 1, None))
            i -= 1
    steps.reverse()
    return steps


def run_dtw(
    t_chords: Sequence[tuple[int, ...]],
    g_chords: Sequence[tuple[int, ...]],
    gap_penalty: Fraction,
    use_native: bool | None = None,
) -> tuple[Fraction, list[Step]]:
    """Minimum-cost complete monotone alignment of two chord sequences.

    Chords are sorted pitch tuples. Returns (total cost, steps); each step
    pairs a transcription index with a ground-truth index, None marking the
    gap side of an insertion or deletion. Ties prefer a match, then a gap in
    the transcription, then a gap in the ground truth.
    """
    n = len(t_chords)
    m = len(g_chords)
    if n == 0 or m == 0:
        raise ValueError("DTW alignment requires non-empty chord sequences")

    t_sizes = {len(chord) for chord in t_chords}
    g_sizes = {len(chord) for chord in g_chords}
    sums = {a + b for a in t_sizes for b in g_sizes}
    denom = lcm(gap_penalty.denominator, *sums)
    gap_scaled = denom * gap_penalty.numerator // gap_penalty.denominator

    if use_native is None:
        use_native = (
            HAVE_NATIVE and not _DISABLED and _fits_int64(n, m, denom, gap_scaled)
        )
    elif use_native:
        if not HAVE_NATIVE:
            raise RuntimeError("native DTW kernel is not available")
        if not _fits_int64(n, m, denom, gap_scaled):
            raise OverflowError("scaled costs exceed the int64 kernel bound")

    t_pitch, t_off = _flatten(t_chords)
    g_pitch, g_off = _flatten(g_chords)
    if use_native:
        total, back = _dtw_c.dtw_core(
            array("i", t_pitch),
            array("i", t_off),
            array("i", g_pitch),
            array("i", g_off),
            denom,
            gap_scaled,
        )
    else:
        total, back = _dtw_py.dtw_core(
            t_pitch, t_off, g_pitch, g_off, denom, gap_scaled
        )
    return Fraction(total, denom), _traceback(back, n, m)
