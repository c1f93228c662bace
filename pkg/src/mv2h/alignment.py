"""Chord-sequence alignment and exact piecewise-linear time remapping.

The transcription's chord sequence is aligned to the ground truth's by
dynamic time warping with a fixed gap penalty; matched steps whose chords
share at least one pitch become anchor points, and a piecewise-linear map
through the anchors carries every transcription time onto the ground-truth
timeline. All arithmetic is exact.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._dtw import run_dtw
from .model import (
    Chord,
    ChordSymbol,
    KeySignature,
    Note,
    Score,
    ScoreError,
    Time,
    TimeSignature,
    exact_fraction,
)

DEFAULT_GAP_PENALTY = Fraction(3, 5)


@dataclass(frozen=True)
class AlignmentPath:
    """A complete monotone alignment of two chord sequences.

    Each step pairs a transcription chord index with a ground-truth chord
    index; None marks the gap side of an insertion or deletion.
    """

    steps: tuple[tuple[int | None, int | None], ...]
    total_cost: Fraction


@dataclass(frozen=True)
class AnchorSet:
    """Corresponding (transcription time, ground-truth time) pairs, strictly
    increasing on both sides."""

    anchors: tuple[tuple[Time, Time], ...]

    def __post_init__(self) -> None:
        for (t0, g0), (t1, g1) in zip(self.anchors, self.anchors[1:]):
            if t1 <= t0 or g1 <= g0:
                raise ScoreError(
                    f"anchors not strictly increasing: ({t0}, {g0}) then ({t1}, {g1})"
                )

    def __len__(self) -> int:
        return len(self.anchors)


def chord_distance(transcribed: Chord, ground_truth: Chord) -> Fraction:
    """1 - F1 between the two pitch multisets: 0 for identical, 1 for
    disjoint. Duplicated pitches match one-to-one, so the true-positive
    count per pitch is the smaller of its two multiplicities."""
    a = transcribed.pitches
    b = ground_truth.pitches
    tp = 0
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            tp += 1
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    total = len(a) + len(b)
    return Fraction(total - 2 * tp, total)


def dtw_align(
    transcribed: Sequence[Chord],
    ground_truth: Sequence[Chord],
    gap_penalty: Fraction | int | str = DEFAULT_GAP_PENALTY,
) -> AlignmentPath:
    """Minimum-cost alignment of the two chord sequences.

    Every chord of both sequences appears in exactly one step. Ties prefer
    a match over a gap in the transcription over a gap in the ground truth.
    """
    if not transcribed:
        raise ScoreError("cannot align an empty transcription chord sequence")
    if not ground_truth:
        raise ScoreError("cannot align an empty ground-truth chord sequence")
    gap = exact_fraction(gap_penalty, "gap penalty")
    if gap < 0:
        raise ScoreError(f"gap penalty must be non-negative, got {gap}")
    total, steps = run_dtw(
        [c.pitches for c in transcribed],
        [c.pitches for c in ground_truth],
        gap,
    )
    return AlignmentPath(tuple(steps), total)


def extract_anchors(
    path: AlignmentPath,
    transcribed: Sequence[Chord],
    ground_truth: Sequence[Chord],
) -> AnchorSet:
    """Onset pairs of matched steps whose chords share at least one pitch
    (distance strictly below 1)."""
    anchors: list[tuple[Time, Time]] = []
    for t_index, g_index in path.steps:
        if t_index is None or g_index is None:
            continue
        t_chord = transcribed[t_index]
        g_chord = ground_truth[g_index]
        if chord_distance(t_chord, g_chord) == 1:
            continue
        anchors.append((t_chord.onset, g_chord.onset))
    return AnchorSet(tuple(anchors))


class TimeMap:
    """Strictly increasing piecewise-linear map from transcription time to
    ground-truth time, exact over rationals.

    Between consecutive anchors times interpolate linearly; beyond the first
    or last anchor the adjacent segment extrapolates.
    """

    def __init__(self, points: Sequence[tuple[Time, Time]]):
        if len(points) < 2:
            raise ScoreError("a time map needs at least two points")
        for (t0, g0), (t1, g1) in zip(points, points[1:]):
            if t1 <= t0 or g1 <= g0:
                raise ScoreError("time map points must strictly increase")
        self._t = [p[0] for p in points]
        self._g = [p[1] for p in points]

    @classmethod
    def from_anchors(
        cls,
        anchors: AnchorSet,
        transcription_span: tuple[Time, Time] | None = None,
        ground_truth_span: tuple[Time, Time] | None = None,
    ) -> TimeMap:
        """Build the map, falling back to span-onto-span scaling when fewer
        than two anchors exist (fully disjoint or near-disjoint content)."""
        points = list(anchors.anchors)
        if len(points) >= 2:
            return cls(points)
        if transcription_span is None or ground_truth_span is None:
            raise ScoreError(
                "fewer than two anchors; note spans are required to build a time map"
            )
        t_start, t_end = transcription_span
        g_start, g_end = ground_truth_span
        if len(points) == 1:
            # Scale by the span ratio around the single anchor.
            anchor_t, anchor_g = points[0]
            rate = Fraction(g_end - g_start, t_end - t_start) if t_end > t_start else Fraction(1)
            return cls([(anchor_t, anchor_g), (anchor_t + 1, anchor_g + rate)])
        if t_end <= t_start:
            return cls([(t_start, g_start), (t_start + 1, g_start + 1)])
        return cls([(t_start, g_start), (t_end, g_end)])

    def __call__(self, time: Time) -> Time:
        idx = bisect_right(self._t, time) - 1
        idx = min(max(idx, 0), len(self._t) - 2)
        t0, t1 = self._t[idx], self._t[idx + 1]
        g0, g1 = self._g[idx], self._g[idx + 1]
        return g0 + (time - t0) * (g1 - g0) / (t1 - t0)


def map_score_times(score: Score, time_map: TimeMap) -> Score:
    """Apply a time map to every time in the score; annotations and order
    survive because the map is strictly increasing."""
    return Score(
        notes=tuple(
            Note(n.pitch, time_map(n.onset), time_map(n.offset), n.voice)
            for n in score.notes
        ),
        voice_count=score.voice_count,
        keys=tuple(
            KeySignature(k.tonic, k.mode, time_map(k.start)) for k in score.keys
        ),
        meters=tuple(
            TimeSignature(m.numerator, m.denominator, time_map(m.start))
            for m in score.meters
        ),
        chord_symbols=tuple(
            ChordSymbol(c.root, c.quality, time_map(c.start))
            for c in score.chord_symbols
        ),
        bar_boundaries=(
            None
            if score.bar_boundaries is None
            else tuple(time_map(b) for b in score.bar_boundaries)
        ),
    )


def remap_times(
    transcription: Score,
    anchors: AnchorSet,
    *,
    ground_truth_span: tuple[Time, Time] | None = None,
) -> Score:
    """Carry the transcription onto the ground-truth timeline.

    With two or more anchors the spans are unused; degenerate alignments
    (fewer than two anchors) need `ground_truth_span` for the fallback
    span-onto-span map.
    """
    time_map = TimeMap.from_anchors(anchors, transcription.span, ground_truth_span)
    return map_score_times(transcription, time_map)
