"""Metrical grid generation: bars, beats and sub-beats from time signatures.

Simple meters (numerator not a multiple of 3, or exactly 3) take the
denominator unit as the beat with duple sub-division; compound meters
(numerator a multiple of 3 above 3) take the dotted unit with triple
sub-division. Notated bar boundaries, when a score carries them, override
nominal tiling so pickup and irregular measures keep their real lengths.
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction

from .model import (
    TICKS_PER_QUARTER,
    Grouping,
    GroupingLevel,
    Score,
    ScoreError,
    Time,
    TimeSignature,
)

WHOLE_NOTE_TICKS = 4 * TICKS_PER_QUARTER


class MissingMeterError(ScoreError):
    """Groupings were requested for a score without any time signature."""


def nominal_bar_length(meter: TimeSignature) -> Time:
    return Fraction(meter.numerator * WHOLE_NOTE_TICKS, meter.denominator)


def beat_layout(meter: TimeSignature) -> tuple[Time, int]:
    """Return (beat length, sub-beats per beat) for one time signature."""
    unit = Fraction(WHOLE_NOTE_TICKS, meter.denominator)
    if meter.numerator > 3 and meter.numerator % 3 == 0:
        return 3 * unit, 3
    return unit, 2


def _tile(start: Time, end: Time, step: Time, *, anchor_end: bool = False) -> list[tuple[Time, Time]]:
    """Split [start, end) into step-sized spans; a partial span sits at the
    non-anchored side."""
    if end <= start:
        return []
    cuts = [start]
    if anchor_end:
        inner = []
        t = end
        while t - step > start:
            t -= step
            inner.append(t)
        cuts.extend(reversed(inner))
    else:
        t = start
        while t + step < end:
            t += step
            cuts.append(t)
    cuts.append(end)
    return list(zip(cuts, cuts[1:]))


def _active_meter(meters: tuple[TimeSignature, ...], time: Time) -> TimeSignature:
    starts = [m.start for m in meters]
    idx = bisect_right(starts, time) - 1
    return meters[max(idx, 0)]


def _nominal_walls(
    meters: tuple[TimeSignature, ...], start: Time, end: Time
) -> list[Time]:
    """Bar starts from tiling each meter's region with its nominal length,
    anchored at `start` (or at the meter change, whichever is later)."""
    walls: list[Time] = []
    for idx, meter in enumerate(meters):
        region_start = max(meter.start, start)
        region_end = meters[idx + 1].start if idx + 1 < len(meters) else end
        region_end = min(region_end, end)
        if region_end <= region_start:
            continue
        length = nominal_bar_length(meter)
        t = region_start
        while t < region_end:
            walls.append(t)
            t += length
    return walls


def _bar_spans(score: Score) -> list[tuple[Time, Time, TimeSignature]]:
    span_start, span_end = score.span  # caller guarantees notes exist
    meters = score.meters
    explicit = sorted(set(score.bar_boundaries or ()))
    end = span_end
    walls: list[Time] = []
    if explicit:
        # Notated barlines are authoritative; the final boundary may extend
        # past the last offset (trailing rests belong to the bar).
        end = max(end, explicit[-1])
        walls.extend(explicit)
        if span_end > explicit[-1]:
            walls.extend(_nominal_walls(meters, explicit[-1], span_end))
    else:
        walls.extend(_nominal_walls(meters, meters[0].start, end))

    # A new bar starts at every meter change, and notes before the first
    # wall get a leading (pickup) bar. The grid covers the note span only:
    # walls left of the first note collapse onto the span start, so a first
    # note that enters mid-bar opens a short pickup bar.
    wall_set = set(walls) | {m.start for m in meters}
    wall_set = {max(w, span_start) for w in wall_set if w < end}
    if not wall_set or span_start < min(wall_set):
        wall_set.add(span_start)
    ordered = sorted(wall_set)
    spans = []
    for a, b in zip(ordered, ordered[1:] + [end]):
        if b > a:
            spans.append((a, b, _active_meter(meters, a)))
    return spans


def generate_groupings(score: Score) -> list[Grouping]:
    """Derive the full metrical grid over the score's note span.

    Within each bar, beats tile from the bar start; a short first bar is a
    pickup and anchors its grid at the bar end instead, so the last beat
    lands on the following downbeat. Partial spans at either side are kept,
    and every boundary is exact.
    """
    if not score.meters:
        raise MissingMeterError(
            "score has no time signature; cannot derive metrical groupings"
        )
    if not score.notes:
        return []
    groupings: list[Grouping] = []
    bars = _bar_spans(score)
    first_bar_start = bars[0][0] if bars else None
    for bar_start, bar_end, meter in bars:
        groupings.append(Grouping(GroupingLevel.BAR, bar_start, bar_end))
        beat_length, subs_per_beat = beat_layout(meter)
        pickup = (
            bar_start == first_bar_start
            and bar_end - bar_start < nominal_bar_length(meter)
        )
        sub_length = beat_length / subs_per_beat
        for beat_start, beat_end in _tile(bar_start, bar_end, beat_length, anchor_end=pickup):
            groupings.append(Grouping(GroupingLevel.BEAT, beat_start, beat_end))
            for sub_start, sub_end in _tile(beat_start, beat_end, sub_length, anchor_end=pickup):
                groupings.append(Grouping(GroupingLevel.SUB_BEAT, sub_start, sub_end))
    return groupings
