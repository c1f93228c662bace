"""Canonical in-memory score model shared by ingestion, alignment and metrics.

All times are exact rationals (`fractions.Fraction`). Ingestion produces
1000 ticks per quarter note; alignment remaps times through piecewise-linear
maps, so arbitrary rationals (including negatives, from extrapolation) must
survive. Floats are rejected everywhere to keep comparisons exact.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence, TypeVar

Time = Fraction

TICKS_PER_QUARTER = 1000

PITCH_CLASS_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")

ALLOWED_METER_DENOMINATORS = (1, 2, 4, 8, 16, 32)


class ScoreError(ValueError):
    """A score or score element violates a model invariant."""


class KeyMode(Enum):
    MAJOR = "major"
    MINOR = "minor"


class GroupingLevel(Enum):
    BAR = "bar"
    BEAT = "beat"
    SUB_BEAT = "sub_beat"


def exact_fraction(value: int | str | Fraction, what: str) -> Fraction:
    """Coerce to Fraction, rejecting floats so inexact values never enter."""
    if isinstance(value, float):
        raise ScoreError(f"{what} must be an exact int or Fraction, not float")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScoreError(f"{what} is not a valid rational: {value!r}") from exc


@dataclass(frozen=True)
class Note:
    pitch: int
    onset: Time
    offset: Time
    voice: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "onset", exact_fraction(self.onset, "note onset"))
        object.__setattr__(self, "offset", exact_fraction(self.offset, "note offset"))
        if not 0 <= self.pitch <= 127:
            raise ScoreError(f"pitch {self.pitch} outside MIDI range 0-127")
        if self.offset <= self.onset:
            raise ScoreError(f"note offset {self.offset} not after onset {self.onset}")
        if self.voice < 0:
            raise ScoreError(f"negative voice id {self.voice}")

    @property
    def duration(self) -> Time:
        return self.offset - self.onset


@dataclass(frozen=True)
class Chord:
    """All notes of a score sharing one onset, as an ordered pitch multiset."""

    onset: Time
    notes: tuple[Note, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "onset", exact_fraction(self.onset, "chord onset"))
        notes = tuple(sorted(self.notes, key=lambda n: (n.pitch, n.voice, n.offset)))
        object.__setattr__(self, "notes", notes)
        if not notes:
            raise ScoreError("chord must contain at least one note")
        for note in notes:
            if note.onset != self.onset:
                raise ScoreError(
                    f"note onset {note.onset} differs from chord onset {self.onset}"
                )

    @property
    def pitches(self) -> tuple[int, ...]:
        """Sorted pitch multiset (duplicates across voices preserved)."""
        return tuple(note.pitch for note in self.notes)


@dataclass(frozen=True)
class KeySignature:
    tonic: int
    mode: KeyMode
    start: Time

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", exact_fraction(self.start, "key start"))
        if not 0 <= self.tonic <= 11:
            raise ScoreError(f"tonic {self.tonic} outside pitch-class range 0-11")
        if not isinstance(self.mode, KeyMode):
            raise ScoreError(f"mode must be a KeyMode, got {self.mode!r}")


@dataclass(frozen=True)
class TimeSignature:
    numerator: int
    denominator: int
    start: Time

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", exact_fraction(self.start, "meter start"))
        if self.numerator < 1:
            raise ScoreError(f"meter numerator {self.numerator} must be positive")
        if self.denominator not in ALLOWED_METER_DENOMINATORS:
            raise ScoreError(
                f"meter denominator {self.denominator} not one of "
                f"{ALLOWED_METER_DENOMINATORS}"
            )


@dataclass(frozen=True)
class Grouping:
    """One span of the metrical grid at bar, beat or sub-beat level."""

    level: GroupingLevel
    start: Time
    end: Time

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", exact_fraction(self.start, "grouping start"))
        object.__setattr__(self, "end", exact_fraction(self.end, "grouping end"))
        if self.end <= self.start:
            raise ScoreError(f"grouping end {self.end} not after start {self.start}")


@dataclass(frozen=True)
class ChordSymbol:
    root: int
    quality: str
    start: Time

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", exact_fraction(self.start, "chord symbol start"))
        if not 0 <= self.root <= 11:
            raise ScoreError(f"chord root {self.root} outside pitch-class range 0-11")

    def matches(self, other: ChordSymbol) -> bool:
        """Roots must agree; a missing quality on either side matches any."""
        if self.root != other.root:
            return False
        if not self.quality or not other.quality:
            return True
        return self.quality == other.quality

    @property
    def label(self) -> str:
        name = PITCH_CLASS_NAMES[self.root]
        return f"{name}:{self.quality}" if self.quality else name


def _ascending_starts(items: Sequence, what: str) -> None:
    for a, b in zip(items, items[1:]):
        if b.start <= a.start:
            raise ScoreError(f"{what} not strictly ascending at {b.start}")


@dataclass(frozen=True)
class Score:
    """An immutable score: notes plus key/meter/chord-symbol annotations.

    Notes are canonically ordered by (onset, pitch, voice, offset) on
    construction; `bar_boundaries` optionally carries notated barline times
    (including the end of the final bar) from ingestion.
    """

    notes: tuple[Note, ...]
    voice_count: int
    keys: tuple[KeySignature, ...] = ()
    meters: tuple[TimeSignature, ...] = ()
    chord_symbols: tuple[ChordSymbol, ...] = ()
    bar_boundaries: tuple[Time, ...] | None = None

    def __post_init__(self) -> None:
        notes = tuple(
            sorted(self.notes, key=lambda n: (n.onset, n.pitch, n.voice, n.offset))
        )
        object.__setattr__(self, "notes", notes)
        object.__setattr__(self, "keys", tuple(self.keys))
        object.__setattr__(self, "meters", tuple(self.meters))
        object.__setattr__(self, "chord_symbols", tuple(self.chord_symbols))
        if self.bar_boundaries is not None:
            bars = tuple(exact_fraction(b, "bar boundary") for b in self.bar_boundaries)
            object.__setattr__(self, "bar_boundaries", bars)

        if self.voice_count < 0:
            raise ScoreError(f"negative voice count {self.voice_count}")
        for note in notes:
            if note.voice >= self.voice_count:
                raise ScoreError(
                    f"voice id {note.voice} outside declared count {self.voice_count}"
                )
        _ascending_starts(self.keys, "key signatures")
        _ascending_starts(self.meters, "time signatures")
        _ascending_starts(self.chord_symbols, "chord symbols")
        if notes:
            first_onset = notes[0].onset
            if self.keys and self.keys[0].start > first_onset:
                raise ScoreError(
                    f"first key at {self.keys[0].start} after first onset {first_onset}"
                )
            if self.meters and self.meters[0].start > first_onset:
                raise ScoreError(
                    f"first meter at {self.meters[0].start} after first onset {first_onset}"
                )
        if self.bar_boundaries is not None:
            for a, b in zip(self.bar_boundaries, self.bar_boundaries[1:]):
                if b <= a:
                    raise ScoreError(f"bar boundaries not strictly ascending at {b}")

    @property
    def span(self) -> tuple[Time, Time] | None:
        """(first onset, last offset), or None for a score without notes."""
        if not self.notes:
            return None
        return self.notes[0].onset, max(note.offset for note in self.notes)


def build_chord_sequence(score: Score) -> list[Chord]:
    """Group all notes sharing an onset (across voices) into one chord each,
    ordered by onset."""
    by_onset: dict[Time, list[Note]] = {}
    for note in score.notes:
        by_onset.setdefault(note.onset, []).append(note)
    return [Chord(onset, tuple(notes)) for onset, notes in sorted(by_onset.items())]


_E = TypeVar("_E")


def _active_entry(entries: Sequence[_E], time: Time, starts: list[Time]) -> _E | None:
    idx = bisect_right(starts, time) - 1
    if idx < 0:
        return None
    return entries[idx]


def active_key(keys: Sequence[KeySignature], time: Time) -> KeySignature:
    """Key in effect at `time`; a time before the first change clamps to it."""
    if not keys:
        raise ScoreError("score has no key annotation")
    found = _active_entry(keys, time, [k.start for k in keys])
    return keys[0] if found is None else found


def active_chord_symbol(
    symbols: Sequence[ChordSymbol], time: Time
) -> ChordSymbol | None:
    """Chord symbol in effect at `time`, or None before the first one."""
    return _active_entry(symbols, time, [s.start for s in symbols])


@dataclass(frozen=True)
class KeySection:
    """A stretch of the evaluation span on which both scores' keys are constant."""

    start: Time
    end: Time
    transcription_key: KeySignature
    ground_truth_key: KeySignature


def continuous_key_sections(
    transcription: Score, ground_truth: Score
) -> list[KeySection]:
    """Split the ground-truth note span at every key change of either score.

    Section boundaries are the span endpoints plus all key-change times
    strictly inside the span; coinciding changes yield a single boundary.
    """
    span = ground_truth.span
    if span is None:
        raise ScoreError("ground truth has no notes; evaluation span undefined")
    if not transcription.keys or not ground_truth.keys:
        raise ScoreError("both scores need key annotations to form key sections")
    start, end = span
    cuts = {start, end}
    for score in (transcription, ground_truth):
        cuts.update(k.start for k in score.keys if start < k.start < end)
    bounds = sorted(cuts)
    return [
        KeySection(
            a,
            b,
            active_key(transcription.keys, a),
            active_key(ground_truth.keys, a),
        )
        for a, b in zip(bounds, bounds[1:])
    ]
