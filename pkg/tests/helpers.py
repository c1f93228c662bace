"""Shared test utilities: compact score builders and a random-score generator."""

from __future__ import annotations

import random
from fractions import Fraction

from mv2h import (
    Chord,
    ChordSymbol,
    KeyMode,
    KeySignature,
    Note,
    Score,
    TimeSignature,
)

GRID = 250  # all generated times are multiples of this many ticks

METER_POOL = ((4, 4), (3, 4), (2, 4), (6, 8), (2, 2), (9, 8), (12, 8))


def note(pitch: int, onset, offset, voice: int = 0) -> Note:
    return Note(pitch, Fraction(onset), Fraction(offset), voice)


def chord(onset, *pitches: int, duration=1000) -> Chord:
    t = Fraction(onset)
    return Chord(t, tuple(Note(p, t, t + duration) for p in pitches))


def simple_score(
    notes,
    *,
    voice_count: int | None = None,
    keys=((0, KeyMode.MAJOR, 0),),
    meters=((4, 4, 0),),
    chords=(),
    bars=None,
) -> Score:
    built_notes = tuple(note(*n) for n in notes)
    if voice_count is None:
        voice_count = max((n.voice for n in built_notes), default=-1) + 1
    return Score(
        notes=built_notes,
        voice_count=voice_count,
        keys=tuple(KeySignature(t, m, Fraction(s)) for t, m, s in keys),
        meters=tuple(TimeSignature(n, d, Fraction(s)) for n, d, s in meters),
        chord_symbols=tuple(ChordSymbol(r, q, Fraction(s)) for r, q, s in chords),
        bar_boundaries=None if bars is None else tuple(Fraction(b) for b in bars),
    )


def random_score(
    rng: random.Random,
    *,
    max_voices: int = 3,
    max_notes: int = 30,
    force_key_change: bool = False,
    force_meter_change: bool = False,
    with_chord_symbols: bool = True,
) -> Score:
    """A valid random score on an integer grid.

    Onsets share grid points often enough to produce real chords; keys,
    meters and chord symbols all start at 0 so model invariants hold for
    any note placement.
    """
    voices = rng.randint(1, max_voices)
    notes = []
    for _ in range(rng.randint(1, max_notes)):
        onset = GRID * rng.randrange(0, 32)
        duration = GRID * rng.randint(1, 8)
        notes.append(
            Note(rng.randint(48, 84), Fraction(onset), Fraction(onset + duration), rng.randrange(voices))
        )
    span_end = max(n.offset for n in notes)

    key_starts = [0]
    if force_key_change or rng.random() < 0.5:
        candidates = sorted(
            {GRID * rng.randrange(1, 32) for _ in range(rng.randint(1, 2))}
        )
        key_starts.extend(c for c in candidates if c < span_end)
    keys = tuple(
        KeySignature(rng.randrange(12), rng.choice((KeyMode.MAJOR, KeyMode.MINOR)), Fraction(s))
        for s in key_starts
    )

    meter_starts = [0]
    if force_meter_change or rng.random() < 0.4:
        change = GRID * rng.randrange(4, 28)
        if change < span_end:
            meter_starts.append(change)
    meters = tuple(
        TimeSignature(*rng.choice(METER_POOL), Fraction(s)) for s in meter_starts
    )

    symbols = ()
    if with_chord_symbols and rng.random() < 0.7:
        starts = sorted({GRID * rng.randrange(0, 30) for _ in range(rng.randint(1, 3))})
        starts = [0] + [s for s in starts if s > 0]
        qualities = ("", "maj", "min", "7")
        symbols = tuple(
            ChordSymbol(rng.randrange(12), rng.choice(qualities), Fraction(s))
            for s in starts
        )

    return Score(
        notes=tuple(notes),
        voice_count=voices + rng.randint(0, 1),
        keys=keys,
        meters=meters,
        chord_symbols=symbols,
    )
