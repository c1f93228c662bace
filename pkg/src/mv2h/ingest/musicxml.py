"""Partwise MusicXML ingestion.

Reads the subset needed for evaluation: pitched notes with durations and
voices, ties, chord-follower notes, key and time signatures, measure
boundaries, and harmony (chord symbol) annotations. Grace and zero-duration
notes are dropped with a warning, unpitched content is skipped, and repeat
structures are left unexpanded (also warned). Durations arrive in
"divisions" of a quarter note and are converted exactly to the model's
1000-ticks-per-quarter timeline.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from fractions import Fraction

from ..model import (
    TICKS_PER_QUARTER,
    ChordSymbol,
    KeyMode,
    KeySignature,
    Note,
    Score,
    ScoreError,
    TimeSignature,
)
from .diagnostics import ParseDiagnostic, ParseError

_STEP_PITCH_CLASS = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}


@dataclass
class _RawNote:
    """A sounding note in quarter-note units, mutable for tie merging."""

    midi: int
    onset: Fraction
    offset: Fraction
    part: int
    voice_label: str


class _Collector:
    """Accumulates content across parts and builds the final Score."""

    def __init__(self) -> None:
        self.diagnostics: list[ParseDiagnostic] = []
        self.notes: list[_RawNote] = []
        self.keys: dict[Fraction, KeySignature] = {}
        self.meters: dict[Fraction, tuple[int, int]] = {}
        self.harmonies: dict[Fraction, tuple[int, str]] = {}
        self.bar_walls: list[Fraction] = []
        self.repeat_warned = False

    def warn(self, location: str, message: str) -> None:
        self.diagnostics.append(ParseDiagnostic("warning", location, message))

    def fail(self, location: str, message: str) -> None:
        self.diagnostics.append(ParseDiagnostic("error", location, message))
        raise ParseError(message, self.diagnostics)

    def add_key(self, start: Fraction, key: KeySignature, location: str) -> None:
        existing = self.keys.get(start)
        if existing is None:
            self.keys[start] = key
        elif existing != key:
            self.warn(location, "conflicting key signatures across parts; keeping the first")

    def add_meter(self, start: Fraction, value: tuple[int, int], location: str) -> None:
        existing = self.meters.get(start)
        if existing is None:
            self.meters[start] = value
        elif existing != value:
            self.warn(location, "conflicting time signatures across parts; keeping the first")

    def add_harmony(self, start: Fraction, value: tuple[int, str], location: str) -> None:
        existing = self.harmonies.get(start)
        if existing is None:
            self.harmonies[start] = value
        elif existing != value:
            self.warn(location, "conflicting harmony annotations; keeping the first")

    def build_score(self) -> Score:
        if not self.notes:
            self.fail("document", "score contains no notes")

        # Voices are numbered densely, parts in document order first, then
        # numeric voice labels in numeric order, remaining labels lexically.
        def label_order(label: str) -> tuple[int, int, str]:
            return (0, int(label), label) if label.isdigit() else (1, 0, label)

        voice_keys = sorted(
            {(n.part, n.voice_label) for n in self.notes},
            key=lambda pv: (pv[0], label_order(pv[1])),
        )
        voice_ids = {pv: i for i, pv in enumerate(voice_keys)}

        ticks = TICKS_PER_QUARTER
        try:
            notes = tuple(
                Note(
                    n.midi,
                    n.onset * ticks,
                    n.offset * ticks,
                    voice_ids[(n.part, n.voice_label)],
                )
                for n in self.notes
            )
            keys = tuple(
                KeySignature(k.tonic, k.mode, start * ticks)
                for start, k in sorted(self.keys.items())
            )
            meters = tuple(
                TimeSignature(num, den, start * ticks)
                for start, (num, den) in sorted(self.meters.items())
            )
            symbols = tuple(
                ChordSymbol(root, quality, start * ticks)
                for start, (root, quality) in sorted(self.harmonies.items())
            )
            bars = tuple(sorted({w * ticks for w in self.bar_walls}))
            return Score(
                notes=notes,
                voice_count=len(voice_keys),
                keys=keys,
                meters=meters,
                chord_symbols=symbols,
                bar_boundaries=bars if bars else None,
            )
        except ScoreError as exc:
            self.fail("document", str(exc))
            raise AssertionError("unreachable")


def _fifths_to_key(fifths: int, mode: KeyMode) -> int:
    # Walking the circle of fifths from C: each sharp raises the tonic a
    # fifth; the relative minor sits three semitones below the major tonic.
    tonic = (7 * fifths) % 12
    if mode is KeyMode.MINOR:
        tonic = (tonic + 9) % 12
    return tonic


def _parse_attributes(
    elem: ET.Element, state: _PartState, collector: _Collector, location: str
) -> None:
    divisions_el = elem.find("divisions")
    if divisions_el is not None:
        divisions = int(divisions_el.text)
        if divisions < 1:
            collector.fail(location, f"divisions must be positive, got {divisions}")
        state.divisions = divisions
    key_el = elem.find("key")
    if key_el is not None:
        fifths_el = key_el.find("fifths")
        if fifths_el is None:
            collector.warn(location, "key without fifths skipped")
        else:
            mode_el = key_el.find("mode")
            mode_text = (mode_el.text or "").strip().lower() if mode_el is not None else "major"
            if mode_text in ("major", "minor"):
                mode = KeyMode.MAJOR if mode_text == "major" else KeyMode.MINOR
            else:
                collector.warn(location, f"unsupported mode {mode_text!r}; assuming major")
                mode = KeyMode.MAJOR
            fifths = int(fifths_el.text)
            tonic = _fifths_to_key(fifths, mode)
            collector.add_key(state.cursor, KeySignature(tonic, mode, 0), location)
    time_el = elem.find("time")
    if time_el is not None:
        beats_el = time_el.find("beats")
        type_el = time_el.find("beat-type")
        if beats_el is None or type_el is None:
            collector.warn(location, "time signature without beats/beat-type skipped")
        else:
            collector.add_meter(
                state.cursor, (int(beats_el.text), int(type_el.text)), location
            )


def _parse_harmony(
    elem: ET.Element, state: _PartState, collector: _Collector, location: str
) -> None:
    root_el = elem.find("root")
    step_el = root_el.find("root-step") if root_el is not None else None
    if step_el is None or (step_el.text or "").strip() not in _STEP_PITCH_CLASS:
        collector.warn(location, "harmony without a recognizable root skipped")
        return
    root = _STEP_PITCH_CLASS[(step_el.text or "").strip()]
    alter_el = root_el.find("root-alter")
    if alter_el is not None:
        root += int(float(alter_el.text))
    kind_el = elem.find("kind")
    quality = (kind_el.text or "").strip() if kind_el is not None else ""
    collector.add_harmony(state.cursor, (root % 12, quality), location)


@dataclass
class _PartState:
    divisions: int = 1
    cursor: Fraction = Fraction(0)
    last_leader_onset: Fraction | None = None


def _note_duration(
    elem: ET.Element, state: _PartState, collector: _Collector, location: str
) -> Fraction | None:
    duration_el = elem.find("duration")
    if duration_el is None:
        collector.warn(location, "note without duration skipped")
        return None
    return Fraction(int(duration_el.text), state.divisions)


def _tie_flags(elem: ET.Element) -> tuple[bool, bool]:
    types = {t.get("type") for t in elem.findall("tie")}
    if not types:
        notations = elem.find("notations")
        if notations is not None:
            types = {t.get("type") for t in notations.findall("tied")}
    return "start" in types, "stop" in types


def _parse_note(
    elem: ET.Element,
    state: _PartState,
    part_index: int,
    open_ties: dict[tuple[str, int], _RawNote],
    collector: _Collector,
    location: str,
) -> None:
    if elem.find("grace") is not None:
        collector.warn(location, "grace note skipped")
        return
    duration = _note_duration(elem, state, collector, location)
    if duration is None:
        return

    is_follower = elem.find("chord") is not None
    if is_follower:
        if state.last_leader_onset is None:
            collector.warn(location, "chord follower without a preceding note")
            onset = state.cursor
        else:
            onset = state.last_leader_onset
    else:
        onset = state.cursor
        state.cursor = onset + duration

    if elem.find("rest") is not None:
        state.last_leader_onset = None
        return
    if not is_follower:
        state.last_leader_onset = onset

    if elem.find("unpitched") is not None:
        collector.warn(location, "unpitched note skipped")
        return
    pitch_el = elem.find("pitch")
    if pitch_el is None:
        collector.warn(location, "note without pitch skipped")
        return
    step_el = pitch_el.find("step")
    octave_el = pitch_el.find("octave")
    if step_el is None or octave_el is None or step_el.text.strip() not in _STEP_PITCH_CLASS:
        collector.warn(location, "note with malformed pitch skipped")
        return
    alter_el = pitch_el.find("alter")
    alter = int(float(alter_el.text)) if alter_el is not None else 0
    midi = 12 * (int(octave_el.text) + 1) + _STEP_PITCH_CLASS[step_el.text.strip()] + alter
    if not 0 <= midi <= 127:
        collector.warn(location, f"pitch {midi} outside MIDI range skipped")
        return
    if duration == 0:
        collector.warn(location, "zero-duration note skipped")
        return

    voice_el = elem.find("voice")
    voice_label = (voice_el.text or "").strip() if voice_el is not None else ""
    voice_label = voice_label or "1"

    tie_start, tie_stop = _tie_flags(elem)
    tie_key = (voice_label, midi)
    offset = onset + duration
    if tie_stop:
        pending = open_ties.get(tie_key)
        if pending is not None and pending.offset == onset:
            pending.offset = offset
            if not tie_start:
                del open_ties[tie_key]
            return
        collector.warn(location, "tie stop without a matching start")

    record = _RawNote(midi, onset, offset, part_index, voice_label)
    collector.notes.append(record)
    if tie_start:
        if tie_key in open_ties:
            collector.warn(location, "unterminated tie restarted")
        open_ties[tie_key] = record


def _parse_part(part: ET.Element, part_index: int, collector: _Collector) -> None:
    state = _PartState()
    open_ties: dict[tuple[str, int], _RawNote] = {}
    is_reference_part = part_index == 0
    final_position = Fraction(0)

    for measure_index, measure in enumerate(part.findall("measure")):
        number = measure.get("number") or str(measure_index + 1)
        location = f"part {part_index + 1}, measure {number}"
        measure_start = state.cursor
        measure_end = state.cursor
        if is_reference_part:
            collector.bar_walls.append(measure_start)
        for elem in measure:
            if elem.tag == "attributes":
                _parse_attributes(elem, state, collector, location)
            elif elem.tag == "note":
                _parse_note(elem, state, part_index, open_ties, collector, location)
            elif elem.tag == "backup":
                duration_el = elem.find("duration")
                if duration_el is not None:
                    state.cursor -= Fraction(int(duration_el.text), state.divisions)
                state.last_leader_onset = None
            elif elem.tag == "forward":
                duration_el = elem.find("duration")
                if duration_el is not None:
                    state.cursor += Fraction(int(duration_el.text), state.divisions)
                state.last_leader_onset = None
            elif elem.tag == "harmony":
                _parse_harmony(elem, state, collector, location)
            elif elem.tag in ("barline", "ending"):
                if elem.find("repeat") is not None or elem.tag == "ending":
                    if not collector.repeat_warned:
                        collector.warn(location, "repeat structure is not expanded")
                        collector.repeat_warned = True
            measure_end = max(measure_end, state.cursor)
        # Voices may leave the cursor mid-measure after a backup; the next
        # measure starts at the furthest position reached.
        state.cursor = measure_end
        final_position = measure_end

    for (voice_label, midi) in sorted(open_ties):
        collector.warn(
            f"part {part_index + 1}",
            f"unterminated tie on pitch {midi} in voice {voice_label}",
        )
    if is_reference_part:
        collector.bar_walls.append(final_position)


def parse_musicxml(document: bytes | str) -> tuple[Score, list[ParseDiagnostic]]:
    """Parse a partwise MusicXML document into a Score plus diagnostics.

    Key and time signatures from all parts are merged (the first part wins
    on conflicts, with a warning); measure boundaries come from the first
    part, including the end of its final measure. Raises ParseError for
    malformed XML, unsupported roots, or content violating the score model.
    """
    collector = _Collector()
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        collector.fail("document", f"not well-formed XML: {exc}")
    if root.tag == "score-timewise":
        collector.fail("document", "timewise MusicXML is not supported; use partwise")
    if root.tag != "score-partwise":
        collector.fail("document", f"unsupported document root {root.tag!r}")

    for part_index, part in enumerate(root.findall("part")):
        _parse_part(part, part_index, collector)
    score = collector.build_score()
    return score, collector.diagnostics
