"""Line-based plain-text score interchange format.

One record per line, whitespace-separated fields, integer times (ticks,
1000 per quarter note at the producer's chosen tempo mapping):

    Note <pitch> <onset> <onset> <offset> <voice>
    Key <time> <tonic 0-11> <Maj|Min>
    Meter <time> <numerator> <denominator>
    Chord <time> <label>
    Voice <count>
    Bar <time>

The duplicated Note onset field is reserved; the first copy is read. The
Voice record is optional (the count is inferred from the notes otherwise).
Bar records carry notated barline times, including the end of the final
bar; without them bars are tiled from each time signature. Chord labels are
a root (letter plus #/b accidentals) optionally followed by ":" and a free
quality string; a root-only label matches any quality. Lines starting with
"#" and blank lines are skipped; unknown record types are skipped with a
warning.
"""

from __future__ import annotations

import re
from collections import Counter

from ..model import (
    ChordSymbol,
    KeyMode,
    KeySignature,
    Note,
    Score,
    ScoreError,
    Time,
    TimeSignature,
)
from .diagnostics import ParseDiagnostic, ParseError

_MODE_TOKENS = {"Maj": KeyMode.MAJOR, "Min": KeyMode.MINOR}
_MODE_NAMES = {KeyMode.MAJOR: "Maj", KeyMode.MINOR: "Min"}
_LETTER_PITCH_CLASS = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_LABEL_PATTERN = re.compile(r"^([A-G])([#b]*)(?::?(.*))?$")


class _Malformed(ValueError):
    """Internal: one record line failed to parse."""


def parse_chord_label(label: str) -> tuple[int, str]:
    """Split a chord label into (root pitch class, quality string).

    Accidentals apply greedily to the root ("Bbb" is the double-flat B);
    the quality is everything after an optional ":".
    """
    match = _LABEL_PATTERN.match(label)
    if not match:
        raise _Malformed(f"malformed chord label {label!r}")
    letter, accidentals, quality = match.groups()
    root = _LETTER_PITCH_CLASS[letter]
    root += accidentals.count("#") - accidentals.count("b")
    return root % 12, (quality or "").strip()


def _int_field(token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise _Malformed(f"{what} must be an integer, got {token!r}") from None


def _time_field(token: str, what: str) -> int:
    value = _int_field(token, what)
    if value < 0:
        raise _Malformed(f"{what} must be non-negative, got {value}")
    return value


def parse_interchange_text(text: str) -> tuple[Score, list[ParseDiagnostic]]:
    """Parse interchange text into a Score plus diagnostics.

    All malformed lines are reported (with their line numbers) before a
    ParseError is raised; on success the returned diagnostics hold only
    warnings. Identical input always yields an identical Score.
    """
    diagnostics: list[ParseDiagnostic] = []
    had_error = False

    def error(location: str, message: str) -> None:
        nonlocal had_error
        had_error = True
        diagnostics.append(ParseDiagnostic("error", location, message))

    def warn(location: str, message: str) -> None:
        diagnostics.append(ParseDiagnostic("warning", location, message))

    notes: list[Note] = []
    keys: list[KeySignature] = []
    meters: list[TimeSignature] = []
    symbols: list[ChordSymbol] = []
    bars: set[int] = set()
    declared_voices: int | None = None

    for line_number, raw in enumerate(text.splitlines(), start=1):
        location = f"line {line_number}"
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "Note":
                if len(fields) != 6:
                    raise _Malformed("Note takes 5 fields: pitch onset onset offset voice")
                pitch = _int_field(fields[1], "pitch")
                onset = _time_field(fields[2], "onset")
                _time_field(fields[3], "onset")  # reserved duplicate
                offset = _time_field(fields[4], "offset")
                voice = _int_field(fields[5], "voice")
                if offset == onset:
                    warn(location, "zero-duration note skipped")
                    continue
                notes.append(Note(pitch, onset, offset, voice))
            elif kind == "Key":
                if len(fields) != 4:
                    raise _Malformed("Key takes 3 fields: time tonic mode")
                start = _time_field(fields[1], "time")
                tonic = _int_field(fields[2], "tonic")
                if fields[3] not in _MODE_TOKENS:
                    raise _Malformed(f"mode must be Maj or Min, got {fields[3]!r}")
                keys.append(KeySignature(tonic, _MODE_TOKENS[fields[3]], start))
            elif kind == "Meter":
                if len(fields) != 4:
                    raise _Malformed("Meter takes 3 fields: time numerator denominator")
                start = _time_field(fields[1], "time")
                numerator = _int_field(fields[2], "numerator")
                denominator = _int_field(fields[3], "denominator")
                meters.append(TimeSignature(numerator, denominator, start))
            elif kind == "Chord":
                if len(fields) < 3:
                    raise _Malformed("Chord takes 2 fields: time label")
                start = _time_field(fields[1], "time")
                root, quality = parse_chord_label(" ".join(fields[2:]))
                symbols.append(ChordSymbol(root, quality, start))
            elif kind == "Voice":
                if len(fields) != 2:
                    raise _Malformed("Voice takes 1 field: count")
                declared_voices = _int_field(fields[1], "count")
                if declared_voices < 1:
                    raise _Malformed(f"voice count must be positive, got {declared_voices}")
            elif kind == "Bar":
                if len(fields) != 2:
                    raise _Malformed("Bar takes 1 field: time")
                bars.add(_time_field(fields[1], "time"))
            else:
                warn(location, f"unknown record type {kind!r} skipped")
        except (_Malformed, ScoreError) as exc:
            error(location, str(exc))

    if not notes and not had_error:
        error("document", "score contains no notes")

    max_voice = max((n.voice for n in notes), default=-1)
    if declared_voices is not None and declared_voices <= max_voice:
        error(
            "document",
            f"declared voice count {declared_voices} does not cover voice id {max_voice}",
        )
    voice_count = declared_voices if declared_voices is not None else max_voice + 1

    for entries, what in ((keys, "Key"), (meters, "Meter"), (symbols, "Chord")):
        counts = Counter(e.start for e in entries)
        for start in sorted(s for s, c in counts.items() if c > 1):
            error("document", f"duplicate {what} record at time {start}")

    if had_error:
        raise ParseError("malformed interchange input", diagnostics)

    try:
        score = Score(
            notes=tuple(notes),
            voice_count=voice_count,
            keys=tuple(sorted(keys, key=lambda k: k.start)),
            meters=tuple(sorted(meters, key=lambda m: m.start)),
            chord_symbols=tuple(sorted(symbols, key=lambda c: c.start)),
            bar_boundaries=tuple(sorted(bars)) if bars else None,
        )
    except ScoreError as exc:
        error("document", str(exc))
        raise ParseError("malformed interchange input", diagnostics) from exc
    return score, diagnostics


def _int_time(time: Time, what: str) -> int:
    if time.denominator != 1 or time < 0:
        raise ValueError(
            f"{what} {time} is not representable: the interchange format "
            "carries non-negative integer times"
        )
    return time.numerator


def serialize_interchange(score: Score) -> str:
    """Render a score in the interchange format.

    Output is canonical: Voice, Key, Meter, Bar, Chord then Note records,
    each group in time order. Parsing the result reproduces the score
    field for field; fractional-time scores (remapping output) are not
    serializable.
    """
    lines = [f"Voice {score.voice_count}"]
    for key in score.keys:
        lines.append(
            f"Key {_int_time(key.start, 'key time')} {key.tonic} {_MODE_NAMES[key.mode]}"
        )
    for meter in score.meters:
        lines.append(
            f"Meter {_int_time(meter.start, 'meter time')} "
            f"{meter.numerator} {meter.denominator}"
        )
    for bar in score.bar_boundaries or ():
        lines.append(f"Bar {_int_time(bar, 'bar time')}")
    for symbol in score.chord_symbols:
        lines.append(f"Chord {_int_time(symbol.start, 'chord time')} {symbol.label}")
    for note in score.notes:
        onset = _int_time(note.onset, "note onset")
        offset = _int_time(note.offset, "note offset")
        lines.append(f"Note {note.pitch} {onset} {onset} {offset} {note.voice}")
    return "\n".join(lines) + "\n"
