"""Partwise MusicXML ingestion tests built on small literal documents."""

from fractions import Fraction

import pytest

from mv2h import KeyMode, ParseError, parse_musicxml
from mv2h.ingest import load_score
from mv2h.ingest.musicxml import _fifths_to_key


def wrap(measures: str, more_parts: str = "") -> str:
    return (
        '<score-partwise version="4.0">'
        f'<part id="P1">{measures}</part>{more_parts}'
        "</score-partwise>"
    )


def xml_note(
    step: str,
    octave: int,
    duration: int,
    voice: str = "1",
    alter: int | None = None,
    chord: bool = False,
    extra: str = "",
) -> str:
    alter_el = f"<alter>{alter}</alter>" if alter is not None else ""
    chord_el = "<chord/>" if chord else ""
    return (
        f"<note>{chord_el}<pitch><step>{step}</step>{alter_el}"
        f"<octave>{octave}</octave></pitch>"
        f"<duration>{duration}</duration><voice>{voice}</voice>{extra}</note>"
    )


TWO_MEASURE = wrap(
    '<measure number="1">'
    "<attributes><divisions>2</divisions>"
    "<key><fifths>2</fifths><mode>major</mode></key>"
    "<time><beats>4</beats><beat-type>4</beat-type></time></attributes>"
    + xml_note("F", 4, 4, alter=1)
    + xml_note("A", 4, 4, extra='<tie type="start"/>')
    + "<backup><duration>8</duration></backup>"
    + xml_note("D", 3, 8, voice="2")
    + xml_note("A", 3, 8, voice="2", chord=True)
    + "</measure>"
    '<measure number="2">'
    + xml_note("A", 4, 2, extra='<tie type="stop"/>')
    + "<note><rest/><duration>2</duration><voice>1</voice></note>"
    + xml_note("G", 4, 4)
    + "<backup><duration>8</duration></backup>"
    + xml_note("D", 3, 8, voice="2")
    + "</measure>"
)


def test_two_measure_document():
    score, diagnostics = parse_musicxml(TWO_MEASURE)
    assert diagnostics == []

    expected = [
        # (pitch, onset, offset, voice)
        (50, 0, 4000, 1),
        (57, 0, 4000, 1),
        (66, 0, 2000, 0),
        (69, 2000, 5000, 0),  # tied half + quarter across the barline
        (50, 4000, 8000, 1),
        (67, 6000, 8000, 0),
    ]
    assert [
        (n.pitch, n.onset, n.offset, n.voice) for n in score.notes
    ] == [(p, Fraction(on), Fraction(off), v) for p, on, off, v in expected]
    assert score.voice_count == 2
    assert len(score.keys) == 1
    assert score.keys[0].tonic == 2 and score.keys[0].mode is KeyMode.MAJOR
    assert (score.meters[0].numerator, score.meters[0].denominator) == (4, 4)
    assert score.bar_boundaries == (Fraction(0), Fraction(4000), Fraction(8000))


def test_divisions_scaling_is_exact():
    def doc(divisions: int) -> str:
        quarter = divisions
        return wrap(
            '<measure number="1">'
            f"<attributes><divisions>{divisions}</divisions>"
            "<time><beats>2</beats><beat-type>4</beat-type></time></attributes>"
            + xml_note("C", 4, quarter)
            + xml_note("E", 4, quarter)
            + "</measure>"
        )

    reference = parse_musicxml(doc(1))[0]
    for divisions in (2, 3, 480, 960):
        assert parse_musicxml(doc(divisions))[0] == reference


def test_fifths_to_tonic():
    assert _fifths_to_key(0, KeyMode.MAJOR) == 0  # C major
    assert _fifths_to_key(2, KeyMode.MAJOR) == 2  # D major
    assert _fifths_to_key(-1, KeyMode.MAJOR) == 5  # F major
    assert _fifths_to_key(7, KeyMode.MAJOR) == 1  # C# major
    assert _fifths_to_key(0, KeyMode.MINOR) == 9  # A minor
    assert _fifths_to_key(-1, KeyMode.MINOR) == 2  # D minor
    assert _fifths_to_key(3, KeyMode.MINOR) == 6  # F# minor


def test_unsupported_mode_warns_and_assumes_major():
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions>"
        "<key><fifths>0</fifths><mode>dorian</mode></key></attributes>"
        + xml_note("C", 4, 1)
        + "</measure>"
    )
    score, diagnostics = parse_musicxml(doc)
    assert score.keys[0].mode is KeyMode.MAJOR
    assert any("dorian" in d.message for d in diagnostics)


def test_tied_via_notations_element():
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions></attributes>"
        + xml_note("C", 4, 2, extra='<notations><tied type="start"/></notations>')
        + xml_note("C", 4, 1, extra='<notations><tied type="stop"/></notations>')
        + "</measure>"
    )
    score, diagnostics = parse_musicxml(doc)
    assert diagnostics == []
    assert len(score.notes) == 1
    assert (score.notes[0].onset, score.notes[0].offset) == (0, 3000)


def test_tie_merge_requires_contiguity():
    # A gap between the tied halves leaves two notes and a warning.
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions></attributes>"
        + xml_note("C", 4, 1, extra='<tie type="start"/>')
        + "<note><rest/><duration>1</duration><voice>1</voice></note>"
        + xml_note("C", 4, 1, extra='<tie type="stop"/>')
        + "</measure>"
    )
    score, diagnostics = parse_musicxml(doc)
    assert len(score.notes) == 2
    messages = [d.message for d in diagnostics]
    assert any("tie stop without a matching start" in m for m in messages)
    assert any("unterminated tie" in m for m in messages)


def test_grace_unpitched_and_out_of_range_are_skipped():
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions></attributes>"
        "<note><grace/><pitch><step>D</step><octave>4</octave></pitch><voice>1</voice></note>"
        "<note><unpitched/><duration>1</duration><voice>1</voice></note>"
        + xml_note("C", 10, 1)
        + xml_note("C", 4, 1)
        + "</measure>"
    )
    score, diagnostics = parse_musicxml(doc)
    assert [(n.pitch, n.onset) for n in score.notes] == [(60, Fraction(2000))]
    kinds = [d.message for d in diagnostics]
    assert any("grace" in m for m in kinds)
    assert any("unpitched" in m for m in kinds)
    assert any("outside MIDI range" in m for m in kinds)


def test_note_without_duration_warns():
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions></attributes>"
        "<note><pitch><step>C</step><octave>4</octave></pitch><voice>1</voice></note>"
        + xml_note("E", 4, 1)
        + "</measure>"
    )
    score, diagnostics = parse_musicxml(doc)
    assert [n.pitch for n in score.notes] == [64]
    assert any("without duration" in d.message for d in diagnostics)


def test_chord_follower_without_leader_warns():
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions></attributes>"
        + xml_note("E", 4, 1, chord=True)
        + "</measure>"
    )
    score, diagnostics = parse_musicxml(doc)
    assert [(n.pitch, n.onset) for n in score.notes] == [(64, Fraction(0))]
    assert any("chord follower" in d.message for d in diagnostics)


def test_rest_breaks_chord_attachment():
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions></attributes>"
        + xml_note("C", 4, 1)
        + "<note><rest/><duration>1</duration><voice>1</voice></note>"
        + xml_note("E", 4, 1, chord=True)
        + "</measure>"
    )
    score, diagnostics = parse_musicxml(doc)
    # The follower warns and lands at the cursor, not on the pre-rest note.
    assert [(n.pitch, n.onset) for n in score.notes] == [
        (60, Fraction(0)),
        (64, Fraction(2000)),
    ]
    assert any("chord follower" in d.message for d in diagnostics)


def test_harmony_annotations():
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions></attributes>"
        "<harmony><root><root-step>D</root-step><root-alter>-1</root-alter></root>"
        "<kind>minor</kind></harmony>"
        + xml_note("C", 4, 2)
        + "<harmony><root><root-step>G</root-step></root><kind>major</kind></harmony>"
        + xml_note("D", 4, 2)
        + "</measure>"
    )
    score, diagnostics = parse_musicxml(doc)
    assert diagnostics == []
    assert [(c.root, c.quality, c.start) for c in score.chord_symbols] == [
        (1, "minor", Fraction(0)),
        (7, "major", Fraction(2000)),
    ]


def test_repeat_warns_once():
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions></attributes>"
        '<barline location="right"><repeat direction="backward"/></barline>'
        + xml_note("C", 4, 1)
        + "</measure>"
        '<measure number="2">'
        '<barline location="right"><repeat direction="backward"/></barline>'
        + xml_note("D", 4, 1)
        + "</measure>"
    )
    _, diagnostics = parse_musicxml(doc)
    repeats = [d for d in diagnostics if "repeat" in d.message]
    assert len(repeats) == 1


def test_two_parts_merge_and_renumber():
    part2 = (
        '<part id="P2"><measure number="1">'
        "<attributes><divisions>1</divisions>"
        "<key><fifths>7</fifths><mode>major</mode></key></attributes>"
        + xml_note("C", 3, 2, voice="1")
        + "</measure></part>"
    )
    doc = wrap(
        '<measure number="1">'
        "<attributes><divisions>1</divisions>"
        "<key><fifths>0</fifths><mode>major</mode></key></attributes>"
        + xml_note("C", 5, 1, voice="2")
        + xml_note("D", 5, 1, voice="10")
        + "</measure>",
        more_parts=part2,
    )
    score, diagnostics = parse_musicxml(doc)
    # Part 1 voices first with numeric label order (2 before 10), then part 2.
    assert [(n.pitch, n.voice) for n in score.notes] == [(48, 2), (72, 0), (74, 1)]
    assert score.voice_count == 3
    # Conflicting key at time zero: first part wins, with a warning.
    assert len(score.keys) == 1 and score.keys[0].tonic == 0
    assert any("conflicting key" in d.message for d in diagnostics)
    # Bar walls come from the first part only.
    assert score.bar_boundaries == (Fraction(0), Fraction(2000))


def test_document_errors():
    with pytest.raises(ParseError):
        parse_musicxml("this is not xml")
    with pytest.raises(ParseError) as excinfo:
        parse_musicxml("<score-timewise/>")
    assert "timewise" in str(excinfo.value)
    with pytest.raises(ParseError):
        parse_musicxml("<opus/>")
    with pytest.raises(ParseError):  # parses but contains no notes
        parse_musicxml(wrap('<measure number="1"/>'))


def test_load_score_dispatches_on_suffix(tmp_path):
    xml_path = tmp_path / "piece.musicxml"
    xml_path.write_text(TWO_MEASURE, encoding="utf-8")
    from_xml, _ = load_score(xml_path)
    assert len(from_xml.notes) == 6

    text_path = tmp_path / "piece.txt"
    text_path.write_text("Note 60 0 0 1000 0\n", encoding="utf-8")
    from_text, _ = load_score(text_path)
    assert [n.pitch for n in from_text.notes] == [60]

    mxl_path = tmp_path / "piece.mxl"
    mxl_path.write_bytes(b"PK\x03\x04junk")
    with pytest.raises(ParseError) as excinfo:
        load_score(mxl_path)
    assert "compressed" in str(excinfo.value)
