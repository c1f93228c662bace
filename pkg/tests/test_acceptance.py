"""Acceptance gate: one test per release criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside pytest's own pass/fail report. Every comparison is exact
rational equality; the only tolerances are the two stated runtime budgets.
"""

import random
import time
from fractions import Fraction

from mv2h import (
    GroupingLevel,
    KeyMode,
    KeySignature,
    MatchMode,
    auto_evaluate,
    build_chord_sequence,
    dtw_align,
    evaluate,
    generate_groupings,
    key_change_score,
    key_score_single,
    parse_interchange_text,
    parse_musicxml,
    serialize_interchange,
)
from helpers import chord, random_score, simple_score


def _report(number: int, description: str) -> None:
    print(f"ACCEPTANCE {number} PASS: {description}")


def test_criterion_1_key_change_worked_example():
    started = time.perf_counter()
    span = 8000
    gt = simple_score(
        [(62, 0, span)],
        keys=((2, KeyMode.MAJOR, 0), (7, KeyMode.MINOR, span // 2)),
    )
    tr = simple_score(
        [(62, 0, span)],
        keys=((2, KeyMode.MAJOR, 0), (7, KeyMode.MAJOR, span // 4)),
    )
    score = key_change_score(tr, gt)
    elapsed = time.perf_counter() - started
    assert score == Fraction(19, 40)
    assert float(score) == 0.475
    assert elapsed < 1.0
    _report(1, f"segmented key comparison = 19/40 = 0.475 in {elapsed * 1000:.1f} ms")


def test_criterion_2_key_table():
    def key(tonic, mode):
        return KeySignature(tonic, mode, 0)

    c_major = key(0, KeyMode.MAJOR)
    cases = [
        (key(0, KeyMode.MAJOR), Fraction(1)),  # exact
        (key(7, KeyMode.MAJOR), Fraction(1, 2)),  # fifth up
        (key(5, KeyMode.MAJOR), Fraction(1, 2)),  # fifth down
        (key(9, KeyMode.MINOR), Fraction(3, 10)),  # relative
        (key(0, KeyMode.MINOR), Fraction(1, 5)),  # parallel
        (key(2, KeyMode.MAJOR), Fraction(0)),  # unrelated
    ]
    for transcribed, expected in cases:
        assert key_score_single(transcribed, c_major) == expected, transcribed
    _report(2, "key relation scores are exactly 1, 1/2, 1/2, 3/10, 1/5, 0")


def test_criterion_3_match_beats_two_gaps_on_disjoint_chords():
    path = dtw_align([chord(0, 60)], [chord(0, 62)], Fraction(3, 5))
    assert path.steps == ((0, 0),)
    assert path.total_cost == Fraction(1)
    assert path.total_cost < 2 * Fraction(3, 5)
    _report(3, "disjoint single chords align as one match: cost 1 < 6/5")


def test_criterion_4_dtw_equals_exhaustive_minimum():
    def exhaustive_minimum(t, g, gap):
        def dist(a, b):
            counts = {}
            for p in a.pitches:
                counts[p] = counts.get(p, 0) + 1
            overlap = 0
            for p in b.pitches:
                if counts.get(p, 0) > 0:
                    counts[p] -= 1
                    overlap += 1
            size = len(a.pitches) + len(b.pitches)
            return Fraction(size - 2 * overlap, size)

        best = [None]

        def recurse(i, j, cost):
            if best[0] is not None and cost >= best[0]:
                return
            if i == len(t) and j == len(g):
                best[0] = cost
                return
            if i < len(t) and j < len(g):
                recurse(i + 1, j + 1, cost + dist(t[i], g[j]))
            if j < len(g):
                recurse(i, j + 1, cost + gap)
            if i < len(t):
                recurse(i + 1, j, cost + gap)

        recurse(0, 0, Fraction(0))
        return best[0]

    started = time.perf_counter()
    rng = random.Random(4)
    gap = Fraction(3, 5)
    pairs = 500
    for _ in range(pairs):
        t = [
            chord(i * 500, *(rng.randint(60, 64) for _ in range(rng.randint(1, 3))))
            for i in range(rng.randint(1, 6))
        ]
        g = [
            chord(i * 500, *(rng.randint(60, 64) for _ in range(rng.randint(1, 3))))
            for i in range(rng.randint(1, 6))
        ]
        assert dtw_align(t, g, gap).total_cost == exhaustive_minimum(t, g, gap)
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    _report(4, f"{pairs} random alignments equal the exhaustive minimum in {elapsed:.1f} s")


def test_criterion_5_self_evaluation_fixed_point():
    rng = random.Random(5)
    runs = 20
    for index in range(runs):
        score = random_score(
            rng,
            force_key_change=index % 2 == 0,
            force_meter_change=index % 3 == 0,
        )
        report = auto_evaluate(score, score)
        assert report.multi_pitch == 1
        assert report.voice == 1
        assert report.meter == 1
        assert report.value == 1
        assert report.harmony == 1
        assert report.mv2h == 1
    _report(5, f"{runs} random scores evaluate to all ones against themselves")


def test_criterion_6_exact_auto_thresholds_vs_tolerant_pre():
    # Identical notes (so automatic remapping is the identity), with the
    # transcription's metrical grid displaced as a whole by 40 ticks.
    notes = [
        (60, 40, 1040),
        (64, 1040, 2040),
        (67, 2040, 3040),
        (72, 3040, 4040),
        (65, 4040, 8000),
    ]
    gt = simple_score(notes, meters=((4, 4, 0),))
    tr_shifted = simple_score(notes, meters=((4, 4, 40),))
    assert auto_evaluate(tr_shifted, gt).meter == 0

    # Any nonzero rational displacement also yields zero matches.
    tr_sliver = simple_score(notes, meters=((4, 4, Fraction(1, 3)),))
    assert auto_evaluate(tr_sliver, gt).meter == 0

    # The same 40-tick displacement sits within the 50-tick window of the
    # shared-timeline mode, where every grouping on both sides matches.
    pre = evaluate(tr_shifted, gt, MatchMode.pre_aligned())
    assert pre.meter == 1
    _report(6, "40-tick grid offset: 0 matches after remap, all matched at 50-tick tolerance")


MUSICXML_TWO_MEASURES = (
    '<score-partwise version="4.0"><part id="P1">'
    '<measure number="1">'
    "<attributes><divisions>2</divisions>"
    "<key><fifths>2</fifths><mode>major</mode></key>"
    "<time><beats>4</beats><beat-type>4</beat-type></time></attributes>"
    "<note><pitch><step>F</step><alter>1</alter><octave>4</octave></pitch>"
    "<duration>4</duration><voice>1</voice></note>"
    "<note><pitch><step>A</step><octave>4</octave></pitch>"
    '<duration>4</duration><voice>1</voice><tie type="start"/></note>'
    "<backup><duration>8</duration></backup>"
    "<note><pitch><step>D</step><octave>3</octave></pitch>"
    "<duration>8</duration><voice>2</voice></note>"
    "<note><chord/><pitch><step>A</step><octave>3</octave></pitch>"
    "<duration>8</duration><voice>2</voice></note>"
    "</measure>"
    '<measure number="2">'
    "<note><pitch><step>A</step><octave>4</octave></pitch>"
    '<duration>2</duration><voice>1</voice><tie type="stop"/></note>'
    "<note><rest/><duration>2</duration><voice>1</voice></note>"
    "<note><pitch><step>G</step><octave>4</octave></pitch>"
    "<duration>4</duration><voice>1</voice></note>"
    "<backup><duration>8</duration></backup>"
    "<note><pitch><step>D</step><octave>3</octave></pitch>"
    "<duration>8</duration><voice>2</voice></note>"
    "</measure>"
    "</part></score-partwise>"
)


def test_criterion_7_musicxml_two_measure_prediction():
    score, diagnostics = parse_musicxml(MUSICXML_TWO_MEASURES)
    assert diagnostics == []

    assert [(n.pitch, n.onset, n.offset, n.voice) for n in score.notes] == [
        (50, 0, 4000, 1),
        (57, 0, 4000, 1),
        (66, 0, 2000, 0),
        (69, 2000, 5000, 0),
        (50, 4000, 8000, 1),
        (67, 6000, 8000, 0),
    ]
    assert score.voice_count == 2
    assert [(k.tonic, k.mode, k.start) for k in score.keys] == [(2, KeyMode.MAJOR, 0)]
    assert [(m.numerator, m.denominator, m.start) for m in score.meters] == [(4, 4, 0)]
    assert score.bar_boundaries == (0, 4000, 8000)

    chords = build_chord_sequence(score)
    assert [(c.onset, c.pitches) for c in chords] == [
        (0, (50, 57, 66)),
        (2000, (69,)),
        (4000, (50,)),
        (6000, (67,)),
    ]

    groupings = generate_groupings(score)
    by_level = {
        level: [(g.start, g.end) for g in groupings if g.level is level]
        for level in GroupingLevel
    }
    assert by_level[GroupingLevel.BAR] == [(0, 4000), (4000, 8000)]
    assert by_level[GroupingLevel.BEAT] == [
        (i * 1000, (i + 1) * 1000) for i in range(8)
    ]
    assert by_level[GroupingLevel.SUB_BEAT] == [
        (i * 500, (i + 1) * 500) for i in range(16)
    ]
    _report(7, "two-measure document parses to the hand-computed score and grid")


def test_criterion_8_disjoint_penalties():
    base_notes = [(60, 0, 1000), (64, 1000, 2000), (67, 2000, 3000), (72, 3000, 4000)]
    gt = simple_score(base_notes, chords=((0, "maj", 0), (7, "maj", 2000)))

    # Mutating one matched note's duration moves value and nothing else.
    mutated = simple_score(
        [(60, 0, 500)] + base_notes[1:], chords=((0, "maj", 0), (7, "maj", 2000))
    )
    clean = auto_evaluate(simple_score(base_notes, chords=((0, "maj", 0), (7, "maj", 2000))), gt)
    dirty = auto_evaluate(mutated, gt)
    assert clean.multi_pitch == dirty.multi_pitch == 1
    assert clean.voice == dirty.voice == 1
    assert clean.meter == dirty.meter == 1
    assert clean.harmony == dirty.harmony == 1
    assert clean.value == 1 and dirty.value == Fraction(3, 4)

    # Deleting the chord symbols moves harmony and nothing else. The keys
    # disagree by a fifth so the key-only fallback is visibly different.
    gt_keyed = simple_score(base_notes, chords=((0, "maj", 0), (7, "maj", 2000)))
    tr_symbols = simple_score(
        base_notes, keys=((7, KeyMode.MAJOR, 0),), chords=((0, "maj", 0), (7, "maj", 2000))
    )
    tr_bare = simple_score(base_notes, keys=((7, KeyMode.MAJOR, 0),))
    with_symbols = auto_evaluate(tr_symbols, gt_keyed)
    without_symbols = auto_evaluate(tr_bare, gt_keyed)
    assert with_symbols.harmony == Fraction(3, 4)  # (key 1/2 + progression 1) / 2
    assert without_symbols.harmony == Fraction(1, 2)  # key comparison alone
    for component in ("multi_pitch", "voice", "meter", "value"):
        assert getattr(with_symbols, component) == getattr(without_symbols, component) == 1
    _report(8, "duration edits move only value; symbol deletion moves only harmony")


def test_criterion_9_interchange_round_trip():
    rng = random.Random(9)
    runs = 100
    for _ in range(runs):
        score = random_score(rng)
        reparsed, diagnostics = parse_interchange_text(serialize_interchange(score))
        assert diagnostics == []
        assert reparsed == score
    _report(9, f"{runs} random scores survive serialize-then-parse unchanged")
