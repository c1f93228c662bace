"""The five transcription-accuracy components and their aggregate.

Multi-pitch, Voice, Meter, Value and Harmony are each scored in [0, 1] on a
shared timeline; the aggregate is their arithmetic mean. Mistakes are
penalised where they belong: a wrong duration hurts Value but not
Multi-pitch, a missing chord symbol hurts Harmony only, and so on.

`evaluate` scores a pair already on one timeline (performance-aligned input
or a remapped transcription); `auto_evaluate` runs the full pipeline:
chord-sequence DTW, anchor extraction, time remapping, then exact-tolerance
evaluation.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .alignment import DEFAULT_GAP_PENALTY, TimeMap, dtw_align, extract_anchors, map_score_times
from .groupings import MissingMeterError, generate_groupings
from .model import (
    Grouping,
    KeyMode,
    KeySignature,
    Note,
    Score,
    ScoreError,
    Time,
    active_chord_symbol,
    build_chord_sequence,
    continuous_key_sections,
    exact_fraction,
)


class MatchKind(Enum):
    PRE_ALIGNED = "pre_aligned"
    AUTO_ALIGNED = "auto_aligned"


@dataclass(frozen=True)
class MatchMode:
    """Matching tolerances for one evaluation.

    Auto-aligned evaluation trusts the remapping and matches exactly (all
    tolerances zero); pre-aligned evaluation of performance data allows the
    configured slack. A matched note's duration may deviate by
    `duration_tolerance_ratio` of the reference duration, but never less
    than `duration_tolerance_floor` (short notes would otherwise get a
    near-zero allowance).
    """

    kind: MatchKind
    onset_tolerance: Time = Fraction(0)
    grouping_tolerance: Time = Fraction(0)
    duration_tolerance_ratio: Fraction = Fraction(0)
    duration_tolerance_floor: Time = Fraction(0)

    def __post_init__(self) -> None:
        for name in (
            "onset_tolerance",
            "grouping_tolerance",
            "duration_tolerance_ratio",
            "duration_tolerance_floor",
        ):
            value = exact_fraction(getattr(self, name), name)
            if value < 0:
                raise ScoreError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, value)
        if self.kind is MatchKind.AUTO_ALIGNED:
            if (
                self.onset_tolerance
                or self.grouping_tolerance
                or self.duration_tolerance_ratio
                or self.duration_tolerance_floor
            ):
                raise ScoreError("auto-aligned matching is exact; tolerances must be 0")

    @classmethod
    def auto_aligned(cls) -> MatchMode:
        return cls(MatchKind.AUTO_ALIGNED)

    @classmethod
    def pre_aligned(
        cls,
        onset_tolerance: Time | int = 50,
        grouping_tolerance: Time | int = 50,
        duration_tolerance_ratio: Fraction = Fraction(1, 2),
        duration_tolerance_floor: Time | int = 50,
    ) -> MatchMode:
        return cls(
            MatchKind.PRE_ALIGNED,
            onset_tolerance=onset_tolerance,
            grouping_tolerance=grouping_tolerance,
            duration_tolerance_ratio=duration_tolerance_ratio,
            duration_tolerance_floor=duration_tolerance_floor,
        )


@dataclass(frozen=True)
class NoteMatching:
    """One-to-one pairing of transcription and ground-truth notes."""

    pairs: tuple[tuple[Note, Note], ...]
    unmatched_transcription: tuple[Note, ...]
    unmatched_ground_truth: tuple[Note, ...]


@dataclass(frozen=True)
class EvaluationReport:
    multi_pitch: Fraction
    voice: Fraction
    meter: Fraction
    value: Fraction
    harmony: Fraction
    mv2h: Fraction
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        components = (self.multi_pitch, self.voice, self.meter, self.value, self.harmony)
        for value in components + (self.mv2h,):
            if not 0 <= value <= 1:
                raise ScoreError(f"component score {value} outside [0, 1]")
        if self.mv2h * 5 != sum(components):
            raise ScoreError("mv2h is not the mean of the five components")

    @classmethod
    def from_components(
        cls,
        multi_pitch: Fraction,
        voice: Fraction,
        meter: Fraction,
        value: Fraction,
        harmony: Fraction,
        diagnostics: tuple[str, ...] = (),
    ) -> EvaluationReport:
        total = multi_pitch + voice + meter + value + harmony
        return cls(
            multi_pitch,
            voice,
            meter,
            value,
            harmony,
            total / 5,
            diagnostics,
        )

    def as_dict(self) -> dict[str, Fraction]:
        return {
            "multi_pitch": self.multi_pitch,
            "voice": self.voice,
            "meter": self.meter,
            "value": self.value,
            "harmony": self.harmony,
            "mv2h": self.mv2h,
        }


def f_measure(tp: int, fp: int, fn: int) -> Fraction:
    """F1 from counts; 1 by convention when there is nothing on either side."""
    if tp == fp == fn == 0:
        return Fraction(1)
    return Fraction(2 * tp, 2 * tp + fp + fn)


def match_notes(transcription: Score, ground_truth: Score, mode: MatchMode) -> NoteMatching:
    """Pair equal-pitch notes whose onsets differ at most the onset tolerance.

    Per pitch, both onset-sorted sequences are swept in order, pairing the
    current heads when they are close enough and advancing the earlier side
    otherwise; for interval (threshold) matching on a line this yields a
    maximum-cardinality one-to-one matching, and at zero tolerance it
    reduces to in-order pairing of exactly equal onsets.
    """
    tolerance = mode.onset_tolerance
    by_pitch_t: dict[int, list[Note]] = {}
    for note in transcription.notes:  # score order is onset-sorted
        by_pitch_t.setdefault(note.pitch, []).append(note)
    by_pitch_g: dict[int, list[Note]] = {}
    for note in ground_truth.notes:
        by_pitch_g.setdefault(note.pitch, []).append(note)

    pairs: list[tuple[Note, Note]] = []
    matched_t: set[int] = set()
    matched_g: set[int] = set()
    for pitch in sorted(by_pitch_t.keys() & by_pitch_g.keys()):
        t_notes = by_pitch_t[pitch]
        g_notes = by_pitch_g[pitch]
        i = j = 0
        while i < len(t_notes) and j < len(g_notes):
            delta = t_notes[i].onset - g_notes[j].onset
            if -tolerance <= delta <= tolerance:
                pairs.append((t_notes[i], g_notes[j]))
                matched_t.add(id(t_notes[i]))
                matched_g.add(id(g_notes[j]))
                i += 1
                j += 1
            elif delta < 0:
                i += 1
            else:
                j += 1
    pairs.sort(key=lambda p: (p[0].onset, p[0].pitch, p[0].voice, p[0].offset))
    return NoteMatching(
        tuple(pairs),
        tuple(n for n in transcription.notes if id(n) not in matched_t),
        tuple(n for n in ground_truth.notes if id(n) not in matched_g),
    )


def multi_pitch_score(matching: NoteMatching) -> Fraction:
    return f_measure(
        len(matching.pairs),
        len(matching.unmatched_transcription),
        len(matching.unmatched_ground_truth),
    )


def _voice_links(score: Score) -> list[tuple[Note, Note]]:
    """Ordered pairs of consecutive notes within each voice (same-onset
    neighbours included; order is the canonical note order)."""
    by_voice: dict[int, list[Note]] = {}
    for note in score.notes:
        by_voice.setdefault(note.voice, []).append(note)
    links: list[tuple[Note, Note]] = []
    for voice in sorted(by_voice):
        sequence = by_voice[voice]
        links.extend(zip(sequence, sequence[1:]))
    return links


def voice_score(matching: NoteMatching, transcription: Score, ground_truth: Score) -> Fraction:
    """F1 over voice links: a transcription link is correct when both its
    notes are matched and their partners are consecutive in one
    ground-truth voice."""
    partner = {id(t): g for t, g in matching.pairs}
    t_links = _voice_links(transcription)
    g_links = _voice_links(ground_truth)
    g_link_ids = {(id(a), id(b)) for a, b in g_links}
    hit: set[tuple[int, int]] = set()
    tp = fp = 0
    for a, b in t_links:
        pa = partner.get(id(a))
        pb = partner.get(id(b))
        if pa is not None and pb is not None and (id(pa), id(pb)) in g_link_ids:
            tp += 1
            hit.add((id(pa), id(pb)))
        else:
            fp += 1
    fn = sum(1 for a, b in g_links if (id(a), id(b)) not in hit)
    return f_measure(tp, fp, fn)


def _match_groupings(
    t_groups: list[Grouping], g_groups: list[Grouping], tolerance: Time
) -> int:
    """One-to-one grouping matches, any level against any level."""
    if tolerance == 0:
        t_counts = Counter((g.start, g.end) for g in t_groups)
        g_counts = Counter((g.start, g.end) for g in g_groups)
        return sum(min(count, g_counts[key]) for key, count in t_counts.items())
    order = sorted(range(len(g_groups)), key=lambda gi: g_groups[gi].start)
    g_starts = [g_groups[gi].start for gi in order]
    candidates: list[tuple[Time, int, int]] = []
    for ti, tg in enumerate(t_groups):
        lo = bisect_left(g_starts, tg.start - tolerance)
        hi = bisect_right(g_starts, tg.start + tolerance)
        for gi in order[lo:hi]:
            gg = g_groups[gi]
            if abs(gg.end - tg.end) <= tolerance:
                candidates.append(
                    (abs(gg.start - tg.start) + abs(gg.end - tg.end), ti, gi)
                )
    candidates.sort()
    used_t: set[int] = set()
    used_g: set[int] = set()
    tp = 0
    for _, ti, gi in candidates:
        if ti in used_t or gi in used_g:
            continue
        used_t.add(ti)
        used_g.add(gi)
        tp += 1
    return tp


def meter_score(
    transcription: Score,
    ground_truth: Score,
    mode: MatchMode,
    *,
    transcription_groupings: list[Grouping] | None = None,
    ground_truth_groupings: list[Grouping] | None = None,
    diagnostics: list[str] | None = None,
) -> Fraction:
    """F1 over metrical groupings; both endpoints must fall within the
    grouping tolerance. A score without a time signature scores 0."""
    try:
        t_groups = (
            transcription_groupings
            if transcription_groupings is not None
            else generate_groupings(transcription)
        )
        g_groups = (
            ground_truth_groupings
            if ground_truth_groupings is not None
            else generate_groupings(ground_truth)
        )
    except MissingMeterError as exc:
        if diagnostics is not None:
            diagnostics.append(f"meter: {exc}")
        return Fraction(0)
    tp = _match_groupings(t_groups, g_groups, mode.grouping_tolerance)
    return f_measure(tp, len(t_groups) - tp, len(g_groups) - tp)


def value_score(matching: NoteMatching, mode: MatchMode) -> Fraction:
    """Share of matched notes whose duration deviates at most the allowance
    max(ratio * reference duration, floor); vacuously 1 with no matches."""
    if not matching.pairs:
        return Fraction(1)
    hits = 0
    for t_note, g_note in matching.pairs:
        allowed = max(
            mode.duration_tolerance_ratio * g_note.duration,
            mode.duration_tolerance_floor,
        )
        if abs(t_note.duration - g_note.duration) <= allowed:
            hits += 1
    return Fraction(hits, len(matching.pairs))


def key_score_single(transcribed: KeySignature, ground_truth: KeySignature) -> Fraction:
    """Partial-credit key comparison: 1 exact, 1/2 a perfect fifth off in
    the same mode (either direction), 3/10 the relative key, 1/5 the
    parallel key, 0 otherwise."""
    same_tonic = transcribed.tonic == ground_truth.tonic
    same_mode = transcribed.mode == ground_truth.mode
    if same_tonic and same_mode:
        return Fraction(1)
    if same_mode and (transcribed.tonic - ground_truth.tonic) % 12 in (5, 7):
        return Fraction(1, 2)
    if not same_mode:
        # The relative minor's tonic sits three semitones below the major's.
        if ground_truth.mode is KeyMode.MAJOR:
            relative = (ground_truth.tonic + 9) % 12
            is_relative = transcribed.mode is KeyMode.MINOR and transcribed.tonic == relative
        else:
            relative = (ground_truth.tonic + 3) % 12
            is_relative = transcribed.mode is KeyMode.MAJOR and transcribed.tonic == relative
        if is_relative:
            return Fraction(3, 10)
        if same_tonic:
            return Fraction(1, 5)
    return Fraction(0)


def key_change_score(
    transcription: Score,
    ground_truth: Score,
    *,
    diagnostics: list[str] | None = None,
) -> Fraction:
    """Duration-weighted mean of per-section key scores over the ground
    truth's note span; 0 with a diagnostic when keys are missing."""

    def fail(message: str) -> Fraction:
        if diagnostics is not None:
            diagnostics.append(f"harmony: {message}")
        return Fraction(0)

    if ground_truth.span is None:
        return fail("ground truth has no notes")
    if not ground_truth.keys:
        return fail("ground truth has no key annotation")
    if not transcription.keys:
        return fail("transcription has no key annotation")
    sections = continuous_key_sections(transcription, ground_truth)
    start, end = ground_truth.span
    weighted = sum(
        (
            key_score_single(s.transcription_key, s.ground_truth_key) * (s.end - s.start)
            for s in sections
        ),
        Fraction(0),
    )
    return weighted / (end - start)


def chord_progression_score(transcription: Score, ground_truth: Score) -> Fraction | None:
    """Fraction of the ground-truth note span on which the active chord
    symbols agree; None when either score has no symbols at all.

    Agreement follows ChordSymbol.matches; before the first symbol of both
    scores, two absent symbols agree.
    """
    if not transcription.chord_symbols or not ground_truth.chord_symbols:
        return None
    span = ground_truth.span
    if span is None:
        return None
    start, end = span
    cuts = {start, end}
    for score in (transcription, ground_truth):
        cuts.update(c.start for c in score.chord_symbols if start < c.start < end)
    bounds = sorted(cuts)
    matched = Fraction(0)
    for a, b in zip(bounds, bounds[1:]):
        t_sym = active_chord_symbol(transcription.chord_symbols, a)
        g_sym = active_chord_symbol(ground_truth.chord_symbols, a)
        if t_sym is None and g_sym is None:
            agree = True
        elif t_sym is None or g_sym is None:
            agree = False
        else:
            agree = t_sym.matches(g_sym)
        if agree:
            matched += b - a
    return matched / (end - start)


def harmony_score(
    transcription: Score,
    ground_truth: Score,
    *,
    diagnostics: list[str] | None = None,
) -> Fraction:
    """Mean of the key-change and chord-progression scores; the key score
    alone when chord symbols are absent."""
    key = key_change_score(transcription, ground_truth, diagnostics=diagnostics)
    chords = chord_progression_score(transcription, ground_truth)
    if chords is None:
        return key
    return (key + chords) / 2


def evaluate(
    transcription: Score,
    ground_truth: Score,
    mode: MatchMode,
    *,
    transcription_groupings: list[Grouping] | None = None,
    ground_truth_groupings: list[Grouping] | None = None,
) -> EvaluationReport:
    """Score a transcription against a ground truth on a shared timeline.

    For auto-aligned mode the transcription must already be remapped (see
    `auto_evaluate`); groupings generated on the original timeline can be
    passed in so their remapped boundaries are compared instead of a grid
    regenerated on the warped timeline.
    """
    diagnostics: list[str] = []
    matching = match_notes(transcription, ground_truth, mode)
    return EvaluationReport.from_components(
        multi_pitch_score(matching),
        voice_score(matching, transcription, ground_truth),
        meter_score(
            transcription,
            ground_truth,
            mode,
            transcription_groupings=transcription_groupings,
            ground_truth_groupings=ground_truth_groupings,
            diagnostics=diagnostics,
        ),
        value_score(matching, mode),
        harmony_score(transcription, ground_truth, diagnostics=diagnostics),
        diagnostics=tuple(diagnostics),
    )


def auto_evaluate(
    transcription: Score,
    ground_truth: Score,
    gap_penalty: Fraction = DEFAULT_GAP_PENALTY,
) -> EvaluationReport:
    """Full pipeline: chord DTW, anchor extraction, exact remapping onto the
    ground-truth timeline, then zero-tolerance evaluation.

    The transcription's metrical grid is generated on its own timeline and
    each boundary is remapped, so warping cannot redistribute beats inside
    a bar.
    """
    t_chords = build_chord_sequence(transcription)
    g_chords = build_chord_sequence(ground_truth)
    path = dtw_align(t_chords, g_chords, gap_penalty)
    anchors = extract_anchors(path, t_chords, g_chords)
    time_map = TimeMap.from_anchors(anchors, transcription.span, ground_truth.span)
    try:
        t_groupings = [
            Grouping(g.level, time_map(g.start), time_map(g.end))
            for g in generate_groupings(transcription)
        ]
    except MissingMeterError:
        t_groupings = None  # meter_score reports the diagnostic
    remapped = map_score_times(transcription, time_map)
    return evaluate(
        remapped,
        ground_truth,
        MatchMode.auto_aligned(),
        transcription_groupings=t_groupings,
    )
