"""Score-to-score music transcription evaluation.

Compares a transcribed score against a ground truth and reports five
component accuracies (multi-pitch, voice, meter, note value, harmony) plus
their mean. Inputs either share a timeline already (performance-aligned
data) or are aligned automatically by dynamic time warping over chord
sequences. All scoring arithmetic is exact.
"""

from ._dtw import HAVE_NATIVE
from .alignment import (
    DEFAULT_GAP_PENALTY,
    AlignmentPath,
    AnchorSet,
    TimeMap,
    chord_distance,
    dtw_align,
    extract_anchors,
    map_score_times,
    remap_times,
)
from .groupings import MissingMeterError, beat_layout, generate_groupings, nominal_bar_length
from .ingest import (
    ParseDiagnostic,
    ParseError,
    load_score,
    parse_interchange_text,
    parse_musicxml,
    serialize_interchange,
)
from .metrics import (
    EvaluationReport,
    MatchKind,
    MatchMode,
    NoteMatching,
    auto_evaluate,
    chord_progression_score,
    evaluate,
    f_measure,
    harmony_score,
    key_change_score,
    key_score_single,
    match_notes,
    meter_score,
    multi_pitch_score,
    value_score,
    voice_score,
)
from .model import (
    TICKS_PER_QUARTER,
    Chord,
    ChordSymbol,
    Grouping,
    GroupingLevel,
    KeyMode,
    KeySection,
    KeySignature,
    Note,
    Score,
    ScoreError,
    Time,
    TimeSignature,
    build_chord_sequence,
    continuous_key_sections,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentPath",
    "AnchorSet",
    "Chord",
    "ChordSymbol",
    "DEFAULT_GAP_PENALTY",
    "EvaluationReport",
    "Grouping",
    "GroupingLevel",
    "HAVE_NATIVE",
    "KeyMode",
    "KeySection",
    "KeySignature",
    "MatchKind",
    "MatchMode",
    "MissingMeterError",
    "Note",
    "NoteMatching",
    "ParseDiagnostic",
    "ParseError",
    "Score",
    "ScoreError",
    "TICKS_PER_QUARTER",
    "Time",
    "TimeMap",
    "TimeSignature",
    "auto_evaluate",
    "beat_layout",
    "build_chord_sequence",
    "chord_distance",
    "chord_progression_score",
    "continuous_key_sections",
    "dtw_align",
    "evaluate",
    "extract_anchors",
    "f_measure",
    "generate_groupings",
    "harmony_score",
    "key_change_score",
    "key_score_single",
    "load_score",
    "map_score_times",
    "match_notes",
    "meter_score",
    "multi_pitch_score",
    "nominal_bar_length",
    "parse_interchange_text",
    "parse_musicxml",
    "remap_times",
    "serialize_interchange",
    "value_score",
    "voice_score",
]
