"""Score file ingestion: MusicXML and the plain-text interchange format."""

from __future__ import annotations

from pathlib import Path

from ..model import Score
from .diagnostics import ParseDiagnostic, ParseError
from .interchange import parse_chord_label, parse_interchange_text, serialize_interchange
from .musicxml import parse_musicxml

MUSICXML_SUFFIXES = (".xml", ".musicxml", ".mxl")

__all__ = [
    "MUSICXML_SUFFIXES",
    "ParseDiagnostic",
    "ParseError",
    "load_score",
    "parse_chord_label",
    "parse_interchange_text",
    "parse_musicxml",
    "serialize_interchange",
]


def load_score(path: str | Path) -> tuple[Score, list[ParseDiagnostic]]:
    """Read and parse a score file, choosing the parser by suffix.

    .xml/.musicxml parse as MusicXML; anything else as interchange text.
    Raises ParseError on malformed content and OSError on unreadable files.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".mxl":
        raise ParseError(
            f"{path}: compressed MusicXML (.mxl) is not supported; unzip it first",
            [ParseDiagnostic("error", str(path), "compressed MusicXML is not supported")],
        )
    data = path.read_bytes()
    if suffix in MUSICXML_SUFFIXES:
        return parse_musicxml(data)
    return parse_interchange_text(data.decode("utf-8"))
