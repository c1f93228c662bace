"""Shared diagnostic types for score ingestion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class ParseDiagnostic:
    """One parser finding: severity is "warning" or "error", location names
    the offending spot ("line 12", "part 2, measure 5", "document")."""

    severity: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.location}: {self.message}"


class ParseError(ValueError):
    """Input could not be parsed into a valid score.

    Carries every diagnostic collected before giving up, errors and
    warnings alike, so callers can report all problems at once.
    """

    def __init__(self, message: str, diagnostics: Iterable[ParseDiagnostic] = ()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)
