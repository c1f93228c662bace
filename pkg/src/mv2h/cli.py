"""Command-line driver: parse score pairs, evaluate, report.

Single-pair mode compares --tr against --gt; batch mode reads a manifest of
pairs and additionally reports per-component means. Output is a six-line
text report or a flat JSON object; --exact prints the underlying rationals
instead of rounded decimals.

Exit codes: 0 success, 1 usage error, 2 parse/read failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .alignment import DEFAULT_GAP_PENALTY
from .ingest import ParseError, load_score
from .metrics import EvaluationReport, MatchMode, auto_evaluate, evaluate
from .model import ScoreError

logger = logging.getLogger("mv2h")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2

COMPONENT_LABELS = (
    ("multi_pitch", "Multi-pitch"),
    ("voice", "Voice"),
    ("meter", "Meter"),
    ("value", "Value"),
    ("harmony", "Harmony"),
    ("mv2h", "MV2H"),
)


class UsageError(ValueError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; usage errors are 1 here."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class RunConfig:
    pairs: tuple[tuple[Path, Path], ...]  # (ground truth, transcription)
    batch: bool
    align: str
    gap_penalty: Fraction
    onset_tolerance: Fraction
    grouping_tolerance: Fraction
    output_format: str
    exact: bool
    verbosity: int


def format_decimal(value: Fraction, places: int = 4) -> str:
    """Fixed-point decimal string, rounding halves away from zero."""
    sign = "-" if value < 0 else ""
    numerator, denominator = abs(value).numerator, abs(value).denominator
    scaled, remainder = divmod(numerator * 10**places, denominator)
    if 2 * remainder >= denominator:
        scaled += 1
    digits = str(scaled).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def render_text(report: EvaluationReport, exact: bool) -> str:
    values = report.as_dict()
    render = str if exact else format_decimal
    return "\n".join(f"{label}: {render(values[key])}" for key, label in COMPONENT_LABELS)


def render_json_object(report: EvaluationReport, exact: bool) -> dict:
    values = report.as_dict()
    return {
        key: str(values[key]) if exact else float(format_decimal(values[key]))
        for key, _ in COMPONENT_LABELS
    }


def _parse_rational(text: str, what: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what} must be a rational number, got {text!r}") from None
    if value < 0:
        raise UsageError(f"{what} must be non-negative, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="mv2h",
        description=(
            "Evaluate a music transcription against a ground-truth score: "
            "multi-pitch, voice, meter, note value and harmony accuracy, "
            "plus their mean (MV2H)."
        ),
    )
    parser.add_argument("--gt", metavar="PATH", help="ground-truth score file")
    parser.add_argument("--tr", metavar="PATH", help="transcription score file")
    parser.add_argument(
        "--batch",
        metavar="MANIFEST",
        help="manifest with one 'ground-truth transcription' path pair per line",
    )
    parser.add_argument(
        "--align",
        choices=("auto", "pre"),
        default="auto",
        help="auto: DTW alignment then exact matching (default); "
        "pre: inputs share a timeline, match with tolerances",
    )
    parser.add_argument(
        "--gap-penalty",
        metavar="RATIONAL",
        default=None,
        help=f"DTW insertion/deletion penalty (default {DEFAULT_GAP_PENALTY})",
    )
    parser.add_argument(
        "--onset-tolerance",
        metavar="MS",
        default=None,
        help="note onset tolerance for --align pre (default 50)",
    )
    parser.add_argument(
        "--grouping-tolerance",
        metavar="MS",
        default=None,
        help="metrical grouping tolerance for --align pre (default 50)",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument(
        "--exact",
        action="store_true",
        help="report exact rationals instead of rounded decimals",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log parse warnings and evaluation diagnostics to stderr",
    )
    return parser


def _read_manifest(path: Path) -> list[tuple[Path, Path]]:
    pairs = []
    for line_number, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(
                f"{path}: line {line_number}: manifest lines take two paths "
                "(ground truth, transcription)"
            )
        pairs.append((Path(fields[0]), Path(fields[1])))
    return pairs


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.batch and (args.gt or args.tr):
        raise UsageError("--batch excludes --gt/--tr")
    if not args.batch and not (args.gt and args.tr):
        raise UsageError("either --batch or both --gt and --tr are required")
    if args.align == "auto" and (
        args.onset_tolerance is not None or args.grouping_tolerance is not None
    ):
        raise UsageError(
            "--align auto matches exactly after remapping; "
            "tolerances apply to --align pre only"
        )
    gap = (
        DEFAULT_GAP_PENALTY
        if args.gap_penalty is None
        else _parse_rational(args.gap_penalty, "--gap-penalty")
    )
    onset = (
        Fraction(50)
        if args.onset_tolerance is None
        else _parse_rational(args.onset_tolerance, "--onset-tolerance")
    )
    grouping = (
        Fraction(50)
        if args.grouping_tolerance is None
        else _parse_rational(args.grouping_tolerance, "--grouping-tolerance")
    )
    if args.batch:
        pairs = tuple(_read_manifest(Path(args.batch)))
        if not pairs:
            raise UsageError(f"manifest {args.batch} lists no pairs")
    else:
        pairs = ((Path(args.gt), Path(args.tr)),)
    return RunConfig(
        pairs=pairs,
        batch=bool(args.batch),
        align=args.align,
        gap_penalty=gap,
        onset_tolerance=onset,
        grouping_tolerance=grouping,
        output_format=args.format,
        exact=args.exact,
        verbosity=args.verbose,
    )


def _load(path: Path, config: RunConfig):
    score, diagnostics = load_score(path)
    for diagnostic in diagnostics:
        if diagnostic.severity == "error" or config.verbosity:
            print(f"{path}: {diagnostic}", file=sys.stderr)
    return score


def evaluate_pair(gt_path: Path, tr_path: Path, config: RunConfig) -> EvaluationReport:
    ground_truth = _load(gt_path, config)
    transcription = _load(tr_path, config)
    if config.align == "auto":
        report = auto_evaluate(transcription, ground_truth, config.gap_penalty)
    else:
        mode = MatchMode.pre_aligned(
            onset_tolerance=config.onset_tolerance,
            grouping_tolerance=config.grouping_tolerance,
        )
        report = evaluate(transcription, ground_truth, mode)
    if config.verbosity:
        for note in report.diagnostics:
            print(f"{tr_path}: {note}", file=sys.stderr)
    return report


def mean_report(reports: list[EvaluationReport]) -> EvaluationReport:
    count = len(reports)
    means = [
        sum((r.as_dict()[key] for r in reports), Fraction(0)) / count
        for key, _ in COMPONENT_LABELS[:-1]
    ]
    return EvaluationReport.from_components(*means)


def run(config: RunConfig) -> int:
    batch = config.batch
    reports: list[tuple[Path, Path, EvaluationReport]] = []
    failed = False
    for gt_path, tr_path in config.pairs:
        try:
            report = evaluate_pair(gt_path, tr_path, config)
        except (OSError, ParseError, ScoreError) as exc:
            print(f"error: {gt_path} vs {tr_path}: {exc}", file=sys.stderr)
            if isinstance(exc, ParseError):
                for diagnostic in exc.diagnostics:
                    print(f"  {diagnostic}", file=sys.stderr)
            failed = True
            continue
        reports.append((gt_path, tr_path, report))

    if config.output_format == "json":
        _emit_json(reports, batch, config)
    else:
        _emit_text(reports, batch, config)
    return EXIT_PARSE if failed else EXIT_OK


def _emit_text(reports, batch: bool, config: RunConfig) -> None:
    blocks = []
    for gt_path, tr_path, report in reports:
        lines = []
        if batch:
            lines.append(f"{gt_path}\t{tr_path}")
        lines.append(render_text(report, config.exact))
        blocks.append("\n".join(lines))
    if batch and reports:
        mean = mean_report([r for _, _, r in reports])
        blocks.append(f"Mean over {len(reports)} pairs:\n{render_text(mean, config.exact)}")
    if blocks:
        print("\n\n".join(blocks))


def _emit_json(reports, batch: bool, config: RunConfig) -> None:
    if not batch:
        if reports:
            print(json.dumps(render_json_object(reports[0][2], config.exact), indent=2))
        return
    payload: dict = {
        "reports": [
            {
                "ground_truth": str(gt_path),
                "transcription": str(tr_path),
                **render_json_object(report, config.exact),
            }
            for gt_path, tr_path, report in reports
        ]
    }
    if reports:
        payload["mean"] = render_json_object(
            mean_report([r for _, _, r in reports]), config.exact
        )
    print(json.dumps(payload, indent=2))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
    except UsageError as exc:
        print(f"mv2h: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError) as exc:
        print(f"mv2h: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
