"""Benchmark the alignment kernel: compiled extension vs pure Python.

Generates random chord-sequence pairs, times both kernel backends on the
same inputs, checks that their results agree exactly, and prints a table
with the speedup. When the compiled extension is unavailable only the pure
backend is timed.

    python3 benchmarks/bench_dtw.py --sizes 100 300 1000 --repeats 3
"""

from __future__ import annotations

import argparse
import random
import statistics
import time
from fractions import Fraction

from mv2h._dtw import HAVE_NATIVE, run_dtw


def random_chords(rng: random.Random, length: int, max_chord: int) -> list[tuple[int, ...]]:
    return [
        tuple(sorted(rng.randint(48, 84) for _ in range(rng.randint(1, max_chord))))
        for _ in range(length)
    ]


def time_backend(pairs, gap: Fraction, use_native: bool, repeats: int) -> tuple[float, list]:
    timings = []
    results = []
    for _ in range(repeats):
        started = time.perf_counter()
        results = [run_dtw(t, g, gap, use_native=use_native) for t, g in pairs]
        timings.append(time.perf_counter() - started)
    return min(timings), results


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes",
        type=int,
        nargs="+",
        default=[50, 200, 500],
        help="sequence lengths to benchmark (one pair per size)",
    )
    parser.add_argument("--max-chord", type=int, default=4, help="max notes per chord")
    parser.add_argument("--repeats", type=int, default=3, help="timing repetitions; best is kept")
    parser.add_argument("--seed", type=int, default=12)
    parser.add_argument(
        "--gap-penalty", default="3/5", help="insertion/deletion cost (rational)"
    )
    args = parser.parse_args(argv)

    gap = Fraction(args.gap_penalty)
    rng = random.Random(args.seed)

    if not HAVE_NATIVE:
        print("compiled kernel unavailable; timing the pure Python backend only")

    header = f"{'length':>8} {'pure (s)':>12}"
    if HAVE_NATIVE:
        header += f" {'native (s)':>12} {'speedup':>9}"
    print(header)

    for size in args.sizes:
        pairs = [(random_chords(rng, size, args.max_chord), random_chords(rng, size, args.max_chord))]
        pure_time, pure_results = time_backend(pairs, gap, use_native=False, repeats=args.repeats)
        row = f"{size:>8} {pure_time:>12.4f}"
        if HAVE_NATIVE:
            native_time, native_results = time_backend(
                pairs, gap, use_native=True, repeats=args.repeats
            )
            if native_results != pure_results:
                print(f"length {size}: backends disagree")
                return 1
            row += f" {native_time:>12.4f} {pure_time / native_time:>8.1f}x"
        print(row)

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
