"""Command-line front end.

Subcommands: ``ingest`` turns JSON-lines into a bufferset directory
(typed when a schema is given, inferred otherwise), ``decode`` prints a
bufferset back as JSON-lines, ``validate`` runs the structural checks,
and ``bench`` measures typed vs dynamic build throughput, optionally
writing a CSV plus a PNG chart alongside it.

Exit codes: 0 ok, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import functools
import json
import random
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import datagen, decoder
from .builders import build_schema, compile_filler, fill
from .dynamic import DynamicBuilder, InferenceError
from .handoff import BufferSet


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _iter_lines(source: str):
    if source == "-":
        yield from sys.stdin
    else:
        with open(source, "r", encoding="utf-8") as handle:
            yield from handle


def _cmd_ingest(args) -> int:
    if args.schema is not None:
        try:
            builder = build_schema(Path(args.schema).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            return _fail(f"cannot load schema: {exc}")
        appender = lambda value: fill(builder, value)
    else:
        builder = DynamicBuilder()
        appender = builder.append_value

    try:
        for lineno, line in enumerate(_iter_lines(args.input), start=1):
            if not line.strip():
                continue
            try:
                value = json.loads(line)
            except json.JSONDecodeError as exc:
                return _fail(f"line {lineno}: invalid JSON: {exc}")
            try:
                appender(value)
            except (ValueError, InferenceError) as exc:
                return _fail(f"line {lineno}: {exc}")
    except OSError as exc:
        return _fail(str(exc))

    if args.schema is not None:
        error = builder.validity_error()
        if error is not None:
            return _fail(error)
        bufferset = BufferSet.from_builder(builder)
    else:
        form, buffers, length = builder.snapshot()
        bufferset = BufferSet(form, length, buffers)
    bufferset.write_dir(args.out)
    print(f"wrote {bufferset.length} rows, {len(bufferset.buffers)} buffers to {args.out}",
          file=sys.stderr)
    return 0


def _cmd_decode(args) -> int:
    try:
        bufferset = BufferSet.load_dir(args.dir)
        rows = bufferset.decode()
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    out = sys.stdout
    for row in rows:
        out.write(json.dumps(row, separators=(",", ":")))
        out.write("\n")
    return 0


def _cmd_validate(args) -> int:
    try:
        bufferset = BufferSet.load_dir(args.dir)
    except (OSError, ValueError) as exc:
        print(str(exc))
        return 1
    diagnostics = decoder.check(bufferset.form, bufferset.buffers, bufferset.length)
    if not diagnostics:
        print("ok")
        return 0
    for diagnostic in diagnostics:
        print(diagnostic)
    return 1


@dataclass
class BenchResult:
    rows: int
    depth: int
    seed: int
    reps: int
    typed_rows_per_s: float
    dynamic_rows_per_s: float

    @property
    def ratio(self) -> float | None:
        if self.dynamic_rows_per_s <= 0 or self.typed_rows_per_s <= 0:
            return None
        return self.typed_rows_per_s / self.dynamic_rows_per_s


def run_bench(rows: int, depth: int, seed: int, reps: int) -> BenchResult:
    """Median build throughput for the typed and dynamic paths on the
    same deterministic workload (fill plus hand-off, per repetition)."""
    schema = datagen.bench_form(depth)
    data = datagen.bench_rows(random.Random(seed), rows, depth)
    typed_times = []
    dynamic_times = []
    for _ in range(max(1, reps)):
        start = time.perf_counter()
        builder = build_schema(schema)
        filler = compile_filler(builder)
        for row in data:
            filler(row)
        BufferSet.from_builder(builder)
        typed_times.append(time.perf_counter() - start)

        start = time.perf_counter()
        dyn = DynamicBuilder()
        append = dyn.append_value
        for row in data:
            append(row)
        dyn.snapshot()
        dynamic_times.append(time.perf_counter() - start)

    def throughput(times) -> float:
        median = statistics.median(times)
        return rows / median if median > 0 else 0.0

    return BenchResult(rows, depth, seed, reps,
                       throughput(typed_times), throughput(dynamic_times))


def _write_bench_csv(result: BenchResult, path: Path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["rows", "depth", "seed", "reps",
                         "typed_rows_per_s", "dynamic_rows_per_s", "ratio"])
        ratio = result.ratio
        writer.writerow([result.rows, result.depth, result.seed, result.reps,
                         f"{result.typed_rows_per_s:.1f}",
                         f"{result.dynamic_rows_per_s:.1f}",
                         "n/a" if ratio is None else f"{ratio:.3f}"])


def _write_bench_figure(result: BenchResult, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    labels = ["typed", "dynamic"]
    values = [result.typed_rows_per_s, result.dynamic_rows_per_s]
    ax.bar(labels, values, color=["#2b6cb0", "#c05621"])
    ax.set_ylabel("rows / s")
    ratio = result.ratio
    suffix = "n/a" if ratio is None else f"{ratio:.2f}x"
    ax.set_title(f"build throughput, {result.rows} rows, depth {result.depth} "
                 f"(typed/dynamic = {suffix})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _cmd_bench(args) -> int:
    result = run_bench(args.rows, args.depth, args.seed, args.reps)
    ratio = result.ratio
    print(f"rows: {result.rows}  depth: {result.depth}  seed: {result.seed}  "
          f"reps: {result.reps}")
    print(f"typed:   {result.typed_rows_per_s:12.1f} rows/s")
    print(f"dynamic: {result.dynamic_rows_per_s:12.1f} rows/s")
    print(f"ratio (typed/dynamic): {'n/a' if ratio is None else f'{ratio:.3f}'}")
    if args.csv is not None:
        csv_path = Path(args.csv)
        _write_bench_csv(result, csv_path)
        figure_path = csv_path.with_suffix(".png")
        _write_bench_figure(result, figure_path)
        print(f"report written to {csv_path} and {figure_path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="raggedbuf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="JSON-lines to a bufferset directory")
    ingest.add_argument("--schema", help="form JSON file; omit to infer the layout")
    ingest.add_argument("--out", required=True, help="output directory")
    ingest.add_argument("input", nargs="?", default="-", help="input file (default: stdin)")
    ingest.set_defaults(func=_cmd_ingest)

    decode = sub.add_parser("decode", help="bufferset directory to JSON-lines on stdout")
    decode.add_argument("dir")
    decode.set_defaults(func=_cmd_decode)

    validate = sub.add_parser("validate", help="structural checks on a bufferset directory")
    validate.add_argument("dir")
    validate.set_defaults(func=_cmd_validate)

    bench = sub.add_parser("bench", help="typed vs dynamic build throughput")
    bench.add_argument("--rows", type=int, default=1_000_000)
    bench.add_argument("--depth", type=int, default=2)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--reps", type=int, default=3)
    bench.add_argument("--csv", help="write a one-line CSV report here, plus a PNG chart "
                                     "with the same stem")
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
