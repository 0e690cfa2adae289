"""Command-line entry point for the cross-validation benchmark.

Exit codes: 0 on success, 1 on a configuration error (including unknown
flags and unknown methods), 2 when an input or output file cannot be used.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .bench import FORMATS, BenchmarkConfig, format_report, run_benchmark
from .classifiers import LpSettings, Method
from .data import DatasetSpec, load_manifest
from .errors import ConfigError, DiscriminantError, ParseError

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ucfda", description="Cross-validated error rates for discriminant classifiers.")
    src = p.add_argument_group("data")
    src.add_argument("--dataset", action="append", default=[], metavar="PATH",
                     help="CSV file (repeatable); features are min-max scaled")
    src.add_argument("--label", default="-1", help="label column name or 0-based index (default: last column)")
    src.add_argument("--manifest", metavar="PATH", help="TOML manifest of [[dataset]] records")
    p.add_argument("--method", nargs="+", default=["all"],
                   help="methods to run, space or comma separated, or 'all'")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r", type=int, default=None, help="number of discriminant directions (default C-1)")
    p.add_argument("--p", type=float, default=1.5, help="exponent for the Lp methods")
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--format", choices=FORMATS, default="markdown")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of standard output")
    p.add_argument("--assumption-tests", action="store_true", help="add Box's M / Levene results per dataset")
    p.add_argument("--per-fold-scaling", action="store_true",
                   help="fit the min-max scaler on each training fold instead of the full dataset")
    return p


def parse_methods(values: Sequence[str]) -> tuple[Method, ...]:
    names = [v for item in values for v in item.split(",") if v.strip()]
    if any(n.strip().lower() == "all" for n in names):
        return tuple(Method)
    methods = []
    for n in names:
        m = Method.parse(n)
        if m not in methods:
            methods.append(m)
    return tuple(methods)


def config_from_args(args: argparse.Namespace) -> BenchmarkConfig:
    specs: list[DatasetSpec] = []
    if args.manifest:
        specs.extend(load_manifest(args.manifest))
    for path in args.dataset:
        specs.append(DatasetSpec(name=Path(path).stem, path=Path(path), label=args.label))
    if not specs:
        raise ConfigError("give --dataset or --manifest")
    return BenchmarkConfig(
        datasets=tuple(specs),
        methods=parse_methods(args.method),
        k=args.folds,
        seed=args.seed,
        r=args.r,
        lp=LpSettings(p=args.p, epsilon=args.epsilon, max_iters=args.max_iters),
        per_fold_scaling=args.per_fold_scaling,
        assumption_tests=args.assumption_tests,
    )


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
        report = run_benchmark(config)
        text = format_report(report, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, DiscriminantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK
