"""Convert the raw UCI Seeds and Car files into the CSV layout the manifests expect.

    python scripts/convert_uci.py seeds path/to/seeds_dataset.txt datasets/seeds.csv
    python scripts/convert_uci.py car path/to/car.data datasets/car.csv

Car's categorical attributes are encoded as ordinal integers in their natural
order (low to high), which is the encoding the manifest assumes.
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

SEEDS_COLUMNS = ["area", "perimeter", "compactness", "kernel_length", "kernel_width", "asymmetry", "groove_length"]

CAR_LEVELS = {
    "buying": ["low", "med", "high", "vhigh"],
    "maint": ["low", "med", "high", "vhigh"],
    "doors": ["2", "3", "4", "5more"],
    "persons": ["2", "4", "more"],
    "lug_boot": ["small", "med", "big"],
    "safety": ["low", "med", "high"],
}


def convert_seeds(src: Path, dst: Path) -> int:
    rows = [line.split() for line in src.read_text().splitlines() if line.strip()]
    with dst.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SEEDS_COLUMNS + ["class"])
        for r in rows:
            if len(r) != 8:
                raise ValueError(f"expected 8 fields, got {len(r)}: {r}")
            w.writerow(r)
    return len(rows)


def convert_car(src: Path, dst: Path) -> int:
    rows = [line.strip().split(",") for line in src.read_text().splitlines() if line.strip()]
    names = list(CAR_LEVELS)
    with dst.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["class"])
        for r in rows:
            codes = [CAR_LEVELS[n].index(v) for n, v in zip(names, r[:6])]
            w.writerow(codes + [r[6]])
    return len(rows)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("dataset", choices=["seeds", "car"])
    p.add_argument("source", type=Path)
    p.add_argument("dest", type=Path)
    args = p.parse_args()
    n = (convert_seeds if args.dataset == "seeds" else convert_car)(args.source, args.dest)
    print(f"wrote {n} rows to {args.dest}")


if __name__ == "__main__":
    main()
