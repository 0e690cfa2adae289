"""Regenerate the CSV files under ``datasets/`` from offline-reachable sources.

Sources:
    iris, wine, digits   scikit-learn's bundled copies of the UCI files
    balance              enumerated directly; the UCI Balance Scale file is the
                         full 5**4 grid of (left weight, left distance, right
                         weight, right distance) labelled by torque comparison
    glass, heart         the ``imbalanced_databases`` wheel on PyPI, which ships
                         the original UCI ``glass.data`` and ``SPECTF`` files

Seeds, Car evaluation and Breast tissue are not bundled by any reachable
package; drop them in by hand (see ``datasets/README.md``).
"""

from __future__ import annotations

import argparse
import csv
import gzip
import io
import itertools
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

import sklearn

SKLEARN_DATA = Path(sklearn.__file__).parent / "datasets" / "data"
WHEEL = "imbalanced_databases==0.1.1"


def write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path}")


def sklearn_csv(name: str, target_names: list[str] | None, out: Path, feature_names: list[str]):
    opener = gzip.open if name.endswith(".gz") else open
    with opener(SKLEARN_DATA / name, "rt") as fh:
        reader = csv.reader(fh)
        first = next(reader)
        rows = []
        for row in reader if not name.endswith(".gz") else itertools.chain([first], reader):
            if not row:
                continue
            *feats, label = row
            label = target_names[int(label)] if target_names else str(int(float(label)))
            rows.append([*feats, label])
    write_csv(out, [*feature_names, "class"], rows)


def balance(out: Path) -> None:
    rows = []
    for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
        left, right = lw * ld, rw * rd
        label = "L" if left > right else "R" if right > left else "B"
        rows.append([label, lw, ld, rw, rd])
    write_csv(out, ["class", "left_weight", "left_distance", "right_weight", "right_distance"], rows)


def fetch_wheel(dest: Path) -> Path:
    found = list(dest.glob("imbalanced_databases-*.whl"))
    if not found:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", WHEEL, "-d", str(dest), "-q"],
            check=True,
        )
        found = list(dest.glob("imbalanced_databases-*.whl"))
    return found[0]


def from_wheel(wheel: Path, out_dir: Path) -> None:
    zf = zipfile.ZipFile(wheel)
    read = lambda member: io.TextIOWrapper(zf.open(member)).read()  # noqa: E731

    glass_rows = []
    for line in read("imbalanced_databases/data/glass/glass.data.txt").splitlines():
        if line.strip():
            _id, *feats, label = line.strip().split(",")
            glass_rows.append([*feats, label])
    names = ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe"]
    write_csv(out_dir / "glass.csv", [*names, "class"], glass_rows)

    heart_rows = []
    for part in ("SPECTF.train.txt", "SPECTF.test.txt"):
        for line in read(f"imbalanced_databases/data/spect_f/{part}").splitlines():
            if line.strip():
                heart_rows.append(line.strip().split(","))
    names = [f"F{i // 2 + 1}{'RS' if i % 2 == 0 else 'SS'}" for i in range(44)]
    write_csv(out_dir / "heart.csv", ["class", *names], heart_rows)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "datasets")
    parser.add_argument("--wheel-dir", type=Path, default=None)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    sklearn_csv(
        "iris.csv",
        ["setosa", "versicolor", "virginica"],
        args.out / "iris.csv",
        ["sepal_length", "sepal_width", "petal_length", "petal_width"],
    )
    sklearn_csv(
        "wine_data.csv",
        ["class_1", "class_2", "class_3"],
        args.out / "wine.csv",
        [
            "alcohol", "malic_acid", "ash", "alcalinity_of_ash", "magnesium",
            "total_phenols", "flavanoids", "nonflavanoid_phenols", "proanthocyanins",
            "color_intensity", "hue", "od280_od315", "proline",
        ],
    )
    sklearn_csv("digits.csv.gz", None, args.out / "digits.csv", [f"pixel_{i}" for i in range(64)])
    balance(args.out / "balance.csv")

    with tempfile.TemporaryDirectory() as tmp:
        wheel = fetch_wheel(args.wheel_dir or Path(tmp))
        from_wheel(wheel, args.out)


if __name__ == "__main__":
    main()
