"""Datasets, preprocessing and cross-validation folds."""

from __future__ import annotations

import csv
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    AllColumnsDropped,
    ConfigError,
    EmptyDataset,
    KTooLarge,
    MissingLabelColumn,
    NonNumericFeature,
    ParseError,
)

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with dense integer class ids.

    ``labels`` index into ``class_names``. A subset (a training fold, say)
    keeps the full ``class_names`` of its parent so ids stay comparable, which
    means some classes may have no rows in a subset.
    """

    features: NDArray[np.float64]
    labels: NDArray[np.int64]
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]

    def __post_init__(self):
        x = np.array(self.features, dtype=float)
        y = np.array(self.labels, dtype=np.int64)
        if x.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {x.shape}")
        if y.shape != (x.shape[0],):
            raise ValueError(f"{len(y)} labels for {x.shape[0]} rows")
        if not np.all(np.isfinite(x)):
            raise ValueError("features contain NaN or infinite values")
        if len(self.feature_names) != x.shape[1]:
            raise ValueError("feature_names does not match the number of columns")
        if len(y) and (y.min() < 0 or y.max() >= len(self.class_names)):
            raise ValueError("labels must lie in [0, number of classes)")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @classmethod
    def from_arrays(cls, features: ArrayLike, labels: ArrayLike) -> "LabeledDataset":
        """Build from raw arrays; ``labels`` may be any hashable values."""
        x = np.asarray(features, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        raw = list(np.asarray(labels).tolist())
        names: dict = {}
        for value in raw:
            names.setdefault(value, len(names))
        return cls(
            x,
            np.array([names[v] for v in raw], dtype=np.int64),
            tuple(f"x{j}" for j in range(x.shape[1])),
            tuple(str(k) for k in names),
        )

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, rows: ArrayLike) -> "LabeledDataset":
        idx = np.asarray(rows)
        return LabeledDataset(self.features[idx], self.labels[idx], self.feature_names, self.class_names)

    def with_features(self, features: ArrayLike, names: Sequence[str] | None = None) -> "LabeledDataset":
        return LabeledDataset(
            features, self.labels, tuple(names) if names is not None else self.feature_names, self.class_names
        )


# --- CSV --------------------------------------------------------------------


def load_csv(path: str | Path, label_column: str | int, has_header: bool = True) -> LabeledDataset:
    """Read a comma-separated file with one label column and numeric features.

    ``label_column`` is a header name or a 0-based column index. Class ids
    follow first appearance in the file. Errors report 1-based line and column.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if any(c.strip() for c in row)]
    if not rows:
        raise EmptyDataset(f"{path} has no rows")

    if has_header:
        _, header = rows.pop(0)
        header = [h.strip() for h in header]
    else:
        header = [f"x{j}" for j in range(len(rows[0][1]))] if rows else []
    width = len(header)

    if isinstance(label_column, str) and label_column in header:
        label_idx = header.index(label_column)
    elif isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()):
        label_idx = int(label_column)
        if label_idx < 0:
            label_idx += width
        if not 0 <= label_idx < width:
            raise MissingLabelColumn(f"label column index {label_column} out of range for {width} columns")
    else:
        raise MissingLabelColumn(f"no column named {label_column!r} in {path}")
    if not rows:
        raise EmptyDataset(f"{path} has a header but no data rows")

    features = []
    raw_labels = []
    for line, row in rows:
        if len(row) != width:
            raise ParseError(line, min(len(row), width) + 1, f"expected {width} fields, found {len(row)}")
        values = []
        for col, cell in enumerate(row):
            if col == label_idx:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise NonNumericFeature(line, col + 1, cell) from None
            if not math.isfinite(value):
                raise NonNumericFeature(line, col + 1, cell)
            values.append(value)
        features.append(values)
        raw_labels.append(row[label_idx].strip())

    class_ids: dict[str, int] = {}
    for name in raw_labels:
        class_ids.setdefault(name, len(class_ids))
    feature_names = tuple(h for j, h in enumerate(header) if j != label_idx)
    return LabeledDataset(
        np.array(features, dtype=float).reshape(len(features), width - 1),
        np.array([class_ids[name] for name in raw_labels], dtype=np.int64),
        feature_names,
        tuple(class_ids),
    )


# --- preprocessing ------------------------------------------------------------


@dataclass(frozen=True)
class ScalerParams:
    minimum: NDArray[np.float64]
    maximum: NDArray[np.float64]


def minmax_scale(fit_on: LabeledDataset) -> ScalerParams:
    if fit_on.n_samples == 0:
        raise EmptyDataset("cannot fit a scaler on an empty dataset")
    return ScalerParams(fit_on.features.min(axis=0), fit_on.features.max(axis=0))


def apply_scaler(params: ScalerParams, data: LabeledDataset) -> LabeledDataset:
    """Map each feature to ``(x - min) / (max - min)``; constant features become 0.

    Values outside the fitted range are not clipped.
    """
    span = params.maximum - params.minimum
    constant = span == 0
    scaled = (data.features - params.minimum) / np.where(constant, 1.0, span)
    scaled[:, constant] = 0.0
    return data.with_features(scaled)


def prune_sparse_columns(data: LabeledDataset, min_nonzero: int) -> tuple[LabeledDataset, tuple[str, ...]]:
    """Drop every feature with fewer than ``min_nonzero`` nonzero entries.

    Returns the pruned dataset and the names of the dropped columns.
    """
    if min_nonzero < 0:
        raise ConfigError("min_nonzero must be non-negative")
    counts = np.count_nonzero(data.features, axis=0)
    keep = counts >= min_nonzero
    if not np.any(keep):
        raise AllColumnsDropped(f"every column has fewer than {min_nonzero} nonzero values")
    dropped = tuple(n for n, k in zip(data.feature_names, keep) if not k)
    names = tuple(n for n, k in zip(data.feature_names, keep) if k)
    return data.with_features(data.features[:, keep], names), dropped


# --- folds ------------------------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: NDArray[np.int64]
    seed: int

    def test_indices(self, fold: int) -> NDArray[np.int64]:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> NDArray[np.int64]:
        return np.flatnonzero(self.assignments != fold)

    def splits(self):
        for fold in range(self.k):
            yield self.train_indices(fold), self.test_indices(fold)


def stratified_kfold(data: LabeledDataset, k: int, seed: int = 0) -> FoldPlan:
    """Seeded stratified fold assignment.

    Rows of each class are shuffled with one shared generator, then dealt to
    folds round-robin. The dealing position carries over from one class to
    the next so overall fold sizes also stay within one of each other.
    """
    n = data.n_samples
    if k < 2:
        raise ConfigError("k must be at least 2")
    if k > n:
        raise KTooLarge(f"k = {k} exceeds the number of samples ({n})")
    rng = np.random.default_rng(seed)
    assignments = np.full(n, -1, dtype=np.int64)
    offset = 0
    for cls in range(data.n_classes):
        rows = np.flatnonzero(data.labels == cls)
        if len(rows) == 0:
            continue
        if len(rows) < k:
            log.warning(
                "class %r has %d samples, fewer than k = %d; some folds will not contain it",
                data.class_names[cls], len(rows), k,
            )
        rows = rng.permutation(rows)
        assignments[rows] = (offset + np.arange(len(rows))) % k
        offset = (offset + len(rows)) % k
    assignments.setflags(write=False)
    return FoldPlan(k, assignments, seed)


# --- manifests -------------------------------------------------------------


@dataclass(frozen=True)
class DatasetSpec:
    """One dataset record: where it lives and how to preprocess it.

    ``preprocess`` steps run in order; recognised steps are ``prune:<n>`` and
    ``minmax``.
    """

    name: str
    path: Path
    label: str | int
    header: bool = True
    preprocess: tuple[str, ...] = ("minmax",)
    notes: str = ""


@dataclass(frozen=True)
class PreparedDataset:
    spec: DatasetSpec
    data: LabeledDataset
    dropped_columns: tuple[str, ...] = ()
    deferred_scaling: bool = False


def load_manifest(path: str | Path) -> list[DatasetSpec]:
    """Read a TOML manifest of ``[[dataset]]`` tables.

    Relative dataset paths resolve against the manifest's directory.
    """
    path = Path(path)
    with path.open("rb") as fh:
        doc = tomllib.load(fh)
    records = doc.get("dataset")
    if not isinstance(records, list) or not records:
        raise ConfigError(f"{path} contains no [[dataset]] records")
    specs = []
    for i, rec in enumerate(records):
        missing = {"path", "label"} - set(rec)
        if missing:
            raise ConfigError(f"dataset record {i} in {path} lacks {sorted(missing)}")
        data_path = Path(rec["path"])
        if not data_path.is_absolute():
            data_path = path.parent / data_path
        steps = rec.get("preprocess", ["minmax"])
        for step in steps:
            _check_step(step)
        specs.append(
            DatasetSpec(
                name=str(rec.get("name", data_path.stem)),
                path=data_path,
                label=rec["label"],
                header=bool(rec.get("header", True)),
                preprocess=tuple(steps),
                notes=str(rec.get("notes", "")),
            )
        )
    return specs


def _check_step(step: str) -> None:
    name, _, arg = step.partition(":")
    if name == "minmax" and not arg:
        return
    if name == "prune" and arg.isdigit():
        return
    raise ConfigError(f"unknown preprocessing step {step!r}")


def prepare(spec: DatasetSpec, *, defer_scaling: bool = False) -> PreparedDataset:
    """Load a dataset and run its preprocessing steps.

    With ``defer_scaling`` the ``minmax`` step is skipped here so a caller can
    fit the scaler on each training fold instead.
    """
    data = load_csv(spec.path, spec.label, spec.header)
    dropped: tuple[str, ...] = ()
    deferred = False
    for step in spec.preprocess:
        _check_step(step)
        name, _, arg = step.partition(":")
        if name == "prune":
            data, gone = prune_sparse_columns(data, int(arg))
            dropped += gone
        elif defer_scaling:
            deferred = True
        else:
            data = apply_scaler(minmax_scale(data), data)
    return PreparedDataset(spec, data, dropped, deferred)


def default_spec(path: str | Path, label: str | int) -> DatasetSpec:
    path = Path(path)
    return DatasetSpec(name=path.stem, path=path, label=label)


__all__ = [
    "DatasetSpec",
    "FoldPlan",
    "LabeledDataset",
    "PreparedDataset",
    "ScalerParams",
    "apply_scaler",
    "default_spec",
    "load_csv",
    "load_manifest",
    "minmax_scale",
    "prepare",
    "prune_sparse_columns",
    "stratified_kfold",
]
