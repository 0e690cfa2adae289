"""Cross-validated error rates for every (dataset, method) pair, plus report rendering."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .assumptions import TestReport, check_assumptions
from .classifiers import FitConfig, LpSettings, Method, fit, parameter_count, predict
from .data import DatasetSpec, apply_scaler, minmax_scale, prepare, stratified_kfold
from .errors import ConfigError, DiscriminantError

FORMATS = ("markdown", "csv", "json")


@dataclass(frozen=True)
class BenchmarkConfig:
    datasets: tuple[DatasetSpec, ...]
    methods: tuple[Method, ...]
    k: int = 5
    seed: int = 0
    r: int | None = None
    lp: LpSettings = field(default_factory=LpSettings)
    normalization: str = "within-sphered"
    per_fold_scaling: bool = False
    assumption_tests: bool = False

    def __post_init__(self):
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "methods", tuple(Method.parse(m) for m in self.methods))
        if not self.methods:
            raise ConfigError("at least one method is required")
        if not self.datasets:
            raise ConfigError("at least one dataset is required")
        if self.k < 2:
            raise ConfigError("k must be at least 2")
        if self.r is not None and self.r < 1:
            raise ConfigError("r must be at least 1")

    def fit_config(self) -> FitConfig:
        return FitConfig(r=self.r, normalization=self.normalization, lp=self.lp)


@dataclass(frozen=True)
class CellResult:
    """One table cell. ``error_rate`` is None (NA) exactly when ``reason`` is set."""

    dataset: str
    method: Method
    error_rate: float | None
    misclassified: int | None
    n_samples: int
    parameter_count: int
    reason: str | None = None
    wall_time: float = 0.0

    @property
    def is_na(self) -> bool:
        return self.error_rate is None

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "method": self.method.value,
            "error_rate": self.error_rate,
            "misclassified": self.misclassified,
            "n_samples": self.n_samples,
            "parameter_count": self.parameter_count,
            "reason": self.reason,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CellResult":
        return cls(
            dataset=d["dataset"],
            method=Method.parse(d["method"]),
            error_rate=d["error_rate"],
            misclassified=d["misclassified"],
            n_samples=int(d["n_samples"]),
            parameter_count=int(d["parameter_count"]),
            reason=d.get("reason"),
            wall_time=float(d.get("wall_time", 0.0)),
        )


@dataclass(frozen=True)
class BenchmarkReport:
    datasets: tuple[str, ...]
    methods: tuple[Method, ...]
    cells: tuple[CellResult, ...]
    assumptions: dict[str, TestReport | None] = field(default_factory=dict)
    assumption_errors: dict[str, str] = field(default_factory=dict)
    k: int = 5
    seed: int = 0

    def cell(self, dataset: str, method: "Method | str") -> CellResult:
        method = Method.parse(method)
        for c in self.cells:
            if c.dataset == dataset and c.method is method:
                return c
        raise KeyError((dataset, method.value))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "datasets": list(self.datasets),
            "methods": [m.value for m in self.methods],
            "cells": [c.to_dict() for c in self.cells],
            "assumptions": {k: (v.to_dict() if v else None) for k, v in self.assumptions.items()},
            "assumption_errors": dict(self.assumption_errors),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkReport":
        return cls(
            datasets=tuple(d["datasets"]),
            methods=tuple(Method.parse(m) for m in d["methods"]),
            cells=tuple(CellResult.from_dict(c) for c in d["cells"]),
            assumptions={k: (TestReport.from_dict(v) if v else None) for k, v in d.get("assumptions", {}).items()},
            assumption_errors=dict(d.get("assumption_errors", {})),
            k=int(d.get("k", 5)),
            seed=int(d.get("seed", 0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BenchmarkReport":
        return cls.from_dict(json.loads(text))


def _reason(exc: DiscriminantError) -> str:
    return f"{type(exc).__name__}: {exc}"


def _run_cell(prepared, method: Method, config: BenchmarkConfig, plan) -> CellResult:
    data = prepared.data
    name = prepared.spec.name
    C = len(np.unique(data.labels))
    r = config.r if config.r is not None else C - 1
    params = parameter_count(method, C, data.n_features, r)
    fit_config = config.fit_config()
    start = time.perf_counter()
    wrong = 0
    try:
        for train_idx, test_idx in plan.splits():
            train, test = data.subset(train_idx), data.subset(test_idx)
            if prepared.deferred_scaling:
                scaler = minmax_scale(train)
                train, test = apply_scaler(scaler, train), apply_scaler(scaler, test)
            model = fit(method, train, fit_config)
            wrong += int(np.count_nonzero(predict(model, test.features) != test.labels))
    except DiscriminantError as exc:
        return CellResult(name, method, None, None, data.n_samples, params, _reason(exc),
                          time.perf_counter() - start)
    return CellResult(name, method, wrong / data.n_samples, wrong, data.n_samples, params, None,
                      time.perf_counter() - start)


def run_benchmark(config: BenchmarkConfig) -> BenchmarkReport:
    """Run k-fold CV for every configured (dataset, method) cell.

    Library errors inside a cell turn that cell into NA with the cause
    attached; other cells are unaffected. Loading errors propagate.
    """
    cells = []
    assumptions: dict[str, TestReport | None] = {}
    assumption_errors: dict[str, str] = {}
    for spec in config.datasets:
        prepared = prepare(spec, defer_scaling=config.per_fold_scaling)
        plan = stratified_kfold(prepared.data, config.k, config.seed)
        for method in config.methods:
            cells.append(_run_cell(prepared, method, config, plan))
        if config.assumption_tests:
            data = prepared.data
            if prepared.deferred_scaling:
                data = apply_scaler(minmax_scale(data), data)
            try:
                assumptions[spec.name] = check_assumptions(data)
            except DiscriminantError as exc:
                assumptions[spec.name] = None
                assumption_errors[spec.name] = _reason(exc)
    return BenchmarkReport(
        datasets=tuple(s.name for s in config.datasets),
        methods=config.methods,
        cells=tuple(cells),
        assumptions=assumptions,
        assumption_errors=assumption_errors,
        k=config.k,
        seed=config.seed,
    )


# --- rendering ---------------------------------------------------------------


def _markdown(report: BenchmarkReport) -> str:
    lines = [
        "| Dataset | " + " | ".join(m.label for m in report.methods) + " |",
        "|---|" + "---:|" * len(report.methods),
    ]
    notes = []
    for ds in report.datasets:
        row = [report.cell(ds, m) for m in report.methods]
        rates = [c.error_rate for c in row if not c.is_na]
        best = min(rates) if rates else None
        texts = []
        for c in row:
            if c.is_na:
                notes.append(c)
                texts.append(f"NA[^{len(notes)}]")
            elif c.error_rate == best:
                texts.append(f"**{c.error_rate:.3f}**")
            else:
                texts.append(f"{c.error_rate:.3f}")
        lines.append(f"| {ds} | " + " | ".join(texts) + " |")
    lines.append("")
    lines.append(f"Error rates from {report.k}-fold stratified cross-validation (seed {report.seed}); "
                 "bold marks the lowest error in each row.")
    if notes:
        lines.append("")
        for i, c in enumerate(notes, 1):
            lines.append(f"[^{i}]: {c.dataset} / {c.method.label}: {c.reason}")
    if report.assumptions:
        lines += ["", "| Dataset | Test | Statistic | df | p-value | Rejected at 0.05 |", "|---|---|---:|---|---:|---|"]
        for ds in report.datasets:
            if ds not in report.assumptions:
                continue
            t = report.assumptions[ds]
            if t is None:
                lines.append(f"| {ds} | error | | | | {report.assumption_errors.get(ds, '')} |")
                continue
            name = "Levene (fallback)" if t.fallback_used else "Box's M"
            df = ", ".join(f"{d:g}" for d in t.df)
            lines.append(f"| {ds} | {name} | {t.statistic:.4g} | {df} | {t.p_value:.3g} | "
                         f"{'yes' if t.rejected_at_05 else 'no'} |")
    return "\n".join(lines) + "\n"


def _csv(report: BenchmarkReport) -> str:
    # wall time is deliberately left out so repeated runs compare byte for byte
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dataset", "method", "error_rate", "misclassified", "n_samples", "parameter_count", "reason"])
    for c in report.cells:
        writer.writerow([
            c.dataset,
            c.method.value,
            "NA" if c.is_na else repr(c.error_rate),
            "" if c.misclassified is None else c.misclassified,
            c.n_samples,
            c.parameter_count,
            c.reason or "",
        ])
    return buf.getvalue()


def format_report(report: BenchmarkReport, fmt: str = "markdown") -> str:
    if fmt == "markdown":
        return _markdown(report)
    if fmt == "csv":
        return _csv(report)
    if fmt == "json":
        return report.to_json() + "\n"
    raise ConfigError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def write_report(report: BenchmarkReport, fmt: str, out: str | Path | None) -> str:
    text = format_report(report, fmt)
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return text
