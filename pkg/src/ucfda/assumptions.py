"""Tests of the equal-covariance assumption: Box's M with a per-feature Levene fallback."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from . import linalg
from .covariance import compute_population_stats, pooled_covariance
from .data import LabeledDataset
from .distributions import chi2_sf, f_sf
from .errors import ClassTooSmall, LogZero, NotPositiveDefinite, SingleClass, ZeroSpread

ALPHA = 0.05


@dataclass(frozen=True)
class TestReport:
    test_name: str  # "box_m" or "levene"
    statistic: float
    df: tuple[float, ...]
    p_value: float
    rejected_at_05: bool
    fallback_used: bool = False
    per_feature: tuple["TestReport", ...] | None = None
    feature: str | None = None
    skipped_features: tuple[str, ...] = ()

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        out = {
            "test_name": self.test_name,
            "statistic": self.statistic,
            "df": list(self.df),
            "p_value": self.p_value,
            "rejected_at_05": self.rejected_at_05,
            "fallback_used": self.fallback_used,
            "feature": self.feature,
            "skipped_features": list(self.skipped_features),
        }
        if self.per_feature is not None:
            out["per_feature"] = [f.to_dict() for f in self.per_feature]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "TestReport":
        per = d.get("per_feature")
        return cls(
            test_name=d["test_name"],
            statistic=float(d["statistic"]),
            df=tuple(d["df"]),
            p_value=float(d["p_value"]),
            rejected_at_05=bool(d["rejected_at_05"]),
            fallback_used=bool(d.get("fallback_used", False)),
            per_feature=None if per is None else tuple(cls.from_dict(f) for f in per),
            feature=d.get("feature"),
            skipped_features=tuple(d.get("skipped_features", ())),
        )


def _log_det(cov, which: str) -> float:
    try:
        return linalg.log_det_from_cholesky(linalg.cholesky(cov))
    except NotPositiveDefinite:
        raise LogZero(which) from None


def box_m_test(data: LabeledDataset) -> TestReport:
    """Box's M with the chi-square approximation.

    ``M = (n - C) ln|S_p| - sum_i (n_i - 1) ln|S_i|``, scaled by ``1 - c`` with
    the usual small-sample correction ``c``. Raises :class:`LogZero` when any
    covariance cannot be factored.
    """
    stats = compute_population_stats(data)
    C = stats.class_count
    if C < 2:
        raise SingleClass("Box's M needs at least two classes")
    p = data.n_features
    n = stats.total_n
    log_pooled = _log_det(pooled_covariance(stats), "pooled")
    terms = [(c.n - 1) * _log_det(c.cov, f"class {c.class_id}") for c in stats.per_class]
    m = (n - C) * log_pooled - sum(terms)
    # M is a difference of large log terms; cancellation noise is clamped to 0
    scale = (n - C) * max(1.0, abs(log_pooled)) + sum(abs(t) for t in terms)
    if m < 1e-12 * scale:
        m = 0.0
    c = (2 * p * p + 3 * p - 1) / (6.0 * (p + 1) * (C - 1)) * (
        sum(1.0 / (k.n - 1) for k in stats.per_class) - 1.0 / (n - C)
    )
    chi = max(m * (1.0 - c), 0.0)
    df = p * (p + 1) * (C - 1) / 2.0
    p_value = chi2_sf(chi, df)
    return TestReport("box_m", chi, (df,), p_value, p_value < ALPHA)


def levene_test(groups: list[ArrayLike], feature: str | None = None) -> TestReport:
    """Brown-Forsythe (median-centred) Levene test for one feature.

    Raises :class:`ZeroSpread` when every absolute deviation is identical.
    """
    z_groups = []
    for g in groups:
        x = np.asarray(g, dtype=float).ravel()
        if len(x) < 2:
            raise ClassTooSmall(None, len(x))
        z_groups.append(np.abs(x - np.median(x)))
    C = len(z_groups)
    if C < 2:
        raise SingleClass("Levene's test needs at least two groups")
    n = sum(len(z) for z in z_groups)
    all_z = np.concatenate(z_groups)
    if np.all(all_z == all_z[0]):
        raise ZeroSpread("all absolute deviations are equal")
    grand = all_z.mean()
    between = sum(len(z) * (z.mean() - grand) ** 2 for z in z_groups)
    within = sum(float(np.sum((z - z.mean()) ** 2)) for z in z_groups)
    dfn, dfd = C - 1, n - C
    if within <= 0:
        stat, p_value = float("inf"), 0.0
    else:
        stat = float(dfd / dfn * between / within)
        p_value = f_sf(stat, dfn, dfd)
    return TestReport("levene", stat, (float(dfn), float(dfd)), p_value, p_value < ALPHA, feature=feature)


def levene_all_features(data: LabeledDataset) -> TestReport:
    """Levene per feature; rejects if any feature rejects.

    Features with zero spread are skipped and listed in ``skipped_features``.
    The headline statistic is that of the feature with the smallest p-value.
    """
    classes = [cls for cls in range(data.n_classes) if np.any(data.labels == cls)]
    results = []
    skipped = []
    for j, name in enumerate(data.feature_names):
        groups = [data.features[data.labels == cls, j] for cls in classes]
        try:
            results.append(levene_test(groups, feature=name))
        except ZeroSpread:
            skipped.append(name)
    if not results:
        C = len(classes)
        return TestReport(
            "levene", 0.0, (float(C - 1), float(data.n_samples - C)), 1.0, False,
            fallback_used=True, per_feature=(), skipped_features=tuple(skipped),
        )
    worst = min(results, key=lambda r: r.p_value)
    return TestReport(
        "levene",
        worst.statistic,
        worst.df,
        worst.p_value,
        any(r.rejected_at_05 for r in results),
        fallback_used=True,
        per_feature=tuple(results),
        feature=worst.feature,
        skipped_features=tuple(skipped),
    )


def check_assumptions(data: LabeledDataset) -> TestReport:
    """Box's M, falling back to per-feature Levene when a determinant is zero."""
    try:
        return box_m_test(data)
    except LogZero:
        return levene_all_features(data)
