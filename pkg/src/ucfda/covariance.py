"""Per-class means and covariances, pooled covariance and OAS shrinkage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .data import LabeledDataset
from .errors import ClassTooSmall, DegenerateDenominator, EmptyDataset, ZeroVariance


@dataclass(frozen=True)
class ClassStats:
    class_id: int
    n: int
    mean: NDArray[np.float64]
    cov: NDArray[np.float64]


@dataclass(frozen=True)
class PopulationStats:
    per_class: tuple[ClassStats, ...]
    overall_mean: NDArray[np.float64]
    total_n: int

    @property
    def class_count(self) -> int:
        return len(self.per_class)

    @property
    def class_ids(self) -> tuple[int, ...]:
        return tuple(c.class_id for c in self.per_class)

    @property
    def counts(self) -> NDArray[np.int64]:
        return np.array([c.n for c in self.per_class])

    @property
    def means(self) -> NDArray[np.float64]:
        """Class means stacked as rows, ordered like ``per_class``."""
        return np.vstack([c.mean for c in self.per_class])


def sample_covariance(samples: ArrayLike) -> NDArray[np.float64]:
    """Unbiased covariance (divisor ``n - 1``) of the rows of ``samples``."""
    x = np.asarray(samples, dtype=float)
    n = x.shape[0]
    if n < 2:
        raise ClassTooSmall(None, n)
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return 0.5 * (cov + cov.T)


def compute_population_stats(data: LabeledDataset) -> PopulationStats:
    """Class sizes, means and covariances for every class with rows in ``data``.

    Classes are ordered by ascending class id.
    """
    if data.n_samples == 0 or data.n_features == 0:
        raise EmptyDataset("dataset has no samples or no features")
    per_class = []
    for cls in np.unique(data.labels):
        rows = data.features[data.labels == cls]
        if len(rows) < 2:
            raise ClassTooSmall(int(cls), len(rows))
        per_class.append(ClassStats(int(cls), len(rows), rows.mean(axis=0), sample_covariance(rows)))
    counts = np.array([c.n for c in per_class], dtype=float)
    means = np.vstack([c.mean for c in per_class])
    overall = counts @ means / counts.sum()
    return PopulationStats(tuple(per_class), overall, int(counts.sum()))


def pooled_covariance(stats: PopulationStats) -> NDArray[np.float64]:
    dof = stats.total_n - stats.class_count
    if dof <= 0:
        raise DegenerateDenominator("pooled covariance needs more samples than classes")
    total = sum((c.n - 1) * c.cov for c in stats.per_class)
    return total / dof


def oas_intensity(cov: ArrayLike, n: int) -> float:
    """Oracle-approximating shrinkage intensity for a covariance from ``n`` samples.

    Closed form of Chen, Wiesel, Eldar & Hero (2010), clipped to ``[0, 1]``.
    The ratio is scale-free, so the covariance divisor does not matter.
    """
    s = np.asarray(cov, dtype=float)
    p = s.shape[0]
    tr = np.trace(s)
    tr_sq = np.sum(s * s)
    num = (1.0 - 2.0 / p) * tr_sq + tr * tr
    den = (n + 1.0 - 2.0 / p) * (tr_sq - tr * tr / p)
    if den <= 0:
        return 1.0
    return float(min(max(num / den, 0.0), 1.0))


def shrink(cov: ArrayLike, intensity: float) -> NDArray[np.float64]:
    s = np.asarray(cov, dtype=float)
    p = s.shape[0]
    target = np.trace(s) / p
    return (1.0 - intensity) * s + intensity * target * np.eye(p)


def shrinkage_covariance(samples: ArrayLike, intensity: float | None = None) -> NDArray[np.float64]:
    """Sample covariance shrunk toward ``(trace / p) * I``.

    ``intensity`` defaults to the OAS estimate; pass a value to pin it.
    """
    x = np.asarray(samples, dtype=float)
    s = sample_covariance(x)
    if np.trace(s) <= 0:
        raise ZeroVariance("all samples are identical")
    rho = oas_intensity(s, x.shape[0]) if intensity is None else intensity
    return shrink(s, rho)
