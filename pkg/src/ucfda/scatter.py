"""Scatter matrices, Fisher directions and per-class statistics in the projected space."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import linalg
from .covariance import PopulationStats, compute_population_stats, shrinkage_covariance
from .data import LabeledDataset
from .errors import (
    ClassTooSmall,
    ConfigError,
    DimensionMismatch,
    InternalConsistencyError,
    NotPositiveDefinite,
    SingleClass,
)

Normalization = Literal["within-sphered", "unit-norm"]
NORMALIZATIONS = ("within-sphered", "unit-norm")

#: Projected variances below this are treated as degenerate.
DEGENERATE_VARIANCE = 1e-12

#: Relative ridge added to a singular within-class scatter.
RIDGE = 1e-8


def between_scatter(stats: PopulationStats) -> NDArray[np.float64]:
    if stats.class_count < 2:
        raise SingleClass("between-class scatter needs at least two classes")
    d = stats.means - stats.overall_mean
    b = (d.T * stats.counts) @ d
    return 0.5 * (b + b.T)


def within_scatter(data: LabeledDataset, stats: PopulationStats | None = None) -> NDArray[np.float64]:
    """Sum over classes of centred outer products, built from the raw rows."""
    stats = stats or compute_population_stats(data)
    w = np.zeros((data.n_features, data.n_features))
    for c in stats.per_class:
        centered = data.features[data.labels == c.class_id] - c.mean
        w += centered.T @ centered
    return 0.5 * (w + w.T)


def shrinkage_within_scatter(
    data: LabeledDataset, intensity: float | None = None
) -> NDArray[np.float64]:
    """Within scatter with every class covariance replaced by its shrunk estimate.

    Each class is weighted by its size ``n_i`` (not ``n_i - 1``).
    """
    w = np.zeros((data.n_features, data.n_features))
    for cls in np.unique(data.labels):
        rows = data.features[data.labels == cls]
        if len(rows) < 2:
            raise ClassTooSmall(int(cls), len(rows))
        w += len(rows) * shrinkage_covariance(rows, intensity)
    return w


def fisher_ratio(v: ArrayLike, b: NDArray, w: NDArray) -> float:
    v = np.asarray(v, dtype=float)
    return float(v @ b @ v / (v @ w @ v))


@dataclass(frozen=True)
class ProjectionBasis:
    """Discriminant directions stored as the columns of ``directions``.

    ``requested`` is the number of directions asked for; when the pencil has
    fewer positive eigenvalues only those are kept and ``rank_deficient`` is set.
    ``ridge`` is the multiple of the identity added to the within scatter, or 0.
    """

    directions: NDArray[np.float64]
    eigenvalues: NDArray[np.float64]
    normalization: str
    requested: int
    ridge: float = 0.0

    @property
    def r(self) -> int:
        return self.directions.shape[1]

    @property
    def rank_deficient(self) -> bool:
        return self.r < self.requested

    def project(self, x: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(x, dtype=float) @ self.directions

    def rescaled(self, factors: ArrayLike) -> "ProjectionBasis":
        """Same basis with direction ``j`` multiplied by ``factors[j]``."""
        f = np.asarray(factors, dtype=float)
        return ProjectionBasis(self.directions * f, self.eigenvalues, "custom", self.requested, self.ridge)


def _pencil(b: NDArray, w: NDArray) -> tuple[linalg.EigenPairs, NDArray, float]:
    """Generalized eigenpairs, retrying once with a small ridge if ``w`` is singular."""
    try:
        return linalg.generalized_sym_eig(b, w), w, 0.0
    except NotPositiveDefinite:
        p = w.shape[0]
        scale = np.trace(w) / p
        ridge = RIDGE * (scale if scale > 0 else 1.0)
        w_reg = w + ridge * np.eye(p)
        return linalg.generalized_sym_eig(b, w_reg), w_reg, ridge


def _normalize(vectors: NDArray, w: NDArray, normalization: str, dof: float | None) -> NDArray:
    if normalization == "unit-norm":
        return vectors / np.linalg.norm(vectors, axis=0)
    if normalization == "within-sphered":
        if dof is None or dof <= 0:
            raise ConfigError("within-sphered normalization needs a positive dof (n - C)")
        quad = np.einsum("ij,ik,kj->j", vectors, w / dof, vectors)
        return vectors / np.sqrt(quad)
    raise ConfigError(f"unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")


def fisher_directions(
    b: ArrayLike,
    w: ArrayLike,
    r: int | None = None,
    normalization: Normalization = "within-sphered",
    *,
    dof: float | None = None,
) -> ProjectionBasis:
    """Top ``r`` generalized eigenvectors of the pencil ``(b, w)``.

    ``r=None`` keeps every direction with a positive eigenvalue (at most
    ``C - 1`` for a between-class scatter).

    Under ``within-sphered`` normalization each direction satisfies
    ``v' (w / dof) v = 1``; with the ordinary within scatter and
    ``dof = n - C`` that is ``v' S_p v = 1``. When ``w`` is singular a ridge of
    ``1e-8 * trace(w) / p`` is added and the basis records it.
    """
    b = linalg.symmetrize(b)
    w = linalg.symmetrize(w)
    if r is not None and r < 1:
        raise ConfigError("r must be at least 1")
    pairs, w_used, ridge = _pencil(b, w)
    available = int(np.count_nonzero(pairs.values > 0))
    requested = available if r is None else int(r)
    keep = min(requested, available)
    vectors = np.array(pairs.vectors[:, :keep])
    if keep:
        vectors = _normalize(vectors, w_used, normalization, dof)
    return ProjectionBasis(vectors, np.array(pairs.values[:keep]), normalization, requested, ridge)


def full_sphered_basis(b: ArrayLike, w: ArrayLike, dof: float) -> ProjectionBasis:
    """All ``p`` generalized eigenvectors, each scaled to ``v' (w / dof) v = 1``.

    Directions with zero eigenvalue are included, so the columns ``V`` satisfy
    ``V V' = (w / dof)^-1``.
    """
    b = linalg.symmetrize(b)
    w = linalg.symmetrize(w)
    pairs, w_used, ridge = _pencil(b, w)
    vectors = _normalize(np.array(pairs.vectors), w_used, "within-sphered", dof)
    return ProjectionBasis(vectors, np.array(pairs.values), "within-sphered", w.shape[0], ridge)


@dataclass(frozen=True)
class ProjectedClassStats:
    """Per-class means ``m[i, j]`` and variances ``s2[i, j]`` along each direction."""

    class_ids: tuple[int, ...]
    means: NDArray[np.float64]
    variances: NDArray[np.float64]

    @property
    def degenerate(self) -> NDArray[np.bool_]:
        return self.variances < DEGENERATE_VARIANCE

    @property
    def has_degenerate(self) -> bool:
        return bool(np.any(self.degenerate))


def quadratic_form_variances(basis: ProjectionBasis, stats: PopulationStats) -> NDArray[np.float64]:
    """``v_j' S_i v_j`` for every class ``i`` and direction ``j``."""
    v = basis.directions
    return np.vstack([np.einsum("kj,kl,lj->j", v, c.cov, v) for c in stats.per_class])


def _agree(direct: NDArray, quad: NDArray, scale: NDArray) -> NDArray[np.bool_]:
    # absolute floor covers directions where a class is (numerically) constant
    floor = 1e3 * linalg.EPS * scale
    return np.abs(direct - quad) <= 1e-8 * np.maximum(np.abs(direct), np.abs(quad)) + floor


def project_stats(
    data: LabeledDataset, basis: ProjectionBasis, stats: PopulationStats | None = None
) -> ProjectedClassStats:
    """Projected class means and sample variances.

    Variances are summed directly over the projected samples; each value is
    then checked against ``v' S_i v`` and a disagreement raises
    :class:`InternalConsistencyError`.
    """
    if basis.r == 0:
        raise ConfigError("projection basis is empty")
    if basis.directions.shape[0] != data.n_features:
        raise DimensionMismatch(
            f"basis has dimension {basis.directions.shape[0]}, data has {data.n_features} features"
        )
    stats = stats or compute_population_stats(data)
    means = []
    variances = []
    for c in stats.per_class:
        y = data.features[data.labels == c.class_id] @ basis.directions
        m = y.mean(axis=0)
        means.append(m)
        variances.append(np.sum((y - m) ** 2, axis=0) / (c.n - 1))
    means = np.vstack(means)
    variances = np.vstack(variances)

    quad = quadratic_form_variances(basis, stats)
    traces = np.array([np.trace(c.cov) for c in stats.per_class])
    scale = np.outer(traces, np.sum(basis.directions**2, axis=0))
    if not np.all(_agree(variances, quad, scale)):
        worst = np.max(np.abs(variances - quad))
        raise InternalConsistencyError(
            f"projected variances disagree with v' S_i v (max abs difference {worst:.3e})"
        )
    return ProjectedClassStats(stats.class_ids, means, variances)
