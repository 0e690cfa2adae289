"""Fit and predict for the eight discriminant methods.

Projection methods (FDA, SDA, LDA-Lp) classify by squared distance to the
projected class means. Their UC variants divide each squared distance by the
class's own projected variance along that direction. LDA and QDA use the
Gaussian discriminant scores with log class-frequency priors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import linalg
from .covariance import compute_population_stats, pooled_covariance
from .data import LabeledDataset
from .errors import (
    ConfigError,
    DegenerateVariance,
    DimensionMismatch,
    NotPositiveDefinite,
    RankDeficient,
    SingleClass,
    SingularCovariance,
)
from .lp import LpProjection, Numerator, fit_lp_projection
from .scatter import (
    NORMALIZATIONS,
    ProjectedClassStats,
    ProjectionBasis,
    between_scatter,
    fisher_directions,
    project_stats,
    shrinkage_within_scatter,
    within_scatter,
)


class Method(str, Enum):
    FDA = "fda"
    UC_FDA = "uc-fda"
    LDA = "lda"
    QDA = "qda"
    SDA = "sda"
    UC_SDA = "uc-sda"
    LDA_LP = "lda-lp"
    UC_LDA_LP = "uc-lda-lp"

    @property
    def label(self) -> str:
        return {"lda-lp": "LDA-Lp", "uc-lda-lp": "UC-LDA-Lp"}.get(self.value, self.value.upper())

    @property
    def uc(self) -> bool:
        return self in (Method.UC_FDA, Method.UC_SDA, Method.UC_LDA_LP)

    @property
    def projection(self) -> bool:
        return self in (Method.FDA, Method.UC_FDA, Method.SDA, Method.UC_SDA)

    @property
    def lp(self) -> bool:
        return self in (Method.LDA_LP, Method.UC_LDA_LP)

    @classmethod
    def parse(cls, name: "str | Method") -> "Method":
        if isinstance(name, Method):
            return name
        key = name.strip().lower()
        for m in cls:
            if key in (m.value, m.label.lower()):
                return m
        valid = ", ".join(m.value for m in cls)
        raise ConfigError(f"unknown method {name!r}; valid methods: {valid}")


@dataclass(frozen=True)
class LpSettings:
    p: float = 1.5
    epsilon: float = 1e-5
    max_iters: int = 500
    numerator: Numerator = "projected"
    initial_step: float = 0.1


@dataclass(frozen=True)
class FitConfig:
    """Knobs shared by all methods.

    ``r`` is the number of Fisher directions (default: every direction with a
    positive eigenvalue, at most ``C - 1``). ``variance_floor`` lets UC rules
    clamp tiny projected variances instead of raising.
    """

    r: int | None = None
    normalization: str = "within-sphered"
    variance_floor: float | None = None
    lp: LpSettings = field(default_factory=LpSettings)

    def __post_init__(self):
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"normalization must be one of {NORMALIZATIONS}")
        if self.r is not None and self.r < 1:
            raise ConfigError("r must be at least 1")


@dataclass(frozen=True)
class ProjectionPayload:
    basis: ProjectionBasis
    stats: ProjectedClassStats


@dataclass(frozen=True)
class LdaPayload:
    means: NDArray[np.float64]
    pooled_cholesky: NDArray[np.float64]
    log_priors: NDArray[np.float64]


@dataclass(frozen=True)
class QdaPayload:
    means: NDArray[np.float64]
    choleskys: tuple[NDArray[np.float64], ...]
    log_dets: NDArray[np.float64]
    log_priors: NDArray[np.float64]


@dataclass(frozen=True)
class LpPayload:
    projection: LpProjection
    stats: ProjectedClassStats

    @property
    def basis(self) -> ProjectionBasis:
        w = self.projection.w[:, None]
        return ProjectionBasis(w, np.array([self.projection.objective]), "unit-norm", 1)


Payload = Union[ProjectionPayload, LdaPayload, QdaPayload, LpPayload]


@dataclass(frozen=True)
class FittedModel:
    method: Method
    class_labels: tuple[int, ...]
    n_features: int
    payload: Payload
    config: FitConfig = field(default_factory=FitConfig)


@dataclass(frozen=True)
class DiscriminantScores:
    """One score per class; the prediction is the extreme under ``convention``."""

    values: NDArray[np.float64]
    convention: str  # "minimize" or "maximize"

    def best(self) -> int:
        """Index of the winning class; ``argmin``/``argmax`` keep the first (lowest label) on ties."""
        return int(np.argmin(self.values) if self.convention == "minimize" else np.argmax(self.values))


# --- fitting ---------------------------------------------------------------


def fit(method: "Method | str", train: LabeledDataset, config: FitConfig | None = None) -> FittedModel:
    method = Method.parse(method)
    config = config or FitConfig()
    stats = compute_population_stats(train)
    if stats.class_count < 2:
        raise SingleClass(f"{method.label} needs at least two classes in the training data")
    labels = stats.class_ids

    if method.projection:
        b = between_scatter(stats)
        if method in (Method.SDA, Method.UC_SDA):
            w = shrinkage_within_scatter(train)
        else:
            w = within_scatter(train, stats)
        dof = stats.total_n - stats.class_count
        basis = fisher_directions(b, w, config.r, config.normalization, dof=dof)
        if basis.r == 0:
            raise RankDeficient(basis.requested, 0)
        payload: Payload = ProjectionPayload(basis, project_stats(train, basis, stats))
    elif method.lp:
        s = config.lp
        projection = fit_lp_projection(
            train, s.p, s.epsilon, s.max_iters, numerator=s.numerator, initial_step=s.initial_step
        )
        basis = ProjectionBasis(projection.w[:, None], np.array([projection.objective]), "unit-norm", 1)
        payload = LpPayload(projection, project_stats(train, basis, stats))
    elif method is Method.LDA:
        try:
            chol = linalg.cholesky(pooled_covariance(stats))
        except NotPositiveDefinite:
            raise SingularCovariance("pooled") from None
        payload = LdaPayload(stats.means, chol, np.log(stats.counts / stats.total_n))
    else:
        chols = []
        for c in stats.per_class:
            try:
                chols.append(linalg.cholesky(c.cov))
            except NotPositiveDefinite:
                raise SingularCovariance(c.class_id) from None
        payload = QdaPayload(
            stats.means,
            tuple(chols),
            np.array([linalg.log_det_from_cholesky(L) for L in chols]),
            np.log(stats.counts / stats.total_n),
        )
    return FittedModel(method, labels, train.n_features, payload, config)


# --- batch scoring -----------------------------------------------------------


def _as_batch(model: FittedModel, x: ArrayLike) -> NDArray[np.float64]:
    X = np.asarray(x, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"expected {model.n_features} features, got shape {np.shape(x)}")
    return X


def fda_distances(projected: NDArray, means: NDArray) -> NDArray[np.float64]:
    """Squared distances summed over directions; rows are samples, columns classes."""
    diff = projected[:, None, :] - means[None, :, :]
    return np.sum(diff * diff, axis=2)


def uc_distances(projected: NDArray, means: NDArray, variances: NDArray) -> NDArray[np.float64]:
    """Squared distances standardised by each class's projected variance."""
    diff = projected[:, None, :] - means[None, :, :]
    return np.sum(diff * diff / variances[None, :, :], axis=2)


def _checked_variances(model: FittedModel, stats: ProjectedClassStats) -> NDArray:
    floor = model.config.variance_floor
    if floor is not None:
        return np.maximum(stats.variances, floor)
    if stats.has_degenerate:
        i, j = np.argwhere(stats.degenerate)[0]
        raise DegenerateVariance(stats.class_ids[i], int(j), float(stats.variances[i, j]))
    return stats.variances


def _projection_scores(model: FittedModel, X: NDArray, uc: bool) -> NDArray:
    payload = model.payload
    projected = payload.basis.project(X)
    if uc:
        return uc_distances(projected, payload.stats.means, _checked_variances(model, payload.stats))
    return fda_distances(projected, payload.stats.means)


def _lda_scores(payload: LdaPayload, X: NDArray) -> NDArray:
    # columns of solved are S_p^-1 mean_i
    solved = linalg.cho_solve(payload.pooled_cholesky, payload.means.T)
    offsets = 0.5 * np.sum(payload.means.T * solved, axis=0)
    return X @ solved - offsets + payload.log_priors


def _qda_scores(payload: QdaPayload, X: NDArray) -> NDArray:
    scores = np.empty((X.shape[0], len(payload.choleskys)))
    for i, (mean, L) in enumerate(zip(payload.means, payload.choleskys)):
        z = linalg.solve_triangular(L, (X - mean).T)
        scores[:, i] = -0.5 * payload.log_dets[i] - 0.5 * np.sum(z * z, axis=0) + payload.log_priors[i]
    return scores


def decision_scores(model: FittedModel, x: ArrayLike) -> tuple[NDArray[np.float64], str]:
    """Score matrix (samples by classes) and its convention."""
    X = _as_batch(model, x)
    m = model.method
    if m.projection or m.lp:
        return _projection_scores(model, X, m.uc), "minimize"
    if m is Method.LDA:
        return _lda_scores(model.payload, X), "maximize"
    return _qda_scores(model.payload, X), "maximize"


def predict(model: FittedModel, x: ArrayLike) -> NDArray[np.int64]:
    scores, convention = decision_scores(model, x)
    best = np.argmin(scores, axis=1) if convention == "minimize" else np.argmax(scores, axis=1)
    return np.asarray(model.class_labels, dtype=np.int64)[best]


# --- single-sample rules ------------------------------------------------------


def _single(model: FittedModel, scores: NDArray, convention: str) -> tuple[int, DiscriminantScores]:
    result = DiscriminantScores(scores[0], convention)
    return model.class_labels[result.best()], result


def _require(model: FittedModel, allowed: tuple[Method, ...], rule: str) -> None:
    if model.method not in allowed:
        raise ConfigError(f"{rule} does not apply to a {model.method.label} model")


def classify_fda(model: FittedModel, x: ArrayLike) -> tuple[int, DiscriminantScores]:
    """Nearest projected class mean (unstandardised)."""
    _require(model, (Method.FDA, Method.UC_FDA, Method.SDA, Method.UC_SDA), "classify_fda")
    return _single(model, _projection_scores(model, _as_batch(model, x), uc=False), "minimize")


def classify_uc(model: FittedModel, x: ArrayLike) -> tuple[int, DiscriminantScores]:
    """Nearest projected class mean, each squared distance divided by that class's variance."""
    _require(model, (Method.FDA, Method.UC_FDA, Method.SDA, Method.UC_SDA), "classify_uc")
    return _single(model, _projection_scores(model, _as_batch(model, x), uc=True), "minimize")


def classify_lda(model: FittedModel, x: ArrayLike) -> tuple[int, DiscriminantScores]:
    _require(model, (Method.LDA,), "classify_lda")
    return _single(model, _lda_scores(model.payload, _as_batch(model, x)), "maximize")


def classify_qda(model: FittedModel, x: ArrayLike) -> tuple[int, DiscriminantScores]:
    _require(model, (Method.QDA,), "classify_qda")
    return _single(model, _qda_scores(model.payload, _as_batch(model, x)), "maximize")


def classify_lp(model: FittedModel, x: ArrayLike, uc: bool) -> tuple[int, DiscriminantScores]:
    _require(model, (Method.LDA_LP, Method.UC_LDA_LP), "classify_lp")
    return _single(model, _projection_scores(model, _as_batch(model, x), uc=uc), "minimize")


def classify(model: FittedModel, x: ArrayLike) -> tuple[int, DiscriminantScores]:
    """Apply the model's own rule to one sample."""
    scores, convention = decision_scores(model, x)
    if scores.shape[0] != 1:
        raise DimensionMismatch("classify takes a single sample; use predict for batches")
    return _single(model, scores, convention)


# --- diagnostics -------------------------------------------------------------


def parameter_count(method: "Method | str", n_classes: int, n_features: int, r: int) -> int:
    """Parameters a method estimates beyond plain FDA.

    UC rules add one projected variance per class and direction; QDA adds
    ``C - 1`` further covariance matrices plus ``p``, counted as in the UC
    comparison it is quoted against.
    """
    method = Method.parse(method)
    if method.uc:
        return (1 if method.lp else r) * n_classes
    if method is Method.QDA:
        return (n_classes - 1) * n_features**2 + n_features
    return 0
