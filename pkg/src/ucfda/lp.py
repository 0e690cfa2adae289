"""Single-direction Lp-norm discriminant by gradient ascent on the unit sphere.

The objective for a direction ``w`` is

    F(w) = sum_i n_i |w'(mean_i - mean)|^p  /  sum_i sum_j |w'(x_ij - mean_i)|^p

which is invariant to the scale of ``w``; at ``p = 2`` it is the Fisher ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import linalg
from .covariance import compute_population_stats
from .data import LabeledDataset
from .errors import ConfigError, NotPositiveDefinite, SingleClass, ZeroDenominator
from .scatter import between_scatter, within_scatter

Numerator = Literal["projected", "literal"]

MIN_STEP = 1e-10


@dataclass(frozen=True)
class LpProjection:
    w: NDArray[np.float64]
    p: float
    objective_trace: tuple[float, ...]
    converged: bool
    iterations: int

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


class LpObjective:
    """``F(w)`` and its gradient for a fixed training set.

    ``numerator="literal"`` replaces the projected between-class term by the
    constant ``sum_i n_i ||mean_i - mean||_2^p``; only the denominator then
    depends on ``w``.
    """

    def __init__(self, data: LabeledDataset, p: float, numerator: Numerator = "projected"):
        if p <= 1:
            raise ConfigError("the Lp exponent must exceed 1")
        if numerator not in ("projected", "literal"):
            raise ConfigError(f"unknown numerator form {numerator!r}")
        stats = compute_population_stats(data)
        if stats.class_count < 2:
            raise SingleClass("Lp discriminant needs at least two classes")
        self.p = float(p)
        self.numerator = numerator
        self.counts = stats.counts.astype(float)
        self.offsets = stats.means - stats.overall_mean
        means = {c.class_id: c.mean for c in stats.per_class}
        self.residuals = data.features - np.vstack([means[int(k)] for k in data.labels])
        self.literal_numerator = float(self.counts @ np.linalg.norm(self.offsets, axis=1) ** self.p)

    def _parts(self, w: NDArray):
        p = self.p
        a = self.offsets @ w
        r = self.residuals @ w
        den = float(np.sum(np.abs(r) ** p))
        grad_den = (p * np.abs(r) ** (p - 1) * np.sign(r)) @ self.residuals
        if self.numerator == "literal":
            return self.literal_numerator, np.zeros_like(w), den, grad_den
        num = float(self.counts @ np.abs(a) ** p)
        grad_num = (self.counts * p * np.abs(a) ** (p - 1) * np.sign(a)) @ self.offsets
        return num, grad_num, den, grad_den

    def value(self, w: ArrayLike) -> float:
        num, _, den, _ = self._parts(np.asarray(w, dtype=float))
        if den == 0:
            raise ZeroDenominator("every within-class projection vanishes")
        return num / den

    def gradient(self, w: ArrayLike) -> NDArray[np.float64]:
        num, grad_num, den, grad_den = self._parts(np.asarray(w, dtype=float))
        if den == 0:
            raise ZeroDenominator("every within-class projection vanishes")
        return (grad_num * den - num * grad_den) / (den * den)


def _initial_direction(data: LabeledDataset) -> NDArray[np.float64]:
    """Top Fisher direction, or the dominant between-scatter axis when W is singular."""
    stats = compute_population_stats(data)
    b = between_scatter(stats)
    try:
        w = linalg.generalized_sym_eig(b, within_scatter(data, stats)).vectors[:, 0]
    except NotPositiveDefinite:
        w = linalg.sym_eig(b).vectors[:, 0]
    return np.array(w)


def _canonical(w: NDArray) -> NDArray:
    w = w / np.linalg.norm(w)
    lead = np.argmax(np.abs(w))
    return -w if w[lead] < 0 else w


def fit_lp_projection(
    train: LabeledDataset,
    p: float = 1.5,
    epsilon: float = 1e-5,
    max_iters: int = 500,
    *,
    numerator: Numerator = "projected",
    initial_step: float = 0.1,
    initial: ArrayLike | None = None,
) -> LpProjection:
    """Maximise ``F(w)`` over unit vectors.

    Each step moves ``initial_step`` (an angle-like length, since the gradient
    is normalised) along the gradient and renormalises. A step that lowers
    ``F`` is rejected and the step length halved, so the recorded objective
    never decreases. Iteration stops when an accepted step gains less than
    ``epsilon``, when the step length falls below 1e-10, or after
    ``max_iters`` trials (then ``converged`` is False).
    """
    objective = LpObjective(train, p, numerator)
    if train.n_features == 1:
        w = np.ones(1)
        return LpProjection(w, float(p), (objective.value(w),), True, 0)

    w = _canonical(np.asarray(initial, dtype=float) if initial is not None else _initial_direction(train))
    f = objective.value(w)
    trace = [f]
    step = initial_step
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        g = objective.gradient(w)
        g = g - (g @ w) * w
        norm = np.linalg.norm(g)
        if norm == 0:
            converged = True
            break
        candidate = w + step * g / norm
        candidate /= np.linalg.norm(candidate)
        f_new = objective.value(candidate)
        if f_new >= f:
            gain = f_new - f
            w, f = candidate, f_new
            trace.append(f)
            if gain < epsilon:
                converged = True
                break
        else:
            step /= 2
            if step < MIN_STEP:
                converged = True
                break
    return LpProjection(_canonical(w), float(p), tuple(trace), converged, iterations)
