"""Small dense symmetric linear algebra.

Everything here works on float64 numpy arrays of modest size (p <= ~100).
Eigenpairs come from a cyclic Jacobi sweep with a round-robin (parallel)
ordering so that each sweep is a handful of matrix products rather than
O(p^2) Python-level rotations. No routine forms an explicit inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, NoConvergence, NotPositiveDefinite

EPS = np.finfo(float).eps

#: Generalized eigenvalues at or below this fraction of the largest are zero.
RANK_CUTOFF = 1e-9


def as_matrix(m: ArrayLike, *, square: bool = False) -> NDArray[np.float64]:
    a = np.array(m, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def symmetrize(m: ArrayLike) -> NDArray[np.float64]:
    a = as_matrix(m, square=True)
    return 0.5 * (a + a.T)


def _freeze(a: NDArray) -> NDArray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues sorted descending with unit eigenvectors in matching columns.

    The entry of largest magnitude in every vector is positive, so identical
    input gives identical output.
    """

    values: NDArray[np.float64]
    vectors: NDArray[np.float64]

    def __len__(self) -> int:
        return len(self.values)


# --- Cholesky and triangular solves ---------------------------------------


def cholesky(m: ArrayLike) -> NDArray[np.float64]:
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    A pivot is rejected when it is not larger than ``max(n, 10) * eps`` times
    the largest diagonal entry; below that level the factor is rounding noise
    and every downstream solve would be meaningless.
    """
    a = symmetrize(m)
    n = a.shape[0]
    scale = float(np.max(np.abs(np.diag(a)))) if n else 0.0
    floor = max(n, 10) * EPS * scale
    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > floor:
            raise NotPositiveDefinite(j, float(pivot))
        d = np.sqrt(pivot)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ row) / d
    return L


def solve_triangular(L: NDArray, rhs: ArrayLike, *, transpose: bool = False) -> NDArray[np.float64]:
    """Solve ``L x = rhs`` (or ``L.T x = rhs``) for lower-triangular ``L``.

    ``rhs`` may be a vector or a matrix of column right-hand sides.
    """
    b = np.array(rhs, dtype=float)
    n = L.shape[0]
    if b.shape[0] != n:
        raise DimensionMismatch(f"right-hand side has {b.shape[0]} rows, matrix has {n}")
    x = np.zeros_like(b)
    if not transpose:
        for i in range(n):
            x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    else:
        U = L.T
        for i in range(n - 1, -1, -1):
            x[i] = (b[i] - U[i, i + 1 :] @ x[i + 1 :]) / U[i, i]
    return x


def cho_solve(L: NDArray, rhs: ArrayLike) -> NDArray[np.float64]:
    return solve_triangular(L, solve_triangular(L, rhs), transpose=True)


def solve_spd(m: ArrayLike, rhs: ArrayLike) -> NDArray[np.float64]:
    """Solve ``m x = rhs`` for symmetric positive definite ``m``."""
    a = as_matrix(m, square=True)
    b = np.asarray(rhs, dtype=float)
    if b.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"rhs length {b.shape[0]} does not match matrix size {a.shape[1]}")
    return cho_solve(cholesky(a), b)


def log_det(m: ArrayLike) -> float:
    """Natural log of the determinant of a symmetric positive definite matrix."""
    return log_det_from_cholesky(cholesky(m))


def log_det_from_cholesky(L: NDArray) -> float:
    return float(2.0 * np.sum(np.log(np.diag(L))))


# --- symmetric eigensolver --------------------------------------------------


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[NDArray, NDArray], ...]:
    """Partition all index pairs of ``range(n)`` into ``n - 1`` rounds of disjoint pairs."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = sorted((min(p, q), max(p, q)) for p, q in pairs if p < n and q < n)
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


def _jacobi(a: NDArray, max_sweeps: int) -> tuple[NDArray, NDArray]:
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return np.diag(a).copy(), v
    total = np.linalg.norm(a)
    if total == 0.0:
        return np.zeros(n), v
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= EPS * total:
            return np.diag(a).copy(), v
        rotated = False
        for p, q in rounds:
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            active = np.abs(apq) > EPS * np.sqrt(np.abs(app * aqq)) + np.finfo(float).tiny
            if not np.any(active):
                continue
            rotated = True
            p, q, apq, app, aqq = p[active], q[active], apq[active], app[active], aqq[active]
            theta = (aqq - app) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            J = np.eye(n)
            J[p, p] = c
            J[q, q] = c
            J[p, q] = s
            J[q, p] = -s
            a = J.T @ a @ J
            a = 0.5 * (a + a.T)
            a[p, q] = 0.0
            a[q, p] = 0.0
            v = v @ J
        if not rotated:
            return np.diag(a).copy(), v
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _canonical_signs(vectors: NDArray) -> NDArray:
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(m: ArrayLike, *, max_sweeps: int = 60) -> EigenPairs:
    """Eigen-decomposition of a symmetric matrix."""
    a = symmetrize(m)
    values, vectors = _jacobi(a, max_sweeps)
    order = np.argsort(-values, kind="stable")
    return EigenPairs(_freeze(values[order]), _freeze(_canonical_signs(vectors[:, order])))


def generalized_sym_eig(b: ArrayLike, w: ArrayLike) -> EigenPairs:
    """Solve the symmetric-definite pencil ``b v = lambda w v``.

    Reduced to a standard problem through ``w = L L^T``. Eigenvalues at or
    below ``RANK_CUTOFF`` times the largest (including negative rounding noise)
    are reported as exactly zero. Returned vectors have unit Euclidean norm.
    """
    bs = symmetrize(b)
    ws = symmetrize(w)
    if bs.shape != ws.shape:
        raise DimensionMismatch(f"pencil shapes differ: {bs.shape} vs {ws.shape}")
    L = cholesky(ws)
    half = solve_triangular(L, bs)
    reduced = solve_triangular(L, half.T)
    pairs = sym_eig(reduced)
    vectors = solve_triangular(L, np.array(pairs.vectors), transpose=True)
    values = np.array(pairs.values)
    top = values[0] if len(values) else 0.0
    values[values <= RANK_CUTOFF * max(top, 0.0)] = 0.0
    return EigenPairs(_freeze(values), _freeze(_canonical_signs(vectors)))
