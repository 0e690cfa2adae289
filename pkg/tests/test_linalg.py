import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucfda import linalg
from ucfda.errors import DimensionMismatch, NotPositiveDefinite


def random_spd(rng, n):
    a = rng.normal(size=(n, n))
    return a.T @ a + np.eye(n)


def random_sym(rng, n):
    a = rng.normal(size=(n, n))
    return (a + a.T) / 2


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(linalg.cholesky(np.eye(3)), np.eye(3))

    def test_hand_2x2(self):
        np.testing.assert_allclose(linalg.cholesky([[4, 2], [2, 3]]), [[2, 0], [1, np.sqrt(2)]], rtol=1e-15)

    def test_random_reconstruction(self, rng):
        m = random_spd(rng, 5)
        L = linalg.cholesky(m)
        assert np.allclose(L, np.tril(L))
        assert np.linalg.norm(L @ L.T - m) / np.linalg.norm(m) < 1e-10

    def test_matches_numpy(self, rng):
        m = random_spd(rng, 8)
        np.testing.assert_allclose(linalg.cholesky(m), np.linalg.cholesky(m), rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("m", [[[1, 0], [0, -1]], [[1, 1], [1, 1]], [[0.0]]])
    def test_not_positive_definite(self, m):
        with pytest.raises(NotPositiveDefinite):
            linalg.cholesky(m)

    def test_rank_deficient_with_rounding_noise_rejected(self, rng):
        # exactly singular in exact arithmetic; rounding must not let it through
        a = rng.normal(size=(6, 3))
        with pytest.raises(NotPositiveDefinite):
            linalg.cholesky(a @ a.T)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_reconstruction_property(self, n, seed):
        m = random_spd(np.random.default_rng(seed), n)
        L = linalg.cholesky(m)
        assert np.linalg.norm(L @ L.T - m) <= 1e-10 * np.linalg.norm(m)


class TestSolvesAndLogDet:
    def test_solve_identity(self):
        v = np.array([1.0, -2.0, 3.5])
        np.testing.assert_array_equal(linalg.solve_spd(np.eye(3), v), v)

    def test_solve_diag(self):
        np.testing.assert_allclose(linalg.solve_spd(np.diag([2.0, 4.0]), [2.0, 4.0]), [1.0, 1.0])

    def test_solve_random_residual(self, rng):
        m = random_spd(rng, 7)
        b = rng.normal(size=7)
        x = linalg.solve_spd(m, b)
        assert np.linalg.norm(m @ x - b) <= 1e-9 * np.linalg.norm(b)

    def test_solve_matrix_rhs(self, rng):
        m = random_spd(rng, 4)
        b = rng.normal(size=(4, 3))
        np.testing.assert_allclose(m @ linalg.solve_spd(m, b), b, atol=1e-10)

    def test_solve_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            linalg.solve_spd(np.eye(3), [1.0, 2.0])

    def test_log_det_identity(self):
        assert linalg.log_det(np.eye(4)) == 0.0

    def test_log_det_diag(self):
        assert linalg.log_det(np.diag([np.e, np.e**2])) == pytest.approx(3.0, rel=1e-15)

    def test_log_det_matches_eigenvalues(self, rng):
        m = random_spd(rng, 4)
        assert linalg.log_det(m) == pytest.approx(np.sum(np.log(np.linalg.eigvalsh(m))), rel=1e-9)

    def test_log_det_singular(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.log_det(np.zeros((2, 2)))


class TestSymEig:
    def test_diagonal(self):
        pairs = linalg.sym_eig(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(pairs.values, [3, 2, 1])
        np.testing.assert_allclose(pairs.vectors, np.eye(3)[:, [0, 2, 1]])

    def test_classic_2x2(self):
        pairs = linalg.sym_eig([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(pairs.values, [3, 1], rtol=1e-14)
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(pairs.vectors[:, 0], [s, s], rtol=1e-14)
        # largest-magnitude entry positive; ties resolve to the first entry
        np.testing.assert_allclose(pairs.vectors[:, 1], [s, -s], rtol=1e-14)

    def test_random_residual_and_orthonormality(self, rng):
        m = random_sym(rng, 6)
        pairs = linalg.sym_eig(m)
        V, lam = pairs.vectors, pairs.values
        for k in range(6):
            assert np.linalg.norm(m @ V[:, k] - lam[k] * V[:, k]) < 1e-8
        np.testing.assert_allclose(V.T @ V, np.eye(6), atol=1e-8)
        assert np.all(np.diff(lam) <= 0)

    def test_matches_numpy_eigenvalues(self, rng):
        m = random_sym(rng, 20)
        np.testing.assert_allclose(linalg.sym_eig(m).values, np.linalg.eigvalsh(m)[::-1], atol=1e-11)

    def test_sign_convention(self, rng):
        pairs = linalg.sym_eig(random_sym(rng, 9))
        V = pairs.vectors
        lead = np.argmax(np.abs(V), axis=0)
        assert np.all(V[lead, np.arange(9)] > 0)

    def test_deterministic(self, rng):
        m = random_sym(rng, 10)
        a, b = linalg.sym_eig(m), linalg.sym_eig(m.copy())
        assert a.values.tobytes() == b.values.tobytes()
        assert a.vectors.tobytes() == b.vectors.tobytes()

    def test_outputs_are_read_only(self):
        pairs = linalg.sym_eig(np.eye(2))
        with pytest.raises(ValueError):
            pairs.values[0] = 5.0

    def test_symmetrizes_input(self):
        m = np.array([[2.0, 1.0 + 1e-13], [1.0, 2.0]])
        np.testing.assert_allclose(linalg.sym_eig(m).values, [3, 1], rtol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 15), st.integers(0, 2**32 - 1))
    def test_residual_property(self, n, seed):
        m = random_sym(np.random.default_rng(seed), n)
        pairs = linalg.sym_eig(m)
        scale = max(np.linalg.norm(m), 1.0)
        resid = m @ pairs.vectors - pairs.vectors * pairs.values
        assert np.max(np.linalg.norm(resid, axis=0)) < 1e-8 * scale


class TestGeneralizedEig:
    def test_identity_pencil(self):
        np.testing.assert_allclose(linalg.generalized_sym_eig(np.eye(3), np.eye(3)).values, [1, 1, 1])

    def test_reduces_to_standard(self):
        pairs = linalg.generalized_sym_eig(np.diag([2.0, 0.0]), np.eye(2))
        np.testing.assert_allclose(pairs.values, [2, 0])
        np.testing.assert_allclose(pairs.vectors[:, 0], [1, 0])

    @pytest.mark.parametrize("C,p", [(2, 3), (3, 5), (5, 12), (10, 20)])
    def test_random_pencil(self, rng, C, p):
        d = rng.normal(size=(C - 1, p))
        b = d.T @ d
        w = random_spd(rng, p)
        pairs = linalg.generalized_sym_eig(b, w)
        scale = np.linalg.norm(b) + np.linalg.norm(w)
        for lam, v in zip(pairs.values, pairs.vectors.T):
            assert np.linalg.norm(b @ v - lam * w @ v) <= 1e-7 * scale
        assert np.all(pairs.values >= -1e-10)
        np.testing.assert_allclose(np.linalg.norm(pairs.vectors, axis=0), 1.0, rtol=1e-12)
        assert np.count_nonzero(pairs.values) <= min(C - 1, p)
        assert np.all(np.diff(pairs.values) <= 0)

    def test_matches_reference_eigenvalues(self, rng):
        b = random_sym(rng, 6)
        b = b @ b
        w = random_spd(rng, 6)
        ref = np.sort(np.real(np.linalg.eigvals(np.linalg.solve(w, b))))[::-1]
        np.testing.assert_allclose(linalg.generalized_sym_eig(b, w).values, ref, rtol=1e-9, atol=1e-12)

    def test_singular_w(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.generalized_sym_eig(np.eye(2), np.diag([1.0, 0.0]))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            linalg.generalized_sym_eig(np.eye(2), np.eye(3))

    def test_p64_runs(self, rng):
        d = rng.normal(size=(9, 64))
        pairs = linalg.generalized_sym_eig(d.T @ d, random_spd(rng, 64))
        assert np.count_nonzero(pairs.values) == 9
