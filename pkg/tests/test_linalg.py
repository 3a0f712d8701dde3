import numpy as np
import pytest

from hdshrink.errors import DataError, DimensionError
from hdshrink.linalg import (
    apply_spectral,
    eigh,
    load_matrix,
    load_vector,
    quadratic_form,
    sample_covariance,
    save_matrix,
)


class TestSampleCovariance:
    def test_hand_computed_1d(self):
        S = sample_covariance(np.array([[1.0, 3.0]]))
        assert S.shape == (1, 1)
        assert S[0, 0] == pytest.approx(2.0, abs=1e-14)

    def test_identical_columns_give_zero(self):
        X = np.tile(np.array([[2.0], [5.0], [-1.0]]), (1, 6))
        assert np.abs(sample_covariance(X)).max() == 0.0

    def test_matches_bruteforce_double_loop(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((3, 5))
        S = sample_covariance(X)
        xbar = X.mean(axis=1)
        for i in range(3):
            for j in range(3):
                expected = sum(
                    (X[i, k] - xbar[i]) * (X[j, k] - xbar[j]) for k in range(5)
                ) / 4.0
                assert S[i, j] == pytest.approx(expected, abs=1e-12)

    def test_shift_invariance(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((4, 9))
        shift = rng.standard_normal((4, 1))
        S0 = sample_covariance(X)
        S1 = sample_covariance(X + shift)
        assert np.abs(S0 - S1).max() <= 1e-10 * (1 + np.abs(S0).max())

    def test_needs_two_samples(self):
        with pytest.raises(DimensionError):
            sample_covariance(np.ones((3, 1)))

    def test_rejects_nonfinite(self):
        X = np.ones((2, 3))
        X[0, 0] = np.nan
        with pytest.raises(DataError):
            sample_covariance(X)


class TestEigh:
    def test_identity(self):
        spec = eigh(np.eye(3), 10)
        assert np.allclose(spec.eigenvalues, [1.0, 1.0, 1.0])

    def test_diagonal_sorted_with_permutation_vectors(self):
        spec = eigh(np.diag([3.0, 1.0, 2.0]), 10)
        assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0])
        perm = np.abs(spec.eigenvectors)
        assert np.allclose(perm @ perm.T, np.eye(3), atol=1e-12)
        assert np.allclose(sorted(np.argmax(perm, axis=0)), [0, 1, 2])

    def test_reconstruction(self):
        rng = np.random.default_rng(2)
        A = rng.standard_normal((5, 5))
        S = (A + A.T) / 2.0
        spec = eigh(S, 10)
        rebuilt = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.T
        assert np.abs(rebuilt - S).max() <= 1e-8 * (1 + np.abs(S).max())

    def test_orthonormal(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((6, 6))
        spec = eigh((A + A.T) / 2.0, 12)
        U = spec.eigenvectors
        assert np.abs(U.T @ U - np.eye(6)).max() <= 1e-10

    def test_deterministic_signs(self):
        rng = np.random.default_rng(4)
        A = rng.standard_normal((5, 5))
        S = (A + A.T) / 2.0
        u1 = eigh(S, 10).eigenvectors
        u2 = eigh(S.copy(), 10).eigenvectors
        assert np.array_equal(u1, u2)
        anchors = np.argmax(np.abs(u1), axis=0)
        assert np.all(u1[anchors, np.arange(5)] > 0)

    def test_small_asymmetry_absorbed(self):
        S = np.eye(3)
        S[0, 1] += 1e-14
        spec = eigh(S, 5)
        assert np.allclose(spec.eigenvalues, 1.0)


class TestApplySpectral:
    def test_identity_curve_reproduces_matrix(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((4, 4))
        S = (A + A.T) / 2.0
        spec = eigh(S, 8)
        assert np.abs(apply_spectral(spec, spec.eigenvalues) - S).max() <= 1e-10

    def test_ones_curve_gives_identity(self):
        rng = np.random.default_rng(6)
        A = rng.standard_normal((4, 4))
        spec = eigh((A + A.T) / 2.0, 8)
        assert np.abs(apply_spectral(spec, np.ones(4)) - np.eye(4)).max() <= 1e-10

    def test_reciprocal_curve_inverts(self):
        rng = np.random.default_rng(7)
        A = rng.standard_normal((4, 8))
        S = sample_covariance(A) + 0.5 * np.eye(4)
        spec = eigh(S, 8)
        inv = apply_spectral(spec, 1.0 / spec.eigenvalues)
        assert np.abs(inv - np.linalg.inv(S)).max() <= 1e-8

    def test_curve_length_checked(self):
        spec = eigh(np.eye(3), 5)
        with pytest.raises(DimensionError):
            apply_spectral(spec, np.ones(4))

    def test_roundtrip_recovers_curve(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            A = rng.standard_normal((5, 5))
            spec = eigh((A + A.T) / 2.0, 10)
            c = rng.uniform(0.1, 3.0, 5)
            M = apply_spectral(spec, c)
            back = eigh(M, 10).eigenvalues
            assert np.abs(back - np.sort(c)).max() <= 1e-8


class TestQuadraticForm:
    def test_identity(self):
        assert quadratic_form(np.eye(2), np.array([3.0, 4.0])) == pytest.approx(25.0)

    def test_zero_vector(self):
        assert quadratic_form(np.eye(3), np.zeros(3)) == 0.0

    def test_matches_double_sum(self):
        rng = np.random.default_rng(9)
        A = rng.standard_normal((4, 4))
        M = (A + A.T) / 2.0
        v = rng.standard_normal(4)
        expected = sum(M[i, j] * v[i] * v[j] for i in range(4) for j in range(4))
        assert quadratic_form(M, v) == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            quadratic_form(np.eye(3), np.ones(2))

    def test_nonnegative_on_sample_covariances(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            X = rng.standard_normal((5, 8))
            S = sample_covariance(X)
            v = rng.standard_normal(5)
            assert quadratic_form(S, v) >= -1e-12


class TestCsvIO:
    def test_matrix_roundtrip(self, tmp_path):
        rng = np.random.default_rng(11)
        M = rng.standard_normal((3, 4))
        path = tmp_path / "m.csv"
        save_matrix(path, M)
        assert np.abs(load_matrix(path) - M).max() <= 1e-12

    def test_vector_roundtrip(self, tmp_path):
        v = np.array([1.5, -2.25, 3.0])
        path = tmp_path / "v.csv"
        save_matrix(path, v)
        assert np.allclose(load_vector(path), v)

    def test_no_header_and_comma_separator(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("1.0,2.0\n3.5,4.5\n")
        M = load_matrix(path)
        assert M.shape == (2, 2)
        assert M[1, 0] == 3.5
