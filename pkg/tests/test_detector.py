import math

import numpy as np
import pytest

from hdshrink.detector import (
    TailConstants,
    detection_criterion,
    gamma_tilde,
    gamma_tilde_all,
    mu_tilde,
    power_bound,
    sigma_tilde2,
    significance_bound,
    srht,
    srht_many,
    standardize,
)
from hdshrink.errors import DegenerateStatisticError, DimensionError, DomainError
from hdshrink.linalg import apply_spectral, eigh, quadratic_form, sample_covariance
from hdshrink.mpkernel import lw_curve, semicircle_kernel
from hdshrink.shrinkers import PriorSpec, hotelling_shrinker, proposed_shrinker


class TestSrht:
    def test_ones_curve_is_squared_distance(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((5, 12))
        spec = eigh(sample_covariance(X), 12)
        y = rng.standard_normal(5)
        xbar = X.mean(axis=1)
        assert srht(y, xbar, spec, np.ones(5)) == pytest.approx(
            np.sum((y - xbar) ** 2), abs=1e-12
        )

    def test_zero_at_reference_mean(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((4, 9))
        spec = eigh(sample_covariance(X), 9)
        xbar = X.mean(axis=1)
        assert srht(xbar, xbar, spec, np.ones(4)) == 0.0

    def test_two_path_consistency(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((4, 20))
        spec = eigh(sample_covariance(X), 20)
        curve = rng.uniform(0.1, 2.0, 4)
        y = rng.standard_normal(4)
        xbar = X.mean(axis=1)
        direct = srht(y, xbar, spec, curve)
        via_matrix = quadratic_form(apply_spectral(spec, curve), y - xbar)
        assert direct == pytest.approx(via_matrix, abs=1e-10)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((4, 9))
        spec = eigh(sample_covariance(X), 9)
        with pytest.raises(DimensionError):
            srht(np.ones(5), np.ones(4), spec, np.ones(4))

    def test_batched_matches_loop(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((6, 15))
        spec = eigh(sample_covariance(X), 15)
        curve = rng.uniform(0.5, 1.5, 6)
        xbar = X.mean(axis=1)
        Y = rng.standard_normal((6, 7))
        batch = srht_many(Y, xbar, spec, curve)
        singles = [srht(Y[:, j], xbar, spec, curve) for j in range(7)]
        assert np.allclose(batch, singles, atol=1e-12)


class TestMuTilde:
    def test_zero_shrinker(self):
        assert mu_tilde(np.zeros(5), np.ones(5)) == 0.0

    def test_reciprocal_cancellation(self, identity_fit):
        _, _, curve = identity_fit
        assert mu_tilde(1.0 / curve.d_tilde, curve.d_tilde) == pytest.approx(
            1.0, abs=1e-14
        )

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            mu_tilde(np.ones(3), np.ones(4))

    def test_tracks_true_mean_functional(self, identity_fit):
        # colored oracle: m_n = p^{-1} sum f(lam_i) u_i' Sigma u_i with the
        # true Sigma = I for this fixture
        _, spec, curve = identity_fit
        f = hotelling_shrinker(curve.lam).values
        m_true = np.mean(f)  # u'Iu = 1
        gap = abs(mu_tilde(f, curve.d_tilde) - m_true)
        assert gap <= spec.n ** (-1.0 / 6.0)


class TestGammaTilde:
    def test_constant_passthrough(self, identity_fit):
        _, _, curve = identity_fit
        f = np.full(200, 2.5)
        for i in (0, 100, 199):
            assert gamma_tilde(f, curve.lam, curve.d_tilde, curve.n, i) == pytest.approx(
                2.5, abs=1e-12
            )

    def test_large_n_limit_recovers_f(self):
        lam = np.linspace(0.5, 2.0, 10)
        f = lam**2
        d = np.ones(10)
        vals = gamma_tilde_all(f[None, :], lam, d, n=10**9)[0]
        assert np.abs(vals - f).max() <= 1e-5

    def test_matches_bruteforce_double_loop(self, identity_fit):
        _, _, curve = identity_fit
        rng = np.random.default_rng(5)
        f = rng.uniform(0.2, 2.0, 200)
        lam, d, n = curve.lam, curve.d_tilde, curve.n
        delta = n ** (-1.0 / 3.0)
        for i in (0, 57, 199):
            total = 0.0
            for j in range(200):
                width = delta * lam[j]
                _, K = semicircle_kernel((lam[i] - lam[j]) / width)
                total += (f[j] - f[i]) * d[j] * K / width
            expected = f[i] - np.pi / n * total
            got = gamma_tilde(f, lam, d, n, i)
            assert got == pytest.approx(expected, abs=1e-12)


class TestSigmaTilde2:
    def test_zero_shrinker(self, identity_fit):
        _, _, curve = identity_fit
        assert sigma_tilde2(np.zeros(200), curve) == 0.0

    def test_constant_reduction(self, identity_fit):
        _, _, curve = identity_fit
        c = 1.7
        expected = c * c * np.mean(curve.lam * curve.d_tilde)
        assert sigma_tilde2(np.full(200, c), curve) == pytest.approx(expected, rel=1e-12)

    def test_within_15_percent_of_trace_oracle(self, identity_fit):
        _, spec, curve = identity_fit
        shrink, _ = proposed_shrinker(curve, PriorSpec("identity"))
        fS = (spec.eigenvectors * shrink.values) @ spec.eigenvectors.T
        oracle = np.trace(fS @ fS) / spec.p  # Sigma = I
        assert sigma_tilde2(shrink.values, curve) == pytest.approx(oracle, rel=0.15)


class TestStandardize:
    def test_zero_score_at_centering(self, identity_fit):
        _, _, curve = identity_fit
        f = np.ones(200)
        mu = mu_tilde(f, curve.d_tilde)
        score = standardize(mu * 200, f, curve, 200)
        assert score.z == 0.0

    def test_affine_arithmetic(self, identity_fit):
        _, _, curve = identity_fit
        f = np.ones(200)
        score = standardize(42.0, f, curve, 200)
        # invariant: z reconstructs exactly from the stored fields
        assert score.z == (score.t2 - score.mu_tilde * 200) / (
            score.sigma_tilde * math.sqrt(200)
        )

    def test_degenerate_variance_rejected(self, identity_fit):
        _, _, curve = identity_fit
        with pytest.raises(DegenerateStatisticError):
            standardize(1.0, np.zeros(200), curve, 200)

    def test_shift_invariance_of_pipeline(self):
        rng = np.random.default_rng(6)
        p, n = 30, 120
        X = rng.standard_normal((p, n))
        y = rng.standard_normal(p)
        shift = rng.standard_normal(p)

        def score(Xd, yd):
            spec = eigh(sample_covariance(Xd), n)
            curve = lw_curve(spec.eigenvalues, p, n)
            f, _ = proposed_shrinker(curve, PriorSpec("identity"))
            t2 = srht(yd, Xd.mean(axis=1), spec, f.values)
            return standardize(t2, f.values, curve, p).z

        z0 = score(X, y)
        z1 = score(X + shift[:, None], y + shift)
        assert z1 == pytest.approx(z0, rel=1e-9)


class TestDetectionCriterion:
    def test_scale_invariance_exact(self, identity_fit):
        _, _, curve = identity_fit
        rng = np.random.default_rng(7)
        f = rng.uniform(0.5, 1.5, 200)
        hbar = np.ones(200)
        u1 = detection_criterion(f, hbar, curve).u
        u2 = detection_criterion(4.0 * f, hbar, curve).u
        assert u2 == pytest.approx(u1, rel=1e-14)

    def test_zero_shrinker_degenerate(self, identity_fit):
        _, _, curve = identity_fit
        with pytest.raises(DegenerateStatisticError):
            detection_criterion(np.zeros(200), np.ones(200), curve)

    def test_ratio_field_consistency(self, identity_fit):
        _, _, curve = identity_fit
        cv = detection_criterion(np.ones(200), np.ones(200), curve)
        assert cv.u == pytest.approx(cv.numerator / cv.sigma_tilde, rel=1e-15)


class TestTailBounds:
    def test_gaussian_at_zero(self):
        assert significance_bound(0.0, TailConstants(mode="gaussian_exact")) == 0.5

    def test_hanson_wright_at_zero_is_vacuous(self):
        assert significance_bound(0.0, TailConstants(mode="hanson_wright")) == 2.0

    def test_gaussian_tail_value(self):
        val = significance_bound(3.719, TailConstants(mode="gaussian_exact"))
        assert val == pytest.approx(1e-4, abs=2e-6)

    def test_power_bound_vacuous_region(self):
        tc = TailConstants(c=1.0, C=1.0, mode="hanson_wright")
        assert power_bound(1.0, 2.0, tc) == -1.0
        assert power_bound(1.0, 2.0, tc, clamp=True) == 0.0

    def test_power_bound_zero_crossing(self):
        tc = TailConstants(c=1.0, C=1.0)
        u = 2.0 + math.sqrt(math.log(2.0))
        assert power_bound(u, 2.0, tc) == pytest.approx(0.0, abs=1e-14)

    def test_power_bound_monotone(self):
        tc = TailConstants()
        vals = [power_bound(u, 1.0, tc) for u in np.linspace(0, 6, 25)]
        assert np.all(np.diff(vals) >= 0)

    def test_tail_constants_validated(self):
        with pytest.raises(DomainError):
            TailConstants(mode="bootstrap")
        with pytest.raises(DomainError):
            TailConstants(c=-1.0)


class TestSeparationSurrogate:
    def test_h1_shift_tracks_criterion(self):
        # With signal norm gamma = p^(1/4) the mean standardized shift under
        # h1 equals the criterion value in the limit; require 80% of it.
        rng = np.random.default_rng(8)
        p, n, trials = 100, 300, 100
        gamma = p**0.25
        shifts, crits = [], []
        for _ in range(trials):
            X = rng.standard_normal((p, n))
            spec = eigh(sample_covariance(X), n)
            curve = lw_curve(spec.eigenvalues, p, n)
            f, _ = proposed_shrinker(curve, PriorSpec("identity"))
            cv = detection_criterion(f.values, np.ones(p), curve)
            xbar = X.mean(axis=1)
            y0 = rng.standard_normal(p)
            direction = rng.standard_normal(p)
            y1 = y0 + gamma * direction / np.linalg.norm(direction)
            t0 = srht(y0, xbar, spec, f.values)
            t1 = srht(y1, xbar, spec, f.values)
            z0 = standardize(t0, f.values, curve, p).z
            z1 = standardize(t1, f.values, curve, p).z
            shifts.append(z1 - z0)
            crits.append(cv.u)
        assert np.mean(shifts) >= 0.8 * np.mean(crits)
