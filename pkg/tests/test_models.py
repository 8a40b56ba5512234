import numpy as np
import pytest

from nspr import models, priors
from nspr.errors import InvalidArgumentError, UnsupportedConfigurationError
from nspr.models import Dataset, GaussianMeasurementModel
from nspr.priors import PriorSpec

PRIOR_1D = PriorSpec.truncated_gaussian([0.0], 4.0)
MODEL_1D = GaussianMeasurementModel.isotropic(1, 20, 1.0)


class TestSimulate:
    def test_zero_noise_limit(self):
        model = GaussianMeasurementModel(2, 5, noise_cov=np.zeros((2, 2)))
        data = models.simulate_dataset(model, [3.0, -1.0], seed=0)
        np.testing.assert_array_equal(data.measurements,
                                      np.tile([3.0, -1.0], (5, 1)))

    def test_seed_reproducibility(self):
        a = models.simulate_dataset(MODEL_1D, [5.0], seed=9)
        b = models.simulate_dataset(MODEL_1D, [5.0], seed=9)
        np.testing.assert_array_equal(a.measurements, b.measurements)

    def test_sample_mean_near_truth(self):
        # 4 sigma bound on the mean of 20 unit-noise measurements.
        for seed in range(20):
            data = models.simulate_dataset(MODEL_1D, [5.0], seed=seed)
            assert abs(data.measurements.mean() - 5.0) < 4.0 / np.sqrt(20)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            models.simulate_dataset(MODEL_1D, [5.0, 5.0], seed=0)


class TestLogLikelihood:
    def test_zero_residual(self):
        model = GaussianMeasurementModel.isotropic(2, 1, 1.0)
        data = Dataset(np.array([[1.0, 2.0]]), [1.0, 2.0], 0)
        assert models.log_likelihood(model, data, [1.0, 2.0]) \
            == pytest.approx(-np.log(2.0 * np.pi))

    def test_maximised_at_sample_mean(self):
        data = models.simulate_dataset(MODEL_1D, [5.0], seed=3)
        mbar = data.measurements.mean()
        at_mean = models.log_likelihood(MODEL_1D, data, [mbar])
        for delta in (-0.5, -0.01, 0.01, 0.5):
            assert models.log_likelihood(MODEL_1D, data, [mbar + delta]) < at_mean

    def test_naive_summation_oracle(self):
        cov = np.array([[2.0, 0.4], [0.4, 1.0]])
        model = GaussianMeasurementModel(2, 6, noise_cov=cov)
        data = models.simulate_dataset(model, [1.0, -2.0], seed=4)
        rng = np.random.default_rng(8)
        inv = np.linalg.inv(cov)
        log_det = np.log(np.linalg.det(2.0 * np.pi * cov))
        for _ in range(20):
            theta = rng.uniform(-5, 5, size=2)
            naive = sum(-0.5 * log_det - 0.5 * (theta - m) @ inv @ (theta - m)
                        for m in data.measurements)
            assert models.log_likelihood(model, data, theta) \
                == pytest.approx(naive, abs=1e-12)

    def test_translation_invariance(self):
        data = models.simulate_dataset(MODEL_1D, [5.0], seed=3)
        shifted = Dataset(data.measurements + 7.0, data.theta_star, 0)
        assert models.log_likelihood(MODEL_1D, data, [4.0]) \
            == pytest.approx(models.log_likelihood(MODEL_1D, shifted, [11.0]),
                             abs=1e-12)

    def test_handle_matches(self):
        data = models.simulate_dataset(MODEL_1D, [5.0], seed=3)
        handle = models.likelihood_handle(MODEL_1D, data)
        for theta in (-2.0, 0.0, 5.5):
            assert handle(np.array([theta])) == pytest.approx(
                models.log_likelihood(MODEL_1D, data, [theta]), abs=1e-12)


class TestAnalyticPosterior:
    def test_flat_prior_limit(self):
        data = models.simulate_dataset(MODEL_1D, [5.0], seed=3)
        wide = PriorSpec.truncated_gaussian([0.0], 1e8, lower=-1e9, upper=1e9)
        post = models.analytic_posterior(MODEL_1D, data, wide)
        assert post.mean[0] == pytest.approx(data.measurements.mean(), abs=1e-9)

    def test_paper_posterior_sd(self):
        data = models.simulate_dataset(MODEL_1D, [5.0], seed=3)
        post = models.analytic_posterior(MODEL_1D, data, PRIOR_1D)
        assert np.sqrt(post.cov[0, 0]) == pytest.approx(
            1.0 / np.sqrt(20.0 + 1.0 / 16.0), abs=1e-12)

    def test_equal_precision_midpoint(self):
        model = GaussianMeasurementModel.isotropic(1, 1, 1.0)
        data = Dataset(np.array([[4.0]]), [4.0], 0)
        prior = PriorSpec.truncated_gaussian([0.0], 1.0, lower=-100, upper=100)
        post = models.analytic_posterior(model, data, prior)
        assert post.mean[0] == pytest.approx(2.0)

    def test_support_warning(self):
        data = models.simulate_dataset(MODEL_1D, [5.0], seed=3)
        tight = PriorSpec.truncated_gaussian([0.0], 4.0, lower=-1.0, upper=1.0)
        assert models.analytic_posterior(MODEL_1D, data, tight).support_warning
        assert not models.analytic_posterior(MODEL_1D, data, PRIOR_1D).support_warning


class TestOracleLogEvidence:
    def test_quadrature_matches_closed_form(self):
        # Truncation is negligible for the paper prior, so the bounded
        # quadrature and the untruncated convolution must agree.
        gauss = PriorSpec.gaussian([0.0], np.array([[16.0]]))
        for theta_star in (5.0, 30.0):
            data = models.simulate_dataset(MODEL_1D, [theta_star], seed=2)
            quad_val = models.oracle_log_evidence(MODEL_1D, data, PRIOR_1D)
            closed = models.oracle_log_evidence(MODEL_1D, data, gauss)
            assert quad_val == pytest.approx(closed, abs=1e-6)

    def test_2d_diagonal_factorises(self):
        model = GaussianMeasurementModel.isotropic(2, 1, 1.0)
        prior = PriorSpec.truncated_gaussian([0.0, 0.0], [4.0, 2.0])
        data = models.simulate_dataset(model, [40.0, 40.0], seed=2)
        total = models.oracle_log_evidence(model, data, prior)
        partial = 0.0
        for k in range(2):
            model_k = GaussianMeasurementModel.isotropic(1, 1, 1.0)
            prior_k = PriorSpec.truncated_gaussian([0.0], [4.0, 2.0][k])
            data_k = Dataset(data.measurements[:, k:k + 1],
                             data.theta_star[k:k + 1], 0)
            partial += models.oracle_log_evidence(model_k, data_k, prior_k)
        assert total == pytest.approx(partial, abs=1e-6)

    def test_closed_form_vs_2d_grid(self):
        model = GaussianMeasurementModel.isotropic(2, 1, 1.0)
        cov = 16.0 * np.array([[1.0, 0.5], [0.5, 1.0]])
        prior = PriorSpec.gaussian([0.0, 0.0], cov)
        data = models.simulate_dataset(model, [40.0, 40.0], seed=2)
        closed = models.oracle_log_evidence(model, data, prior)
        grid = models.log_evidence_quadrature_2d(model, data, prior)
        assert closed == pytest.approx(grid, abs=1e-6)

    def test_nearly_constant_likelihood(self):
        # Enormous noise makes the likelihood flat over the support, so the
        # evidence collapses to the constant likelihood value.
        model = GaussianMeasurementModel.isotropic(1, 1, 1e6)
        data = Dataset(np.array([[0.0]]), [0.0], 0)
        expected = models.log_likelihood(model, data, [0.0])
        assert models.oracle_log_evidence(model, data, PRIOR_1D) \
            == pytest.approx(expected, abs=1e-6)

    def test_unsupported_configuration(self):
        model = GaussianMeasurementModel(3, 1,
                                         noise_cov=np.eye(3) + 0.1 * np.ones((3, 3)))
        data = models.simulate_dataset(model, [0.0, 0.0, 0.0], seed=0)
        prior = PriorSpec.truncated_gaussian([0.0] * 3, 4.0)
        with pytest.raises(UnsupportedConfigurationError):
            models.oracle_log_evidence(model, data, prior)
