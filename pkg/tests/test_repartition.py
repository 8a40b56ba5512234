import numpy as np
import pytest
from scipy.stats import kstest

from nspr import models, priors, repartition, sampler
from nspr.errors import DegenerateBetaBoundsError, InvalidArgumentError
from nspr.priors import PriorSpec
from nspr.repartition import BetaBounds, InferenceProblem

PRIOR_1D = PriorSpec.truncated_gaussian([0.0], 4.0)


def make_problem(theta_star=50.0, mode="auto", seed=1, prior=PRIOR_1D):
    model = models.GaussianMeasurementModel.isotropic(prior.dim, 20, 1.0)
    data = models.simulate_dataset(model, [theta_star] * prior.dim, seed)
    return InferenceProblem(prior, models.likelihood_handle(model, data),
                            mode=mode), model, data


class TestEffectiveLikelihood:
    def test_reduces_to_likelihood_at_beta_one(self):
        problem, model, data = make_problem()
        for theta in (-3.0, 0.0, 12.0):
            assert repartition.log_effective_likelihood(problem, [theta], 1.0) \
                == pytest.approx(models.log_likelihood(model, data, [theta]),
                                 abs=1e-10)

    def test_repartition_identity(self):
        # Tempered likelihood times tempered prior equals the original product.
        problem, model, data = make_problem()
        rng = np.random.default_rng(0)
        for _ in range(200):
            theta = rng.uniform(-50, 50)
            beta = rng.random()
            lhs = (repartition.log_effective_likelihood(problem, [theta], beta)
                   + priors.log_modified_prior_density(PRIOR_1D, beta, [theta]))
            rhs = (models.log_likelihood(model, data, [theta])
                   + priors.log_density(PRIOR_1D, [theta]))
            assert abs(lhs - rhs) < 1e-10

    def test_composition_of_oracle_parts(self):
        problem, model, data = make_problem(theta_star=50.0)
        theta, beta = 50.0, 0.05
        expected = (models.log_likelihood(model, data, [theta])
                    + (1.0 - beta) * priors.log_density(PRIOR_1D, [theta])
                    + priors.log_power_norm(PRIOR_1D, beta))
        assert repartition.log_effective_likelihood(problem, [theta], beta) \
            == pytest.approx(expected, abs=1e-10)

    def test_outside_support_is_rejection(self):
        problem, _, _ = make_problem()
        assert repartition.log_effective_likelihood(problem, [60.0], 0.5) == -np.inf

    def test_bad_beta_raises(self):
        problem, _, _ = make_problem()
        with pytest.raises(InvalidArgumentError):
            repartition.log_effective_likelihood(problem, [0.0], 1.5)


class TestJointTransform:
    def test_beta_endpoints(self):
        problem, _, _ = make_problem(mode="auto")
        beta, _ = repartition.joint_transform(problem, [0.0, 0.5])
        assert beta == 0.0
        beta, _ = repartition.joint_transform(problem, [1.0, 0.5])
        assert beta == 1.0

    def test_standard_mode_maps_center_to_mean(self):
        problem, _, _ = make_problem(mode="standard")
        beta, theta = repartition.joint_transform(problem, [0.5])
        assert beta == 1.0
        assert theta[0] == pytest.approx(0.0, abs=1e-12)

    def test_total_dimension(self):
        auto, _, _ = make_problem(mode="auto")
        std, _, _ = make_problem(mode="standard")
        assert auto.total_dim == 2
        assert std.total_dim == 1
        with pytest.raises(InvalidArgumentError):
            repartition.joint_transform(auto, [0.5])

    def test_unbounded_prior_clamps_beta_range(self):
        prior = PriorSpec.gaussian([0.0, 0.0], 16.0 * np.eye(2))
        problem = InferenceProblem(prior, lambda t: 0.0, mode="auto")
        assert problem.beta_range[0] == pytest.approx(prior.beta_min)


class TestBetaBounds:
    def test_extrema(self):
        bounds = repartition.beta_bounds([0.1, 0.2, 0.3])
        assert (bounds.beta_minus, bounds.beta_plus) == (0.1, 0.3)

    def test_uniform_extrema_order_statistics(self):
        # P(max of 1000 uniforms < 0.99) = 0.99^1000 ~= 4e-5.
        rng = np.random.default_rng(7)
        count = 0
        for _ in range(20):
            bounds = repartition.beta_bounds(rng.random(1000))
            count += bounds.beta_plus >= 0.99
        assert count == 20

    def test_percentile_method(self):
        betas = np.linspace(0.0, 1.0, 1001)
        bounds = repartition.beta_bounds(betas, method="percentile")
        assert bounds.beta_minus == pytest.approx(0.01, abs=1e-6)
        assert bounds.beta_plus == pytest.approx(0.99, abs=1e-6)

    def test_empty_raises(self):
        with pytest.raises(InvalidArgumentError):
            repartition.beta_bounds([])


class TestCorrectedLogEvidence:
    def test_full_range_no_correction(self):
        bounds = BetaBounds(0.0, 1.0)
        assert repartition.corrected_log_evidence(-10.0, bounds) == -10.0

    def test_half_range(self):
        bounds = BetaBounds(0.0, 0.5)
        assert repartition.corrected_log_evidence(-10.0, bounds) \
            == pytest.approx(-10.0 + np.log(2.0))

    def test_degenerate_bounds(self):
        with pytest.raises(DegenerateBetaBoundsError) as info:
            repartition.corrected_log_evidence(-10.0, BetaBounds(0.3, 0.3))
        assert info.value.uncorrected_log_z == -10.0

    def test_affine_range_consistency(self):
        narrow = repartition.corrected_log_evidence(
            -5.0, BetaBounds(0.1, 0.2), beta_range=(0.0, 0.5))
        full = repartition.corrected_log_evidence(
            -5.0, BetaBounds(0.2, 0.4), beta_range=(0.0, 1.0))
        assert narrow == pytest.approx(full)


class TestStatisticalProperties:
    def test_beta_marginal_uniform_for_representative_prior(self):
        # theta*=0 is fully representative, so the inferred exponent should
        # recover its flat prior: KS against U[0,1] at the 1% level in >= 8/10.
        model = models.GaussianMeasurementModel.isotropic(1, 20, 1.0)
        passes = 0
        for rep in range(10):
            data = models.simulate_dataset(model, [0.0], seed=500 + rep)
            problem = InferenceProblem(
                PRIOR_1D, models.likelihood_handle(model, data), mode="auto")
            result = sampler.run(problem, sampler.SamplerConfig(seed=rep))
            betas = result.beta_samples(rng=np.random.default_rng(rep))
            _, pvalue = kstest(betas, "uniform")
            passes += pvalue > 0.01
        assert passes >= 8

    def test_beta_theta_factorisation(self):
        problem, _, _ = make_problem(theta_star=30.0, mode="auto")
        result = sampler.run(problem, sampler.SamplerConfig(seed=5))
        eq = sampler.equal_weight_samples(result,
                                         rng=np.random.default_rng(1))
        corr = np.corrcoef(eq[:, 0], eq[:, 1])[0, 1]
        assert abs(corr) < 0.1
