"""Unit tests for the model API.

Feature: choice-gibbs
"""

import unittest

import numpy as np

import sys
sys.path.insert(0, '.')

from src.estimator import coef, default_prior, diag, fit, loglik, plot_data, predict, summary
from src.models import Dataset, ModelType, PriorSpec, SamplerConfig
from src.validator import ColumnCountError, DesignDimensionError, NonBinaryOutcomeError
from tests.fixtures import binary_data, binomial_data, fake_fit, mnl_data

QUICK = dict(draws=60, burnin=10)


class TestFit(unittest.TestCase):
    """Estimation entry point."""

    def test_logit_fit(self):
        data = binary_data()
        result = fit(data, "logit", config=SamplerConfig(seed=1, **QUICK))
        self.assertIs(result.model_type, ModelType.LOGIT)
        self.assertIs(result.data, data)
        self.assertEqual(result.draws.beta.shape, (60, 2))
        self.assertEqual(result.prior, PriorSpec(coef_dim=2, A0=4.0, G0=100.0, intercept_index=0))
        self.assertIsNone(result.baseline)

    def test_deterministic_given_seed(self):
        data = binomial_data()
        a = fit(data, ModelType.BINOMIAL, config=SamplerConfig(seed=5, **QUICK))
        b = fit(data, ModelType.BINOMIAL, config=SamplerConfig(seed=5, **QUICK))
        self.assertTrue(np.array_equal(a.draws.beta, b.draws.beta))

    def test_mnl_default_baseline(self):
        data = mnl_data(counts=(5, 12, 8), labels=("general", "academic", "vocation"))
        result = fit(data, "mnl", config=SamplerConfig(seed=2, **QUICK))
        self.assertEqual(result.baseline, "academic")
        self.assertIsNone(result.data.baseline)
        self.assertEqual(result.draws.category_labels, ["academic", "general", "vocation"])
        self.assertTrue(np.all(result.draws.beta[:, :, 0] == 0.0))
        self.assertIn("Category 'academic' is the baseline category.", result.describe())

    def test_mnl_explicit_baseline(self):
        result = fit(mnl_data(baseline="c"), "mnl", config=SamplerConfig(seed=3, **QUICK))
        self.assertEqual(result.baseline, "c")

    def test_non_binary_outcome(self):
        data = Dataset(y=[0, 1, 2], X=np.ones((3, 1)))
        with self.assertRaises(NonBinaryOutcomeError):
            fit(data, "probit")

    def test_prior_dimension_mismatch(self):
        with self.assertRaises(DesignDimensionError):
            fit(binary_data(), "logit", prior=PriorSpec(coef_dim=3), config=SamplerConfig(**QUICK))

    def test_unknown_model_type(self):
        with self.assertRaises(ValueError):
            fit(binary_data(), "tobit")

    def test_describe_block(self):
        result = fit(binary_data(n=25), "probit", config=SamplerConfig(seed=4, **QUICK))
        lines = result.describe().splitlines()
        self.assertEqual(lines[0], "--- Bayesian Probit Results ---")
        self.assertIn("N = 25", lines)
        self.assertIn("Analysis based on 60 posterior draws after a burn-in period of 10 iterations.", lines)
        self.assertTrue(lines[-1].startswith("MCMC sampling took a total of "))

    def test_default_prior_without_intercept(self):
        data = Dataset(y=[0, 1], X=[[0.5], [2.0]], column_names=["x"])
        self.assertIsNone(default_prior(data).intercept_index)


class TestPredict(unittest.TestCase):
    """Predicted probabilities."""

    def test_logit_zero_draws(self):
        result = fake_fit(np.zeros((10, 2)), np.column_stack([np.ones(4), np.arange(4.0)]))
        prediction = predict(result)
        self.assertTrue(np.allclose(prediction.mean, 0.5))
        self.assertTrue(np.allclose(prediction.lower, 0.5))

    def test_logit_single_draw(self):
        result = fake_fit(np.array([[np.log(3.0)]]), np.ones((1, 1)))
        self.assertAlmostEqual(float(predict(result).mean[0]), 0.75, places=12)

    def test_probit_link(self):
        result = fake_fit(np.zeros((3, 1)), np.ones((2, 1)), model_type=ModelType.PROBIT)
        self.assertTrue(np.allclose(predict(result, newdata=[[1.0], [-2.0]]).mean, 0.5))

    def test_binomial_returns_success_probability(self):
        result = fake_fit(np.full((5, 1), np.log(3.0)), np.ones((2, 1)), model_type=ModelType.BINOMIAL)
        self.assertTrue(np.allclose(predict(result).mean, 0.75))

    def test_mnl_uniform(self):
        result = fake_fit(np.zeros((10, 1, 3)), np.ones((4, 1)), model_type=ModelType.MNL,
                          labels=["a", "b", "c"], baseline="a")
        prediction = predict(result)
        self.assertEqual(prediction.mean.shape, (4, 3))
        self.assertTrue(np.allclose(prediction.mean, 1 / 3))
        self.assertTrue(np.allclose(prediction.mean.sum(axis=1), 1.0))
        self.assertEqual(prediction.categories, ["a", "b", "c"])

    def test_intervals_bracket_mean(self):
        data = binary_data(n=40)
        result = fit(data, "logit", config=SamplerConfig(seed=6, **QUICK))
        prediction = predict(result)
        self.assertTrue(np.all(prediction.lower <= prediction.mean))
        self.assertTrue(np.all(prediction.mean <= prediction.upper))
        self.assertTrue(np.all((prediction.lower >= 0) & (prediction.upper <= 1)))

    def test_monotone_in_linear_predictor(self):
        result = fake_fit(np.array([[0.3, 1.2]]), np.column_stack([np.ones(2), [0.0, 1.0]]))
        grid = np.column_stack([np.ones(50), np.linspace(-3, 3, 50)])
        self.assertTrue(np.all(np.diff(predict(result, newdata=grid).mean) >= 0))

    def test_column_count_mismatch(self):
        result = fake_fit(np.zeros((3, 2)), np.ones((2, 2)))
        with self.assertRaises(ColumnCountError):
            predict(result, newdata=np.ones((2, 3)))


class TestExtractors(unittest.TestCase):
    """coef, loglik, diag, summary and plot data."""

    def test_coef_means_are_column_means(self):
        beta = np.random.default_rng(0).standard_normal((200, 3))
        result = fake_fit(beta, np.ones((5, 3)))
        estimates = coef(result)
        self.assertTrue(np.array_equal(estimates.mean, beta.mean(axis=0)))
        self.assertTrue(np.all(estimates.lower < estimates.upper))

    def test_single_draw_point_estimate(self):
        result = fake_fit(np.array([[0.25, -1.5]]), np.ones((3, 2)))
        estimates = coef(result)
        self.assertEqual(estimates.mean.tolist(), [0.25, -1.5])
        self.assertEqual(estimates.lower.tolist(), [0.25, -1.5])

    def test_coef_mnl_free_categories(self):
        beta = np.zeros((50, 2, 3))
        beta[:, :, 2] = 1.0
        result = fake_fit(beta, np.ones((4, 2)), model_type=ModelType.MNL, labels=["a", "b", "c"], baseline="b")
        estimates = coef(result)
        self.assertEqual(estimates.categories, ["a", "c"])
        self.assertEqual(estimates.mean.shape, (2, 2))
        self.assertTrue(np.allclose(estimates.mean[:, 1], 1.0))

    def test_loglik_at_posterior_mean(self):
        X = np.column_stack([np.ones(8), np.arange(8.0)])
        result = fake_fit(np.zeros((10, 2)), X)
        value = loglik(result)
        self.assertAlmostEqual(value.value, -8 * np.log(2), places=10)
        self.assertEqual(value.df, 2)
        self.assertEqual(str(value), f"'log Lik.' {-8 * np.log(2):.3f} (df=2)")

    def test_loglik_mnl(self):
        result = fake_fit(np.zeros((10, 2, 3)), np.ones((6, 2)), model_type=ModelType.MNL,
                          labels=["a", "b", "c"], baseline="a")
        value = loglik(result)
        self.assertAlmostEqual(value.value, -6 * np.log(3), places=10)
        self.assertEqual(value.df, 4)

    def test_diag_and_summary(self):
        result = fit(binary_data(), "logit", config=SamplerConfig(seed=7, draws=100, burnin=10))
        report = diag(result)
        self.assertEqual(report.saved_draws, 100)
        self.assertIsNotNone(report.esr)
        table = summary(result, q=(0.1, 0.9), names=["Intercept", "Slope"])
        self.assertEqual([r.name for r in table.rows], ["Intercept", "Slope"])
        self.assertEqual(table.q, (0.1, 0.9))

    def test_plot_data_sorted(self):
        beta = np.tile([0.1, -2.0, 1.0], (20, 1))
        result = fake_fit(beta, np.ones((3, 3)), names=["a", "b", "c"])
        rows = plot_data(result, sort=True)
        self.assertEqual([r.name for r in rows], ["b", "c", "a"])


if __name__ == '__main__':
    unittest.main()
