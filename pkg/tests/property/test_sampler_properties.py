"""Monte-Carlo properties of the Gibbs samplers.

Feature: choice-gibbs

These run long chains; deselect them with `pytest -m "not slow"`.
"""

import numpy as np
import pytest
from scipy.special import expit, log_expit, log_ndtr, logsumexp, ndtr, softmax
from scipy.stats import ks_2samp

import sys
sys.path.insert(0, '.')

from src.bayes_linear import prior_covariance, prior_precision
from src.diagnostics import diag_report, ess
from src.models import Dataset, ModelType, PriorSpec, SamplerConfig
from src.randvar import RngStream
from src.samplers import run_chain, single_draw
from tests.fixtures import binary_data, binomial_data, design, mnl_data

pytestmark = pytest.mark.slow

GRID = np.linspace(-5.0, 5.0, 401)


def _grid_moments(log_post: np.ndarray, points: np.ndarray):
    weights = np.exp(log_post - np.max(log_post))
    weights /= weights.sum()
    mean = weights @ points
    var = weights @ (points - mean) ** 2
    return mean, var


def _grid_points() -> np.ndarray:
    a, b = np.meshgrid(GRID, GRID, indexing="ij")
    return np.column_stack([a.ravel(), b.ravel()])


def _binary_oracle(model_type: ModelType, data: Dataset, prior: PriorSpec):
    points = _grid_points()
    eta = points @ data.X.T
    y = np.asarray(data.y, dtype=float)
    if model_type is ModelType.PROBIT:
        loglik = (y * log_ndtr(eta) + (1 - y) * log_ndtr(-eta)).sum(axis=1)
    elif model_type is ModelType.LOGIT:
        loglik = (y * log_expit(eta) + (1 - y) * log_expit(-eta)).sum(axis=1)
    else:
        trials = np.asarray(data.Ni, dtype=float)
        loglik = (y * log_expit(eta) + (trials - y) * log_expit(-eta)).sum(axis=1)
    log_prior = -0.5 * np.einsum("ij,jk,ik->i", points, prior_precision(prior), points)
    return _grid_moments(loglik + log_prior, points)


def _se(chain: np.ndarray) -> float:
    return float(np.std(chain, ddof=1) / np.sqrt(ess(chain)))


@pytest.mark.parametrize("model_type, data", [
    (ModelType.PROBIT, binary_data(n=30, probit=True, seed=1)),
    (ModelType.LOGIT, binary_data(n=30, seed=2)),
    (ModelType.BINOMIAL, binomial_data(n=30, seed=3)),
])
def test_grid_oracle_binary_models(model_type, data):
    """
    Feature: choice-gibbs
    Property 15: Grid Oracle Agreement

    Posterior means match quadrature of prior × likelihood within 0.05
    and variances within 10%.
    """
    prior = PriorSpec(coef_dim=2, A0=4.0, G0=100.0, intercept_index=0)
    mean, var = _binary_oracle(model_type, data, prior)
    draws = run_chain(model_type, data, prior, SamplerConfig(draws=20_000, burnin=1000, seed=11)).beta
    assert np.all(np.abs(draws.mean(axis=0) - mean) < 0.05)
    assert np.all(np.abs(draws.var(axis=0) / var - 1.0) < 0.10)


@pytest.mark.parametrize("model_type", [ModelType.PROBIT, ModelType.LOGIT])
def test_grid_oracle_without_ones_column(model_type):
    """
    Feature: choice-gibbs
    Property 15: Grid Oracle Agreement

    A design with no column of ones, boosting on and the prior's
    intercept slot pointing at an ordinary covariate still targets the
    exact posterior.
    """
    gen = np.random.default_rng(13)
    X = gen.standard_normal((40, 2))
    y = _simulate_outcome(model_type, X, np.array([0.6, -0.9]), np.ones(40), gen)
    data = Dataset(y=y, X=X)
    prior = PriorSpec(coef_dim=2, A0=4.0, G0=100.0, intercept_index=0)
    mean, var = _binary_oracle(model_type, data, prior)
    config = SamplerConfig(draws=20_000, burnin=1000, boost=True, seed=14)
    draws = run_chain(model_type, data, prior, config).beta
    assert np.all(np.abs(draws.mean(axis=0) - mean) < 0.05)
    assert np.all(np.abs(draws.var(axis=0) / var - 1.0) < 0.10)


def test_grid_oracle_mnl():
    """
    Feature: choice-gibbs
    Property 15: Grid Oracle Agreement

    Intercept-only multinomial logit with three categories against a
    two-dimensional quadrature over the free intercepts.
    """
    data = mnl_data(counts=(12, 8, 10), baseline="a", seed=4)
    prior = PriorSpec(coef_dim=1, A0=4.0, G0=100.0, intercept_index=0)
    points = _grid_points()
    counts = np.array([12, 8, 10])
    eta = np.column_stack([np.zeros(len(points)), points])
    loglik = eta @ counts - counts.sum() * logsumexp(eta, axis=1)
    log_prior = -0.5 * np.sum(points ** 2, axis=1) / 104.0
    mean, var = _grid_moments(loglik + log_prior, points)

    draws = run_chain(ModelType.MNL, data, prior, SamplerConfig(draws=20_000, burnin=1000, seed=12)).beta
    free = draws[:, 0, 1:]
    assert np.all(draws[:, 0, 0] == 0.0)
    assert np.all(np.abs(free.mean(axis=0) - mean) < 0.05)
    assert np.all(np.abs(free.var(axis=0) / var - 1.0) < 0.10)


def _simulate_outcome(model_type: ModelType, X: np.ndarray, beta: np.ndarray, trials: np.ndarray,
                      gen: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    if model_type is ModelType.MNL:
        probs = softmax(X @ beta, axis=1)
        picks = (gen.uniform(size=(n, 1)) > np.cumsum(probs, axis=1)).sum(axis=1)
        return np.array([str(min(k, 2)) for k in picks])
    eta = X @ beta
    if model_type is ModelType.PROBIT:
        return (gen.uniform(size=n) < ndtr(eta)).astype(float)
    if model_type is ModelType.LOGIT:
        return (gen.uniform(size=n) < expit(eta)).astype(float)
    return gen.binomial(trials.astype(int), expit(eta)).astype(float)


@pytest.mark.parametrize("model_type", list(ModelType))
def test_getting_it_right(model_type):
    """
    Feature: choice-gibbs
    Property 16: Successive-Conditional Simulation

    Alternating outcome simulation with single sweeps leaves the prior
    invariant: first and second moments of every free coefficient match
    the prior within 4 standard errors.
    """
    n_iter = 20_000
    gen = np.random.default_rng(21)
    rng = RngStream(22)
    X = design(20, seed=23)
    trials = gen.integers(1, 4, size=20).astype(float)
    prior = PriorSpec(coef_dim=2, A0=1.0, G0=1.0, intercept_index=0)
    sd = np.sqrt(np.diag(prior_covariance(prior)))

    if model_type is ModelType.MNL:
        beta = np.zeros((2, 3))
        beta[:, 1:] = gen.normal(0.0, sd[:, None], (2, 2))
    else:
        beta = gen.normal(0.0, sd)

    trace = []
    for _ in range(n_iter):
        y = _simulate_outcome(model_type, X, beta, trials, gen)
        if model_type is ModelType.MNL:
            data = Dataset(y=y, X=X, column_names=["intercept", "x1"],
                           category_labels=["0", "1", "2"], baseline="0")
        else:
            data = Dataset(y=y, X=X, Ni=trials if model_type is ModelType.BINOMIAL else None,
                           column_names=["intercept", "x1"])
        beta = single_draw(model_type, data, prior, beta, rng)
        trace.append(beta[:, 1:].ravel() if model_type is ModelType.MNL else beta.copy())

    trace = np.array(trace)
    # MNL columns run (coef 0, cat 1), (coef 0, cat 2), (coef 1, cat 1), (coef 1, cat 2)
    target_var = np.repeat(sd ** 2, 2) if model_type is ModelType.MNL else sd ** 2
    for j in range(trace.shape[1]):
        chain = trace[:, j]
        assert abs(chain.mean()) < 4 * _se(chain)
        assert abs(np.mean(chain ** 2) - target_var[j]) < 4 * _se(chain ** 2)


def _compare_chains(a: np.ndarray, b: np.ndarray, z: float) -> None:
    for j in range(a.shape[1]):
        combined = np.sqrt(_se(a[:, j]) ** 2 + _se(b[:, j]) ** 2)
        assert abs(a[:, j].mean() - b[:, j].mean()) < z * combined


def _compare_distributions(a: np.ndarray, b: np.ndarray, stride: int = 20, alpha: float = 0.01) -> None:
    """Two-sample KS on every coefficient of thinned chains, alpha split
    across coefficients."""
    level = alpha / a.shape[1]
    for j in range(a.shape[1]):
        result = ks_2samp(a[::stride, j], b[::stride, j])
        assert result.pvalue > level, f"coefficient {j}: KS p = {result.pvalue:.4g}"


def _mnl_boost_data() -> Dataset:
    gen = np.random.default_rng(36)
    X = design(150, seed=37)
    beta = np.array([[0.0, 0.3, -0.2], [0.0, 0.5, -0.4]])
    y = _simulate_outcome(ModelType.MNL, X, beta, np.ones(150), gen)
    return Dataset(y=y, X=X, column_names=["intercept", "x1"],
                   category_labels=["0", "1", "2"], baseline="0")


@pytest.mark.parametrize("model_type, data, draws, z", [
    (ModelType.LOGIT, binary_data(n=200, beta=(0.0, 0.8), seed=31), 20_000, 3.0),
    (ModelType.PROBIT, binary_data(n=200, beta=(0.0, 0.8), seed=34, probit=True), 20_000, 4.0),
    (ModelType.BINOMIAL, binomial_data(n=100, beta=(0.2, 0.7), max_trials=6, seed=35), 20_000, 4.0),
    (ModelType.MNL, _mnl_boost_data(), 30_000, 4.0),
])
def test_boost_invariance(model_type, data, draws, z):
    """
    Feature: choice-gibbs
    Property 17: Boost Invariance

    Boosted and plain chains agree on every posterior mean within z
    combined Monte-Carlo standard errors, and thinned draws pass a
    two-sample KS test.
    """
    prior = PriorSpec(coef_dim=2, intercept_index=0)
    boosted = run_chain(model_type, data, prior, SamplerConfig(draws=draws, burnin=1000, seed=32)).beta
    plain = run_chain(model_type, data, prior,
                      SamplerConfig(draws=draws, burnin=1000, seed=33, boost=False)).beta
    if model_type is ModelType.MNL:
        boosted = boosted[:, :, 1:].reshape(draws, -1)
        plain = plain[:, :, 1:].reshape(draws, -1)
    _compare_chains(boosted, plain, z)
    _compare_distributions(boosted, plain)


def test_binomial_with_single_trials_reduces_to_logit():
    """
    Feature: choice-gibbs
    Property 18: Binomial Reduction

    With N_i = 1 for every row the binomial sampler targets the binary
    logit posterior.
    """
    base = binary_data(n=60, beta=(-0.4, 1.0), seed=41)
    counts = Dataset(y=base.y, X=base.X, Ni=np.ones(60), column_names=base.column_names)
    prior = PriorSpec(coef_dim=2, intercept_index=0)
    logit = run_chain(ModelType.LOGIT, base, prior, SamplerConfig(draws=20_000, burnin=1000, seed=42)).beta
    binomial = run_chain(ModelType.BINOMIAL, counts, prior,
                         SamplerConfig(draws=20_000, burnin=1000, seed=43)).beta
    _compare_chains(logit, binomial, 4.0)
    _compare_distributions(logit, binomial)
    assert np.all(np.abs(binomial.std(axis=0) / logit.std(axis=0) - 1.0) < 0.07)


def test_two_category_mnl_reduces_to_logit():
    """
    Feature: choice-gibbs
    Property 19: Multinomial Reduction

    With two categories the multinomial sampler targets the binary logit
    posterior of the non-baseline category.
    """
    base = binary_data(n=60, beta=(0.2, -0.9), seed=51)
    labels = np.where(base.y == 1, "1", "0")
    two = Dataset(y=labels, X=base.X, column_names=base.column_names, category_labels=["0", "1"], baseline="0")
    prior = PriorSpec(coef_dim=2, intercept_index=0)
    logit = run_chain(ModelType.LOGIT, base, prior, SamplerConfig(draws=20_000, burnin=1000, seed=52)).beta
    mnl = run_chain(ModelType.MNL, two, prior, SamplerConfig(draws=20_000, burnin=1000, seed=53)).beta
    assert np.all(mnl[:, :, 0] == 0.0)
    _compare_chains(logit, mnl[:, :, 1], 4.0)
    _compare_distributions(logit, mnl[:, :, 1])
    assert np.all(np.abs(mnl[:, :, 1].std(axis=0) / logit.std(axis=0) - 1.0) < 0.07)


def test_boosting_improves_imbalanced_logit():
    """
    Feature: choice-gibbs
    Property 20: Boosting Efficiency

    On logit data with about 1% successes the boosted chain has at most
    half the median inefficiency factor of the plain chain.
    """
    gen = np.random.default_rng(61)
    X = design(2000, seed=62)
    y = (gen.uniform(size=2000) < expit(X @ np.array([-4.8, 0.5]))).astype(float)
    data = Dataset(y=y, X=X, column_names=["intercept", "x1"])
    prior = PriorSpec(coef_dim=2, intercept_index=0)
    boosted = run_chain(ModelType.LOGIT, data, prior, SamplerConfig(draws=10_000, burnin=500, seed=63))
    plain = run_chain(ModelType.LOGIT, data, prior, SamplerConfig(draws=10_000, burnin=500, seed=63, boost=False))
    boosted_ie = np.median(diag_report(boosted).ie)
    plain_ie = np.median(diag_report(plain).ie)
    assert boosted_ie <= 0.5 * plain_ie
