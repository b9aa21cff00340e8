"""Synthetic datasets and fit results shared by the tests."""

from typing import List, Optional

import numpy as np

import sys
sys.path.insert(0, '.')

from src.models import (
    Dataset,
    FitResult,
    ModelType,
    PosteriorDraws,
    PriorSpec,
    SamplerConfig,
)


def design(n: int, seed: int = 0, slopes: int = 1) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.column_stack([np.ones(n), rng.standard_normal((n, slopes))])


def binary_data(n: int = 30, beta=(0.3, 0.8), seed: int = 0, probit: bool = False) -> Dataset:
    rng = np.random.default_rng(seed + 1000)
    X = design(n, seed, len(beta) - 1)
    eta = X @ np.asarray(beta)
    noise = rng.standard_normal(n) if probit else rng.logistic(size=n)
    y = (eta + noise > 0).astype(float)
    return Dataset(y=y, X=X, column_names=["intercept"] + [f"x{j}" for j in range(1, len(beta))])


def binomial_data(n: int = 30, beta=(0.3, 0.8), max_trials: int = 5, seed: int = 0) -> Dataset:
    rng = np.random.default_rng(seed + 2000)
    X = design(n, seed, len(beta) - 1)
    trials = rng.integers(1, max_trials + 1, size=n).astype(float)
    p = 1.0 / (1.0 + np.exp(-(X @ np.asarray(beta))))
    y = rng.binomial(trials.astype(int), p).astype(float)
    return Dataset(y=y, X=X, Ni=trials, column_names=["intercept"] + [f"x{j}" for j in range(1, len(beta))])


def mnl_data(counts=(10, 10, 10), labels=("a", "b", "c"), baseline: Optional[str] = None,
             seed: int = 0) -> Dataset:
    rng = np.random.default_rng(seed)
    y = np.array([label for label, c in zip(labels, counts) for _ in range(c)])
    rng.shuffle(y)
    X = np.ones((len(y), 1))
    return Dataset(y=y, X=X, column_names=["intercept"], category_labels=sorted(labels), baseline=baseline)


def fake_draws(beta: np.ndarray, model_type: ModelType = ModelType.LOGIT, names: Optional[List[str]] = None,
               labels: Optional[List[str]] = None, baseline: Optional[str] = None,
               runtime: Optional[float] = 1.0, n_obs: int = 10) -> PosteriorDraws:
    beta = np.asarray(beta, dtype=float)
    names = names or [f"b{j}" for j in range(beta.shape[1])]
    return PosteriorDraws(
        model_type=model_type,
        beta=beta,
        coef_names=names,
        draws=beta.shape[0],
        burnin=0,
        seed=1,
        runtime_seconds=runtime,
        category_labels=labels,
        baseline=baseline,
        n_obs=n_obs,
    )


def fake_fit(beta: np.ndarray, X: np.ndarray, model_type: ModelType = ModelType.LOGIT,
             labels: Optional[List[str]] = None, baseline: Optional[str] = None,
             names: Optional[List[str]] = None) -> FitResult:
    X = np.asarray(X, dtype=float)
    names = names or [f"b{j}" for j in range(X.shape[1])]
    if model_type is ModelType.MNL:
        y = np.array([labels[0]] * X.shape[0])
    else:
        y = np.zeros(X.shape[0])
    data = Dataset(y=y, X=X, column_names=names, category_labels=labels, baseline=baseline)
    draws = fake_draws(beta, model_type, names=names, labels=labels, baseline=baseline, n_obs=X.shape[0])
    return FitResult(
        model_type=model_type,
        draws=draws,
        data=data,
        prior=PriorSpec(coef_dim=X.shape[1]),
        config=SamplerConfig(draws=draws.n_saved, burnin=0),
        baseline=baseline,
    )
