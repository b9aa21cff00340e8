"""Prior construction and the conditional Gaussian coefficient draw."""

import logging
import re
from typing import Optional, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.special import gammaln, log_expit, log_ndtr, logsumexp

from .models import Dataset, LogLik, ModelType, PriorSpec, WeightedRegressionInput
from .randvar import RngStream

logger = logging.getLogger(__name__)


class BayesLinearError(Exception):
    """Base exception for prior and coefficient-draw errors."""
    pass


class InvalidPriorError(BayesLinearError):
    """Raised when A0, G0 or the intercept index are out of range."""
    pass


class NumericalDegeneracyError(BayesLinearError):
    """Raised when the posterior precision cannot be factorized."""

    def __init__(self, message: str, dimension: Optional[int] = None):
        super().__init__(message)
        self.dimension = dimension


class DimensionMismatchError(BayesLinearError):
    """Raised when array shapes disagree."""
    pass


def _check_prior(prior: PriorSpec) -> None:
    if not prior.is_valid():
        raise InvalidPriorError(
            f"invalid prior: A0={prior.A0}, G0={prior.G0}, "
            f"intercept_index={prior.intercept_index}, coef_dim={prior.coef_dim}"
        )


def prior_covariance(prior: PriorSpec) -> np.ndarray:
    """A0·I + G0·e_d e_dᵀ"""
    _check_prior(prior)
    cov = prior.A0 * np.eye(prior.coef_dim)
    if prior.intercept_index is not None:
        cov[prior.intercept_index, prior.intercept_index] += prior.G0
    return cov


def prior_precision(prior: PriorSpec) -> np.ndarray:
    """先验精度矩阵

    Rank-one Sherman–Morrison inverse of the prior covariance:
    (1/A0)·I − G0/(A0(A0+G0))·e_d e_dᵀ.

    Raises:
        InvalidPriorError: A0 <= 0, G0 < 0 or intercept index out of range
    """
    _check_prior(prior)
    precision = np.eye(prior.coef_dim) / prior.A0
    if prior.intercept_index is not None:
        d = prior.intercept_index
        precision[d, d] -= prior.G0 / (prior.A0 * (prior.A0 + prior.G0))
    return precision


def precision_factor(precision: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a precision matrix.

    Raises:
        NumericalDegeneracyError: the matrix is not positive definite;
            `dimension` is the 1-based leading minor that failed, if known
    """
    try:
        return cholesky(precision, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as e:
        match = re.search(r"(\d+)", str(e))
        dimension = int(match.group(1)) if match else None
        raise NumericalDegeneracyError(
            f"posterior precision is not positive definite (dimension {dimension}): {e}",
            dimension=dimension,
        ) from e


def draw_canonical(factor: np.ndarray, linear: np.ndarray, rng: RngStream) -> np.ndarray:
    """One draw from N(Q⁻¹b, Q⁻¹) given the lower factor of Q and b."""
    mean = cho_solve((factor, True), linear)
    noise = rng.generator.standard_normal(linear.shape[0])
    return mean + solve_triangular(factor.T, noise, lower=False)


def posterior_precision(inp: WeightedRegressionInput, prior: PriorSpec) -> np.ndarray:
    """XᵀΩX + P0"""
    X = inp.X
    if X.shape[1] != prior.coef_dim:
        raise DimensionMismatchError(
            f"design has {X.shape[1]} columns but the prior expects {prior.coef_dim}"
        )
    n = X.shape[0]
    for label, arr in (("response", inp.response), ("weights", inp.weights), ("offsets", inp.offsets)):
        if arr.shape[0] != n:
            raise DimensionMismatchError(f"{label} has length {arr.shape[0]}, expected {n}")
    if np.any(~np.isfinite(inp.weights)) or np.any(inp.weights <= 0):
        raise NumericalDegeneracyError("regression weights must be strictly positive and finite")
    return X.T @ (inp.weights[:, None] * X) + prior_precision(prior)


def draw_coefficients(inp: WeightedRegressionInput, prior: PriorSpec, rng: RngStream) -> np.ndarray:
    """系数条件后验抽样

    Draws β ~ N(m, V) with V = (XᵀΩX + P0)⁻¹ and
    m = V·Xᵀ(Ω·response + offsets), using a single Cholesky factorization.

    Args:
        inp: WeightedRegressionInput (N may be zero)
        prior: PriorSpec matching the column count of X
        rng: RngStream

    Returns:
        Coefficient vector of length coef_dim

    Raises:
        DimensionMismatchError: shapes disagree
        NumericalDegeneracyError: the factorization fails
    """
    factor = precision_factor(posterior_precision(inp, prior))
    linear = inp.X.T @ (inp.weights * inp.response + inp.offsets)
    return draw_canonical(factor, linear, rng)


def _mnl_coefficients(beta: np.ndarray, data: Dataset) -> np.ndarray:
    n_labels = len(data.category_labels)
    if beta.ndim != 2 or beta.shape[0] != data.n_coef:
        raise DimensionMismatchError(f"MNL coefficients must be (d, categories), got {beta.shape}")
    if beta.shape[1] == n_labels:
        return beta
    if beta.shape[1] == n_labels - 1:
        return np.insert(beta, data.baseline_index(), 0.0, axis=1)
    raise DimensionMismatchError(
        f"MNL coefficients have {beta.shape[1]} columns for {n_labels} categories"
    )


def log_likelihood(model_type: ModelType, beta: Union[np.ndarray, list], data: Dataset,
                   include_binomial_constant: bool = False) -> LogLik:
    """对数似然

    Args:
        model_type: ModelType
        beta: (d,) coefficients, or (d, categories) / (d, categories - 1)
            for the multinomial model
        data: Dataset
        include_binomial_constant: add Σ log C(N_i, y_i) (binomial only)

    Returns:
        LogLik with df equal to the number of free coefficients

    Raises:
        DimensionMismatchError: beta does not fit the design
    """
    beta = np.asarray(beta, dtype=float)
    X = data.X

    if model_type is ModelType.MNL:
        full = _mnl_coefficients(beta, data)
        eta = X @ full
        codes = data.category_codes
        value = float(np.sum(eta[np.arange(data.n_obs), codes] - logsumexp(eta, axis=1)))
        df = data.n_coef * (full.shape[1] - 1)
        return LogLik(value=value, df=df, nobs=data.n_obs)

    if beta.shape != (data.n_coef,):
        raise DimensionMismatchError(f"coefficients have shape {beta.shape}, expected ({data.n_coef},)")
    eta = X @ beta
    y = np.asarray(data.y, dtype=float)

    if model_type is ModelType.PROBIT:
        value = np.sum(y * log_ndtr(eta) + (1.0 - y) * log_ndtr(-eta))
    elif model_type is ModelType.LOGIT:
        value = np.sum(y * log_expit(eta) + (1.0 - y) * log_expit(-eta))
    else:
        trials = np.asarray(data.Ni, dtype=float)
        value = np.sum(y * log_expit(eta) + (trials - y) * log_expit(-eta))
        if include_binomial_constant:
            value += np.sum(gammaln(trials + 1) - gammaln(y + 1) - gammaln(trials - y + 1))
    return LogLik(value=float(value), df=data.n_coef, nobs=data.n_obs)
