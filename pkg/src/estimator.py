"""Model API: fit, predict, coef, loglik, diag, summary and plot data."""

import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.special import expit, ndtr, softmax

from .bayes_linear import log_likelihood
from .diagnostics import check_quantiles, diag_report
from .exporters.coefplot_exporter import emit_coefplot
from .models import (
    CoefEstimates,
    CoefPlotRow,
    Dataset,
    DiagReport,
    FitResult,
    LogLik,
    ModelType,
    Prediction,
    PriorSpec,
    SamplerConfig,
    SummaryTable,
)
from .samplers import run_chain
from .statistics import posterior_summary
from .validator import ColumnCountError, DesignDimensionError, category_labels, default_baseline, validate

logger = logging.getLogger(__name__)


def default_prior(data: Dataset, a0: float = 4.0, g0: float = 100.0) -> PriorSpec:
    return PriorSpec(coef_dim=data.n_coef, A0=a0, G0=g0, intercept_index=data.intercept_index())


def fit(data: Dataset, model_type: Union[ModelType, str], prior: Optional[PriorSpec] = None,
        config: Optional[SamplerConfig] = None) -> FitResult:
    """估计模型

    Args:
        data: Dataset
        model_type: ModelType or its value ("probit", "logit", "mnl", "binomial")
        prior: PriorSpec; defaults to A0 = 4, G0 = 100 on the detected intercept
        config: SamplerConfig; defaults to 1000 draws after 1000 burn-in

    Returns:
        FitResult echoing every input

    Raises:
        DataValidationError: the first problem validate() reports
    """
    model_type = ModelType(model_type)
    errors = validate(data, model_type)
    if errors:
        for error in errors[1:]:
            logger.error("%s: %s", type(error).__name__, error)
        raise errors[0]

    prior = prior or default_prior(data)
    config = config or SamplerConfig()
    if prior.coef_dim != data.n_coef:
        raise DesignDimensionError(f"prior has dimension {prior.coef_dim} but X has {data.n_coef} columns")

    sample_data = data
    baseline = None
    if model_type is ModelType.MNL:
        labels = data.category_labels or category_labels(data.y)
        baseline = data.baseline if data.baseline is not None else default_baseline(data.y)
        sample_data = replace(data, category_labels=list(labels), baseline=baseline)
        logger.info("Category '%s' is the baseline category.", baseline)

    draws = run_chain(model_type, sample_data, prior, config)
    return FitResult(
        model_type=model_type,
        draws=draws,
        data=data,
        prior=prior,
        config=config,
        baseline=baseline,
    )


def _summarize(values: np.ndarray, q) -> Prediction:
    lower, upper = np.quantile(values, q, axis=0)
    return Prediction(mean=values.mean(axis=0), lower=lower, upper=upper)


def predict(fit_result: FitResult, newdata: Optional[np.ndarray] = None, q=(0.025, 0.975)) -> Prediction:
    """预测概率

    Args:
        fit_result: FitResult
        newdata: matrix with the training columns in training order;
            the training design when omitted
        q: quantile pair for the intervals

    Returns:
        Prediction; binomial predictions are per-trial success
        probabilities; multinomial arrays are (N, categories) in label
        order with the baseline included

    Raises:
        ColumnCountError: newdata has the wrong number of columns
    """
    q = check_quantiles(q)
    X = fit_result.data.X if newdata is None else np.atleast_2d(np.asarray(newdata, dtype=float))
    d = fit_result.data.n_coef
    if X.shape[1] != d:
        raise ColumnCountError(f"newdata has {X.shape[1]} columns, expected {d}")
    beta = fit_result.draws.beta

    if fit_result.model_type is ModelType.MNL:
        eta = np.einsum("nd,sdl->snl", X, beta)
        probs = softmax(eta, axis=2)
        prediction = _summarize(probs, q)
        prediction.categories = list(fit_result.draws.category_labels)
        return prediction

    eta = beta @ X.T
    link = ndtr if fit_result.model_type is ModelType.PROBIT else expit
    return _summarize(link(eta), q)


def coef(fit_result: FitResult, q=(0.025, 0.975)) -> CoefEstimates:
    """后验均值与可信区间 (per free category for the multinomial model)."""
    q = check_quantiles(q)
    draws = fit_result.draws
    if fit_result.model_type is ModelType.MNL:
        free = draws.free_categories()
        columns = [draws.category_labels.index(c) for c in free]
        beta = draws.beta[:, :, columns]
        lower, upper = np.quantile(beta, q, axis=0)
        return CoefEstimates(list(draws.coef_names), beta.mean(axis=0), lower, upper, categories=free)
    lower, upper = np.quantile(draws.beta, q, axis=0)
    return CoefEstimates(list(draws.coef_names), draws.beta.mean(axis=0), lower, upper)


def loglik(fit_result: FitResult, include_binomial_constant: bool = False) -> LogLik:
    """Log-likelihood at the posterior mean."""
    data = fit_result.data
    if fit_result.model_type is ModelType.MNL:
        data = replace(data, category_labels=list(fit_result.draws.category_labels),
                       baseline=fit_result.baseline)
    mean = fit_result.draws.beta.mean(axis=0)
    return log_likelihood(fit_result.model_type, mean, data,
                          include_binomial_constant=include_binomial_constant)


def diag(fit_result: FitResult) -> DiagReport:
    return diag_report(fit_result.draws)


def summary(fit_result: FitResult, q=(0.025, 0.975), names: Optional[List[str]] = None,
            digits: int = 2, include: Optional[Sequence[Union[str, int]]] = None) -> SummaryTable:
    return posterior_summary(fit_result.draws, q=q, names=names, digits=digits, include=include)


def plot_data(fit_result: FitResult, q=(0.025, 0.975), names: Optional[List[str]] = None,
              include: Optional[Sequence[Union[str, int]]] = None, sort: bool = False) -> List[CoefPlotRow]:
    return emit_coefplot(fit_result, q=q, names=names, include=include, sort=sort)
