"""Sampling-efficiency diagnostics: ESS, inefficiency factors and
effective sampling rates."""

import logging
from typing import Optional

import numpy as np
from statsmodels.regression.linear_model import yule_walker

from .models import DiagReport, PosteriorDraws

logger = logging.getLogger(__name__)

MIN_CHAIN_LENGTH = 50
ESS_CAP = 1.2


class DiagnosticsError(Exception):
    """Base exception for diagnostics errors."""
    pass


class InvalidChainError(DiagnosticsError):
    """Raised when a chain is too short or holds non-finite values."""
    pass


class InvalidQuantileError(DiagnosticsError):
    """Raised when a quantile pair is not 0 < lo < hi < 1."""
    pass


def check_quantiles(q) -> tuple:
    try:
        lo, hi = (float(v) for v in q)
    except (TypeError, ValueError) as e:
        raise InvalidQuantileError(f"quantiles must be a pair of numbers, got {q!r}") from e
    if not (0.0 < lo < hi < 1.0):
        raise InvalidQuantileError(f"quantiles must satisfy 0 < lo < hi < 1, got ({lo}, {hi})")
    return lo, hi


def spectrum0_ar(chain: np.ndarray) -> float:
    """AR 谱密度估计 (频率 0)

    Fits AR(p) by Yule–Walker for p = 0 … min(n − 1, 10·log10 n), keeps
    the order with the smallest AIC and returns σ²/(1 − Σφ)².
    """
    x = np.asarray(chain, dtype=float)
    n = x.size
    order_max = min(n - 1, int(np.floor(10 * np.log10(n))))

    best_sigma2 = float(np.var(x))
    best_coefs = np.zeros(0)
    best_aic = n * np.log(best_sigma2)
    for order in range(1, order_max + 1):
        coefs, sigma = yule_walker(x, order=order, method="mle")
        sigma2 = float(sigma) ** 2
        if not sigma2 > 0:
            break
        aic = n * np.log(sigma2) + 2 * order
        if aic < best_aic:
            best_aic, best_sigma2, best_coefs = aic, sigma2, np.asarray(coefs)
    return best_sigma2 / (1.0 - float(np.sum(best_coefs))) ** 2


def ess(chain) -> float:
    """有效样本量 (effective sample size)

    n · var(chain) / spectral density at zero, capped at 1.2·n. A constant
    chain has ESS n by convention and is logged.

    Args:
        chain: 1-d sequence of draws, length >= 50

    Returns:
        Effective sample size

    Raises:
        InvalidChainError: chain too short or not finite
    """
    x = np.asarray(chain, dtype=float).reshape(-1)
    n = x.size
    if n < MIN_CHAIN_LENGTH:
        raise InvalidChainError(f"chain length {n} is below the minimum of {MIN_CHAIN_LENGTH}")
    if not np.all(np.isfinite(x)):
        raise InvalidChainError("chain holds non-finite values")
    if np.ptp(x) == 0:
        logger.warning("constant chain of length %d: ESS set to n", n)
        return float(n)
    value = n * float(np.var(x, ddof=1)) / spectrum0_ar(x)
    return float(min(value, ESS_CAP * n))


def diag_report(draws: PosteriorDraws, runtime_seconds: Optional[float] = None) -> DiagReport:
    """Per-coefficient ESS, IE = draws/ESS and ESR = ESS/runtime.

    Args:
        draws: PosteriorDraws with at least 50 saved draws
        runtime_seconds: overrides draws.runtime_seconds

    Returns:
        DiagReport; esr is None when no positive runtime is known
    """
    names, matrix = draws.flat_columns()
    runtime = runtime_seconds if runtime_seconds is not None else draws.runtime_seconds
    n = matrix.shape[0]

    values = np.array([ess(matrix[:, j]) for j in range(matrix.shape[1])])
    degenerate = [name for j, name in enumerate(names) if np.ptp(matrix[:, j]) == 0]
    esr = None
    if runtime is not None and runtime > 0:
        esr = values / runtime
    else:
        logger.info("no sampling runtime recorded; ESR omitted")

    return DiagReport(
        names=names,
        ess=values,
        ie=n / values,
        esr=esr,
        saved_draws=n,
        runtime_seconds=runtime,
        degenerate=degenerate,
    )
