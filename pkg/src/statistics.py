"""Posterior summary statistics."""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .diagnostics import check_quantiles
from .exporters.base import UnknownCoefficientError
from .models import ModelType, PosteriorDraws, SummaryRow, SummaryTable


def select_coefficients(coef_names: List[str], include: Optional[Sequence[Union[str, int]]]) -> List[int]:
    """Resolve `include` (names or 0-based positions) to column indices.

    Raises:
        UnknownCoefficientError: a name or position is not a coefficient
    """
    if include is None:
        return list(range(len(coef_names)))
    indices = []
    for item in include:
        if isinstance(item, (int, np.integer)) and not isinstance(item, bool):
            if not 0 <= item < len(coef_names):
                raise UnknownCoefficientError(f"coefficient position {item} out of range")
            indices.append(int(item))
        elif item in coef_names:
            indices.append(coef_names.index(item))
        else:
            raise UnknownCoefficientError(f"unknown coefficient '{item}'")
    return indices


def _row(name: str, column: np.ndarray, q: Tuple[float, float], category: Optional[str]) -> SummaryRow:
    lower, upper = np.quantile(column, q)
    sd = float(np.std(column, ddof=1)) if column.size > 1 else 0.0
    return SummaryRow(
        name=name,
        mean=float(np.mean(column)),
        sd=sd,
        lower=float(lower),
        upper=float(upper),
        category=category,
    )


def posterior_summary(draws: PosteriorDraws, q=(0.025, 0.975), names: Optional[List[str]] = None,
                      digits: int = 2, include: Optional[Sequence[Union[str, int]]] = None) -> SummaryTable:
    """计算后验汇总表

    Args:
        draws: PosteriorDraws
        q: (lower, upper) quantile levels
        names: display names replacing the coefficient names, one per column of X
        digits: decimals used when the table is rendered
        include: subset of coefficients by name or 0-based position

    Returns:
        SummaryTable with mean, sd and the q-quantiles per coefficient
        (per free category for the multinomial model)

    Raises:
        InvalidQuantileError: q is not 0 < lo < hi < 1
        UnknownCoefficientError: include refers to a missing coefficient
    """
    q = check_quantiles(q)
    coef_names = list(draws.coef_names)
    if names is not None and len(names) != len(coef_names):
        raise UnknownCoefficientError(f"{len(names)} names given for {len(coef_names)} coefficients")
    labels = list(names) if names is not None else coef_names
    selected = select_coefficients(coef_names, include)

    rows: List[SummaryRow] = []
    categories: List[str] = []
    if draws.model_type is ModelType.MNL:
        categories = draws.free_categories()
        for label in categories:
            k = draws.category_labels.index(label)
            for j in selected:
                rows.append(_row(labels[j], draws.beta[:, j, k], q, label))
    else:
        for j in selected:
            rows.append(_row(labels[j], draws.beta[:, j], q, None))

    return SummaryTable(
        model_type=draws.model_type,
        rows=rows,
        q=q,
        n_obs=draws.n_obs or 0,
        draws=draws.n_saved,
        burnin=draws.burnin,
        baseline=draws.baseline,
        categories=categories,
        digits=digits,
    )
