"""Input checks run before any sampling."""

from collections import Counter
from typing import List, Optional, Sequence

import numpy as np

from .models import Dataset, ModelType


class DataValidationError(Exception):
    """Base exception for data validation errors."""
    pass


class NonBinaryOutcomeError(DataValidationError):
    """Raised when a probit/logit outcome is not 0/1."""
    pass


class CountExceedsTrialsError(DataValidationError):
    """Raised when binomial counts fall outside [0, N_i]."""
    pass


class InvalidTrialsError(DataValidationError):
    """Raised when trial totals are not positive integers."""
    pass


class MissingTrialsError(DataValidationError):
    """Raised when a binomial model has no trial totals."""
    pass


class UnknownBaselineError(DataValidationError):
    """Raised when the requested baseline is not an observed category."""
    pass


class UnknownCategoryError(DataValidationError):
    """Raised when an outcome label is missing from the category labels."""
    pass


class InsufficientCategoriesError(DataValidationError):
    """Raised when a multinomial outcome has fewer than three categories."""
    pass


class DesignDimensionError(DataValidationError):
    """Raised when X, y and Ni disagree in shape."""
    pass


class InvalidInterceptError(DataValidationError):
    """Raised when the flagged intercept column is not identically one."""
    pass


class NonFiniteCovariateError(DataValidationError):
    """Raised when X holds NaN or infinite entries."""
    pass


class ColumnCountError(DataValidationError):
    """Raised when new data has a different number of columns."""
    pass


MIN_MNL_CATEGORIES = 3


def default_baseline(y: Sequence) -> str:
    """出现次数最多的类别; ties go to the lexicographically smallest label."""
    counts = Counter(str(v) for v in y)
    top = max(counts.values())
    return min(label for label, n in counts.items() if n == top)


def category_labels(y: Sequence) -> List[str]:
    return sorted({str(v) for v in y})


def _is_integral(values: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(values)) and np.all(values == np.floor(values)))


def _as_float(values) -> Optional[np.ndarray]:
    try:
        return np.asarray(values, dtype=float)
    except (TypeError, ValueError):
        return None


def validate(data: Dataset, model_type: ModelType) -> List[DataValidationError]:
    """检查输入数据, 返回全部错误 (不抛出异常)

    Args:
        data: Dataset to check
        model_type: ModelType the data is meant for

    Returns:
        List of DataValidationError instances; empty when the data is usable
    """
    errors: List[DataValidationError] = []
    X = data.X
    n = X.shape[0]

    if X.ndim != 2:
        errors.append(DesignDimensionError(f"X must be a matrix, got {X.ndim} dimensions"))
        return errors
    if n == 0:
        errors.append(DesignDimensionError("X has no rows"))
    if data.y.shape[0] != n:
        errors.append(DesignDimensionError(f"y has {data.y.shape[0]} entries but X has {n} rows"))
    if len(data.column_names) != X.shape[1]:
        errors.append(DesignDimensionError(
            f"{len(data.column_names)} column names for {X.shape[1]} columns"
        ))
    if data.intercept_position is not None:
        if not (0 <= data.intercept_position < X.shape[1]):
            errors.append(DesignDimensionError(f"intercept position {data.intercept_position} out of range"))
        elif n and not np.all(X[:, data.intercept_position] == 1.0):
            name = data.column_names[data.intercept_position] \
                if data.intercept_position < len(data.column_names) else data.intercept_position
            errors.append(InvalidInterceptError(f"intercept column '{name}' is not constant 1"))
    bad_rows = np.flatnonzero(~np.all(np.isfinite(X), axis=1))
    if bad_rows.size:
        errors.append(NonFiniteCovariateError(
            f"non-finite covariates in rows {', '.join(str(i + 1) for i in bad_rows[:10])}"
        ))

    if model_type in (ModelType.PROBIT, ModelType.LOGIT):
        y = _as_float(data.y)
        if y is None or not np.all(np.isin(y, (0.0, 1.0))):
            errors.append(NonBinaryOutcomeError(
                f"{model_type.title} outcome must be binary (0/1)"
            ))

    elif model_type is ModelType.BINOMIAL:
        if data.Ni is None:
            errors.append(MissingTrialsError("binomial model needs trial totals Ni"))
        else:
            trials = _as_float(data.Ni)
            if trials is None or trials.shape != (n,):
                errors.append(DesignDimensionError(f"Ni must be a vector of length {n}"))
            elif not _is_integral(trials) or np.any(trials < 1):
                errors.append(InvalidTrialsError("trial totals Ni must be positive integers"))
            else:
                y = _as_float(data.y)
                if (y is None or y.shape != (n,) or not _is_integral(y)
                        or np.any(y < 0) or np.any(y > trials)):
                    errors.append(CountExceedsTrialsError(
                        "success counts must be integers with 0 <= y_i <= Ni"
                    ))

    elif model_type is ModelType.MNL:
        observed = category_labels(data.y)
        labels = data.category_labels if data.category_labels is not None else observed
        unknown = sorted(set(observed) - set(labels))
        if unknown:
            errors.append(UnknownCategoryError(f"outcome labels not in category set: {unknown}"))
        if len(observed) < MIN_MNL_CATEGORIES:
            errors.append(InsufficientCategoriesError(
                f"only {len(observed)} observed categories; use the binary logit model instead"
            ))
        if data.baseline is not None and data.baseline not in observed:
            errors.append(UnknownBaselineError(f"baseline '{data.baseline}' is not an observed category"))

    return errors
