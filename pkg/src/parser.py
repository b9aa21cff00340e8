"""CSV dataset loader."""

import logging
import os
from typing import List

import numpy as np
import pandas as pd

from .models import Dataset, JobSpec, ModelType
from .validator import category_labels

logger = logging.getLogger(__name__)

INTERCEPT_NAME = "intercept"


class ParserError(Exception):
    """Base exception for parser errors."""
    pass


class DatasetNotFoundError(ParserError):
    """Raised when the CSV file does not exist."""
    pass


class DatasetFormatError(ParserError):
    """Raised when the file is not a readable CSV or a column is not numeric."""
    pass


class MissingColumnError(ParserError):
    """Raised when a referenced column is absent from the header."""
    pass


class MissingValueError(ParserError):
    """Raised when referenced cells are blank or NA."""

    def __init__(self, message: str, rows: List[int]):
        super().__init__(message)
        self.rows = rows


def _line_numbers(mask: pd.Series) -> List[int]:
    # header is line 1
    return [int(i) + 2 for i in np.flatnonzero(mask.to_numpy())]


def _numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = values.isna() & frame[column].notna()
    if bad.any():
        lines = _line_numbers(bad)
        raise DatasetFormatError(
            f"column '{column}' is not numeric at lines {', '.join(map(str, lines[:10]))}"
        )
    return values.to_numpy(dtype=float)


def read_csv(path: str) -> pd.DataFrame:
    """读取 CSV 文件

    Raises:
        DatasetNotFoundError: path does not exist
        DatasetFormatError: the file cannot be parsed
    """
    if not os.path.exists(path):
        raise DatasetNotFoundError(f"dataset not found: {path}")
    try:
        return pd.read_csv(path, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise DatasetFormatError(f"{path}: file is empty") from e
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DatasetFormatError(f"{path}: {e}") from e


def load_dataset(path: str, job: JobSpec) -> Dataset:
    """从 CSV 加载模型数据集

    An intercept column of ones is prepended unless job.intercept_column
    flags an existing column as the intercept.

    Args:
        path: CSV file with a header row
        job: JobSpec naming the outcome, covariates and trials columns

    Returns:
        Dataset with typed columns; multinomial outcomes stay strings

    Raises:
        DatasetNotFoundError, DatasetFormatError, MissingColumnError,
        MissingValueError
    """
    frame = read_csv(path)
    covariates = list(job.covariates)
    if job.intercept_column is not None and job.intercept_column not in covariates:
        covariates.insert(0, job.intercept_column)

    referenced = [job.outcome] + covariates + ([job.trials] if job.trials else [])
    missing = [c for c in referenced if c not in frame.columns]
    if missing:
        raise MissingColumnError(f"columns not found in {path}: {', '.join(missing)}")

    blank = frame[referenced].isna().any(axis=1)
    if blank.any():
        lines = _line_numbers(blank)
        raise MissingValueError(
            f"missing values at lines {', '.join(map(str, lines[:10]))}"
            + (" ..." if len(lines) > 10 else ""),
            rows=lines,
        )

    X = np.column_stack([_numeric(frame, c) for c in covariates]) if covariates \
        else np.empty((len(frame), 0))
    names = list(covariates)
    intercept_position = None
    if job.intercept_column is not None:
        intercept_position = names.index(job.intercept_column)
    elif INTERCEPT_NAME not in names:
        X = np.column_stack([np.ones(len(frame)), X])
        names.insert(0, INTERCEPT_NAME)
        intercept_position = 0

    trials = _numeric(frame, job.trials) if job.trials else None
    if job.model_type is ModelType.MNL:
        y = frame[job.outcome].astype(str).str.strip().to_numpy()
        labels = category_labels(y)
    else:
        y = _numeric(frame, job.outcome)
        labels = None

    logger.info("loaded %s: N = %d, d = %d", path, X.shape[0], X.shape[1])
    return Dataset(
        y=y,
        X=X,
        Ni=trials,
        column_names=names,
        category_labels=labels,
        baseline=job.baseline,
        intercept_position=intercept_position,
    )
