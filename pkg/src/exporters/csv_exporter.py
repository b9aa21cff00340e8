"""CSV exporters for posterior draws, diagnostics and coefficient-plot data."""

from typing import List, Tuple

import numpy as np
import pandas as pd

from ..models import CoefPlotRow, DiagReport, PosteriorDraws
from .base import BaseExporter

FLOAT_FORMAT = "%.17g"


class DrawsCSVExporter(BaseExporter):
    """后验抽样 CSV 导出器

    One row per saved draw; the header holds the coefficient names, with
    multinomial columns suffixed by their category label.
    """

    def render(self, payload: PosteriorDraws) -> str:
        names, matrix = payload.flat_columns()
        return pd.DataFrame(matrix, columns=names).to_csv(index=False, float_format=FLOAT_FORMAT)

    def count(self, payload: PosteriorDraws) -> int:
        return payload.n_saved

    @staticmethod
    def parse_csv(file_path: str) -> Tuple[List[str], np.ndarray]:
        """Read draws.csv back into (column names, draw matrix) without loss."""
        frame = pd.read_csv(file_path, float_precision="round_trip")
        return list(frame.columns), frame.to_numpy(dtype=float)


class DiagCSVExporter(BaseExporter):
    """诊断 CSV 导出器: name, ess, ie, esr"""

    def render(self, payload: DiagReport) -> str:
        frame = pd.DataFrame({
            "name": payload.names,
            "ess": payload.ess,
            "ie": payload.ie,
            "esr": payload.esr if payload.esr is not None else [np.nan] * len(payload.names),
        })
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT)

    def count(self, payload: DiagReport) -> int:
        return len(payload.names)


class CoefPlotCSVExporter(BaseExporter):
    """系数图数据 CSV 导出器: name, category, mean, lower, upper"""

    def render(self, payload: List[CoefPlotRow]) -> str:
        frame = pd.DataFrame(
            [(r.name, r.category or "", r.mean, r.lower, r.upper) for r in payload],
            columns=["name", "category", "mean", "lower", "upper"],
        )
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT)

    def count(self, payload: List[CoefPlotRow]) -> int:
        return len(payload)

    @staticmethod
    def parse_csv(file_path: str) -> List[CoefPlotRow]:
        frame = pd.read_csv(file_path, float_precision="round_trip", keep_default_na=False)
        return [
            CoefPlotRow(
                name=str(row["name"]),
                mean=float(row["mean"]),
                lower=float(row["lower"]),
                upper=float(row["upper"]),
                category=str(row["category"]) or None,
            )
            for _, row in frame.iterrows()
        ]
