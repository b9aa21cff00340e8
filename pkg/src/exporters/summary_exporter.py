"""Summary table rendering: markdown pipe tables, booktabs LaTeX and CSV."""

from typing import List, Optional

import pandas as pd
from tabulate import tabulate

from ..models import SummaryTable
from .base import BaseExporter, UnknownFormatError

FORMAT_ALIASES = {
    "md": "md",
    "markdown": "md",
    "tex": "tex",
    "latex": "tex",
    "csv": "csv",
}

STAR = "*"


def normalize_format(fmt: str) -> str:
    """Map a format name or alias to md / tex / csv.

    Raises:
        UnknownFormatError: fmt is not a known table format
    """
    key = str(fmt).lower()
    if key not in FORMAT_ALIASES:
        raise UnknownFormatError(f"unknown summary format '{fmt}' (expected md, tex or csv)")
    return FORMAT_ALIASES[key]


def _percent(level: float) -> str:
    return f"{round(level * 100, 6):g}"


def column_headers(table: SummaryTable) -> List[str]:
    lo, hi = table.q
    return ["", "Mean", "SD", f"Q{_percent(lo)}", f"Q{_percent(hi)}",
            f"{_percent(hi - lo)}% CI excl. 0"]


def header_block(table: SummaryTable) -> List[str]:
    lines = [
        f"--- Bayesian {table.model_type.title} Results ---",
        "",
        f"N = {table.n_obs}",
        f"Analysis based on {table.draws} posterior draws after a burn-in period of {table.burnin} iterations.",
    ]
    if table.categories and table.baseline is not None:
        lines.extend(["", f"Category '{table.baseline}' is the baseline category."])
    return lines


def _body(table: SummaryTable, digits: int) -> List[List[str]]:
    width = len(column_headers(table))
    body: List[List[str]] = []
    for position, (category, rows) in enumerate(table.groups()):
        if category is not None:
            if position > 0:
                body.append([""] * width)
            body.append([f"Category '{category}'"] + [""] * (width - 1))
        for row in rows:
            body.append([
                row.name,
                f"{row.mean:.{digits}f}",
                f"{row.sd:.{digits}f}",
                f"{row.lower:.{digits}f}",
                f"{row.upper:.{digits}f}",
                STAR if row.excludes_zero else "",
            ])
    return body


def render_summary(table: SummaryTable, fmt: str = "md", caption: Optional[str] = None,
                   digits: Optional[int] = None) -> str:
    """渲染后验汇总表

    Args:
        table: SummaryTable from posterior_summary
        fmt: "md", "tex" or "csv" (aliases "markdown", "latex")
        caption: optional table caption
        digits: decimals shown; defaults to table.digits

    Returns:
        Rendered text; byte-identical for identical inputs

    Raises:
        UnknownFormatError: unknown fmt
    """
    fmt = normalize_format(fmt)
    digits = table.digits if digits is None else digits

    if fmt == "csv":
        frame = pd.DataFrame(
            [(r.category or "", r.name, r.mean, r.sd, r.lower, r.upper, r.excludes_zero) for r in table.rows],
            columns=["category", "name", "mean", "sd", "lower", "upper", "excludes_zero"],
        )
        return frame.to_csv(index=False, float_format="%.17g")

    headers = column_headers(table)
    body = _body(table, digits)
    colalign = ("left", "right", "right", "right", "right", "center")

    if fmt == "md":
        text = tabulate(body, headers=headers, tablefmt="pipe", colalign=colalign, disable_numparse=True)
        lines = header_block(table) + ["", "", text]
        if caption:
            lines.extend(["", f"Table: {caption}"])
        return "\n".join(lines) + "\n"

    text = tabulate(body, headers=headers, tablefmt="latex_booktabs", colalign=colalign, disable_numparse=True)
    lines = ["\\begin{table}[ht]", "\\centering"]
    if caption:
        lines.append(f"\\caption{{{caption}}}")
    lines.extend([text, "\\end{table}"])
    return "\n".join(lines) + "\n"


class SummaryExporter(BaseExporter):
    """汇总表导出器"""

    def __init__(self, fmt: str = "md", caption: Optional[str] = None, digits: Optional[int] = None):
        self.fmt = normalize_format(fmt)
        self.caption = caption
        self.digits = digits

    def render(self, payload: SummaryTable) -> str:
        return render_summary(payload, self.fmt, caption=self.caption, digits=self.digits)

    def count(self, payload: SummaryTable) -> int:
        return len(payload.rows)
