"""Coefficient-plot data and the optional static SVG rendering."""

from io import StringIO
from typing import List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..models import CoefPlotRow, FitResult, ModelType  # noqa: E402
from ..statistics import posterior_summary  # noqa: E402
from .base import atomic_write_text  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "choice-gibbs"


def emit_coefplot(fit: FitResult, q=(0.025, 0.975), names: Optional[List[str]] = None,
                  include: Optional[Sequence[Union[str, int]]] = None, sort: bool = False) -> List[CoefPlotRow]:
    """系数图数据

    One row per coefficient (per free category for the multinomial
    model, grouped by category). With sort=True rows are ordered by
    |mean|, largest first, within each group; otherwise they follow the
    column order of X.

    Raises:
        InvalidQuantileError: invalid q
        UnknownCoefficientError: include names a missing coefficient
    """
    table = posterior_summary(fit.draws, q=q, names=names, include=include)
    rows: List[CoefPlotRow] = []
    for category, group in table.groups():
        if sort:
            group = sorted(group, key=lambda r: abs(r.mean), reverse=True)
        rows.extend(CoefPlotRow(r.name, r.mean, r.lower, r.upper, category) for r in group)
    return rows


def render_coefplot_svg(rows: List[CoefPlotRow], model_type: ModelType,
                        xlab: str = "Posterior estimate", ylab: str = "") -> str:
    """Point estimates with interval bars as SVG text."""
    categories: List[Optional[str]] = []
    for r in rows:
        if r.category not in categories:
            categories.append(r.category)
    labels: List[str] = []
    for r in rows:
        if r.name not in labels:
            labels.append(r.name)

    fig, ax = plt.subplots(figsize=(6.0, 0.45 * len(labels) + 1.2))
    spread = 0.25 if len(categories) > 1 else 0.0
    for g, category in enumerate(categories):
        group = [r for r in rows if r.category == category]
        shift = (g - (len(categories) - 1) / 2) * spread
        ys = [len(labels) - 1 - labels.index(r.name) + shift for r in group]
        means = [r.mean for r in group]
        err = [[r.mean - r.lower for r in group], [r.upper - r.mean for r in group]]
        ax.errorbar(means, ys, xerr=err, fmt="o", capsize=3, label=category)
    ax.axvline(0.0, color="grey", linestyle="--", linewidth=0.8)
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(list(reversed(labels)))
    ax.set_xlabel(xlab)
    ax.set_ylabel(ylab)
    ax.set_title(f"Bayesian {model_type.title}")
    if len(categories) > 1:
        ax.legend(title="Category")
    fig.tight_layout()

    buffer = StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buffer.getvalue()


def write_coefplot_svg(rows: List[CoefPlotRow], model_type: ModelType, output_path: str,
                       xlab: str = "Posterior estimate", ylab: str = "") -> str:
    atomic_write_text(output_path, render_coefplot_svg(rows, model_type, xlab=xlab, ylab=ylab))
    return output_path
