"""Core data models for choice-gibbs."""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np


class ModelType(Enum):
    """模型类型枚举"""
    PROBIT = "probit"
    LOGIT = "logit"
    MNL = "mnl"
    BINOMIAL = "binomial"

    @property
    def title(self) -> str:
        """Human readable title used in console and table headers."""
        return {
            ModelType.PROBIT: "Probit",
            ModelType.LOGIT: "Logit",
            ModelType.MNL: "Multinomial Logit",
            ModelType.BINOMIAL: "Binomial Logit",
        }[self]


@dataclass(frozen=True)
class PolyaGammaParams:
    """Pólya-Gamma 分布参数 PG(b, z)"""
    b: float
    z: float = 0.0


@dataclass(frozen=True)
class PriorSpec:
    """系数先验: β ~ N(0, A0·I + G0·e_d e_dᵀ)

    intercept_index is 0-based; None means the design has no intercept
    column and the prior reduces to A0·I.
    """
    coef_dim: int
    A0: float = 4.0
    G0: float = 100.0
    intercept_index: Optional[int] = 0

    def is_valid(self) -> bool:
        """验证先验参数完整性"""
        if not isinstance(self.coef_dim, (int, np.integer)) or self.coef_dim < 1:
            return False
        if not np.isfinite(self.A0) or self.A0 <= 0:
            return False
        if not np.isfinite(self.G0) or self.G0 < 0:
            return False
        if self.intercept_index is not None and not (0 <= self.intercept_index < self.coef_dim):
            return False
        return True


@dataclass
class WeightedRegressionInput:
    """加权回归输入 (X, 工作响应, 权重 ω, 线性偏移)"""
    X: np.ndarray
    response: np.ndarray
    weights: np.ndarray
    offsets: Optional[np.ndarray] = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.response = np.asarray(self.response, dtype=float).reshape(-1)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if self.offsets is None:
            self.offsets = np.zeros_like(self.response)
        else:
            self.offsets = np.asarray(self.offsets, dtype=float).reshape(-1)


@dataclass
class Dataset:
    """模型输入数据集

    y holds 0/1 outcomes (probit, logit), category labels (mnl) or success
    counts (binomial). Ni holds trial totals for the binomial model.
    """
    y: np.ndarray
    X: np.ndarray
    Ni: Optional[np.ndarray] = None
    column_names: List[str] = field(default_factory=list)
    category_labels: Optional[List[str]] = None
    baseline: Optional[str] = None
    intercept_position: Optional[int] = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim == 1:
            self.X = self.X.reshape(-1, 1)
        self.y = np.asarray(self.y)
        if self.Ni is not None:
            self.Ni = np.asarray(self.Ni)
        if not self.column_names:
            self.column_names = [f"x{j}" for j in range(self.X.shape[1])]

    @property
    def n_obs(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_coef(self) -> int:
        return int(self.X.shape[1])

    def intercept_index(self) -> Optional[int]:
        """Index of the intercept column: the flagged position, else a
        column named 'intercept' that is identically one, else the first
        column that is identically one."""
        if self.intercept_position is not None:
            return self.intercept_position
        if self.n_obs == 0:
            return None
        ones = [j for j in range(self.n_coef) if np.all(self.X[:, j] == 1.0)]
        for j, name in enumerate(self.column_names):
            if name.lower() == "intercept" and j in ones:
                return j
        return ones[0] if ones else None

    @cached_property
    def category_codes(self) -> np.ndarray:
        """Outcome labels mapped to positions in category_labels (MNL)."""
        lookup = {label: k for k, label in enumerate(self.category_labels or [])}
        return np.array([lookup[str(v)] for v in self.y], dtype=int)

    def baseline_index(self) -> int:
        return list(self.category_labels).index(self.baseline)


@dataclass(frozen=True)
class WorkingPrior:
    """Boosting 工作参数的先验"""
    gamma_variance: float
    delta_shape: float = 2.5
    delta_rate: float = 1.5


@dataclass
class WorkingParams:
    """Boosting 工作参数: 位置 gamma, 尺度 delta"""
    gamma: float = 0.0
    delta: float = 1.0


@dataclass
class SamplerConfig:
    """采样器配置"""
    draws: int = 1000
    burnin: int = 1000
    boost: bool = True
    beta_start: Optional[np.ndarray] = None
    seed: Optional[int] = None
    verbose: bool = False
    debug: bool = False
    working_shape: float = 2.5
    working_rate: float = 1.5

    def is_valid(self) -> bool:
        """验证配置完整性"""
        if not isinstance(self.draws, (int, np.integer)) or self.draws < 1:
            return False
        if not isinstance(self.burnin, (int, np.integer)) or self.burnin < 0:
            return False
        if self.working_shape <= 0 or self.working_rate <= 0:
            return False
        return True


@dataclass
class LatentState:
    """一次 Gibbs 扫描的潜变量状态

    beta is (d,) for the binary and binomial models and (d, L) for the
    multinomial model, with the baseline column fixed at zero. The MNL
    utilities u_k, u_0, u_a belong to the category updated last.
    """
    beta: np.ndarray
    z: Optional[np.ndarray] = None
    u_k: Optional[np.ndarray] = None
    u_0: Optional[np.ndarray] = None
    u_a: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    omega: Optional[np.ndarray] = None
    omega_w: Optional[np.ndarray] = None
    omega_v: Optional[np.ndarray] = None


@dataclass
class PosteriorDraws:
    """后验抽样结果

    beta has shape (draws, d) or, for the multinomial model,
    (draws, d, L) with categories in label order and the baseline slice
    identically zero.
    """
    model_type: ModelType
    beta: np.ndarray
    coef_names: List[str]
    draws: int
    burnin: int
    seed: int
    runtime_seconds: Optional[float] = None
    category_labels: Optional[List[str]] = None
    baseline: Optional[str] = None
    n_obs: Optional[int] = None

    @property
    def n_saved(self) -> int:
        return int(self.beta.shape[0])

    def free_categories(self) -> List[str]:
        """Non-baseline categories in label order (MNL only)."""
        if self.category_labels is None:
            return []
        return [c for c in self.category_labels if c != self.baseline]

    def flat_columns(self) -> Tuple[List[str], np.ndarray]:
        """Flatten draws to (names, matrix) with one column per free
        coefficient; MNL names are suffixed by their category label."""
        if self.beta.ndim == 2:
            return list(self.coef_names), self.beta
        names: List[str] = []
        columns = []
        for label in self.free_categories():
            k = self.category_labels.index(label)
            for j, coef in enumerate(self.coef_names):
                names.append(f"{coef}.{label}")
                columns.append(self.beta[:, j, k])
        return names, np.column_stack(columns)


@dataclass
class LogLik:
    """对数似然及自由度"""
    value: float
    df: int
    nobs: int

    def __str__(self) -> str:
        return f"'log Lik.' {self.value:.3f} (df={self.df})"


@dataclass
class DiagReport:
    """MCMC 诊断报告 (ESS / IE / ESR)"""
    names: List[str]
    ess: np.ndarray
    ie: np.ndarray
    esr: Optional[np.ndarray]
    saved_draws: int
    runtime_seconds: Optional[float]
    degenerate: List[str] = field(default_factory=list)

    def summary(self) -> Dict[str, Dict[str, Optional[float]]]:
        """min / median / max of each measure across coefficients."""
        out: Dict[str, Dict[str, Optional[float]]] = {}
        for key, values in (("ESS", self.ess), ("IE", self.ie), ("ESR", self.esr)):
            if values is None:
                out[key] = {"min": None, "median": None, "max": None}
            else:
                out[key] = {
                    "min": float(np.min(values)),
                    "median": float(np.median(values)),
                    "max": float(np.max(values)),
                }
        return out

    def as_table(self) -> List[Tuple[str, str, Optional[float]]]:
        """Rows (measure, statistic, value) laid out like the efficiency table."""
        rows: List[Tuple[str, str, Optional[float]]] = []
        for measure, stats in self.summary().items():
            for label, key in (("Min.", "min"), ("Median", "median"), ("Max.", "max")):
                rows.append((measure, label, stats[key]))
        rows.append(("Time (in sec.)", "", self.runtime_seconds))
        return rows


@dataclass
class SummaryRow:
    """汇总表的一行"""
    name: str
    mean: float
    sd: float
    lower: float
    upper: float
    category: Optional[str] = None

    @property
    def excludes_zero(self) -> bool:
        return self.lower > 0 or self.upper < 0


@dataclass
class SummaryTable:
    """后验汇总表"""
    model_type: ModelType
    rows: List[SummaryRow]
    q: Tuple[float, float]
    n_obs: int
    draws: int
    burnin: int
    baseline: Optional[str] = None
    categories: List[str] = field(default_factory=list)
    digits: int = 2

    def groups(self) -> List[Tuple[Optional[str], List[SummaryRow]]]:
        """Rows grouped by category, in category order (one None group
        for the binary and binomial models)."""
        if not self.categories:
            return [(None, list(self.rows))]
        return [(c, [r for r in self.rows if r.category == c]) for c in self.categories]


@dataclass
class CoefPlotRow:
    """系数图数据的一行"""
    name: str
    mean: float
    lower: float
    upper: float
    category: Optional[str] = None


@dataclass
class Prediction:
    """预测概率 (后验均值与分位数)"""
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    categories: Optional[List[str]] = None


@dataclass
class CoefEstimates:
    """系数点估计与可信区间

    Arrays are (d,) or, for MNL, (d, m) over the free categories.
    """
    names: List[str]
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    categories: Optional[List[str]] = None


@dataclass(frozen=True)
class FitResult:
    """模型估计结果: 后验抽样 + 原样保存的全部输入"""
    model_type: ModelType
    draws: PosteriorDraws
    data: Dataset
    prior: PriorSpec
    config: SamplerConfig
    baseline: Optional[str] = None

    @property
    def runtime_seconds(self) -> Optional[float]:
        return self.draws.runtime_seconds

    def header_lines(self) -> List[str]:
        """Overview lines without the wall-clock line."""
        return [
            f"--- Bayesian {self.model_type.title} Results ---",
            "",
            f"N = {self.data.n_obs}",
            f"Analysis based on {self.draws.n_saved} posterior draws after "
            f"a burn-in period of {self.draws.burnin} iterations.",
        ]

    def describe(self) -> str:
        """Console overview block printed after a fit."""
        lines = self.header_lines()
        if self.runtime_seconds is not None:
            lines.append(f"MCMC sampling took a total of {self.runtime_seconds:.2f} seconds.")
        if self.model_type is ModelType.MNL and self.baseline is not None:
            lines.extend(["", f"Category '{self.baseline}' is the baseline category."])
        return "\n".join(lines)


@dataclass
class JobSpec:
    """命令行任务描述"""
    input_path: str
    outcome: str
    covariates: List[str]
    model_type: ModelType
    output_dir: str
    trials: Optional[str] = None
    intercept_column: Optional[str] = None
    baseline: Optional[str] = None
    a0: float = 4.0
    g0: float = 100.0
    draws: int = 1000
    burnin: int = 1000
    seed: Optional[int] = None
    q: Tuple[float, float] = (0.025, 0.975)
    boost: bool = True
    verbose: bool = False
    formats: List[str] = field(default_factory=lambda: ["md"])
    digits: int = 2
    names: Optional[List[str]] = None
    sort: bool = False
    plot_svg: bool = False
    caption: Optional[str] = None
    include: Optional[List[str]] = None
    xlab: str = "Posterior estimate"
    ylab: str = ""


@dataclass
class ExportResult:
    """导出结果"""
    success: bool
    message: str
    exported_count: int
    file_path: Optional[str] = None
