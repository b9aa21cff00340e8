"""Command-line interface for choice-gibbs."""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

from . import __version__
from .bayes_linear import BayesLinearError, NumericalDegeneracyError
from .diagnostics import MIN_CHAIN_LENGTH, DiagnosticsError, InvalidQuantileError, check_quantiles, diag_report
from .estimator import default_prior, fit
from .exporters.base import ExportError
from .exporters.coefplot_exporter import emit_coefplot, write_coefplot_svg
from .exporters.csv_exporter import CoefPlotCSVExporter, DiagCSVExporter, DrawsCSVExporter
from .exporters.manifest_exporter import ManifestExporter, manifest_entries
from .exporters.summary_exporter import SummaryExporter
from .models import ExportResult, FitResult, JobSpec, ModelType, SamplerConfig
from .parser import ParserError, load_dataset
from .randvar import RandVarError
from .samplers import LatentStateError, SamplerError, WorkingParameterError
from .statistics import posterior_summary
from .validator import DataValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_NUMERICAL_ERROR = 2

NUMERICAL_ERRORS = (NumericalDegeneracyError, LatentStateError, WorkingParameterError)
USER_ERRORS = (
    ParserError, DataValidationError, ExportError, DiagnosticsError,
    BayesLinearError, SamplerError, RandVarError,
)

SUMMARY_SUFFIX = {"md": "md", "tex": "tex", "csv": "csv"}


class UsageError(Exception):
    """Raised for invalid command-line arguments."""
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_arg_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="choice-gibbs",
        description="Bayesian probit / logit / multinomial logit / binomial logit estimation by Gibbs sampling",
    )
    parser.add_argument("--data", required=True, help="Input CSV file with a header row")
    parser.add_argument("--outcome", required=True, help="Outcome column")
    parser.add_argument("--covariates", nargs="+", default=[], help="Covariate columns, in order")
    parser.add_argument("--trials", help="Trial totals column (binomial)")
    parser.add_argument("--intercept-column", help="Existing column to use as intercept instead of adding one")
    parser.add_argument("--type", required=True, choices=[m.value for m in ModelType], help="Model type")
    parser.add_argument("--draws", type=int, default=1000, help="Saved draws")
    parser.add_argument("--burnin", type=int, default=1000, help="Burn-in sweeps")
    parser.add_argument("--a0", type=float, default=4.0, help="Prior variance of the coefficients")
    parser.add_argument("--g0", type=float, default=100.0, help="Extra prior variance of the intercept")
    parser.add_argument("--baseline", help="Baseline category (mnl)")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--q", nargs=2, type=float, default=[0.025, 0.975], metavar=("LO", "HI"),
                        help="Quantiles of the credible intervals")
    parser.add_argument("--no-boost", action="store_true", help="Disable the boosting moves")
    parser.add_argument("--verbose", action="store_true", help="Progress and info logging on stderr")
    parser.add_argument("--out", required=True, help="Output directory")
    parser.add_argument("--format", action="append", choices=sorted(SUMMARY_SUFFIX),
                        help="Summary table format; may be repeated (default md)")
    parser.add_argument("--names", nargs="+", help="Display names of the coefficients")
    parser.add_argument("--digits", type=int, default=2, help="Decimals in rendered tables")
    parser.add_argument("--caption", help="Summary table caption")
    parser.add_argument("--include", nargs="+", help="Coefficients to keep in the summary and plot, by name")
    parser.add_argument("--sort", action="store_true", help="Order plot rows by |posterior mean|")
    parser.add_argument("--plot-svg", action="store_true", help="Also write coefplot.svg")
    parser.add_argument("--xlab", default="Posterior estimate", help="x-axis label of coefplot.svg")
    parser.add_argument("--ylab", default="", help="y-axis label of coefplot.svg")
    return parser


def parse_job(argv: Optional[List[str]] = None) -> JobSpec:
    """Parse command-line flags into a JobSpec.

    Raises:
        UsageError: invalid flags
    """
    args = build_arg_parser().parse_args(argv)
    if args.draws < 1 or args.burnin < 0:
        raise UsageError("--draws must be >= 1 and --burnin >= 0")
    try:
        q = check_quantiles(args.q)
    except InvalidQuantileError as e:
        raise UsageError(str(e)) from e
    return JobSpec(
        input_path=args.data,
        outcome=args.outcome,
        covariates=list(args.covariates),
        model_type=ModelType(args.type),
        output_dir=args.out,
        trials=args.trials,
        intercept_column=args.intercept_column,
        baseline=args.baseline,
        a0=args.a0,
        g0=args.g0,
        draws=args.draws,
        burnin=args.burnin,
        seed=args.seed,
        q=q,
        boost=not args.no_boost,
        verbose=args.verbose,
        formats=args.format or ["md"],
        digits=args.digits,
        names=args.names,
        sort=args.sort,
        plot_svg=args.plot_svg,
        caption=args.caption,
        include=args.include,
        xlab=args.xlab,
        ylab=args.ylab,
    )


class ChoiceGibbsApp:
    """命令行应用: 读取数据, 运行采样器, 写出结果文件"""

    def __init__(self, job: JobSpec):
        self.job = job
        self.written: Dict[str, str] = {}

    def _path(self, name: str) -> str:
        return os.path.join(self.job.output_dir, name)

    def _record(self, name: str, result: ExportResult) -> None:
        if not result.success:
            raise ExportError(result.message)
        self.written[name] = result.file_path
        logger.info(result.message)

    def estimate(self) -> FitResult:
        job = self.job
        data = load_dataset(job.input_path, job)
        config = SamplerConfig(
            draws=job.draws,
            burnin=job.burnin,
            boost=job.boost,
            seed=job.seed,
            verbose=job.verbose,
        )
        return fit(data, job.model_type, default_prior(data, job.a0, job.g0), config)

    def write_artifacts(self, result: FitResult) -> None:
        job = self.job
        os.makedirs(job.output_dir, exist_ok=True)

        self._record("draws.csv", DrawsCSVExporter().export(result.draws, self._path("draws.csv")))

        table = posterior_summary(result.draws, q=job.q, names=job.names, digits=job.digits,
                                  include=job.include)
        for fmt in job.formats:
            name = f"summary.{SUMMARY_SUFFIX[fmt]}"
            exporter = SummaryExporter(fmt, caption=job.caption, digits=job.digits)
            self._record(name, exporter.export(table, self._path(name)))

        if result.draws.n_saved >= MIN_CHAIN_LENGTH:
            report = diag_report(result.draws)
            self._record("diag.csv", DiagCSVExporter().export(report, self._path("diag.csv")))
        else:
            logger.warning("diag.csv skipped: %d saved draws, at least %d needed",
                           result.draws.n_saved, MIN_CHAIN_LENGTH)

        rows = emit_coefplot(result, q=job.q, names=job.names, include=job.include, sort=job.sort)
        self._record("coefplot.csv", CoefPlotCSVExporter().export(rows, self._path("coefplot.csv")))
        if job.plot_svg:
            self.written["coefplot.svg"] = write_coefplot_svg(
                rows, result.model_type, self._path("coefplot.svg"), xlab=job.xlab, ylab=job.ylab)

        entries = manifest_entries(job, result, __version__)
        self._record("manifest.txt", ManifestExporter().export(entries, self._path("manifest.txt")))

    def run(self) -> FitResult:
        result = self.estimate()
        print(result.describe())
        self.write_artifacts(result)
        return result


def cli_fit(argv: Optional[List[str]] = None) -> int:
    """运行一次估计任务, 返回退出码 (0 ok, 1 user error, 2 numerical error)."""
    try:
        job = parse_job(argv)
    except UsageError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USER_ERROR

    logging.basicConfig(
        level=logging.INFO if job.verbose else logging.WARNING,
        format="%(message)s",
        stream=sys.stderr,
    )
    try:
        ChoiceGibbsApp(job).run()
    except NUMERICAL_ERRORS as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR
    except USER_ERRORS as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USER_ERROR
    return EXIT_OK


def main():
    """CLI entry point."""
    sys.exit(cli_fit())
