"""Run manifest: the key = value record that replays a job."""

from typing import Dict, Iterable, Tuple

from ..models import FitResult, JobSpec
from .base import BaseExporter


def manifest_entries(job: JobSpec, fit: FitResult, version: str) -> Dict[str, str]:
    """运行清单条目 (seed, config, runtime, package version)"""
    runtime = fit.runtime_seconds
    return {
        "package_version": version,
        "input": job.input_path,
        "outcome": job.outcome,
        "covariates": ",".join(job.covariates),
        "trials": job.trials or "",
        "intercept_column": job.intercept_column or "",
        "type": fit.model_type.value,
        "baseline": fit.baseline or "",
        "a0": repr(fit.prior.A0),
        "g0": repr(fit.prior.G0),
        "draws": str(fit.config.draws),
        "burnin": str(fit.config.burnin),
        "boost": str(fit.config.boost).lower(),
        "seed": str(fit.draws.seed),
        "q": f"{job.q[0]!r} {job.q[1]!r}",
        "n_obs": str(fit.data.n_obs),
        "runtime_seconds": f"{runtime:.6f}" if runtime is not None else "",
    }


def parse_manifest(text: str) -> Dict[str, str]:
    entries: Dict[str, str] = {}
    for line in text.splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            entries[key.strip()] = value.strip()
    return entries


class ManifestExporter(BaseExporter):
    """运行清单导出器"""

    def render(self, payload: Dict[str, str]) -> str:
        items: Iterable[Tuple[str, str]] = payload.items()
        return "".join(f"{key} = {value}\n" for key, value in items)

    def count(self, payload: Dict[str, str]) -> int:
        return len(payload)
