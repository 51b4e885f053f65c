"""Monte Carlo parameter-recovery study for the bivariate MLE."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .begled import BegledParams, sample_begled
from .estimation import FitConfig, FitError, fit_mle, partition_sample
from .numerics import RandomStream

__all__ = ["ParamSummary", "SimulationReport", "SimulationError", "run_simulation", "worker_count"]

TABLE9_TRUTH = BegledParams(1.5, 0.5, 0.7, 0.8, 1.2, 1.3)
TABLE10_TRUTH = BegledParams(2.0, 0.2, 1.5, 0.5, 0.6, 0.9)
DEFAULT_N_GRID = (30, 50, 100, 200)


class SimulationError(RuntimeError):
    """Too many replications failed to produce a converged fit."""


@dataclass(frozen=True)
class ParamSummary:
    name: str
    truth: float
    mean: float
    bias: float
    var: float
    mse: float
    ci_low: float
    ci_high: float


@dataclass
class SimulationReport:
    truth: BegledParams
    n_grid: tuple[int, ...]
    replications: int
    seed: int
    rows: dict[int, list[ParamSummary]] = field(default_factory=dict)
    failures: dict[int, int] = field(default_factory=dict)
    estimates: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def summary(self, n: int, name: str) -> ParamSummary:
        for row in self.rows[n]:
            if row.name == name:
                return row
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "truth": self.truth.as_dict(),
            "n_grid": list(self.n_grid),
            "replications": self.replications,
            "seed": self.seed,
            "failures": {str(n): c for n, c in self.failures.items()},
            "rows": {str(n): [asdict(r) for r in rows] for n, rows in self.rows.items()},
        }

    def format_table(self) -> str:
        lines = [f"{'n':>5} {'parameter':>10} {'estimate':>11} {'bias':>11} {'var':>11} {'mse':>11}  C.I."]
        for n in self.n_grid:
            for r in self.rows[n]:
                lines.append(
                    f"{n:>5} {r.name + '=' + format(r.truth, 'g'):>10} {r.mean:>11.6f} {r.bias:>11.6f}"
                    f" {r.var:>11.7f} {r.mse:>11.7f}  ({r.ci_low:.4f}, {r.ci_high:.4f})"
                )
        return "\n".join(lines)


def worker_count(requested: int | None = None) -> int:
    """Worker processes: ``requested``, else the CPU count, capped by ``MOGLIB_THREADS``."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    env = os.environ.get("MOGLIB_THREADS")
    if env:
        n = min(n, int(env))
    return max(1, int(n))


def stream_id(n: int, r: int) -> int:
    """Substream of replication ``r`` at sample size ``n``."""
    return (n << 32) | r


def _one(args) -> tuple[int, int, np.ndarray | None]:
    truth, n, r, seed, config = args
    data = sample_begled(truth, n, RandomStream(seed, stream_id(n, r)))
    try:
        fit = fit_mle(partition_sample(data), "begled", config=config)
    except FitError:
        return n, r, None
    if not fit.converged:
        return n, r, None
    return n, r, np.array(fit.params.as_tuple())


def summarize(truth: BegledParams, est: np.ndarray) -> list[ParamSummary]:
    rows = []
    for j, name in enumerate(BegledParams.NAMES):
        col = est[:, j]
        t = truth.as_tuple()[j]
        mean = float(np.mean(col))
        bias = mean - t
        var = float(np.var(col))
        rows.append(
            ParamSummary(
                name=name,
                truth=t,
                mean=mean,
                bias=bias,
                var=var,
                mse=var + bias * bias,
                ci_low=float(np.percentile(col, 2.5)),
                ci_high=float(np.percentile(col, 97.5)),
            )
        )
    return rows


def run_simulation(
    truth: BegledParams = TABLE9_TRUTH,
    n_grid=DEFAULT_N_GRID,
    replications: int = 1000,
    seed: int = 0,
    config: FitConfig = FitConfig(),
    workers: int | None = None,
    failure_budget: float = 0.05,
    progress=None,
) -> SimulationReport:
    """Sample, refit and summarize ``replications`` data sets per sample size.

    Replication ``r`` at size ``n`` draws from its own substream, so results
    do not depend on the number of workers. Non-converged fits are dropped;
    more than ``failure_budget`` of them at any ``n`` is an error.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    n_grid = tuple(int(n) for n in n_grid)
    tasks = [(truth, n, r, seed, config) for n in n_grid for r in range(replications)]
    nw = worker_count(workers)
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(_one, tasks, chunksize=max(1, len(tasks) // (8 * nw))))
    else:
        results = []
        for i, t in enumerate(tasks):
            results.append(_one(t))
            if progress is not None:
                progress(i + 1, len(tasks))

    report = SimulationReport(truth, n_grid, replications, seed)
    for n in n_grid:
        ok = sorted((r, e) for m, r, e in results if m == n and e is not None)
        failed = replications - len(ok)
        report.failures[n] = failed
        if failed > math.floor(failure_budget * replications):
            raise SimulationError(f"n={n}: {failed} of {replications} fits failed (budget {failure_budget:.0%})")
        est = np.array([e for _, e in ok])
        report.estimates[n] = est
        report.rows[n] = summarize(truth, est)
    return report
