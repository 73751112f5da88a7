"""Reproducible parallel simulation of the two-stage trial.

Each replicate owns a counter-based random stream derived from
(master_seed, replicate index), so results are bit-identical for a fixed
seed regardless of how replicates are partitioned across worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distributions import cdf
from .model import Deterministic, Probabilistic, TrialParams

# Empirical Kolmogorov distances above this are flagged as anomalous; it
# approximates the 99.9% DKW band for 1000 replicates.
FLAG_THRESHOLD = 0.06


@dataclass(frozen=True)
class SimulationPlan:
    """What to simulate: rule, parameters, replicate count, CI half-width, seed."""

    rule: object
    params: TrialParams
    replicates: int = 1000
    ci_halfwidth: float = 1.96
    master_seed: int = 0

    def __post_init__(self):
        if int(self.replicates) < 1:
            raise ValueError(
                f"replicates must be >= 1, got {self.replicates!r}")
        if not (float(self.ci_halfwidth) > 0.0):
            raise ValueError(
                f"ci_halfwidth must be positive, got {self.ci_halfwidth!r}")


@dataclass(frozen=True)
class EmpiricalSample:
    """Sorted statistics of all replicates plus bookkeeping aggregates."""

    statistics: np.ndarray
    stop_count: int
    master_seed: int
    mean_estimate: float


@dataclass(frozen=True)
class SimulationSummary:
    empirical_kolmogorov: float
    coverage_count: int
    coverage_rate: float
    bias_estimate: float


def _rule_kind(rule):
    if isinstance(rule, Deterministic):
        return _kernels._RULE_DETERMINISTIC, 0.0, 0.0
    if isinstance(rule, Probabilistic):
        return _kernels._RULE_PROBABILISTIC, rule.alpha, rule.beta
    raise TypeError(f"unsupported stopping rule: {rule!r}")


def run_simulation(plan, workers=1):
    """Run all replicates of ``plan`` and return the :class:`EmpiricalSample`.

    ``workers`` > 1 partitions the replicate range across threads; the
    output is identical to a single-threaded run because every replicate's
    draws depend only on (master_seed, replicate index).
    """
    kind, alpha, beta = _rule_kind(plan.rule)
    mu, n = plan.params.mu, plan.params.n
    m = int(plan.replicates)
    seed = int(plan.master_seed)
    workers = max(1, int(workers))
    if workers == 1 or m < 2 * workers:
        stats, ests, stopped = _kernels.simulate_batch(
            kind, alpha, beta, mu, n, 0, m, seed)
    else:
        bounds = np.linspace(0, m, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda se: _kernels.simulate_batch(
                    kind, alpha, beta, mu, n, int(se[0]),
                    int(se[1] - se[0]), seed),
                zip(bounds[:-1], bounds[1:])))
        stats = np.concatenate([p[0] for p in parts])
        ests = np.concatenate([p[1] for p in parts])
        stopped = np.concatenate([p[2] for p in parts])
    return EmpiricalSample(statistics=np.sort(stats),
                           stop_count=int(np.count_nonzero(stopped)),
                           master_seed=seed,
                           mean_estimate=float(np.mean(ests)))


def empirical_kolmogorov(sample):
    """Exact sup-distance between the empirical step CDF and the normal CDF."""
    s = sample.statistics
    m = len(s)
    if m == 0:
        raise ValueError("empirical_kolmogorov requires a non-empty sample")
    probs = cdf(s)
    i = np.arange(1, m + 1) / m
    return float(np.max(np.maximum(np.abs(probs - i),
                                   np.abs(probs - (i - 1.0 / m)))))


def coverage_count(sample, x):
    """Number of replicates whose statistic lies in [-x, x]."""
    if not x > 0.0:
        raise ValueError(f"coverage half-width must be positive, got {x!r}")
    return int(np.count_nonzero(np.abs(sample.statistics) <= x))


def summarize(sample, plan):
    """Bundle the distance, coverage, and bias summaries for one sample."""
    m = len(sample.statistics)
    count = coverage_count(sample, plan.ci_halfwidth)
    return SimulationSummary(
        empirical_kolmogorov=empirical_kolmogorov(sample),
        coverage_count=count,
        coverage_rate=count / m,
        bias_estimate=sample.mean_estimate - plan.params.mu)


def bias_standard_error(params, replicates):
    """Conservative standard error of the simulated bias estimate.

    The estimator's variance is at most 1/n per replicate times a factor 2
    margin for the random sample size.
    """
    return math.sqrt(2.0 / (params.n * replicates))
