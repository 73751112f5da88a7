"""Two-stage trial model: stopping rules, estimator, exact means.

A trial observes n values of N(mu, 1), forms the stage-one sum K_n, and
either stops (total size n) or continues to 2n observations. The stopping
decision is governed by a rule:

* ``Probabilistic(alpha, beta)`` stops with probability
  ``Phi(alpha + (beta/n) * K_n)`` given the stage-one data;
* ``Deterministic()`` stops exactly when ``K_n > 0``.

The estimator is the plain sample average over whichever size was realized,
and the normalized statistic is ``sqrt(N) * (estimate - mu)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distributions import cdf, phi


@dataclass(frozen=True)
class Probabilistic:
    """Stochastic probit stopping rule: P[stop | data] = Phi(alpha + beta*K_n/n)."""

    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not math.isfinite(a):
            raise ValueError(f"alpha must be finite, got {self.alpha!r}")
        if not (math.isfinite(b) and b >= 0.0):
            raise ValueError(
                f"beta must be finite and nonnegative, got {self.beta!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)


@dataclass(frozen=True)
class Deterministic:
    """Deterministic stopping rule: stop exactly when the stage-one sum is > 0."""


StoppingRule = Probabilistic | Deterministic


@dataclass(frozen=True)
class TrialParams:
    """Population mean ``mu`` and stage size ``n`` (total size is n or 2n)."""

    mu: float
    n: int

    def __post_init__(self):
        m = float(self.mu)
        if not math.isfinite(m):
            raise ValueError(f"mu must be finite, got {self.mu!r}")
        n = int(self.n)
        if n < 1 or n != self.n:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "mu", m)
        object.__setattr__(self, "n", n)


@dataclass(frozen=True)
class TrialOutcome:
    """One realized trial: final size N, sum K_N, estimate, and statistic."""

    sample_size: int
    sample_sum: float
    estimate: float
    statistic: float


def stop_probability(rule, params, k):
    """P[stop after stage one | K_n = k]. Deterministic: 1 iff k > 0."""
    if isinstance(rule, Deterministic):
        return 1.0 if k > 0.0 else 0.0
    return cdf(rule.alpha + (rule.beta / params.n) * k)


def marginal_stop_probability(rule, params):
    """P[N = n] before any data: the stage-one stop chance marginally."""
    if isinstance(rule, Deterministic):
        return cdf(math.sqrt(params.n) * params.mu)
    scale = math.sqrt(1.0 + rule.beta ** 2 / params.n)
    return cdf((rule.alpha + rule.beta * params.mu) / scale)


def expected_estimate(rule, params):
    """Exact mean of the estimator; exceeds mu by the selection bias."""
    mu, n = params.mu, params.n
    if isinstance(rule, Deterministic):
        return mu + phi(math.sqrt(n) * mu) / (2.0 * math.sqrt(n))
    scale = math.sqrt(1.0 + rule.beta ** 2 / n)
    return mu + (rule.beta / scale) * phi(
        (rule.alpha + rule.beta * mu) / scale) / (2.0 * n)


def run_trial(rule, params, stream):
    """Run one trial on ``stream`` and return its :class:`TrialOutcome`.

    Stream consumption is fixed: n normals for stage one, then (probabilistic
    rule only) one uniform for the stop decision, then n more normals when
    continuing. This matches the batch simulation kernels draw for draw.
    """
    mu, n = params.mu, params.n
    k = float(np.sum(mu + stream.normals(n)))
    if isinstance(rule, Deterministic):
        stop = k > 0.0
    else:
        stop = stream.uniform() < _kernels.norm_cdf_scalar(
            rule.alpha + (rule.beta / n) * k)
    if not stop:
        k += float(np.sum(mu + stream.normals(n)))
    size = n if stop else 2 * n
    estimate = k / size
    return TrialOutcome(sample_size=size, sample_sum=k, estimate=estimate,
                        statistic=math.sqrt(size) * (estimate - mu))
