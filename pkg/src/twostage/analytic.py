"""Closed-form and quadrature-backed exact quantities of the trial statistic.

Houses the joint density of (final size, final sum), the exact density and
CDF of the normalized statistic ``sqrt(N)(estimate - mu)``, the computable
total-variation bound against the standard normal, the exact total-variation
and Kolmogorov distances, and exact confidence-interval coverage.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import Deterministic, TrialParams
from .quadrature import (Integrand, integrate_interval, integrate_real_line,
                         panel_values, TRUNCATION_RADIUS)

_norm_pdf = _kernels.norm_pdf
_norm_cdf = _kernels.norm_cdf


@dataclass(frozen=True)
class JointDensityPoint:
    """Joint density of the final sample size and final sum at one point."""

    size_branch: int
    k: float
    density: float


@dataclass(frozen=True)
class StatisticLaw:
    """The exact law of sqrt(N)(estimate - mu) under a rule and parameters."""

    rule: object
    params: TrialParams


def joint_density(rule, params, branch, k):
    """Joint density of (N, K_N) evaluated at N = ``branch``, K_N = ``k``.

    ``branch`` must be the stage size n (stopped) or 2n (continued).
    """
    mu, n = params.mu, params.n
    k = np.asarray(k, dtype=np.float64)
    if branch == n:
        base = _norm_pdf((k - n * mu) / math.sqrt(n)) / math.sqrt(n)
        if isinstance(rule, Deterministic):
            out = base * (k > 0.0)
        else:
            out = base * _norm_cdf(rule.alpha + rule.beta * k / n)
    elif branch == 2 * n:
        base = _norm_pdf((k - 2 * n * mu) / math.sqrt(2 * n)) / math.sqrt(2 * n)
        if isinstance(rule, Deterministic):
            out = base * (1.0 - _norm_cdf(k / math.sqrt(2 * n)))
        else:
            scale = math.sqrt((2 * n + rule.beta ** 2) / (2 * n))
            out = base * (1.0 - _norm_cdf(
                (rule.alpha + rule.beta * k / (2 * n)) / scale))
    else:
        raise ValueError(f"branch must be n={n} or 2n={2 * n}, got {branch!r}")
    return float(out) if out.ndim == 0 else out


def joint_density_point(rule, params, branch, k):
    """Like :func:`joint_density`, packaged as a :class:`JointDensityPoint`."""
    return JointDensityPoint(size_branch=int(branch), k=float(k),
                             density=joint_density(rule, params, branch, k))


def branch_mass(rule, params, branch):
    """Total probability carried by one size branch (integral over k).

    Performed in standardized coordinates so the Gaussian weight is centered
    at zero regardless of mu and n.
    """
    n = params.n
    center = branch * params.mu
    scale = math.sqrt(branch)

    def f(u):
        return joint_density(rule, params, branch, center + scale * u) * scale

    brk = ()
    if isinstance(rule, Deterministic) and branch == n:
        brk = (-center / scale,)
    return integrate_real_line(Integrand(f, brk), abs_tol=1e-10).value


def _bracket_factor(law):
    """The statistic density divided by phi(u), as a vectorized function."""
    rule, params = law.rule, law.params
    mu, n = params.mu, params.n
    if isinstance(rule, Deterministic):
        jump = -math.sqrt(n) * mu
        shift = math.sqrt(2 * n) * mu

        def factor(u):
            return (u > jump) + 1.0 - _norm_cdf(u + shift)

        return factor, (jump,)
    a, b = rule.alpha, rule.beta
    drift = a + b * mu
    s1 = b / math.sqrt(n)
    c2 = math.sqrt(2 * n / (2 * n + b ** 2)) * drift
    s2 = b / math.sqrt(2 * n + b ** 2)

    def factor(u):
        return _norm_cdf(drift + s1 * u) + 1.0 - _norm_cdf(c2 + s2 * u)

    return factor, ()


def statistic_density(law, u):
    """Exact density of the normalized statistic at ``u`` (scalar or array)."""
    factor, _ = _bracket_factor(law)
    arr = np.asarray(u, dtype=np.float64)
    out = _norm_pdf(arr) * factor(arr)
    return float(out) if out.ndim == 0 else out


def _density_integrand(law):
    factor, brk = _bracket_factor(law)
    return Integrand(lambda u: _norm_pdf(u) * factor(u), brk)


def statistic_cdf(law, x, abs_tol=1e-9):
    """P[statistic <= x], by quadrature of the exact density."""
    x = float(x)
    if x <= -TRUNCATION_RADIUS:
        return 0.0
    if x >= TRUNCATION_RADIUS:
        return 1.0
    return integrate_interval(_density_integrand(law), -np.inf, x,
                              abs_tol=abs_tol).value


def tv_bound(rule, params, abs_tol=1e-9):
    """Computable upper bound on the total-variation distance from N(0,1).

    Integrates phi(u) times the absolute difference between the stage-one
    stopping factor and its stage-two counterpart.
    """
    mu, n = params.mu, params.n
    if isinstance(rule, Deterministic):
        jump = -math.sqrt(n) * mu
        shift = math.sqrt(2 * n) * mu

        def f(u):
            return _norm_pdf(u) * np.abs((u > jump) - _norm_cdf(u + shift))

        return integrate_real_line(Integrand(f, (jump,)),
                                   abs_tol=abs_tol).value
    a, b = rule.alpha, rule.beta
    drift = a + b * mu
    s1 = b / math.sqrt(n)
    c2 = math.sqrt(2 * n / (2 * n + b ** 2)) * drift
    s2 = b / math.sqrt(2 * n + b ** 2)

    def f(u):
        return _norm_pdf(u) * np.abs(_norm_cdf(c2 + s2 * u)
                                     - _norm_cdf(drift + s1 * u))

    return integrate_real_line(Integrand(f), abs_tol=abs_tol).value


def exact_tv_distance(law, abs_tol=1e-9):
    """Exact total-variation distance: half the L1 gap between densities."""
    factor, brk = _bracket_factor(law)

    def f(u):
        return _norm_pdf(u) * np.abs(factor(u) - 1.0)

    return 0.5 * integrate_real_line(Integrand(f, brk), abs_tol=abs_tol).value


def _difference_edges(law, lo, hi, cells):
    """Cell edges on [lo, hi] with the density's jump point pinned to an edge."""
    edges = np.linspace(lo, hi, cells + 1)
    _, brk = _bracket_factor(law)
    for b in brk:
        if lo < b < hi:
            edges = np.unique(np.concatenate([edges, [b]]))
    return edges


def exact_kolmogorov(law, resolution=1e-6):
    """sup_x |statistic_cdf(x) - Phi(x)|, located by grid plus refinement.

    The CDF difference is accumulated with one Kronrod panel per grid cell
    (the integrand density - phi is smooth inside cells once the jump point
    is pinned to an edge), then the argmax neighborhood is re-gridded until
    the cell width drops below ``resolution``.
    """
    factor, brk = _bracket_factor(law)

    def g(u):
        return _norm_pdf(u) * (factor(u) - 1.0)

    g_integrand = Integrand(g, brk)
    lo, hi = -TRUNCATION_RADIUS, TRUNCATION_RADIUS
    edges = _difference_edges(law, lo, hi, 1800)
    vals, _ = panel_values(g, edges)
    diff = np.concatenate([[0.0], np.cumsum(vals)])
    best = int(np.argmax(np.abs(diff)))
    k_best = float(np.abs(diff[best]))
    step = float(np.max(np.diff(edges)))
    x_best = float(edges[best])
    while step > resolution:
        a = max(lo, x_best - step)
        b = min(hi, x_best + step)
        d_a = integrate_interval(g_integrand, lo, a, abs_tol=1e-10).value
        edges = _difference_edges(law, a, b, 200)
        vals, _ = panel_values(g, edges)
        diff = d_a + np.concatenate([[0.0], np.cumsum(vals)])
        best = int(np.argmax(np.abs(diff)))
        k_best = max(k_best, float(np.abs(diff[best])))
        x_best = float(edges[best])
        step = float(np.max(np.diff(edges)))
    return k_best


def exact_coverage(law, x, abs_tol=1e-9):
    """P[|statistic| <= x]: the chance the interval mu_hat +/- x/sqrt(N) covers mu."""
    x = float(x)
    if x < 0.0:
        raise ValueError(f"coverage half-width must be nonnegative, got {x!r}")
    if x == 0.0:
        return 0.0
    return (statistic_cdf(law, x, abs_tol=abs_tol)
            - statistic_cdf(law, -x, abs_tol=abs_tol))


def gaussian_product_identity_check(k, z, params, tol=1e-12):
    """Verify the two-Gaussian product refactoring used by the joint density.

    phi((z - n mu)/sqrt(n)) * phi((k - z - n mu)/sqrt(n)) must equal
    phi((k - 2 n mu)/sqrt(2n)) * phi((2z - k)/sqrt(2n)).
    """
    mu, n = params.mu, params.n
    rn, r2n = math.sqrt(n), math.sqrt(2 * n)
    pdf = _kernels.norm_pdf_scalar
    lhs = pdf((z - n * mu) / rn) * pdf((k - z - n * mu) / rn)
    rhs = pdf((k - 2 * n * mu) / r2n) * pdf((2 * z - k) / r2n)
    return abs(lhs - rhs) < tol
