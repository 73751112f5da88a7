"""Exact and simulated distribution of the sample average after a
two-stage sequential trial with probit-stochastic or deterministic stopping.
"""

from ._kernels import USING_NUMBA
from .analytic import (JointDensityPoint, StatisticLaw, branch_mass,
                       exact_coverage, exact_kolmogorov, exact_tv_distance,
                       gaussian_product_identity_check, joint_density,
                       joint_density_point, statistic_cdf, statistic_density,
                       tv_bound)
from .distributions import (RandomStream, cdf, inverse_cdf, phi,
                            sample_standard_normal)
from .model import (Deterministic, Probabilistic, StoppingRule, TrialOutcome,
                    TrialParams, expected_estimate, marginal_stop_probability,
                    run_trial, stop_probability)
from .montecarlo import (FLAG_THRESHOLD, EmpiricalSample, SimulationPlan,
                         SimulationSummary, coverage_count,
                         empirical_kolmogorov, run_simulation, summarize)
from .quadrature import (Integrand, QuadratureConvergenceError,
                         QuadratureResult, integrate_interval,
                         integrate_real_line)

__version__ = "1.0.0"

__all__ = [
    "USING_NUMBA", "JointDensityPoint", "StatisticLaw", "branch_mass",
    "exact_coverage", "exact_kolmogorov", "exact_tv_distance",
    "gaussian_product_identity_check", "joint_density", "joint_density_point",
    "statistic_cdf", "statistic_density", "tv_bound", "RandomStream", "cdf",
    "inverse_cdf", "phi", "sample_standard_normal", "Deterministic",
    "Probabilistic", "StoppingRule", "TrialOutcome", "TrialParams",
    "expected_estimate", "marginal_stop_probability", "run_trial",
    "stop_probability", "FLAG_THRESHOLD", "EmpiricalSample", "SimulationPlan",
    "SimulationSummary", "coverage_count", "empirical_kolmogorov",
    "run_simulation", "summarize", "Integrand", "QuadratureConvergenceError",
    "QuadratureResult", "integrate_interval", "integrate_real_line",
    "__version__",
]
