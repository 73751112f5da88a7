import math

import numpy as np
import pytest

import twostage as ts
from twostage.montecarlo import (EmpiricalSample, SimulationPlan,
                                 bias_standard_error, coverage_count,
                                 empirical_kolmogorov, run_simulation,
                                 summarize)

DET = ts.Deterministic()


def _plan(rule=DET, mu=0.0, n=10, m=1000, seed=0, x=1.96):
    return SimulationPlan(rule=rule, params=ts.TrialParams(mu, n),
                          replicates=m, ci_halfwidth=x, master_seed=seed)


def test_plan_validation():
    with pytest.raises(ValueError):
        _plan(m=0)
    with pytest.raises(ValueError):
        _plan(x=0.0)


def test_single_replicate_matches_run_trial():
    plan = _plan(m=1, seed=77)
    sample = run_simulation(plan)
    out = ts.run_trial(DET, plan.params, ts.RandomStream(77, 0))
    assert len(sample.statistics) == 1
    assert abs(sample.statistics[0] - out.statistic) < 1e-12
    assert sample.stop_count == (1 if out.sample_size == 10 else 0)


def test_stop_count_binomial():
    plan = _plan(rule=ts.Probabilistic(0.0, 0.0), seed=5)
    sample = run_simulation(plan)
    assert abs(sample.stop_count - 500) <= 63


def test_thread_count_invariance():
    for rule in (DET, ts.Probabilistic(0.0, 10.0)):
        plan = _plan(rule=rule, m=2500, seed=9)
        s1 = run_simulation(plan, workers=1)
        s8 = run_simulation(plan, workers=8)
        assert np.array_equal(s1.statistics, s8.statistics)
        assert s1.stop_count == s8.stop_count
        assert s1.mean_estimate == s8.mean_estimate


def test_seed_stability_and_sensitivity():
    plan_a = _plan(seed=101)
    plan_b = _plan(seed=102)
    sum_a1 = summarize(run_simulation(plan_a), plan_a)
    sum_a2 = summarize(run_simulation(plan_a), plan_a)
    sum_b = summarize(run_simulation(plan_b), plan_b)
    assert sum_a1 == sum_a2
    assert sum_a1 != sum_b
    # different seeds stay within the m=1000 DKW 99.9% band of each other
    assert abs(sum_a1.empirical_kolmogorov
               - sum_b.empirical_kolmogorov) < 0.0617


def test_empirical_kolmogorov_small_samples():
    one = EmpiricalSample(statistics=np.array([0.0]), stop_count=1,
                          master_seed=0, mean_estimate=0.0)
    assert empirical_kolmogorov(one) == 0.5
    q = ts.inverse_cdf(0.25)
    two = EmpiricalSample(statistics=np.array([q, -q]), stop_count=1,
                          master_seed=0, mean_estimate=0.0)
    assert abs(empirical_kolmogorov(two) - 0.25) < 1e-12
    empty = EmpiricalSample(statistics=np.array([]), stop_count=0,
                            master_seed=0, mean_estimate=0.0)
    with pytest.raises(ValueError):
        empirical_kolmogorov(empty)


def test_coverage_count():
    sample = EmpiricalSample(statistics=np.array([-3.0, 0.0, 3.0]),
                             stop_count=0, master_seed=0, mean_estimate=0.0)
    assert coverage_count(sample, 1.96) == 1
    assert coverage_count(sample, 100.0) == 3
    with pytest.raises(ValueError):
        coverage_count(sample, 0.0)


def test_summarize_single():
    sample = EmpiricalSample(statistics=np.array([0.4]), stop_count=1,
                             master_seed=0, mean_estimate=0.1)
    s = summarize(sample, _plan(m=1, mu=0.0))
    assert s.coverage_count == 1 and s.coverage_rate == 1.0
    assert s.bias_estimate == 0.1


def test_bias_matches_exact_formula():
    plan = _plan(m=100_000, seed=13)
    s = summarize(run_simulation(plan, workers=8), plan)
    want = ts.expected_estimate(DET, plan.params) - plan.params.mu
    assert abs(want - 0.0630783130505040) < 1e-15
    assert abs(s.bias_estimate - want) < 0.004


def test_coverage_sanity_large_m():
    plan = _plan(m=100_000, seed=21)
    s = summarize(run_simulation(plan, workers=8), plan)
    assert abs(s.coverage_rate - 0.9500042097035591) < 0.003


@pytest.mark.parametrize("rule,mu,n", [
    (DET, 0.0, 10),
    (ts.Probabilistic(0.0, 10.0), 0.0, 10),
    (ts.Probabilistic(0.0, 1.0), 0.0, 100),
])
def test_dkw_consistency_large_m(rule, mu, n):
    plan = _plan(rule=rule, mu=mu, n=n, m=100_000, seed=17)
    s = summarize(run_simulation(plan, workers=8), plan)
    exact = ts.exact_kolmogorov(ts.StatisticLaw(rule, plan.params))
    band = math.sqrt(math.log(2 / 0.001) / (2 * plan.replicates))
    assert abs(s.empirical_kolmogorov - exact) < band + 1e-4


def test_stop_fraction_matches_marginal():
    for rule, mu, n in [(DET, 0.0, 10), (DET, 1.0, 100),
                        (ts.Probabilistic(0.0, 10.0), 0.0, 10),
                        (ts.Probabilistic(0.0, 1.0), -1.0, 10)]:
        plan = _plan(rule=rule, mu=mu, n=n, m=10_000, seed=29)
        sample = run_simulation(plan, workers=4)
        p = ts.marginal_stop_probability(rule, plan.params)
        sigma = math.sqrt(max(p * (1 - p), 1e-12) / plan.replicates)
        assert abs(sample.stop_count / plan.replicates - p) <= 4 * sigma + 1e-9


def test_bias_standard_error_positive():
    assert bias_standard_error(ts.TrialParams(0.0, 10), 1000) > 0.0
