import math

import numpy as np
import pytest

import twostage as ts
from twostage._kernels import norm_cdf, norm_pdf
from twostage.quadrature import (Integrand, QuadratureConvergenceError,
                                 gk15_panel, integrate_interval,
                                 integrate_real_line, panel_values)


def test_normal_mass():
    r = integrate_real_line(norm_pdf, abs_tol=1e-10)
    assert abs(r.value - 1.0) < 1e-10
    assert r.error_estimate <= 1e-10
    assert r.evaluations % 15 == 0


def test_gaussian_times_cdf_closed_form():
    r = integrate_real_line(lambda u: norm_pdf(u) * norm_cdf(1.0 + u),
                            abs_tol=1e-10)
    assert abs(r.value - ts.cdf(1.0 / math.sqrt(2.0))) < 1e-9


def test_indicator_breakpoint():
    f = Integrand(lambda u: norm_pdf(u) * (u > 0.0), (0.0,))
    r = integrate_real_line(f, abs_tol=1e-12)
    assert abs(r.value - 0.5) < 1e-12


def test_half_line_and_empty_interval():
    assert abs(integrate_interval(norm_pdf, -np.inf, 0.0,
                                  abs_tol=1e-10).value - 0.5) < 1e-10
    r = integrate_interval(lambda u: norm_pdf(u) * (1.0 - norm_cdf(u)),
                          -np.inf, 0.0, abs_tol=1e-10)
    assert abs(r.value - 0.375) < 1e-9
    assert integrate_interval(norm_pdf, 2.0, 2.0, abs_tol=1e-9).value == 0.0


@pytest.mark.parametrize("a", [-2.0, -1.0, 0.0, 1.0, 2.0])
@pytest.mark.parametrize("b", [0.0, 0.5, 1.0, 5.0])
def test_gaussian_cdf_product_sweep(a, b):
    r = integrate_real_line(lambda u: norm_pdf(u) * norm_cdf(a + b * u),
                            abs_tol=1e-10)
    assert abs(r.value - ts.cdf(a / math.sqrt(1.0 + b * b))) < 1e-9


def test_additivity():
    def f(u):
        return norm_pdf(u) * norm_cdf(0.3 - 0.8 * u)

    tol = 1e-10
    whole = integrate_interval(f, -1.0, 2.0, abs_tol=tol).value
    split = (integrate_interval(f, -1.0, 0.7, abs_tol=tol).value
             + integrate_interval(f, 0.7, 2.0, abs_tol=tol).value)
    assert abs(whole - split) < 2 * tol


@pytest.mark.parametrize("t", [-3.0, 0.0, 2.0])
def test_breakpoint_robustness(t):
    f = Integrand(lambda u: norm_pdf(u) * (u > t), (t,))
    r = integrate_real_line(f, abs_tol=1e-10)
    assert abs(r.value - (1.0 - ts.cdf(t))) < 1e-10


def test_budget_exhaustion_carries_best_result():
    f = Integrand(lambda u: norm_pdf(u) * np.abs(np.sin(40.0 * u)))
    with pytest.raises(QuadratureConvergenceError) as e:
        integrate_real_line(f, abs_tol=1e-13, max_evals=200)
    best = e.value.result
    assert best.evaluations <= 200
    assert best.error_estimate > 1e-13
    assert math.isfinite(best.value)


def test_invalid_tolerance():
    with pytest.raises(ValueError):
        integrate_real_line(norm_pdf, abs_tol=0.0)


def test_truncation_recorded_in_error():
    r = integrate_real_line(norm_pdf, abs_tol=1e-9)
    assert r.error_estimate >= 1e-17  # includes the tail mass allowance


def test_panel_helpers_match_adaptive():
    val, err = gk15_panel(norm_pdf, -0.5, 0.5)
    ref = ts.cdf(0.5) - ts.cdf(-0.5)
    assert abs(val - ref) < 1e-12
    edges = np.linspace(-3.0, 3.0, 61)
    vals, errs = panel_values(norm_pdf, edges)
    assert abs(float(np.sum(vals)) - (ts.cdf(3.0) - ts.cdf(-3.0))) < 1e-12
    assert np.all(errs >= 0.0)
