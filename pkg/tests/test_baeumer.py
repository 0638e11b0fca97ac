import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relprop.baeumer import (
    OUTER_CALIBRATION_POINT,
    DiffusionSummary,
    baeumer_cauchy_limit,
    baeumer_closed,
    baeumer_gaussian_limit,
    baeumer_integral_inner,
    baeumer_integral_outer,
    baeumer_log_closed,
    diffusion_scan,
    log_time_grid,
    outer_sign,
    second_moment,
    tail_rate,
)
from relprop.exceptions import DomainError
from relprop.quadrature import QuadratureConfig, integrate_finite
from relprop.salpeter import PropagatorQuery
from relprop.specfun import bessel_k1
from relprop.verify import wick_factor


def _mp_closed(x, t, m):
    with mpmath.workdps(30):
        r = mpmath.sqrt(mpmath.mpf(x) ** 2 + mpmath.mpf(t) ** 2)
        return float(m * t * mpmath.exp(m * t) / (mpmath.pi * r) * mpmath.besselk(1, m * r))


# ---------------------------------------------------------------- closed form

def test_closed_massless_peak():
    assert baeumer_closed(0.0, 1.0, 0.0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert abs(baeumer_closed(0.0, 1.0, 0.0) - 0.3183099) < 1e-7


def test_closed_cauchy_peak_regime():
    assert baeumer_closed(0.0, 0.001, 1.0) == pytest.approx(1 / (math.pi * 0.001), rel=2e-3)


def test_closed_gaussian_peak_regime():
    assert baeumer_closed(0.0, 1000.0, 1.0) == pytest.approx(math.sqrt(1 / (2 * math.pi * 1000)), rel=1e-3)


@pytest.mark.parametrize("x,t,m", [(0.0, 1.0, 1.0), (3.0, 0.2, 2.0), (40.0, 5.0, 0.5), (1e3, 1e3, 1.0)])
def test_closed_matches_mpmath(x, t, m):
    assert baeumer_closed(x, t, m) == pytest.approx(_mp_closed(x, t, m), rel=1e-12)


def test_closed_accepts_query_and_arrays():
    assert baeumer_closed(PropagatorQuery(-1.0, 1.0, 1.0)) == baeumer_closed(1.0, 1.0, 1.0)
    xs = np.linspace(-3, 3, 7)
    vals = baeumer_closed(xs, 1.0, 1.0)
    assert vals.shape == xs.shape
    assert np.allclose(vals, vals[::-1], rtol=0, atol=0)


def test_closed_domain():
    with pytest.raises(DomainError):
        baeumer_closed(0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        baeumer_closed(0.0, 1.0, -1.0)


def test_log_closed_survives_underflow():
    t, m = 1.0, 1.0
    assert baeumer_log_closed(5.0, t, m) == pytest.approx(math.log(baeumer_closed(5.0, t, m)), rel=1e-13)
    deep = baeumer_log_closed(2000.0, t, m)
    assert math.isfinite(deep) and deep < -1900
    assert baeumer_log_closed(3.0, 1.0, 0.0) == pytest.approx(math.log(1 / (10 * math.pi)))


@given(x=st.floats(-1e3, 1e3), t=st.floats(1e-3, 1e3), m=st.floats(0.0, 10.0))
@settings(max_examples=200, deadline=None)
def test_positivity(x, t, m):
    if m * (math.hypot(x, t) - t) > 600:  # below the double-precision range
        return
    g = baeumer_closed(x, t, m)
    assert math.isfinite(g) and g > 0


@pytest.mark.parametrize("m", [5e-324, 1e-310, 1e-200])
def test_closed_tiny_mass_is_cauchy(m):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert baeumer_closed(1.0, 1.0, m) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
        assert baeumer_log_closed(1.0, 1.0, m) == pytest.approx(-math.log(2 * math.pi), rel=1e-15)


def test_closed_extreme_distances():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        vals = baeumer_closed(np.array([0.0, 5.0, 1e200]), 1e-170, 1.0)
        assert vals[0] == pytest.approx(1 / (math.pi * 1e-170), rel=1e-12)
        assert vals[1] == pytest.approx(_mp_closed(5.0, 1e-170, 1.0), rel=1e-12)
        assert vals[2] == 0.0
        assert baeumer_closed(1e200, 1.0, 0.0) == 0.0
        assert baeumer_log_closed(1e200, 1.0, 1.0) == pytest.approx(-1e200)


# ---------------------------------------------------------------- integral forms

def test_inner_matches_closed_at_origin():
    assert baeumer_integral_inner(0.0, 1.0, 1.0) == pytest.approx(baeumer_closed(0.0, 1.0, 1.0), rel=1e-8)


def test_inner_massless_example():
    assert baeumer_integral_inner(3.0, 1.0, 0.0) == pytest.approx(1 / (10 * math.pi), rel=1e-9)
    assert abs(baeumer_integral_inner(3.0, 1.0, 0.0) - 0.0318310) < 1e-7


def test_inner_deep_tail():
    assert baeumer_integral_inner(50.0, 1.0, 1.0) == pytest.approx(baeumer_closed(50.0, 1.0, 1.0), rel=1e-6)


def test_inner_error_estimate_is_honest():
    for x in (0.5, 4.0, 20.0):
        value, err, ok = baeumer_integral_inner(x, 1.0, 1.0, with_error=True)
        assert ok
        assert abs(value - baeumer_closed(x, 1.0, 1.0)) <= max(10 * err, 1e-15 * abs(value))


def test_outer_sign_calibration():
    x, t, m = OUTER_CALIBRATION_POINT
    assert outer_sign() == 1
    outer = baeumer_integral_outer(x, t, m)
    inner = baeumer_integral_inner(x, t, m)
    assert abs(outer) == pytest.approx(abs(inner), rel=1e-6)


def test_outer_massless_reduction():
    assert baeumer_integral_outer(2.0, 1.0, 0.0) == pytest.approx(1 / (5 * math.pi), rel=1e-8)


@pytest.mark.parametrize("x,t,m", [(1.0, 1.0, 1.0), (3.0, 0.5, 2.0), (10.0, 2.0, 0.5)])
def test_outer_matches_closed(x, t, m):
    assert baeumer_integral_outer(x, t, m) == pytest.approx(baeumer_closed(x, t, m), rel=1e-7)


def test_outer_requires_nonzero_x():
    with pytest.raises(DomainError):
        baeumer_integral_outer(0.0, 1.0, 1.0)


def test_outer_tail_log_slope():
    # far-tail log-slope of the outer representation tends to -m; the
    # algebraic prefactor biases it by about 1.5/x at finite x
    xs = (150.0, 200.0)
    logs = [math.log(baeumer_integral_outer(x, 1.0, 1.0)) for x in xs]
    slope = (logs[1] - logs[0]) / (xs[1] - xs[0])
    assert slope == pytest.approx(-1.0, rel=0.02)


# ---------------------------------------------------------------- limits

def test_gaussian_limit_examples():
    assert baeumer_gaussian_limit(0.0, 1 / (2 * math.pi), 1.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DomainError):
        baeumer_gaussian_limit(0.0, 1.0, 0.0)
    total = integrate_finite(lambda x: baeumer_gaussian_limit(x, 3.0, 2.0), -40.0, 40.0).value
    assert total == pytest.approx(1.0, abs=1e-12)


def _sup_deviation(limit, t, m, half_width):
    xs = np.linspace(-half_width, half_width, 20001)
    g = baeumer_closed(xs, t, m)
    return float(np.max(np.abs(g - limit(xs, t, m)))) / float(baeumer_closed(0.0, t, m))


def test_cauchy_limit_short_times():
    t = 1e-3
    assert _sup_deviation(baeumer_cauchy_limit, t, 1.0, 50 * t) <= 0.01


def test_gaussian_limit_long_times():
    t = 100.0
    assert _sup_deviation(baeumer_gaussian_limit, t, 1.0, 8 * math.sqrt(t)) <= 0.01


def test_cauchy_limit_ignores_mass():
    assert baeumer_cauchy_limit(1.0, 2.0) == baeumer_cauchy_limit(1.0, 2.0, 5.0)


def test_tail_rate():
    # the finite-window bias is about 1.5/x; it has dropped below 2% at mt = 10
    assert tail_rate(10.0, 1.0) == pytest.approx(-1.0, rel=0.02)
    assert tail_rate(100.0, 1.0) == pytest.approx(-1.0, rel=0.02)
    with pytest.raises(DomainError):
        tail_rate(1.0, 0.0)


# ---------------------------------------------------------------- moments

def _integrate_density(weight, t, m):
    upper = t + 40.0 / m
    pts = sorted({0.0, upper, *[k for k in (t / 16, t / 4, t, 4 * t, 16 * t, 1 / m, 4 / m, 16 / m)
                                if k < upper]})
    cfg = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-12)
    return 2 * sum(integrate_finite(lambda x: weight(x) * baeumer_closed(x, t, m), a, b, cfg).value
                   for a, b in zip(pts[:-1], pts[1:]))


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.01, 1.0, 100.0])
def test_normalization(m, t):
    assert _integrate_density(np.ones_like, t, m) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("t,m,expected", [(1.0, 1.0, 1.0), (5.0, 2.0, 2.5)])
def test_second_moment_examples(t, m, expected):
    assert second_moment(t, m) == pytest.approx(expected, abs=1e-4)


@given(mt=st.floats(0.05, 20.0), m=st.sampled_from([0.5, 1.0, 4.0]))
@settings(max_examples=15, deadline=None)
def test_second_moment_scaling(mt, m):
    # <x^2> = m^{-2} f(mt) with f(u) = u
    assert second_moment(mt / m, m) * m * m == pytest.approx(second_moment(mt, 1.0), rel=1e-6)


def test_second_moment_domain():
    with pytest.raises(DomainError):
        second_moment(1.0, 0.0)


def test_diffusion_scan_slopes():
    s = diffusion_scan(1e-3, 1e3, 4, 1.0)
    assert isinstance(s, DiffusionSummary)
    assert len(s.times) == 25
    assert len(s.peak_slopes) == len(s.moment_slopes) == 23
    assert all(v > 0 for v in s.peak_values + s.second_moments)
    # centered slopes at the second and second-to-last grid points
    assert s.peak_slopes[0] == pytest.approx(-1.0, abs=0.05)
    assert s.peak_slopes[-1] == pytest.approx(-0.5, abs=0.05)
    assert all(abs(v - 1.0) <= 0.02 for v in s.moment_slopes)


def test_diffusion_scan_validation():
    with pytest.raises(DomainError):
        diffusion_scan(1.0, 10.0, 3, 1.0)
    with pytest.raises(DomainError):
        diffusion_scan(1.0, 10.0, 4, 0.0)
    assert list(log_time_grid(2.0, 2.0, 4)) == [2.0]


# ---------------------------------------------------------------- Wick bridge

@given(x=st.floats(0.0, 20.0), tau=st.floats(0.01, 10.0), m=st.floats(0.01, 5.0))
@settings(max_examples=100, deadline=None)
def test_wick_bridge(x, tau, m):
    # -e^{2 m tau} G_S(x, i tau) written with the K1 form of the Salpeter propagator
    r = math.hypot(x, tau)
    if m * r > 600:
        return
    salpeter_imag = 1j * m * (1j * tau) * math.exp(-m * tau) * bessel_k1(m * r) / (math.pi * r)
    bridged = wick_factor(tau, m) * salpeter_imag
    ref = baeumer_closed(x, tau, m)
    assert abs(bridged - ref) <= 1e-12 * ref
