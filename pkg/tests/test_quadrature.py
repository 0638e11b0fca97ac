import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relprop.exceptions import (
    AccelerationError,
    ConvergenceError,
    DecayError,
    DomainError,
    PoleSeparationError,
)
from relprop.quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadratureResult,
    integrate_finite,
    integrate_oscillatory_cos,
    integrate_semi_infinite_decaying,
    principal_value,
)
from relprop.specfun import bessel_k1


# ---------------------------------------------------------------- config / result

def test_config_defaults():
    cfg = QuadratureConfig()
    assert (cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions) == (1e-10, 1e-8, 2000)
    assert cfg.tail_cutoff_exponent == 745.0
    assert cfg.tolerance(1e6) == pytest.approx(1e-2)
    assert cfg.tolerance(0.0) == 1e-10


@pytest.mark.parametrize("kwargs", [dict(abs_tol=0.0), dict(rel_tol=-1.0), dict(max_subdivisions=0),
                                    dict(tail_cutoff_exponent=0.0)])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        QuadratureConfig(**kwargs)


def test_config_replace_is_copy():
    cfg = DEFAULT_CONFIG.replace(abs_tol=1e-6)
    assert cfg.abs_tol == 1e-6 and DEFAULT_CONFIG.abs_tol == 1e-10


# ---------------------------------------------------------------- finite

def test_finite_constant_is_exact():
    r = integrate_finite(lambda q: np.ones_like(q), 0.0, 1.0)
    assert isinstance(r, QuadratureResult)
    assert r.value == 1.0
    assert r.converged and r.evaluations == 21


def test_finite_cosine():
    r = integrate_finite(np.cos, 0.0, math.pi / 2)
    assert abs(r.value - 1.0) <= 1e-12


def test_finite_complex_sqrt_against_trapezoid():
    def f(q):
        return np.exp(-1j * np.sqrt(np.clip(1.0 - q * q, 0.0, None)))

    r = integrate_finite(f, 0.0, 1.0)
    # dense trapezoid oracle; the square-root endpoint is resolved by the
    # substitution q = sin(u), which makes the trapezoid integrand smooth
    u = np.linspace(0.0, math.pi / 2, 1_000_001)
    g = np.exp(-1j * np.cos(u)) * np.cos(u)
    h = u[1] - u[0]
    ref = h * (g.sum() - 0.5 * (g[0] + g[-1]))
    assert abs(r.value - ref) <= 1e-8


def test_finite_empty_interval_and_errors():
    assert integrate_finite(np.cos, 2.0, 2.0).value == 0.0
    with pytest.raises(DomainError):
        integrate_finite(np.cos, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate_finite(np.cos, 0.0, math.inf)


def test_finite_budget_exhaustion():
    cfg = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=3)
    with pytest.raises(ConvergenceError) as info:
        integrate_finite(lambda q: 1.0 / np.sqrt(q), 0.0, 1.0, cfg)
    assert info.value.partial is not None
    assert not info.value.partial.converged


# ---------------------------------------------------------------- semi-infinite

def test_semi_infinite_exponential():
    assert abs(integrate_semi_infinite_decaying(lambda q: np.exp(-q), 0.0, 1.0).value - 1.0) <= 1e-10


def test_semi_infinite_laplace_cosine():
    r = integrate_semi_infinite_decaying(lambda q: np.exp(-2 * q) * np.cos(q), 0.0, 2.0)
    assert abs(r.value - 0.4) <= 1e-10


def test_semi_infinite_outer_salpeter_integrand():
    # the rotated-contour integrand outside the cone reduces to the K1
    # representation int_0^inf e^{-y cosh u} cosh u du with y = m sqrt(x^2 - t^2)
    y = math.sqrt(3.0)
    r = integrate_semi_infinite_decaying(lambda u: np.exp(-y * np.cosh(u)) * np.cosh(u), 0.0, 1.0)
    assert r.value == pytest.approx(bessel_k1(y), rel=1e-6)


def test_semi_infinite_decay_error():
    with pytest.raises(DecayError):
        integrate_semi_infinite_decaying(lambda q: np.exp(0.1 * q), 0.0, 1.0)


def test_semi_infinite_rejects_bad_hint():
    with pytest.raises(DomainError):
        integrate_semi_infinite_decaying(lambda q: np.exp(-q), 0.0, 0.0)


# ---------------------------------------------------------------- oscillatory

def test_oscillatory_laplace_cosine():
    r = integrate_oscillatory_cos(lambda p: np.exp(-p), 5.0, 0.0)
    assert abs(r.value - 1.0 / 26.0) <= 1e-9
    assert r.converged


def test_oscillatory_k1_closed_form():
    # int_0^inf e^{-sqrt(1+p^2)} cos(3p) dp = K1(sqrt(10)) / sqrt(10)
    r = integrate_oscillatory_cos(lambda p: np.exp(-np.sqrt(1 + p * p)), 3.0, 0.0)
    ref = bessel_k1(math.sqrt(10.0)) / math.sqrt(10.0)
    assert r.value == pytest.approx(ref, rel=1e-7)


def test_oscillatory_zero_frequency_reduces_to_semi_infinite():
    env = lambda p: np.exp(-1.5 * p) / (1 + p)  # noqa: E731
    a = integrate_oscillatory_cos(env, 0.0, 0.2, decay_rate_hint=1.5)
    b = integrate_semi_infinite_decaying(env, 0.2, 1.5)
    assert abs(a.value - b.value) <= 1e-12


def test_oscillatory_slow_algebraic_envelope():
    # int_0^inf cos(p)/(1+p^2) dp = pi/(2e); the envelope decays only algebraically
    r = integrate_oscillatory_cos(lambda p: 1.0 / (1 + p * p), 1.0, 0.0)
    assert r.value == pytest.approx(math.pi / (2 * math.e), rel=1e-7)


def test_oscillatory_rejects_non_alternating():
    # the envelope itself oscillates at the carrier frequency, so the
    # half-period contributions keep one sign
    with pytest.raises((AccelerationError, ConvergenceError)):
        integrate_oscillatory_cos(lambda p: (1.5 + np.cos(p)) / (1 + p) ** 0.5, 1.0, 0.0,
                                  QuadratureConfig(max_subdivisions=400))


def test_oscillatory_budget():
    with pytest.raises(ConvergenceError):
        integrate_oscillatory_cos(lambda p: 1.0 / np.sqrt(1 + p), 1.0, 0.0,
                                  QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=5))


# ---------------------------------------------------------------- principal value

def test_pv_log2():
    r = principal_value(lambda y: 1.0 / y, [0.0], -1.0, 2.0)
    assert abs(r.value - math.log(2.0)) <= 1e-8


def test_pv_odd_symmetry():
    assert abs(principal_value(lambda y: 1.0 / y, [0.0], -1.0, 1.0).value) <= 1e-10


def test_pv_exponential_matches_series_oracle():
    ref = sum(2.0 / (k * math.factorial(k)) for k in range(1, 40, 2))
    assert ref == pytest.approx(2.1145018, abs=1e-7)
    r = principal_value(lambda y: np.exp(y) / y, [0.0], -1.0, 1.0)
    assert abs(r.value - ref) <= 1e-6


def test_pv_two_poles():
    # PV int_{-2}^{3} dy / ((y-1)(y+1)) = 1/2 [ln|y-1| - ln|y+1|]_{-2}^{3}
    def anti(y):
        return 0.5 * (math.log(abs(y - 1)) - math.log(abs(y + 1)))

    r = principal_value(lambda y: 1.0 / ((y - 1) * (y + 1)), [1.0, -1.0], -2.0, 3.0)
    assert abs(r.value - (anti(3.0) - anti(-2.0))) <= 1e-8


def test_pv_without_poles_is_plain_integral():
    r = principal_value(np.cos, [], 0.0, 1.0)
    assert abs(r.value - math.sin(1.0)) <= 1e-12


@pytest.mark.parametrize("poles,eps0", [([1.0], None), ([-1.0], None), ([2.0], None),
                                        ([0.0, 1e-3], 1e-3), ([0.0], 0.6)])
def test_pv_pole_separation(poles, eps0):
    with pytest.raises(PoleSeparationError):
        principal_value(lambda y: 1.0 / y, poles, -1.0, 1.0, eps0=eps0)


def test_pv_second_order_pole_fails_extrapolation():
    with pytest.raises(ConvergenceError):
        principal_value(lambda y: 1.0 / y ** 2, [0.0], -1.0, 2.0)


# ---------------------------------------------------------------- properties

_BASIS = [np.cos, np.sin, np.exp, lambda q: 1.0 / (1.0 + q * q), lambda q: q ** 3]


@given(i=st.integers(0, 4), j=st.integers(0, 4),
       alpha=st.floats(-5.0, 5.0), beta=st.floats(-5.0, 5.0),
       a=st.floats(-3.0, 0.0), width=st.floats(0.1, 4.0))
@settings(max_examples=60, deadline=None)
def test_linearity(i, j, alpha, beta, a, width):
    f, g = _BASIS[i], _BASIS[j]
    b = a + width
    rf = integrate_finite(f, a, b)
    rg = integrate_finite(g, a, b)
    rs = integrate_finite(lambda q: alpha * f(q) + beta * g(q), a, b)
    bound = rs.error_estimate + abs(alpha) * rf.error_estimate + abs(beta) * rg.error_estimate
    slack = 1e-13 * (abs(alpha * rf.value) + abs(beta * rg.value) + 1.0)
    assert abs(rs.value - (alpha * rf.value + beta * rg.value)) <= bound + slack


def _battery():
    e = math.e
    return [
        ("finite", lambda q: q ** 5, 0.0, 2.0, 64 / 6),
        ("finite", np.exp, 0.0, 1.0, e - 1),
        ("finite", lambda q: 1 / (1 + q * q), 0.0, 1.0, math.pi / 4),
        ("finite", np.sqrt, 0.0, 1.0, 2 / 3),
        ("finite", lambda q: np.log(q), 0.0, 1.0, -1.0),
        ("finite", lambda q: 1 / np.sqrt(q), 0.0, 1.0, 2.0),
        ("finite", lambda q: np.sin(q) ** 2, 0.0, math.pi, math.pi / 2),
        ("finite", lambda q: np.cos(30 * q), 0.0, 1.0, math.sin(30) / 30),
        ("finite", lambda q: np.exp(1j * q), 0.0, 1.0, (np.exp(1j) - 1) / 1j),
        ("finite", lambda q: np.abs(q - 0.3), 0.0, 1.0, 0.045 + 0.245),
        ("finite", lambda q: np.exp(-100 * (q - 0.5) ** 2), 0.0, 1.0,
         math.sqrt(math.pi) / 10 * math.erf(5.0)),
        ("finite", lambda q: q * np.log(q), 0.0, 1.0, -0.25),
        ("semi", lambda q: np.exp(-q), 0.0, 1.0, 1.0),
        ("semi", lambda q: q * np.exp(-q), 0.0, 1.0, 1.0),
        ("semi", lambda q: np.exp(-2 * q) * np.cos(q), 0.0, 2.0, 0.4),
        ("semi", lambda q: np.exp(-q * q), 0.0, 1.0, math.sqrt(math.pi) / 2),
        ("semi", lambda q: np.exp(-q) / np.sqrt(q), 0.0, 1.0, math.sqrt(math.pi)),
        ("osc", lambda p: np.exp(-p), 5.0, 0.0, 1 / 26),
        ("osc", lambda p: 1 / (1 + p * p), 1.0, 0.0, math.pi / (2 * e)),
        ("osc", lambda p: np.exp(-p * p), 2.0, 0.0, math.sqrt(math.pi) / 2 * math.exp(-1.0)),
    ]


def test_error_honesty_battery():
    honest = 0
    cases = _battery()
    assert len(cases) == 20
    for kind, f, p1, p2, exact in cases:
        if kind == "finite":
            r = integrate_finite(f, p1, p2)
        elif kind == "semi":
            r = integrate_semi_infinite_decaying(f, p1, p2)
        else:
            r = integrate_oscillatory_cos(f, p1, p2)
        # an estimate of zero is honest only if the result is exact to rounding
        bound = 10 * r.error_estimate + 4 * np.finfo(float).eps * max(abs(exact), 1.0)
        if abs(r.value - exact) <= bound:
            honest += 1
    assert honest >= 19


def test_converged_results_respect_tolerance():
    for kind, f, p1, p2, _ in _battery():
        if kind == "finite":
            r = integrate_finite(f, p1, p2)
        elif kind == "semi":
            r = integrate_semi_infinite_decaying(f, p1, p2)
        else:
            r = integrate_oscillatory_cos(f, p1, p2)
        assert r.error_estimate >= 0
        if r.converged and kind == "finite":
            assert r.error_estimate <= DEFAULT_CONFIG.tolerance(r.value)


@given(c=st.floats(0.1, 3.0), eps0=st.floats(1e-6, 1e-2))
@settings(max_examples=40, deadline=None)
def test_pv_symmetric_even_part_is_epsilon_independent(c, eps0):
    # f = even(y) + 1/y about the pole at 0: the odd pole part cancels in
    # the symmetric excision, so the PV equals the integral of the even part
    def f(y):
        return np.cos(c * y) + 1.0 / y

    r = principal_value(f, [0.0], -1.0, 1.0, eps0=eps0)
    assert abs(r.value - 2 * math.sin(c) / c) <= 1e-8


def test_pv_oracle_mpmath():
    ref = float(mpmath.quad(lambda y: (mpmath.exp(y) - mpmath.exp(-y)) / y, [0, 1]))
    r = principal_value(lambda y: np.exp(y) / y, [0.0], -1.0, 1.0)
    assert abs(r.value - ref) <= 1e-8
