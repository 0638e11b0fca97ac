r"""Bäumer (relativistic diffusion) propagator and its diffusion statistics.

The kernel of :math:`\partial_t\phi = -(\sqrt{m^2-\partial_x^2}-m)\phi`,

.. math::
    G(x, t) = \frac{e^{mt}}{\pi}\int_0^\infty e^{-\sqrt{m^2+p^2}\,t}\cos(px)\,dp
            = \frac{mt\,e^{mt}}{\pi r}K_1(mr),\qquad r = \sqrt{x^2+t^2},

is a probability density that is Cauchy-like for :math:`mt \ll 1` and
Gaussian, :math:`\sqrt{m/(2\pi t)}e^{-mx^2/(2t)}`, for :math:`mt \gg 1`.  Its
second moment is exactly :math:`t/m` at all times (normal diffusion), while the
peak decays like :math:`t^{-1}` and then :math:`t^{-1/2}`.

Notes
-----
The closed form is positive and carries :math:`e^{+mt}`; a variant with
:math:`-e^{-mt}` is neither positive nor normalizable.  The overall sign of the
outer integral representation is not taken on trust either: it is calibrated
once against the inner representation (see :func:`outer_sign`).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .exceptions import DomainError, SignCalibrationError
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    integrate_finite,
    integrate_oscillatory_cos,
    integrate_semi_infinite_decaying,
)
from .salpeter import _unpack
from .specfun import bessel_k1_scaled

__all__ = [
    "DiffusionSummary",
    "baeumer_closed",
    "baeumer_log_closed",
    "tail_rate",
    "baeumer_cauchy_limit",
    "baeumer_gaussian_limit",
    "baeumer_integral_inner",
    "baeumer_integral_outer",
    "outer_sign",
    "OUTER_CALIBRATION_POINT",
    "second_moment",
    "diffusion_scan",
]

#: (x, t, m) at which the sign of the outer representation is calibrated.
OUTER_CALIBRATION_POINT = (2.0, 0.5, 1.0)


# below this m*r the mass corrections (relative size ~ m r) vanish in double precision
_TINY_ARGUMENT = 1e-150


def _result(out):
    return float(out) if np.ndim(out) == 0 else out


def baeumer_closed(x, t: Optional[float] = None, m: Optional[float] = None):
    r"""Closed-form Bäumer propagator :math:`\frac{mt\,e^{mt}}{\pi r}K_1(mr)`.

    The exponential factors are combined as
    :math:`e^{mt - mr} = e^{-mx^2/(t+r)}` and applied to the scaled
    :math:`e^{mr}K_1(mr)`, so neither overflow nor cancellation occurs.
    ``m = 0`` gives the Cauchy density :math:`t/(\pi(t^2+x^2))`.

    Parameters
    ----------
    x : float, array_like or PropagatorQuery
    t : float
        ``t > 0``.
    m : float
        ``m >= 0``.

    Returns
    -------
    float or ndarray
        Strictly positive (until it underflows far in the tail).
    """
    x, t, m = _unpack(x, t, m)
    ax = np.abs(np.asarray(x, dtype=float))
    r = np.hypot(ax, t)
    # Cauchy form t/(pi r^2), divided twice so r^2 cannot overflow
    cauchy = t / (np.pi * r) / r
    if m == 0.0:
        return _result(cauchy)
    tiny = m * r < _TINY_ARGUMENT
    # the Cauchy form is exact to double precision there, where m r K_1(m r) = 1
    out = cauchy
    if not np.all(tiny):
        rs = np.where(tiny, 1.0, r)
        with np.errstate(under="ignore"):
            decay = np.exp(-m * ax * (ax / (t + rs)))
        out = np.where(tiny, out, m * t / (np.pi * rs) * bessel_k1_scaled(m * rs) * decay)
    return _result(out)


def baeumer_log_closed(x, t: Optional[float] = None, m: Optional[float] = None):
    r"""Natural logarithm of :func:`baeumer_closed`, finite far into the tail.

    :math:`\ln\frac{mt}{\pi r} + \ln[e^{mr}K_1(mr)] - \frac{mx^2}{t+r}`, which
    stays representable where the density itself underflows.
    """
    x, t, m = _unpack(x, t, m)
    ax = np.abs(np.asarray(x, dtype=float))
    r = np.hypot(ax, t)
    cauchy = np.log(t / np.pi) - 2.0 * np.log(r)
    if m == 0.0:
        return _result(cauchy)
    tiny = m * r < _TINY_ARGUMENT
    out = cauchy
    if not np.all(tiny):
        rs = np.where(tiny, 1.0, r)
        full = np.log(m * t / (np.pi * rs)) + np.log(bessel_k1_scaled(m * rs)) - m * ax * (ax / (t + rs))
        out = np.where(tiny, out, full)
    return _result(out)


def tail_rate(t: float, m: float, n_points: int = 201) -> float:
    """Least-squares slope of ``ln G`` against ``x`` over ``[10t + 10/m, 10t + 30/m]``.

    Approaches ``-m`` as ``mt`` grows; the algebraic prefactor biases it by
    roughly ``1.5/x`` at finite distance.
    """
    if not (t > 0 and m > 0):
        raise DomainError("tail_rate requires t > 0 and m > 0")
    xs = np.linspace(10.0 * t + 10.0 / m, 10.0 * t + 30.0 / m, int(n_points))
    return float(np.polyfit(xs, baeumer_log_closed(xs, t, m), 1)[0])


def baeumer_cauchy_limit(x, t: Optional[float] = None, m: Optional[float] = None):
    r"""Short-time (Cauchy) limit :math:`t/(\pi(t^2+x^2))`."""
    x, t, m = _unpack(x, t, 0.0 if m is None else m)
    ax = np.asarray(x, dtype=float)
    return _result(t / (np.pi * (t * t + ax * ax)))


def baeumer_gaussian_limit(x, t: Optional[float] = None, m: Optional[float] = None):
    r"""Long-time (Gaussian) limit :math:`\sqrt{m/(2\pi t)}\,e^{-mx^2/(2t)}`.

    Raises
    ------
    DomainError
        If ``m == 0``.
    """
    x, t, m = _unpack(x, t, m)
    if m == 0.0:
        raise DomainError("the Gaussian limit requires m > 0")
    ax = np.asarray(x, dtype=float)
    return _result(math.sqrt(m / (2.0 * math.pi * t)) * np.exp(-0.5 * m * ax * ax / t))


def _relative_cfg(cfg):
    # the density spans dozens of decades; only relative accuracy is meaningful
    return cfg.replace(abs_tol=1e-300)


def baeumer_integral_inner(x, t: Optional[float] = None, m: Optional[float] = None,
                           cfg: Optional[QuadratureConfig] = None, *, with_error: bool = False):
    r"""Inner integral representation evaluated by oscillatory quadrature.

    The envelope :math:`e^{-(\sqrt{m^2+p^2}-m)t} = e^{-tp^2/(\sqrt{m^2+p^2}+m)}`
    already contains the :math:`e^{mt}` prefactor, so large :math:`mt` neither
    overflows nor cancels.  Deep in the tail the value is many decades below
    the individual half-period contributions; the quadrature then repeats the
    sum in multiprecision arithmetic.  Only ``cfg.rel_tol`` is used.  With
    ``with_error=True`` the tuple ``(value, error_estimate, converged)`` is
    returned.
    """
    x, t, m = _unpack(x, t, m)
    cfg = _relative_cfg(cfg or DEFAULT_CONFIG)
    ax = abs(float(x))

    def envelope(p):
        return np.exp(-t * p * p / (np.sqrt(m * m + p * p) + m)) if m > 0 else np.exp(-t * p)

    def mp_envelope(p):
        import mpmath

        if m > 0:
            return mpmath.exp(-t * p * p / (mpmath.sqrt(m * m + p * p) + m))
        return mpmath.exp(-t * p)

    res = integrate_oscillatory_cos(envelope, ax, 0.0, cfg, decay_rate_hint=t,
                                    mp_envelope=mp_envelope)
    value = float(np.real(res.value)) / math.pi
    if with_error:
        return value, res.error_estimate / math.pi, res.converged
    return value


def _outer_raw(ax, t, m, cfg, with_error=False):
    """(1/pi) e^{mt} int_m^inf sin(sqrt(q^2-m^2) t) e^{-qx} dq, with q = m + s^2."""

    def integrand(s):
        q2 = s * s
        return 2.0 * s * np.sin(s * np.sqrt(2.0 * m + q2) * t) * np.exp(-q2 * ax)

    res = integrate_semi_infinite_decaying(integrand, 0.0, math.sqrt(ax), cfg)
    scale = math.exp(m * (t - ax)) / math.pi
    if with_error:
        return float(np.real(res.value)) * scale, res.error_estimate * scale, res.converged
    return float(np.real(res.value)) * scale


@functools.lru_cache(maxsize=1)
def outer_sign() -> int:
    """Overall sign of the outer representation, calibrated against the inner one.

    Evaluated once (and cached) at :data:`OUTER_CALIBRATION_POINT`.

    Raises
    ------
    SignCalibrationError
        If the magnitudes of the two representations differ by more than 1%.
    """
    x, t, m = OUTER_CALIBRATION_POINT
    inner = baeumer_integral_inner(x, t, m)
    raw = _outer_raw(x, t, m, _relative_cfg(DEFAULT_CONFIG))
    if abs(abs(raw) - abs(inner)) > 0.01 * abs(inner):
        raise SignCalibrationError(
            f"outer and inner representations disagree in magnitude: {raw!r} vs {inner!r}")
    return 1 if raw * inner > 0 else -1


def baeumer_integral_outer(x, t: Optional[float] = None, m: Optional[float] = None,
                           cfg: Optional[QuadratureConfig] = None, *, with_error: bool = False):
    r"""Outer integral representation :math:`\sigma\frac{e^{mt}}{\pi}\int_m^\infty \sin(\sqrt{q^2-m^2}t)e^{-qx}dq`.

    :math:`\sigma` is :func:`outer_sign`.  The substitution :math:`q = m+s^2`
    removes the square-root endpoint behaviour.  The integrand oscillates
    about :math:`t/x` times before it decays, so the representation is
    intended for :math:`x \gtrsim t`.  With ``with_error=True`` the tuple
    ``(value, error_estimate, converged)`` is returned.

    Raises
    ------
    DomainError
        If ``x == 0``.
    """
    x, t, m = _unpack(x, t, m)
    ax = abs(float(x))
    if ax == 0.0:
        raise DomainError("the outer representation requires x != 0")
    cfg = _relative_cfg(cfg or DEFAULT_CONFIG)
    sign = outer_sign()
    if with_error:
        value, err, ok = _outer_raw(ax, t, m, cfg, True)
        return sign * value, err, ok
    return sign * _outer_raw(ax, t, m, cfg)


def _moment_breakpoints(t, m, upper):
    points = {0.0, upper}
    scale = t / 16.0
    while scale < upper:
        points.add(scale)
        scale *= 4.0
    for k in (1, 2, 4, 8, 16, 32):
        if k / m < upper:
            points.add(k / m)
    return sorted(points)


def second_moment(t: float, m: float, cfg: Optional[QuadratureConfig] = None) -> float:
    r"""Second moment :math:`\langle x^2\rangle = \int x^2 G(x,t)\,dx`.

    Integrates the closed form over :math:`[0, t + 40/m]` (doubled by
    evenness) with breakpoints on the Cauchy scale ``t`` and the exponential
    scale ``1/m``.  The exact value is ``t/m``.
    """
    if not (t > 0 and m > 0):
        raise DomainError("second_moment requires t > 0 and m > 0")
    cfg = _relative_cfg(cfg or DEFAULT_CONFIG)
    upper = t + 40.0 / m
    pts = _moment_breakpoints(t, m, upper)

    def integrand(x):
        return x * x * baeumer_closed(x, t, m)

    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += integrate_finite(integrand, lo, hi, cfg).value
    return 2.0 * float(np.real(total))


@dataclass(frozen=True)
class DiffusionSummary:
    """Peak values and second moments on a log-spaced time grid."""

    times: List[float]
    peak_values: List[float]
    second_moments: List[float]
    peak_slopes: List[float]
    moment_slopes: List[float]


def _centered_log_slopes(times, values):
    lt = np.log(times)
    lv = np.log(values)
    return [float((lv[i + 1] - lv[i - 1]) / (lt[i + 1] - lt[i - 1])) for i in range(1, len(times) - 1)]


def log_time_grid(t_min: float, t_max: float, points_per_decade: int) -> np.ndarray:
    """Log-spaced times from ``t_min`` to ``t_max`` inclusive."""
    if not (t_min > 0 and t_max >= t_min):
        raise DomainError("need 0 < t_min <= t_max")
    if t_max == t_min:
        return np.array([float(t_min)])
    decades = math.log10(t_max / t_min)
    count = max(2, int(round(decades * points_per_decade)) + 1)
    return np.logspace(math.log10(t_min), math.log10(t_max), count)


def diffusion_scan(t_min: float, t_max: float, points_per_decade: int, m: float,
                   cfg: Optional[QuadratureConfig] = None) -> DiffusionSummary:
    """Peak value :math:`G(0,t)`, second moment and their log-log slopes.

    Slopes are centered differences of ``ln(value)`` against ``ln(t)`` and are
    therefore two shorter than the time grid (empty for fewer than three
    times).
    """
    if points_per_decade < 4:
        raise DomainError("points_per_decade must be at least 4")
    if not m > 0:
        raise DomainError("diffusion_scan requires m > 0")
    times = log_time_grid(t_min, t_max, points_per_decade)
    peaks = [float(baeumer_closed(0.0, float(t), m)) for t in times]
    moments = [second_moment(float(t), m, cfg) for t in times]
    return DiffusionSummary(
        times=[float(t) for t in times],
        peak_values=peaks,
        second_moments=moments,
        peak_slopes=_centered_log_slopes(times, peaks),
        moment_slopes=_centered_log_slopes(times, moments),
    )
