r"""Salpeter propagator :math:`G(x, t; m)` in 1+1 dimensions (units :math:`\hbar = c = 1`).

The propagator of :math:`i\partial_t\psi = (\sqrt{m^2 - \partial_x^2} - m)\psi`,

.. math::
    G(x, t) = \frac{e^{imt}}{\pi}\int_0^\infty e^{-i\sqrt{m^2+p^2}\,t}\cos(px)\,dp,

is available through several independent routes:

* :func:`salpeter_closed` -- Bessel closed forms,
  :math:`\frac{imt\,e^{imt}}{\pi s}K_1(ms)` with :math:`s = \sqrt{x^2-t^2}`
  outside the light cone and
  :math:`-\frac{mt\,e^{imt}}{2s}H^{(2)}_1(ms)` with :math:`s=\sqrt{t^2-x^2}`
  inside, where :math:`H^{(2)}_1 = \overline{H^{(1)}_1}` for real arguments;
  :math:`m = 0` gives :math:`it/(\pi(x^2-t^2))`.
* :func:`salpeter_integral_inner` / :func:`salpeter_integral_outer` --
  contour-rotated integral representations valid inside/outside the cone.
* :func:`salpeter_classical` -- non-relativistic (Gaussian) limit.
* :func:`singular_asymptote` -- the two leading terms at the light cone.

Every function is even in ``x``; arguments are reduced to ``|x|`` on entry.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DomainError, LightConeSingularity
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    integrate_finite,
    integrate_semi_infinite_decaying,
)
from .specfun import bessel_k1_minus_pole, bessel_k1_scaled, hankel1_minus_pole, hankel1_order1

__all__ = [
    "CONE_EXCLUSION",
    "PropagatorQuery",
    "PropagatorSample",
    "salpeter_closed",
    "salpeter_massless",
    "salpeter_regular_part",
    "salpeter_integral_inner",
    "salpeter_integral_outer",
    "salpeter_classical",
    "singular_asymptote",
    "HANKEL_CONVENTION",
]

#: Relative half-width of the band around ``|x| = t`` treated as singular.
CONE_EXCLUSION = 1e-12

#: Which Hankel function represents the propagator inside the light cone.
#: The printed formulas are ambiguous about the sign of the argument; the inner
#: integral representation selects :math:`H^{(2)}_1(+ms)`, which is the
#: analytic continuation of :math:`H^{(1)}_1` to the negative argument
#: :math:`-ms` (see ``verify.hankel_convention_check``).
HANKEL_CONVENTION = "H2(+m*s) == H1(-m*s) continued through the upper half plane"


@dataclass(frozen=True)
class PropagatorQuery:
    """Point at which a propagator is evaluated; ``x`` is stored as ``|x|``."""

    x: float
    t: float
    m: float

    def __post_init__(self):
        for name in ("x", "t", "m"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.t > 0:
            raise DomainError("t must be positive")
        if self.m < 0:
            raise DomainError("m must be non-negative")
        object.__setattr__(self, "x", abs(float(self.x)))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "m", float(self.m))

    def as_tuple(self):
        return self.x, self.t, self.m


@dataclass(frozen=True)
class PropagatorSample:
    """One evaluated propagator value together with its provenance."""

    query: PropagatorQuery
    model: str
    method: str
    value: complex
    error_estimate: float = 0.0

    def __post_init__(self):
        if self.model not in ("salpeter", "baeumer"):
            raise DomainError(f"unknown model {self.model!r}")
        if self.method not in ("closed", "integral", "series", "classical", "massless"):
            raise DomainError(f"unknown method {self.method!r}")
        if self.method == "massless" and self.query.m != 0:
            raise DomainError("the massless method requires m = 0")
        if self.model == "baeumer" and complex(self.value).imag != 0:
            raise DomainError("Baeumer values are real")


def _unpack(q, t, m):
    if isinstance(q, PropagatorQuery):
        return q.x, q.t, q.m
    if t is None or m is None:
        raise TypeError("pass a PropagatorQuery or explicit (x, t, m)")
    if not (t > 0 and math.isfinite(t)):
        raise DomainError("t must be positive and finite")
    if not (m >= 0 and math.isfinite(m)):
        raise DomainError("m must be non-negative and finite")
    return q, float(t), float(m)


def _check_cone(ax, t):
    near = np.abs(ax - t) <= CONE_EXCLUSION * t
    if np.any(near):
        raise LightConeSingularity("propagator evaluated on the light cone |x| = t")


def _result(out):
    return complex(out) if np.ndim(out) == 0 else out


def salpeter_massless(x, t: Optional[float] = None, m: Optional[float] = None):
    r"""Massless propagator :math:`it/(\pi(x^2 - t^2))` (principal-value part).

    Accepts array ``x``; ``m`` is ignored apart from validation.
    """
    x, t, _ = _unpack(x, t, 0.0 if m is None else m)
    ax = np.abs(np.asarray(x, dtype=float))
    _check_cone(ax, t)
    return _result(1j * t / (np.pi * (ax - t) * (ax + t)))


def salpeter_closed(x, t: Optional[float] = None, m: Optional[float] = None):
    r"""Closed-form Salpeter propagator.

    Parameters
    ----------
    x : float, array_like or PropagatorQuery
        Position(s); a :class:`PropagatorQuery` supplies ``t`` and ``m`` too.
    t : float
        Time, ``t > 0``.
    m : float
        Mass, ``m >= 0``.

    Returns
    -------
    complex or ndarray of complex

    Raises
    ------
    LightConeSingularity
        If any ``| |x| - t | <= 1e-12 t``.

    Examples
    --------
    >>> salpeter_closed(2.0, 1.0, 0.0)  # i/(3 pi)
    0.10610329539459689j
    """
    x, t, m = _unpack(x, t, m)
    ax = np.abs(np.asarray(x, dtype=float))
    _check_cone(ax, t)
    if m == 0.0:
        return _result(1j * t / (np.pi * (ax - t) * (ax + t)))
    phase = cmath.exp(1j * m * t)
    out = np.empty(ax.shape, dtype=complex)
    tiny = _tiny_argument(ax, t, m)
    if tiny.any():
        out[tiny] = phase * 1j * t / (np.pi * (ax[tiny] - t) * (ax[tiny] + t))
    outside = (ax > t) & ~tiny
    if outside.any():
        s = np.sqrt((ax[outside] - t) * (ax[outside] + t))
        y = m * s
        with np.errstate(under="ignore"):
            k1 = bessel_k1_scaled(y) * np.exp(-y)
        out[outside] = 1j * m * t * phase * k1 / (np.pi * s)
    inside = (ax < t) & ~tiny
    if inside.any():
        s = np.sqrt((t - ax[inside]) * (t + ax[inside]))
        h2 = np.conj(hankel1_order1(m * s))
        out[inside] = -(m * t * phase / (2.0 * s)) * h2
    return _result(out)


#: Below this value of ``m * sqrt|x^2 - t^2|`` the Bessel factors equal their
#: pole terms to double precision (corrections are O(y^2 ln y)).
_TINY_ARGUMENT = 1e-150


def _tiny_argument(ax, t, m):
    return m * np.sqrt(np.abs((ax - t) * (ax + t))) < _TINY_ARGUMENT


def salpeter_regular_part(x, t: Optional[float] = None, m: Optional[float] = None):
    r"""Propagator with the light-cone pole removed, :math:`G - e^{imt}G_{m=0}`.

    The remainder only has a logarithmic singularity at :math:`|x| = t`; it is
    computed from the pole-free Bessel parts so no cancellation occurs near the
    cone.  Returns zeros for ``m = 0``.
    """
    x, t, m = _unpack(x, t, m)
    ax = np.abs(np.asarray(x, dtype=float))
    _check_cone(ax, t)
    out = np.zeros(ax.shape, dtype=complex)
    if m == 0.0:
        return _result(out)
    phase = cmath.exp(1j * m * t)
    tiny = _tiny_argument(ax, t, m)
    outside = (ax > t) & ~tiny
    if outside.any():
        s = np.sqrt((ax[outside] - t) * (ax[outside] + t))
        out[outside] = 1j * m * t * phase * bessel_k1_minus_pole(m * s) / (np.pi * s)
    inside = (ax < t) & ~tiny
    if inside.any():
        s = np.sqrt((t - ax[inside]) * (t + ax[inside]))
        # H2 = conj(H1); its pole is +2i/(pi y)
        h2_reg = np.conj(hankel1_minus_pole(m * s))
        out[inside] = -(m * t * phase / (2.0 * s)) * h2_reg
    return _result(out)


def salpeter_integral_inner(x, t: Optional[float] = None, m: Optional[float] = None,
                            cfg: Optional[QuadratureConfig] = None, *, with_error: bool = False):
    r"""Inner-cone integral representation (``|x| < t``).

    .. math::
        G = \frac{e^{imt}}{i\pi}\Big[\int_0^m e^{-i\sqrt{m^2-q^2}\,t}\cosh(qx)\,dq
            + \int_m^\infty e^{-\sqrt{q^2-m^2}\,t}\cosh(qx)\,dq\Big]

    The first piece is integrated in :math:`q = m\sin\theta` and the second in
    :math:`q = m + s^2`, which removes the square-root endpoint behaviour;
    :math:`\cosh` is assembled from exponentials of summed exponents.
    With ``with_error=True`` the tuple ``(value, error_estimate, converged)``
    is returned.

    Raises
    ------
    DomainError
        If ``|x| >= t``.
    """
    x, t, m = _unpack(x, t, m)
    cfg = cfg or DEFAULT_CONFIG
    ax = abs(float(x))
    if not ax < t:
        raise DomainError("the inner representation requires |x| < t")

    finite = 0.0
    finite_err = 0.0
    if m > 0.0:
        def oscillating(theta):
            c = np.cos(theta)
            return m * c * np.exp(-1j * m * t * c) * np.cosh(m * ax * np.sin(theta))
        res = integrate_finite(oscillating, 0.0, 0.5 * math.pi, cfg)
        finite, finite_err = res.value, res.error_estimate

    def decaying(s):
        q = m + s * s
        base = -s * np.sqrt(2.0 * m + s * s) * t
        return s * (np.exp(base + q * ax) + np.exp(base - q * ax))

    hint = math.sqrt(t - ax) + math.sqrt(2.0 * m) * t
    tail = integrate_semi_infinite_decaying(decaying, 0.0, hint, cfg)
    value = cmath.exp(1j * m * t) / (1j * math.pi) * (finite + tail.value)
    if with_error:
        return value, (finite_err + tail.error_estimate) / math.pi, tail.converged
    return value


def salpeter_integral_outer(x, t: Optional[float] = None, m: Optional[float] = None,
                            cfg: Optional[QuadratureConfig] = None, *, with_error: bool = False):
    r"""Outer-cone integral representation (``|x| > t``).

    .. math::
        G = \frac{i e^{imt}}{\pi}\int_m^\infty \sinh(\sqrt{q^2-m^2}\,t)\,e^{-qx}\,dq

    with the hyperbolic sine split into two decaying exponentials, the
    substitution :math:`q = m + s^2`, and the peak factor
    :math:`e^{-m\sqrt{x^2-t^2}}` pulled out of the integrand so that tolerances
    act relative to the result.  With ``with_error=True`` the tuple
    ``(value, error_estimate, converged)`` is returned.

    Raises
    ------
    DomainError
        If ``|x| <= t``.
    """
    x, t, m = _unpack(x, t, m)
    cfg = cfg or DEFAULT_CONFIG
    ax = abs(float(x))
    if not ax > t:
        raise DomainError("the outer representation requires |x| > t")
    sigma = math.sqrt((ax - t) * (ax + t))

    def integrand(s):
        q = m + s * s
        root = s * np.sqrt(2.0 * m + s * s) * t
        shift = m * sigma - q * ax
        return s * (np.exp(root + shift) - np.exp(-root + shift))

    hint = math.sqrt(ax - t)
    res = integrate_semi_infinite_decaying(integrand, 0.0, hint, cfg)
    scale = math.exp(-m * sigma) / math.pi
    value = 1j * cmath.exp(1j * m * t) * res.value * scale
    if with_error:
        return value, res.error_estimate * scale, res.converged
    return value


def salpeter_classical(x, t: Optional[float] = None, m: Optional[float] = None):
    r"""Non-relativistic limit :math:`\sqrt{m/(2\pi t)}\,e^{-i\pi/4}e^{imx^2/(2t)}`.

    The square root of :math:`1/i` is taken on the principal branch.

    Raises
    ------
    DomainError
        If ``m == 0``.
    """
    x, t, m = _unpack(x, t, m)
    if m == 0.0:
        raise DomainError("the classical limit requires m > 0")
    ax = np.asarray(x, dtype=float)
    amp = math.sqrt(m / (2.0 * math.pi * t))
    return _result(amp * cmath.exp(-0.25j * math.pi) * np.exp(0.5j * m * ax * ax / t))


def singular_asymptote(x, t: Optional[float] = None, m: Optional[float] = None) -> complex:
    r"""Two leading terms of the propagator at the light cone.

    .. math::
        G \approx \frac{e^{imt}}{\pi}\Big[\frac{1}{2i(t-|x|)}
              + \frac{im^2t}{4}\ln\big(im(t-|x|)\big)\Big]

    with the principal logarithm; ``t - |x|`` is negative when the cone is
    approached from outside.  The bracket alone is the expansion of
    :math:`\pi e^{-imt}G`.

    Raises
    ------
    DomainError
        Unless ``0 < |t - |x|| < 0.1 t`` and ``m > 0``.
    """
    x, t, m = _unpack(x, t, m)
    ax = abs(float(x))
    d = t - ax
    if not (0.0 < abs(d) < 0.1 * t) or m <= 0.0:
        raise DomainError("singular_asymptote needs 0 < |t - |x|| < 0.1 t and m > 0")
    bracket = 1.0 / (2j * d) + 0.25j * m * m * t * cmath.log(1j * m * d)
    return cmath.exp(1j * m * t) / math.pi * bracket
