r"""Special functions used by the propagator closed forms and the series method.

Everything here is implemented from scratch on top of :mod:`numpy` and
:mod:`cmath`:

* :func:`bessel_k1` -- modified Bessel function :math:`K_1(y)` (ascending
  series for :math:`y \le 2`, Temme/Steed continued fraction beyond), plus the
  exponentially scaled variant :func:`bessel_k1_scaled`.
* :func:`hankel1_order1` -- :math:`H^{(1)}_1(z) = J_1(z) + i Y_1(z)` from the
  ascending :math:`J_1`/:math:`Y_1` series for :math:`z \le 12` and the Hankel
  asymptotic expansion beyond.
* :func:`expint_en` -- generalized exponential integral
  :math:`E_n(z) = \int_1^\infty u^{-n} e^{-zu}\,du` for :math:`\Re z \ge 0`.
* :func:`hyp1f2` and :func:`f_n` -- the :math:`{}_1F_2` series and the moment
  integrals :math:`f_n(\rho) = \int_0^1 \epsilon^n \cos(\epsilon\rho)\,d\epsilon`.
* :func:`g1_coefficients` / :func:`g2_coefficients` -- Taylor coefficient
  families of :math:`\exp[-iy(\sqrt{1+\epsilon^2}-1)]` and
  :math:`\exp[-i(y/\epsilon)(\sqrt{1+\epsilon^2}-1)]`, generated by truncated
  power-series arithmetic.

All functions are pure; none keeps mutable module state.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ConvergenceError, DomainError, SingularityError, UnderflowWarning

__all__ = [
    "EULER_GAMMA",
    "SeriesCoefficients",
    "bessel_k1",
    "bessel_k1_scaled",
    "bessel_k1_minus_pole",
    "hankel1_order1",
    "hankel1_minus_pole",
    "expint_en",
    "hyp1f2",
    "f_n",
    "f_n_trig",
    "g1_coefficients",
    "g2_coefficients",
]

EULER_GAMMA = 0.57721566490153286060651209008240243

_EPS = np.finfo(float).eps
_LN2 = math.log(2.0)
_K1_SERIES_MAX = 2.0
_K1_SERIES_TERMS = 16
_CF2_MAXIT = 20000
_HANKEL_SERIES_MAX = 12.0
_HANKEL_SERIES_TERMS = 60
_HANKEL_ASYMPTOTIC_TERMS = 60


# ---------------------------------------------------------------------------
# K_1
# ---------------------------------------------------------------------------

def _as_checked_array(y, name="y"):
    arr = np.asarray(y)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _k1_series(y, with_pole=True):
    """Ascending series for K_1 (real or complex ``y`` with |y| <= 2)."""
    z = 0.25 * y * y
    term = np.ones_like(y)
    i1_sum = np.zeros_like(y)
    psi_sum = np.zeros_like(y)
    psi_a = -EULER_GAMMA          # psi(k + 1)
    psi_b = 1.0 - EULER_GAMMA     # psi(k + 2)
    for k in range(_K1_SERIES_TERMS):
        i1_sum = i1_sum + term
        psi_sum = psi_sum + (psi_a + psi_b) * term
        psi_a += 1.0 / (k + 1)
        psi_b += 1.0 / (k + 2)
        term = term * z / ((k + 1) * (k + 2))
    i1 = 0.5 * y * i1_sum
    # ln(y) - ln 2 rather than ln(y/2): y/2 rounds to zero for the smallest subnormals
    regular = (np.log(y) - _LN2) * i1 - 0.25 * y * psi_sum
    if not with_pole:
        return regular
    with np.errstate(over="ignore"):
        # 1/y overflows to inf below about 5.6e-309, as K_1 itself does
        return 1.0 / y + regular


def _k1_cf2_scaled(x):
    """Temme's continued fraction (Steed's algorithm) for e^x K_1(x).

    Valid for |x| > 2 with Re x >= 0; the iteration is carried out on the whole
    array and each element is frozen once its own series has converged.
    """
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    active = np.ones(x.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for i in range(2, _CF2_MAXIT):
            a -= 2 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1, q2 = q2, qnew
            q = q + c * qnew
            b = b + 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h = np.where(active, h + delh, h)
            dels = q * delh
            s = np.where(active, s + dels, s)
            active &= ~(np.abs(dels) < _EPS * np.abs(s))
            if not active.any():
                break
        else:  # pragma: no cover - the fraction converges for |x| > 2
            raise ConvergenceError("K1 continued fraction did not converge")
    h = a1 * h
    k0 = np.sqrt(np.pi / (2.0 * x)) / s
    return k0 * (x + 0.5 - h) / x


def _k1_core(y, scaled):
    y = np.asarray(y)
    out = np.empty(y.shape, dtype=np.result_type(y, float))
    small = np.abs(y) <= _K1_SERIES_MAX
    if small.any():
        ys = y[small]
        out[small] = _k1_series(ys) * (np.exp(ys) if scaled else 1.0)
    if (~small).any():
        yl = y[~small]
        val = _k1_cf2_scaled(yl)
        out[~small] = val if scaled else val * np.exp(-yl)
    return out


def bessel_k1_scaled(y):
    r"""Exponentially scaled modified Bessel function :math:`e^{y} K_1(y)`.

    Parameters
    ----------
    y : float or array_like
        Strictly positive, finite argument(s).

    Returns
    -------
    float or ndarray
        :math:`e^{y}K_1(y)`; never underflows for finite ``y``.

    Raises
    ------
    DomainError
        If any ``y`` is non-positive or non-finite.
    """
    arr = _as_checked_array(y)
    if np.any(arr <= 0):
        raise DomainError("bessel_k1_scaled requires y > 0")
    out = _k1_core(arr.astype(float), scaled=True)
    return float(out) if out.ndim == 0 else out


def bessel_k1(y):
    r"""Modified Bessel function of the second kind of order one, :math:`K_1(y)`.

    Uses the ascending series

    .. math::
        K_1(y) = \frac{1}{y} + \ln\frac{y}{2} I_1(y)
                 - \frac{y}{4}\sum_{k\ge0}\frac{\psi(k+1)+\psi(k+2)}{k!(k+1)!}
                   \left(\frac{y^2}{4}\right)^k

    for :math:`y \le 2` and Temme's continued fraction for the scaled function
    above that.  The relative error is about :math:`10^{-15}` on
    :math:`[10^{-300}, 700]`.

    Parameters
    ----------
    y : float or array_like
        Strictly positive, finite argument(s).

    Returns
    -------
    float or ndarray
        :math:`K_1(y)`.  Where :math:`e^{-y}` underflows the result is ``0``
        and an :class:`~relprop.exceptions.UnderflowWarning` is emitted; for
        subnormal ``y`` below about ``5.6e-309`` it overflows to ``inf``.

    Raises
    ------
    DomainError
        If any ``y`` is non-positive or non-finite.
    """
    arr = _as_checked_array(y)
    if np.any(arr <= 0):
        raise DomainError("bessel_k1 requires y > 0")
    with np.errstate(under="ignore"):
        out = _k1_core(arr.astype(float), scaled=False)
    if np.any(out == 0.0):
        warnings.warn("K1(y) underflows to zero for the largest arguments",
                      UnderflowWarning, stacklevel=2)
    return float(out) if out.ndim == 0 else out


def bessel_k1_minus_pole(y):
    r"""Pole-free part :math:`K_1(y) - 1/y` without cancellation for small ``y``.

    Behaves like :math:`(y/2)\ln(y/2)` as :math:`y \to 0`.
    """
    arr = _as_checked_array(y).astype(float)
    if np.any(arr <= 0):
        raise DomainError("bessel_k1_minus_pole requires y > 0")
    out = np.empty(arr.shape)
    small = arr <= _K1_SERIES_MAX
    if small.any():
        out[small] = _k1_series(arr[small], with_pole=False)
    if (~small).any():
        yl = arr[~small]
        with np.errstate(under="ignore"):
            out[~small] = _k1_cf2_scaled(yl) * np.exp(-yl) - 1.0 / yl
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# H_1^(1)
# ---------------------------------------------------------------------------

def _hankel1_series(z, with_pole=True):
    """J_1 + i Y_1 from the ascending series (real or complex ``z``)."""
    w = 0.5 * z
    w2 = -(w * w)
    term = w.copy()
    j_sum = np.zeros_like(z)
    psi_sum = np.zeros_like(z)
    psi_a = -EULER_GAMMA
    psi_b = 1.0 - EULER_GAMMA
    for k in range(_HANKEL_SERIES_TERMS):
        j_sum = j_sum + term
        psi_sum = psi_sum + (psi_a + psi_b) * term
        psi_a += 1.0 / (k + 1)
        psi_b += 1.0 / (k + 2)
        term = term * w2 / ((k + 1) * (k + 2))
    y1 = (2.0 / np.pi) * np.log(w) * j_sum - psi_sum / np.pi
    if with_pole:
        y1 = y1 - 2.0 / (np.pi * z)
    return j_sum + 1j * y1


def _hankel1_asymptotic(x):
    """Hankel's expansion of H_1^(1)(x) for large real x."""
    mu = 4.0
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    prev = np.full_like(x, np.inf)
    for k in range(1, _HANKEL_ASYMPTOTIC_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        mag = np.abs(term)
        # stop each element at the smallest term of the divergent expansion
        active &= (mag < prev) & (mag > 1e-17)
        prev = np.where(active, mag, prev)
        # a_k/x^k enters P (k even) or Q (k odd) with sign (-1)^floor(k/2)
        sign = -1.0 if (k // 2) % 2 else 1.0
        contrib = np.where(active, sign * term, 0.0)
        if k % 2 == 0:
            p = p + contrib
        else:
            q = q + contrib
        if not active.any():
            break
    # e^{i(x - 3 pi/4)} assembled from cos x, sin x to keep full accuracy
    c, s = np.cos(x), np.sin(x)
    r = np.sqrt(0.5)
    phase = (-c + s) * r + 1j * (-s - c) * r
    return np.sqrt(2.0 / (np.pi * x)) * (p + 1j * q) * phase


def hankel1_order1(z):
    r"""Hankel function of the first kind of order one, :math:`J_1(z)+iY_1(z)`.

    Parameters
    ----------
    z : float, complex or array_like
        Positive real arguments, or complex arguments in the closed first
        quadrant (``Re z >= 0``, ``Im z >= 0``, ``z != 0``).

    Returns
    -------
    complex or ndarray of complex

    Notes
    -----
    Real arguments use the ascending series up to 12 and Hankel's asymptotic
    expansion beyond; both agree to about :math:`10^{-11}` of :math:`|H|` at the
    switch.  Complex arguments use the same ascending series for
    :math:`|z| \le 2`; further out they are obtained from the continued
    fraction for :math:`K_1` through :math:`H^{(1)}_1(z) = -(2/\pi)K_1(-iz)`.

    Raises
    ------
    DomainError
        For zero, non-finite, or out-of-quadrant arguments.
    """
    arr = _as_checked_array(z, "z")
    if np.iscomplexobj(arr) and np.any(arr.imag != 0):
        arr = arr.astype(complex)
        if np.any((arr.real < 0) | (arr.imag < 0) | (arr == 0)):
            raise DomainError("complex argument must lie in the first quadrant")
        out = np.empty(arr.shape, dtype=complex)
        small = np.abs(arr) <= 2.0
        if small.any():
            out[small] = _hankel1_series(arr[small])
        if (~small).any():
            w = -1j * arr[~small]
            out[~small] = -(2.0 / np.pi) * _k1_cf2_scaled(w) * np.exp(-w)
    else:
        arr = np.real(arr).astype(float)
        if np.any(arr <= 0):
            raise DomainError("hankel1_order1 requires y > 0")
        out = np.empty(arr.shape, dtype=complex)
        small = arr <= _HANKEL_SERIES_MAX
        if small.any():
            out[small] = _hankel1_series(arr[small])
        if (~small).any():
            out[~small] = _hankel1_asymptotic(arr[~small])
    return complex(out) if out.ndim == 0 else out


def hankel1_minus_pole(y):
    r"""Pole-free part :math:`H^{(1)}_1(y) + 2i/(\pi y)` for real ``y > 0``.

    Behaves like :math:`(iy/\pi)\ln(y/2)` as :math:`y \to 0`.
    """
    arr = _as_checked_array(y).astype(float)
    if np.any(arr <= 0):
        raise DomainError("hankel1_minus_pole requires y > 0")
    out = np.empty(arr.shape, dtype=complex)
    small = arr <= 2.0
    if small.any():
        out[small] = _hankel1_series(arr[small], with_pole=False)
    if (~small).any():
        yl = arr[~small]
        out[~small] = hankel1_order1(yl) + 2j / (np.pi * yl)
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# E_n
# ---------------------------------------------------------------------------

_EN_MAXIT = 100000


def expint_en(n: int, z) -> complex:
    r"""Generalized exponential integral :math:`E_n(z)=\int_1^\infty u^{-n}e^{-zu}du`.

    Parameters
    ----------
    n : int
        Non-negative order.
    z : complex
        Argument with ``Re z >= 0``.

    Returns
    -------
    complex

    Notes
    -----
    ``n = 0`` is the closed form :math:`e^{-z}/z`.  For :math:`|z| < 1`,
    :math:`E_1` comes from its logarithmic power series and higher orders from
    the upward recurrence :math:`nE_{n+1} = e^{-z} - zE_n`, whose error
    amplification factor :math:`|z|/n` is below one there.  For
    :math:`|z| \ge 1` every order is evaluated directly from its continued
    fraction (modified Lentz), which avoids recurrence error growth when
    :math:`|z| < n`.

    Raises
    ------
    DomainError
        If ``Re z < 0``, ``n < 0`` or ``z`` is not finite.
    SingularityError
        If ``z = 0`` and ``n <= 1``.
    """
    n = int(n)
    if n < 0:
        raise DomainError("order n must be non-negative")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("z must be finite")
    if z.real < 0:
        raise DomainError("expint_en requires Re(z) >= 0")
    if z == 0:
        if n <= 1:
            raise SingularityError(f"E_{n}(z) is singular at z = 0")
        return complex(1.0 / (n - 1))
    if n == 0:
        return cmath.exp(-z) / z
    if abs(z) < 1.0:
        total = 0j
        term = 1 + 0j
        for k in range(1, 200):
            term *= -z / k
            contrib = term / k
            total += contrib
            if abs(contrib) < 1e-17 * max(abs(total), 1e-300):
                break
        en = -EULER_GAMMA - cmath.log(z) - total
        ez = cmath.exp(-z)
        for k in range(1, n):
            en = (ez - z * en) / k
        return en
    return _expint_cf(n, z)


def _expint_cf(n: int, z: complex) -> complex:
    tiny = 1e-300
    nm1 = n - 1
    b = z + n
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _EN_MAXIT):
        a = -i * (nm1 + i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h * cmath.exp(-z)
    raise ConvergenceError(f"E_{n} continued fraction did not converge at z={z}")


# ---------------------------------------------------------------------------
# 1F2 and f_n
# ---------------------------------------------------------------------------

def hyp1f2(a: float, b1: float, b2: float, z: float, max_terms: int = 500) -> float:
    r"""Generalized hypergeometric series :math:`{}_1F_2(a; b_1, b_2; z)`.

    Summation stops once three consecutive terms are below ``1e-16`` of the
    running sum.

    Raises
    ------
    ConvergenceError
        If ``max_terms`` terms are summed without meeting the stopping rule.
    """
    total = 1.0
    term = 1.0
    small_run = 0
    for k in range(max_terms):
        term *= (a + k) / ((b1 + k) * (b2 + k) * (k + 1)) * z
        total += term
        if abs(term) < 1e-16 * abs(total):
            small_run += 1
            if small_run == 3:
                return total
        else:
            small_run = 0
    raise ConvergenceError("1F2 series did not converge", partial=total)


_FN_SERIES_MAX = 10.0


def f_n_trig(n: int, rho: float) -> float:
    r"""Evaluate :math:`f_n(\rho)` from its elementary trigonometric closed form.

    Uses the integration-by-parts pair

    .. math::
        C_n = \frac{\sin\rho}{\rho} - \frac{n}{\rho}S_{n-1},\qquad
        S_n = -\frac{\cos\rho}{\rho} + \frac{n}{\rho}C_{n-1},

    with :math:`C_0 = \sin\rho/\rho` and :math:`S_0 = (1-\cos\rho)/\rho`, where
    :math:`C_n = f_n`.  Accurate for moderate and large :math:`|\rho|`; loses
    roughly :math:`n!/|\rho|^n` relative accuracy as :math:`\rho \to 0`.
    """
    n = int(n)
    if n < 0:
        raise DomainError("n must be non-negative")
    rho = abs(float(rho))
    if not math.isfinite(rho):
        raise DomainError("rho must be finite")
    if rho == 0.0:
        raise SingularityError("the trigonometric form is indeterminate at rho = 0")
    s, c = math.sin(rho), math.cos(rho)
    cn = s / rho
    sn = (1.0 - c) / rho
    for k in range(1, n + 1):
        cn, sn = s / rho - (k / rho) * sn, -c / rho + (k / rho) * cn
    return cn


def f_n(n: int, rho: float) -> float:
    r"""Moment integral :math:`f_n(\rho) = \int_0^1 \epsilon^n\cos(\epsilon\rho)\,d\epsilon`.

    Equal to :math:`{}_1F_2[(n+1)/2; 1/2, (n+3)/2; -\rho^2/4]/(n+1)`, which is
    summed for :math:`|\rho| \le \max(10, n)`; the trigonometric closed form
    :func:`f_n_trig` is used beyond, where its upward recurrence is stable.
    The switch point keeps the cancellation in the alternating series below
    about :math:`10^{-12}` absolute.

    Examples
    --------
    >>> f_n(3, 0.0)
    0.25
    """
    n = int(n)
    if n < 0:
        raise DomainError("n must be non-negative")
    rho = float(rho)
    if not math.isfinite(rho):
        raise DomainError("rho must be finite")
    if abs(rho) <= max(_FN_SERIES_MAX, n):
        return hyp1f2(0.5 * (n + 1), 0.5, 0.5 * (n + 3), -0.25 * rho * rho) / (n + 1)
    return f_n_trig(n, rho)


# ---------------------------------------------------------------------------
# g1 / g2 Taylor coefficient families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesCoefficients:
    """Derivative values :math:`g^{(n)}` for ``n = 0..order_max``."""

    order_max: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.order_max + 1:
            raise ValueError("values must have order_max + 1 entries")

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return len(self.values)


def _sqrt1p_coefficients(kmax: int) -> list:
    """Binomial coefficients of sqrt(1 + u) = sum c_k u^k."""
    coeffs = [1.0]
    for k in range(1, kmax + 1):
        coeffs.append(coeffs[-1] * (0.5 - (k - 1)) / k)
    return coeffs


def _exp_series(h: Sequence[complex], order: int) -> list:
    """Coefficients of exp(h(eps)) for a series h with h[0] = 0."""
    e = [0j] * (order + 1)
    e[0] = 1 + 0j
    for n in range(1, order + 1):
        acc = 0j
        for k in range(1, n + 1):
            if h[k] != 0:
                acc += k * h[k] * e[n - k]
        e[n] = acc / n
    return e


def _derivatives(e: Sequence[complex]) -> tuple:
    return tuple(complex(math.factorial(n) * c) for n, c in enumerate(e))


def g1_coefficients(y: float, order_max: int) -> SeriesCoefficients:
    r"""Derivatives at zero of :math:`\exp[-iy(\sqrt{1+\epsilon^2}-1)]` in :math:`\epsilon`.

    Generated by composing the exponential with the binomial series of
    :math:`\sqrt{1+\epsilon^2}` in truncated power-series arithmetic and scaling
    the Taylor coefficients by :math:`n!`.  Odd orders vanish identically.

    Examples
    --------
    >>> g1_coefficients(2.0, 2)[2]
    -2j
    """
    order_max = int(order_max)
    if order_max < 0:
        raise DomainError("order_max must be non-negative")
    c = _sqrt1p_coefficients(order_max // 2 + 1)
    h = [0j] * (order_max + 1)
    for k in range(1, order_max // 2 + 1):
        h[2 * k] = -1j * y * c[k]
    return SeriesCoefficients(order_max, _derivatives(_exp_series(h, order_max)))


def g2_coefficients(y: float, order_max: int) -> SeriesCoefficients:
    r"""Derivatives at zero of :math:`\exp[-i(y/\epsilon)(\sqrt{1+\epsilon^2}-1)]`.

    The exponent is the odd series :math:`-iy(\epsilon/2 - \epsilon^3/8 + \dots)`;
    the family is generated the same way as :func:`g1_coefficients`.

    Examples
    --------
    >>> g2_coefficients(1.0, 3)[3]
    0.875j
    """
    order_max = int(order_max)
    if order_max < 0:
        raise DomainError("order_max must be non-negative")
    c = _sqrt1p_coefficients(order_max // 2 + 1)
    h = [0j] * (order_max + 1)
    for k in range(1, (order_max + 1) // 2 + 1):
        if 2 * k - 1 <= order_max:
            h[2 * k - 1] = -1j * y * c[k]
    return SeriesCoefficients(order_max, _derivatives(_exp_series(h, order_max)))
