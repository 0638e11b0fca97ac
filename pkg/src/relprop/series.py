r"""Split perturbative expansion of the Salpeter propagator.

The momentum integral of the propagator is cut at :math:`p = m`:

* below the cut, :math:`p = m\epsilon` and
  :math:`e^{-imt(\sqrt{1+\epsilon^2}-1)} = \sum_n g_1^{(n)}(mt)\epsilon^n/n!`, so

  .. math:: G_1 = m e^{-imt}\sum_n \frac{g_1^{(n)}(mt)}{n!} f_n(mx);

* above the cut, :math:`\epsilon = m/p` and
  :math:`e^{-i(mt/\epsilon)(\sqrt{1+\epsilon^2}-1)} = \sum_n g_2^{(n)}(mt)\epsilon^n/n!`,
  so

  .. math:: G_2 = \frac{m}{2}\sum_n \frac{g_2^{(n)}(mt)}{n!}
            \big(E_n[im(t-x)] + E_n[im(t+x)]\big).

:math:`G_1` carries :math:`e^{-imt}` while :math:`G_2` does not, because the
second expansion keeps the full :math:`\sqrt{m^2+p^2}` phase.  Both blocks
then describe :math:`\int_0^\infty e^{-i\sqrt{m^2+p^2}t}\cos(px)dp`, and the
propagator in the convention of :func:`relprop.salpeter.salpeter_closed`
(Hamiltonian :math:`\sqrt{m^2+p^2}-m`) is
:math:`G = \frac{e^{imt}}{\pi}(G_1 + G_2)`.  :func:`phase_calibration`
checks that single global factor against the closed form.

The expansion is accurate for :math:`mt \lesssim 1`; it degrades beyond
:math:`mt \approx 2`, and ``last_term_magnitude`` lets callers detect this.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

from .exceptions import DomainError, SignCalibrationError, SingularityError
from .specfun import expint_en, f_n, g1_coefficients, g2_coefficients

__all__ = [
    "DEFAULT_ORDER",
    "SeriesEvaluation",
    "series_g1",
    "series_g2",
    "series_propagator",
    "phase_calibration",
    "PHASE_CALIBRATION_POINT",
]

#: Default truncation order.
DEFAULT_ORDER = 10

#: (x, t, m) at which the global phase of the series is checked.
PHASE_CALIBRATION_POINT = (0.4, 1.0, 0.5)


@dataclass(frozen=True)
class SeriesEvaluation:
    r"""Truncated series value of the propagator.

    ``g1_partial`` and ``g2_partial`` are the two blocks already multiplied by
    the global factor :math:`e^{imt}/\pi`, so ``value == g1_partial + g2_partial``.
    ``last_term_magnitude`` is the largest magnitude among the highest-order
    terms kept (of either block), on the same scale as ``value``.
    """

    value: complex
    order_used: int
    g1_partial: complex
    g2_partial: complex
    last_term_magnitude: float


def _check_args(t, m, order_max):
    if not (t > 0 and math.isfinite(t)):
        raise DomainError("t must be positive and finite")
    if not (m > 0 and math.isfinite(m)):
        raise DomainError("the series requires m > 0")
    order_max = int(order_max)
    if order_max < 0 or order_max % 2:
        raise DomainError("order_max must be even and non-negative")
    return order_max


def _g1_terms(x, t, m, order_max):
    coeffs = g1_coefficients(m * t, order_max)
    rho = m * abs(float(x))
    pref = m * cmath.exp(-1j * m * t)
    return [pref * coeffs[n] / math.factorial(n) * f_n(n, rho) for n in range(0, order_max + 1, 2)]


def _g2_terms(x, t, m, order_max):
    ax = abs(float(x))
    if ax == t:
        raise SingularityError("the large-momentum block is singular at |x| = t")
    coeffs = g2_coefficients(m * t, order_max)
    za = 1j * m * (t - ax)
    zb = 1j * m * (t + ax)
    return [0.5 * m * coeffs[n] / math.factorial(n) * (expint_en(n, za) + expint_en(n, zb))
            for n in range(order_max + 1)]


def series_g1(x: float, t: float, m: float, order_max: int = DEFAULT_ORDER) -> complex:
    r"""Small-momentum block :math:`G_1 = m e^{-imt}\sum_n g_1^{(n)}(mt) f_n(mx)/n!`.

    Only even orders contribute; ``order_max`` must be even.

    Examples
    --------
    >>> abs(series_g1(0.0, 1.0, 1.0, 0) - cmath.exp(-1j))
    0.0
    """
    order_max = _check_args(t, m, order_max)
    return complex(sum(_g1_terms(x, t, m, order_max)))


def series_g2(x: float, t: float, m: float, order_max: int = DEFAULT_ORDER) -> complex:
    r"""Large-momentum block :math:`G_2 = \frac{m}{2}\sum_n \frac{g_2^{(n)}(mt)}{n!}(E_n[im(t-x)]+E_n[im(t+x)])`.

    Near the light cone it behaves like :math:`1/(2i(t-|x|))`.

    Raises
    ------
    SingularityError
        If ``|x| == t``.
    """
    order_max = _check_args(t, m, order_max)
    return complex(sum(_g2_terms(x, t, m, order_max)))


def series_propagator(x: float, t: float, m: float, order_max: int = DEFAULT_ORDER) -> SeriesEvaluation:
    r"""Series value of the propagator, :math:`\frac{e^{imt}}{\pi}(G_1 + G_2)`.

    Even in ``x``.  Off the light cone and for :math:`mt, m|x| \lesssim 1` the
    error against :func:`relprop.salpeter.salpeter_closed` shrinks
    monotonically with ``order_max``.

    Raises
    ------
    DomainError
        For ``m <= 0``, ``t <= 0`` or odd/negative ``order_max``.
    SingularityError
        If ``|x| == t``.
    """
    order_max = _check_args(t, m, order_max)
    glob = cmath.exp(1j * m * t) / math.pi
    t1 = _g1_terms(x, t, m, order_max)
    t2 = _g2_terms(x, t, m, order_max)
    g1 = glob * sum(t1)
    g2 = glob * sum(t2)
    last = max(abs(t1[-1]), abs(t2[-1]), abs(t2[-2]) if order_max > 0 else 0.0) / math.pi
    return SeriesEvaluation(value=g1 + g2, order_used=order_max, g1_partial=g1,
                            g2_partial=g2, last_term_magnitude=float(last))


@functools.lru_cache(maxsize=1)
def phase_calibration() -> complex:
    r"""Confirm the global factor :math:`e^{imt}/\pi` against the closed form.

    Returns the ratio ``closed / series`` at
    :data:`PHASE_CALIBRATION_POINT` (close to 1 when the convention holds).

    Raises
    ------
    SignCalibrationError
        If the ratio differs from 1 by more than ``1e-2``.
    """
    from .salpeter import salpeter_closed

    x, t, m = PHASE_CALIBRATION_POINT
    ratio = complex(salpeter_closed(x, t, m)) / series_propagator(x, t, m).value
    if abs(ratio - 1.0) > 1e-2:
        raise SignCalibrationError(f"series and closed form differ by the factor {ratio!r}")
    return ratio
