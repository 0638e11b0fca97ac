r"""Adaptive quadrature for finite, semi-infinite, oscillatory and principal-value integrals.

All integrands are *vectorized*: they receive a 1-D :class:`numpy.ndarray` of
abscissae and must return an array (real or complex) of the same length.

The workhorse is an adaptive 10/21-point Gauss--Kronrod rule with global
error control (the panel with the largest error is bisected first).  The other
routines partition their domains into panels and delegate to it:

* :func:`integrate_semi_infinite_decaying` -- geometric panels scaled by the
  inverse of a decay rate.
* :func:`integrate_oscillatory_cos` -- half-period panels between zeros of
  :math:`\cos(\omega p)` and repeated averaging (Euler's transformation) of the
  alternating partial sums.  When the final value is many orders of magnitude
  below the size of the individual panels the computation can be repeated in
  multiprecision arithmetic.
* :func:`principal_value` -- symmetric excision around first-order poles with
  Richardson extrapolation in the excision half-width.
"""

from __future__ import annotations

import dataclasses
import functools
import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import (
    AccelerationError,
    ConvergenceError,
    DecayError,
    DomainError,
    PoleSeparationError,
)

__all__ = [
    "QuadratureConfig",
    "QuadratureResult",
    "integrate_finite",
    "integrate_semi_infinite_decaying",
    "integrate_oscillatory_cos",
    "principal_value",
]

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets shared by every routine of this module.

    Attributes
    ----------
    abs_tol, rel_tol : float
        A result is accepted once its error estimate is below
        ``max(abs_tol, rel_tol * |value|)``.
    max_subdivisions : int
        Bisection budget of :func:`integrate_finite`; also the panel budget of
        the semi-infinite routines.
    tail_cutoff_exponent : float
        Semi-infinite integration stops once ``decay_rate_hint * (q - a)``
        exceeds this value (the integrand is below the double-precision range).
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    tail_cutoff_exponent: float = 745.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("abs_tol and rel_tol must be positive")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be at least 1")
        if not self.tail_cutoff_exponent > 0:
            raise DomainError("tail_cutoff_exponent must be positive")

    def replace(self, **changes) -> "QuadratureConfig":
        """Return a copy with some fields changed."""
        return dataclasses.replace(self, **changes)

    def tolerance(self, value) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an integral with its error estimate and evaluation count."""

    value: complex
    error_estimate: float
    evaluations: int
    converged: bool = True

    def __complex__(self):
        return complex(self.value)


# ---------------------------------------------------------------------------
# Gauss-Kronrod 10/21 rule on [-1, 1]
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208977008,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Full symmetric node set: 21 Kronrod nodes, Gauss nodes at odd positions.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GWEIGHTS = np.zeros(21)
_GWEIGHTS[1:10:2] = _WG
_GWEIGHTS[11:20:2] = _WG[::-1]


def _gk21(f: Integrand, a: float, b: float):
    """Apply the 21-point Kronrod rule and its embedded 10-point Gauss rule."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    values = np.asarray(f(center + half * _NODES))
    if values.shape != _NODES.shape:
        values = np.broadcast_to(values, _NODES.shape)
    if not np.all(np.isfinite(values)):
        raise ConvergenceError(f"integrand is not finite on [{a!r}, {b!r}]")
    kron = half * np.dot(_KWEIGHTS, values)
    gauss = half * np.dot(_GWEIGHTS, values)
    return kron, abs(kron - gauss)


def _scalar(value):
    value = complex(value)
    return value.real if value.imag == 0 else value


def integrate_finite(f: Integrand, a: float, b: float,
                     cfg: Optional[QuadratureConfig] = None) -> QuadratureResult:
    """Adaptive Gauss--Kronrod integration over a finite interval.

    Parameters
    ----------
    f : callable
        Vectorized integrand returning real or complex values.
    a, b : float
        Integration limits, ``a <= b``.
    cfg : QuadratureConfig, optional
        Tolerances; defaults to :data:`DEFAULT_CONFIG`.

    Returns
    -------
    QuadratureResult
        The error estimate is the sum over panels of ``|K21 - G10|``.

    Raises
    ------
    ConvergenceError
        If ``cfg.max_subdivisions`` bisections do not reach the tolerance.
    """
    cfg = cfg or DEFAULT_CONFIG
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a > b:
        raise DomainError("integrate_finite requires a <= b")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)

    value, err = _gk21(f, a, b)
    evaluations = 21
    # max-heap of panels keyed by error (ties broken by insertion order)
    heap = [(-err, 0, a, b, value, err)]
    total, total_err = value, err
    counter = 1
    subdivisions = 0
    while total_err > cfg.tolerance(total):
        if subdivisions >= cfg.max_subdivisions:
            raise ConvergenceError(
                f"integrate_finite: {subdivisions} subdivisions exhausted "
                f"(error {total_err:.3g})",
                partial=QuadratureResult(_scalar(total), total_err, evaluations, False))
        _, _, lo, hi, v, e = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            raise ConvergenceError(
                "integrate_finite: panel width reached machine resolution",
                partial=QuadratureResult(_scalar(total), total_err, evaluations, False))
        v1, e1 = _gk21(f, lo, mid)
        v2, e2 = _gk21(f, mid, hi)
        evaluations += 42
        subdivisions += 1
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2, e2))
        counter += 2
        # re-sum to avoid drift from repeated subtraction
        total = sum(p[4] for p in heap)
        total_err = sum(p[5] for p in heap)
    return QuadratureResult(_scalar(total), float(total_err), evaluations, True)


def integrate_semi_infinite_decaying(f: Integrand, a: float, decay_rate_hint: float,
                                     cfg: Optional[QuadratureConfig] = None) -> QuadratureResult:
    r"""Integrate an exponentially decaying function over :math:`[a, \infty)`.

    The half-line is cut into panels of widths ``w, 2w, 4w, ...`` with
    ``w = 1 / decay_rate_hint``; each panel is integrated by
    :func:`integrate_finite`.  Summation stops once a panel contributes less
    than a tenth of the tolerance, or once ``decay_rate_hint * (q - a)``
    exceeds ``cfg.tail_cutoff_exponent``.

    Raises
    ------
    DecayError
        If 20 successive panels fail to shrink.
    ConvergenceError
        If a panel does not converge or the panel budget is exhausted.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not (decay_rate_hint > 0 and math.isfinite(decay_rate_hint)):
        raise DomainError("decay_rate_hint must be positive and finite")
    width = 1.0 / decay_rate_hint
    lo = float(a)
    total = 0.0
    total_err = 0.0
    evaluations = 0
    prev_mag = math.inf
    growing = 0
    for _ in range(cfg.max_subdivisions):
        hi = lo + width
        panel = integrate_finite(f, lo, hi, cfg)
        total += panel.value
        total_err += panel.error_estimate
        evaluations += panel.evaluations
        mag = abs(panel.value)
        growing = growing + 1 if mag >= prev_mag else 0
        if growing >= 20:
            raise DecayError("integrand does not decay at the hinted rate",
                             partial=QuadratureResult(_scalar(total), total_err, evaluations, False))
        prev_mag = mag
        lo = hi
        width *= 2.0
        if mag < 0.1 * cfg.tolerance(total) and mag <= prev_mag:
            break
        if decay_rate_hint * (lo - a) > cfg.tail_cutoff_exponent:
            if mag > cfg.tolerance(total):
                raise DecayError("integrand is still significant at the tail cutoff",
                                 partial=QuadratureResult(_scalar(total), total_err, evaluations, False))
            break
    else:
        raise ConvergenceError("semi-infinite panel budget exhausted",
                               partial=QuadratureResult(_scalar(total), total_err, evaluations, False))
    return QuadratureResult(_scalar(total), float(total_err), evaluations, True)


# ---------------------------------------------------------------------------
# Oscillatory cosine integrals
# ---------------------------------------------------------------------------

def _euler_average(partial_sums: Sequence):
    """Repeated pairwise averaging of a window of partial sums (Euler's transform).

    ``L`` rounds of averaging ``L + 1`` partial sums collapse to a single
    binomially weighted mean, which is evaluated directly.
    """
    levels = len(partial_sums) - 1
    acc = 0
    for j, value in enumerate(partial_sums):
        acc += math.comb(levels, j) * value
    return acc / 2 ** levels


def _first_zero_index(a: float, omega: float) -> int:
    """Index k of the first zero (k + 1/2) pi / omega strictly above a."""
    k = math.ceil(a * omega / math.pi - 0.5)
    if (k + 0.5) * math.pi / omega <= a:
        k += 1
    return k


_EULER_LEVELS = 20
_MIN_PANELS = 4


def integrate_oscillatory_cos(envelope: Integrand, frequency: float, a: float,
                              cfg: Optional[QuadratureConfig] = None, *,
                              decay_rate_hint: float = 1.0,
                              mp_envelope: Optional[Callable] = None,
                              max_dps: int = 150) -> QuadratureResult:
    r"""Evaluate :math:`\int_a^\infty \mathrm{env}(p)\cos(\omega p)\,dp`.

    The domain is split at the zeros of :math:`\cos(\omega p)`; the half-period
    panel integrals then alternate in sign and their partial sums are
    accelerated by repeated averaging over a sliding window.  Convergence is
    declared when two successive accelerated estimates agree to tolerance.

    Parameters
    ----------
    envelope : callable
        Vectorized, positive, eventually monotonically decaying envelope.
    frequency : float
        :math:`\omega \ge 0`.  ``0`` falls back to
        :func:`integrate_semi_infinite_decaying` with ``decay_rate_hint``.
    a : float
        Lower limit.
    cfg : QuadratureConfig, optional
    decay_rate_hint : float, optional
        Only used when ``frequency == 0``.
    mp_envelope : callable, optional
        Scalar version of the envelope accepting and returning
        :mod:`mpmath` numbers.  When given, and the result is so small relative
        to the panel contributions that double-precision cancellation would
        exceed the tolerance, the sum is recomputed with enough decimal digits.
    max_dps : int, optional
        Upper bound on the working precision of that recomputation.

    Raises
    ------
    AccelerationError
        If the panel contributions are not eventually alternating.
    ConvergenceError
        If the panel budget is exhausted.
    """
    cfg = cfg or DEFAULT_CONFIG
    omega = abs(float(frequency))
    if omega == 0.0:
        return integrate_semi_infinite_decaying(envelope, a, decay_rate_hint, cfg)

    def integrand(p):
        return envelope(p) * np.cos(omega * p)

    k = _first_zero_index(a, omega)
    edges_lo = float(a)
    partial_sums = []
    terms = []
    total = 0.0
    total_err = 0.0
    evaluations = 0
    scale = 0.0
    last_estimate = None
    agreements = 0
    estimate = None
    accel_err = 0.0
    eps = np.finfo(float).eps

    def tol(value):
        # never ask for more than the round-off floor of the panel sum
        return max(cfg.tolerance(value), 16 * eps * scale)

    for _ in range(cfg.max_subdivisions):
        hi = (k + 0.5) * math.pi / omega
        panel = integrate_finite(integrand, edges_lo, hi, cfg.replace(abs_tol=cfg.abs_tol * 1e-2))
        evaluations += panel.evaluations
        total_err += panel.error_estimate
        total += panel.value
        scale += abs(panel.value)
        terms.append(panel.value)
        partial_sums.append(total)
        edges_lo = hi
        k += 1
        n = len(partial_sums)
        if n < _MIN_PANELS:
            continue
        # direct convergence: the last panels are negligible
        if abs(panel.value) < 0.01 * tol(total) and abs(terms[-2]) < 0.1 * tol(total):
            estimate = total
            # truncation bound of an alternating, shrinking tail
            accel_err = abs(panel.value)
            break
        window = partial_sums[-min(n, _EULER_LEVELS + 1):]
        estimate = _euler_average(window)
        if last_estimate is not None and abs(estimate - last_estimate) <= 0.1 * tol(estimate):
            agreements += 1
            if agreements >= 2:
                accel_err = abs(estimate - last_estimate)
                break
        else:
            agreements = 0
        last_estimate = estimate
    else:
        raise ConvergenceError("oscillatory panel budget exhausted",
                               partial=QuadratureResult(_scalar(estimate), total_err, evaluations, False))

    tail = terms[-min(len(terms), _EULER_LEVELS + 1):]
    signs = [np.sign(np.real(v)) for v in tail if v != 0]
    if len(signs) > 2 and any(s1 == s2 for s1, s2 in zip(signs, signs[1:])):
        if abs(tail[-1]) > tol(estimate):
            raise AccelerationError("panel contributions are not alternating")
    err = total_err + accel_err
    roundoff = 64 * np.finfo(float).eps * scale
    result = QuadratureResult(_scalar(estimate), float(err + roundoff), evaluations,
                              bool(err + roundoff <= cfg.tolerance(estimate)))
    if mp_envelope is not None and roundoff > 0.1 * cfg.rel_tol * abs(estimate):
        return _oscillatory_cos_mp(mp_envelope, omega, float(a), cfg, result, scale, max_dps)
    return result


def _oscillatory_cos_mp(env, omega, a, cfg, seed, scale, max_dps):
    """Multiprecision repetition of the panel sum for heavily cancelling integrals."""
    import mpmath

    estimate = abs(seed.value) if seed.value != 0 else 1e-300
    estimate = max(estimate, 1e-300)
    evaluations = seed.evaluations
    value = None
    for _ in range(4):
        digits_lost = max(0.0, math.log10(scale / estimate))
        dps = int(min(max_dps, 20 + digits_lost + math.log10(1.0 / cfg.rel_tol)))
        # the caller's envelope uses the global mpmath context, so the working
        # precision is raised there for the duration of the sum
        with mpmath.workdps(dps):
            value, err, n_eval = _mp_panel_sum(mpmath.mp, env, omega, a, cfg, estimate)
        evaluations += n_eval
        new_estimate = max(abs(float(value)), 1e-300)
        if digits_lost >= math.log10(scale / new_estimate) - 1 or dps >= max_dps:
            return QuadratureResult(float(value), float(err), evaluations, True)
        estimate = new_estimate
    return QuadratureResult(float(value), float(err), evaluations, True)


@functools.lru_cache(maxsize=32)
def _mp_gauss_legendre_cached(degree, prec):
    import mpmath
    from mpmath.calculus.quadrature import GaussLegendre

    with mpmath.workprec(prec):
        return tuple(GaussLegendre(mpmath.mp).calc_nodes(degree, prec))


def _mp_gauss_legendre(ctx, degree):
    # nodes computed at a slightly higher, rounded precision are reused across calls
    return _mp_gauss_legendre_cached(degree, 128 * (ctx.prec // 128 + 1))


def _mp_panel(ctx, f, lo, hi, rules, tol, depth=0):
    """Compare two Gauss-Legendre orders on [lo, hi]; bisect on disagreement."""
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    vals = []
    for nodes in rules:
        vals.append(half * ctx.fsum(w * f(mid + half * x) for x, w in nodes))
    n_eval = sum(len(r) for r in rules)
    diff = abs(vals[1] - vals[0])
    if diff <= tol or depth >= 12:
        return vals[1], diff, n_eval
    v1, e1, n1 = _mp_panel(ctx, f, lo, mid, rules, tol / 2, depth + 1)
    v2, e2, n2 = _mp_panel(ctx, f, mid, hi, rules, tol / 2, depth + 1)
    return v1 + v2, e1 + e2, n_eval + n1 + n2


_MP_EULER_LEVELS = 60


def _mp_panel_sum(ctx, env, omega, a, cfg, magnitude):
    target = ctx.mpf(magnitude) * ctx.mpf(cfg.rel_tol) * ctx.mpf("1e-3")
    rules = [_mp_gauss_legendre(ctx, 4), _mp_gauss_legendre(ctx, 5)]
    w = ctx.mpf(omega)

    def f(p):
        return env(p) * ctx.cos(w * p)

    k = _first_zero_index(a, omega)
    lo = ctx.mpf(a)
    total = ctx.mpf(0)
    partial = []
    err_total = ctx.mpf(0)
    n_eval = 0
    last = None
    agreements = 0
    estimate = None
    for _ in range(max(cfg.max_subdivisions, 4000)):
        hi = (k + ctx.mpf(1) / 2) * ctx.pi / w
        v, e, n = _mp_panel(ctx, f, lo, hi, rules, target * ctx.mpf("1e-2"))
        n_eval += n
        err_total += e
        total += v
        partial.append(total)
        lo = hi
        k += 1
        if len(partial) < _MIN_PANELS:
            continue
        window = partial[-min(len(partial), _MP_EULER_LEVELS + 1):]
        estimate = _euler_average(window)
        if last is not None and abs(estimate - last) <= target:
            agreements += 1
            if agreements >= 2:
                return estimate, float(err_total + abs(estimate - last)), n_eval
        else:
            agreements = 0
        last = estimate
    raise ConvergenceError("multiprecision oscillatory sum did not converge",
                           partial=QuadratureResult(float(estimate), math.inf, n_eval, False))


# ---------------------------------------------------------------------------
# Principal values
# ---------------------------------------------------------------------------

def principal_value(f: Integrand, poles: Sequence[float], a: float, b: float,
                    cfg: Optional[QuadratureConfig] = None, *,
                    eps0: Optional[float] = None) -> QuadratureResult:
    r"""Cauchy principal value of :math:`\int_a^b f` with first-order poles.

    Around each pole :math:`p` a window :math:`[p-D, p+D]` (half the distance
    to the nearest neighbouring pole or endpoint) is folded onto
    :math:`g(u) = f(p+u) + f(p-u)`, which is bounded and even in :math:`u`.
    The excised integral :math:`I(\epsilon) = \int_{|y-p|>\epsilon} f` is
    evaluated for :math:`\epsilon \in \{\epsilon_0, \epsilon_0/2, \epsilon_0/4, \epsilon_0/8\}`
    and extrapolated to :math:`\epsilon\to0`; because :math:`g` is even the
    excision error contains only odd powers of :math:`\epsilon`, so the
    Richardson table uses the factors 2 and 8.  The two entries of its last
    column must agree to tolerance.

    Parameters
    ----------
    f : callable
        Vectorized integrand; it is never evaluated exactly at a pole.
    poles : sequence of float
        Pole locations, strictly inside ``(a, b)``.
    a, b : float
        Limits, ``a < b``.
    cfg : QuadratureConfig, optional
    eps0 : float, optional
        Initial excision half-width.  Defaults to ``1e-3`` times the smallest
        distance between poles or between a pole and an endpoint.

    Raises
    ------
    PoleSeparationError
        If a pole is not strictly inside ``(a, b)`` or poles are closer than
        ``4 * eps0``.
    ConvergenceError
        If the extrapolants disagree beyond tolerance.
    """
    cfg = cfg or DEFAULT_CONFIG
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError("principal_value requires a < b")
    ps = sorted(float(p) for p in poles)
    if not ps:
        return integrate_finite(f, a, b, cfg)
    if ps[0] <= a or ps[-1] >= b:
        raise PoleSeparationError("poles must lie strictly inside (a, b)")
    points = [a] + ps + [b]
    gaps = [points[i + 1] - points[i] for i in range(len(points) - 1)]
    separation = min(gaps)
    if eps0 is None:
        eps0 = 1e-3 * separation
    pole_gaps = [ps[i + 1] - ps[i] for i in range(len(ps) - 1)]
    if separation <= 0 or (pole_gaps and min(pole_gaps) <= 4 * eps0) or eps0 >= separation / 2:
        raise PoleSeparationError("poles are too close to each other or to an endpoint")

    sub_cfg = cfg.replace(abs_tol=cfg.abs_tol / (4 * len(ps) + 2))
    total = 0.0
    total_err = 0.0
    evaluations = 0
    halfwidths = []
    for i, p in enumerate(ps):
        left = p - points[i]
        right = points[i + 2] - p
        halfwidths.append(0.5 * min(left, right))
    # regular pieces between folded windows
    cursor = a
    for p, d in zip(ps, halfwidths):
        if p - d > cursor:
            r = integrate_finite(f, cursor, p - d, sub_cfg)
            total += r.value
            total_err += r.error_estimate
            evaluations += r.evaluations
        cursor = p + d
    if cursor < b:
        r = integrate_finite(f, cursor, b, sub_cfg)
        total += r.value
        total_err += r.error_estimate
        evaluations += r.evaluations

    excised = [total, total, total, total]
    for p, d in zip(ps, halfwidths):
        def g(u, p=p):
            return np.asarray(f(p + u)) + np.asarray(f(p - u))
        base = integrate_finite(g, eps0, d, sub_cfg)
        acc = base.value
        evaluations += base.evaluations
        total_err += base.error_estimate
        excised[0] += acc
        for level in range(1, 4):
            inner = integrate_finite(g, eps0 / 2 ** level, eps0 / 2 ** (level - 1), sub_cfg)
            evaluations += inner.evaluations
            total_err += inner.error_estimate
            acc = acc + inner.value
            excised[level] += acc

    # two Richardson columns: eliminate eps, then eps^3
    first = [2 * excised[i + 1] - excised[i] for i in range(3)]
    second = [(8 * first[i + 1] - first[i]) / 7 for i in range(2)]
    value = second[1]
    spread = abs(second[1] - second[0])
    if spread > 10 * cfg.tolerance(value) + total_err:
        raise ConvergenceError("principal-value extrapolants disagree",
                               partial=QuadratureResult(_scalar(value), spread + total_err,
                                                        evaluations, False))
    return QuadratureResult(_scalar(value), float(total_err + spread), evaluations, True)
