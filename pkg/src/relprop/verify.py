r"""Cross-method and cross-model consistency checks.

Every check returns a :class:`ValidationReport`: a list of cases, each with
its inputs, the relation being tested, the observed deviation, the case
tolerance and a pass flag.  Evaluation is serial and ordered, so a report is
reproducible bit for bit.

Checks
------
* :func:`check_scaling` -- :math:`G(\lambda x, \lambda t, m) = \lambda^{-1}G(x, t, \lambda m)`
  for both propagators.
* :func:`check_wick` -- the diffusion kernel equals the quantum kernel at
  imaginary time, :math:`G_B(x,\tau) = -e^{2m\tau}G_S(x, i\tau)`; the factor
  comes from continuing the phase :math:`e^{imt}` and the :math:`i` of the
  outer representation.
* :func:`check_klein_gordon` -- finite-difference residual of
  :math:`(-\partial_x^2 + \partial_t^2 + m^2)G = 0`.
* :func:`cross_validate` -- closed form vs integral representations (and the
  series where it is valid) on a sweep grid.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .baeumer import baeumer_closed, baeumer_integral_outer, outer_sign
from .exceptions import RelpropError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_semi_infinite_decaying
from .salpeter import (
    salpeter_closed,
    salpeter_integral_inner,
    salpeter_integral_outer,
)
from .series import phase_calibration, series_propagator
from .specfun import bessel_k1, hankel1_order1

__all__ = [
    "ValidationCase",
    "ValidationReport",
    "SweepGrid",
    "check_scaling",
    "check_wick",
    "check_klein_gordon",
    "cross_validate",
    "hankel_convention_check",
    "merge_reports",
    "default_scaling_points",
    "run_suite",
    "SUITES",
]

SUITES = ("scaling", "wick", "kg", "cross", "all")


@dataclass(frozen=True)
class ValidationCase:
    """One checked relation."""

    inputs: Dict[str, float]
    relation: str
    deviation: float
    tolerance: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "inputs": dict(self.inputs),
            "relation": self.relation,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validation suite."""

    suite: str
    cases: List[ValidationCase]
    sign_calibrations: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")

    @property
    def worst_deviation(self) -> float:
        """Largest observed deviation over all cases."""
        if not self.cases:
            return 0.0
        return max(c.deviation for c in self.cases)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> List[ValidationCase]:
        return [c for c in self.cases if not c.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "worst_deviation": self.worst_deviation,
            "n_cases": len(self.cases),
            "n_failed": len(self.failures),
            "sign_calibrations": dict(sorted(self.sign_calibrations.items())),
            "cases": [c.to_dict() for c in self.cases],
        }


def _rel(a, b) -> float:
    a = complex(a)
    b = complex(b)
    if b == 0:
        return abs(a)
    return abs(a - b) / abs(b)


def merge_reports(reports: Sequence[ValidationReport], suite: str = "all") -> ValidationReport:
    """Concatenate the cases and calibrations of several reports."""
    cases: List[ValidationCase] = []
    signs: Dict[str, float] = {}
    for r in reports:
        cases.extend(r.cases)
        signs.update(r.sign_calibrations)
    return ValidationReport(suite=suite, cases=cases, sign_calibrations=signs)


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------

def default_scaling_points(n: int = 50, seed: int = 20240607) -> List[Tuple[float, float]]:
    """``n`` reproducible random ``(x, t)`` pairs with ``||x| - t| > 0.05 t``."""
    rng = np.random.default_rng(seed)
    points: List[Tuple[float, float]] = []
    while len(points) < n:
        t = float(rng.uniform(0.05, 3.0))
        x = float(rng.uniform(-5.0, 5.0))
        if abs(abs(x) - t) > 0.05 * t:
            points.append((x, t))
    return points


def check_scaling(m: float, lam: float, points: Sequence[Tuple[float, float]],
                  tolerance: float = 1e-9, perturb: float = 0.0) -> ValidationReport:
    r"""Check :math:`G(\lambda x,\lambda t,m) = \lambda^{-1}G(x,t,\lambda m)` for both models.

    Points on (or within ``1e-9 t`` of) the light cone are skipped and noted.
    ``perturb`` multiplies the left-hand side by ``1 + perturb`` (fault
    injection for testing the harness).
    """
    if not (m > 0 and lam > 0):
        raise ValueError("check_scaling requires m > 0 and lambda > 0")
    cases = []
    for x, t in points:
        inputs = {"x": float(x), "t": float(t), "m": float(m), "lambda": float(lam)}
        if abs(abs(x) - t) <= 1e-9 * t:
            cases.append(ValidationCase(inputs, "scaling: skipped on the light cone", 0.0,
                                        tolerance, note="skipped"))
            continue
        for model, fn in (("salpeter", salpeter_closed), ("baeumer", baeumer_closed)):
            lhs = complex(fn(lam * x, lam * t, m)) * (1.0 + perturb)
            rhs = complex(fn(x, t, lam * m)) / lam
            cases.append(ValidationCase(dict(inputs, model=model),
                                        f"{model}: G(lx, lt, m) = G(x, t, lm)/l",
                                        _rel(lhs, rhs), tolerance))
    return ValidationReport("scaling", cases)


# ---------------------------------------------------------------------------
# Wick rotation
# ---------------------------------------------------------------------------

def _salpeter_outer_at_imaginary_time(x: float, tau: float, m: float,
                                      cfg: QuadratureConfig) -> complex:
    r"""Outer representation :math:`\frac{ie^{imt}}{\pi}\int_m^\infty\sinh(\sqrt{q^2-m^2}t)e^{-qx}dq` at :math:`t = i\tau`.

    The integrand is evaluated literally in complex arithmetic with
    :math:`q = m + s^2`; no use is made of :math:`\sinh(iz) = i\sin z`.
    """
    t = 1j * tau

    def integrand(s):
        q = m + s * s
        root = s * np.sqrt(2.0 * m + s * s)
        return 2.0 * s * np.sinh(root * t) * np.exp(-(q - m) * x)

    value = integrate_semi_infinite_decaying(integrand, 0.0, math.sqrt(x), cfg).value
    return 1j * cmath.exp(1j * m * t) / math.pi * value * math.exp(-m * x)


def _salpeter_closed_at_imaginary_time(x: float, tau: float, m: float) -> complex:
    r"""Outer closed form :math:`\frac{imt\,e^{imt}}{\pi s}K_1(ms)`, :math:`s=\sqrt{x^2-t^2}`, at :math:`t = i\tau`."""
    t = 1j * tau
    s = math.hypot(x, tau)
    if m == 0.0:
        return 1j * t / (math.pi * (x * x - t * t))
    return 1j * m * t * cmath.exp(1j * m * t) * float(bessel_k1(m * s)) / (math.pi * s)


def wick_factor(tau: float, m: float) -> float:
    r"""Factor :math:`-e^{2m\tau}` with :math:`G_B(x,\tau) = -e^{2m\tau}G_S(x,i\tau)`."""
    return -math.exp(2.0 * m * tau)


def check_wick(points: Sequence[Tuple[float, float, float]],
               cfg: Optional[QuadratureConfig] = None, tolerance: float = 1e-6,
               closed_tolerance: float = 1e-12, perturb: float = 0.0) -> ValidationReport:
    r"""Compare the diffusion kernel with the quantum kernel at imaginary time.

    For each ``(x, t, m)`` with ``x > t`` two relations are checked, each
    split into a magnitude case and a phase case so that a pure phase
    convention mismatch is distinguishable from a numerical error:

    * integral: :func:`relprop.baeumer.baeumer_integral_outer` against the
      Salpeter outer representation evaluated at complex time;
    * closed: :func:`relprop.baeumer.baeumer_closed` against the Salpeter
      :math:`K_1` form evaluated at complex time.

    Both are compared after multiplying the quantum side by :func:`wick_factor`.
    """
    cfg = (cfg or DEFAULT_CONFIG).replace(abs_tol=1e-300)
    cases = []
    for x, t, m in points:
        inputs = {"x": float(x), "t": float(t), "m": float(m)}
        if not x > t:
            raise ValueError("check_wick requires x > t")
        pairs = [
            ("integral", baeumer_integral_outer(x, t, m, cfg),
             _salpeter_outer_at_imaginary_time(x, t, m, cfg), tolerance),
            ("closed", baeumer_closed(x, t, m),
             _salpeter_closed_at_imaginary_time(x, t, m), closed_tolerance),
        ]
        for label, diffusion, quantum, tol in pairs:
            rotated = wick_factor(t, m) * quantum
            diffusion = complex(diffusion) * (1.0 + perturb)
            mag = abs(abs(diffusion) - abs(rotated)) / abs(rotated)
            phase = abs(cmath.phase(diffusion / rotated)) if rotated != 0 else math.inf
            cases.append(ValidationCase(dict(inputs), f"wick/{label}: |G_B| = |-e^(2mt) G_S(it)|",
                                        mag, tol))
            cases.append(ValidationCase(dict(inputs), f"wick/{label}: arg G_B = arg(-e^(2mt) G_S(it))",
                                        phase, tol))
    return ValidationReport("wick", cases, {"baeumer_outer": float(outer_sign())})


# ---------------------------------------------------------------------------
# Klein-Gordon residual
# ---------------------------------------------------------------------------

def kg_residual(x: float, t: float, m: float, h: float) -> complex:
    r"""Five-point (cross stencil) residual of :math:`(-\partial_x^2+\partial_t^2+m^2)K`.

    :math:`K = e^{-imt}G` removes the rest-energy phase carried by
    :func:`relprop.salpeter.salpeter_closed`; the Klein-Gordon operator
    annihilates :math:`K`, not :math:`G`.
    """
    def k(xx, tt):
        return complex(salpeter_closed(xx, tt, m)) * cmath.exp(-1j * m * tt)

    g = k(x, t)
    gxx = (k(x + h, t) - 2.0 * g + k(x - h, t)) / (h * h)
    gtt = (k(x, t + h) - 2.0 * g + k(x, t - h)) / (h * h)
    return -gxx + gtt + m * m * g


def check_klein_gordon(points: Sequence[Tuple[float, float]], m: float,
                       h_list: Sequence[float] = (1e-2, 5e-3, 2.5e-3),
                       residual_factor: float = 1e-4, order_window: float = 0.2,
                       perturb: float = 0.0) -> ValidationReport:
    r"""Finite-difference Klein-Gordon residual of the closed Salpeter form.

    For each point the residual is evaluated at every ``h``; the convergence
    order is the least-squares slope of :math:`\ln|R|` against :math:`\ln h`.
    Two cases are recorded: ``|order - 2| <= order_window`` (taken as met when
    every residual is at rounding level) and
    ``|R(h_min)| <= residual_factor * |m^2 G|`` (for ``m = 0`` the reference is
    ``|G|/h_min^2``, i.e. the size of a single second difference).
    ``perturb`` adds ``perturb * G`` to the residual.

    Raises
    ------
    ValueError
        For points with ``||x| - t| <= 0.2 t`` or ``x, t <= 5 max(h)``.
    """
    h_list = sorted(float(h) for h in h_list)
    if len(h_list) < 2:
        raise ValueError("need at least two step sizes")
    hmax = h_list[-1]
    cases = []
    for x, t in points:
        if abs(abs(x) - t) <= 0.2 * t or not (abs(x) > 5 * hmax and t > 5 * hmax):
            raise ValueError(f"point ({x}, {t}) is too close to the light cone or the origin")
        g = complex(salpeter_closed(x, t, m))
        res = [abs(kg_residual(x, t, m, h) + perturb * g) for h in h_list]
        inputs = {"x": float(x), "t": float(t), "m": float(m)}
        scale = abs(m * m * g) if m > 0 else abs(g) / h_list[0] ** 2
        if max(res) <= 1e-10 * scale:
            # the stencil is exact up to rounding (massless kernel); no order to fit
            order_dev, note = 0.0, "residual at rounding level"
        else:
            order = float(np.polyfit(np.log(h_list), np.log(res), 1)[0])
            order_dev, note = abs(order - 2.0), f"order={order:.4f}"
        cases.append(ValidationCase(dict(inputs, h_min=h_list[0], h_max=hmax),
                                    "kg: fitted convergence order = 2", order_dev,
                                    order_window, note=note))
        cases.append(ValidationCase(dict(inputs, h=h_list[0]),
                                    "kg: residual at finest h relative to |m^2 G|",
                                    res[0] / scale, residual_factor))
    return ValidationReport("kg", cases)


# ---------------------------------------------------------------------------
# method agreement sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepGrid:
    """Times and positions (as multiples of ``t``) for :func:`cross_validate`.

    Points with ``|x - t| < cone_band * t`` are excluded.
    """

    times: Tuple[float, ...] = tuple(2.0 ** n / 100.0 for n in range(9))
    x_fractions: Tuple[float, ...] = tuple(np.linspace(0.0, 5.0, 101).tolist())
    cone_band: float = 0.05

    def points(self):
        for t in self.times:
            for f in self.x_fractions:
                if abs(f - 1.0) >= self.cone_band:
                    yield float(f * t), float(t)


def cross_validate(grid_spec: Optional[SweepGrid] = None, m_list: Sequence[float] = (0.0, 1.0),
                   cfg: Optional[QuadratureConfig] = None, *, integral_tolerance: float = 1e-6,
                   massless_tolerance: float = 1e-8, series_tolerance: float = 1e-3,
                   series_order: int = 10, include_series: bool = True,
                   perturb: float = 0.0) -> ValidationReport:
    r"""Closed form vs integral representation (and series) on a sweep grid.

    The integral is the inner representation for ``|x| < t`` and the outer
    one beyond.  Where ``mt <= 1`` and ``m|x| <= 1`` the series of order
    ``series_order`` is compared as well; its tolerance is
    ``max(series_tolerance, |last term| / |G|)``, i.e. the truncation
    estimate.  Failures are recorded, never raised; quadrature errors become
    failing cases.  ``perturb`` scales the integral values by ``1 + perturb``.
    """
    grid_spec = grid_spec or SweepGrid()
    cfg = cfg or DEFAULT_CONFIG
    cases = []
    for m in m_list:
        for x, t in grid_spec.points():
            inputs = {"x": x, "t": t, "m": float(m)}
            method = "inner" if x < t else "outer"
            tol = massless_tolerance if m == 0 else integral_tolerance
            closed = complex(salpeter_closed(x, t, m))
            try:
                fn = salpeter_integral_inner if x < t else salpeter_integral_outer
                integral = complex(fn(x, t, m, cfg)) * (1.0 + perturb)
                dev, note = _rel(integral, closed), ""
            except RelpropError as exc:
                dev, note = math.inf, f"{type(exc).__name__}: {exc}"
            cases.append(ValidationCase(dict(inputs), f"cross: closed = integral ({method})",
                                        dev, tol, note))
            if include_series and m > 0 and m * t <= 1.0 and m * x <= 1.0:
                ev = series_propagator(x, t, m, series_order)
                stol = max(series_tolerance, ev.last_term_magnitude / abs(closed))
                cases.append(ValidationCase(dict(inputs, order=series_order),
                                            "cross: closed = series", _rel(ev.value, closed), stol))
    signs = {}
    if include_series and any(m > 0 for m in m_list):
        signs["series_phase"] = float(cmath.phase(phase_calibration()))
    return ValidationReport("cross", cases, signs)


def hankel_convention_check(x: float = 0.3, t: float = 1.0, m: float = 1.0,
                            cfg: Optional[QuadratureConfig] = None) -> Dict[str, float]:
    r"""Decide between :math:`H^{(1)}_1(ms)` and :math:`H^{(2)}_1(ms)` inside the cone.

    Evaluates :math:`-\frac{mt\,e^{imt}}{2s}H_1(ms)` with both Hankel kinds and
    compares with the inner integral representation at ``(x, t, m)``.
    Returns the two relative deviations; the adopted convention
    (:math:`H^{(2)}`) has the small one.
    """
    s = math.sqrt(t * t - x * x)
    pref = -m * t * cmath.exp(1j * m * t) / (2.0 * s)
    h1 = complex(hankel1_order1(m * s))
    ref = complex(salpeter_integral_inner(x, t, m, cfg))
    return {
        "hankel1": _rel(pref * h1, ref),
        "hankel2": _rel(pref * h1.conjugate(), ref),
    }


# ---------------------------------------------------------------------------
# suites with default inputs
# ---------------------------------------------------------------------------

DEFAULT_WICK_POINTS = ((2.0, 1.0, 1.0), (3.0, 0.5, 1.0), (1.5, 1.0, 0.5), (4.0, 2.0, 2.0), (2.0, 1.0, 0.0))
DEFAULT_KG_POINTS = ((0.4, 1.0), (2.0, 1.0), (0.2, 0.5), (3.0, 1.5), (1.0, 3.0))


def run_suite(suite: str, cfg: Optional[QuadratureConfig] = None,
              perturb: float = 0.0) -> ValidationReport:
    """Run a named suite with its default inputs (``all`` runs every suite)."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    if suite == "all":
        return merge_reports([run_suite(s, cfg, perturb) for s in SUITES[:-1]], "all")
    if suite == "scaling":
        pts = default_scaling_points()
        return merge_reports([check_scaling(1.0, lam, pts, perturb=perturb)
                              for lam in (0.5, 2.0, 10.0)], "scaling")
    if suite == "wick":
        return check_wick(DEFAULT_WICK_POINTS, cfg, perturb=perturb)
    if suite == "kg":
        return merge_reports([check_klein_gordon(DEFAULT_KG_POINTS, m, perturb=perturb)
                              for m in (1.0, 0.0)], "kg")
    return cross_validate(cfg=cfg, perturb=perturb)
