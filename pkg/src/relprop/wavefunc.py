r"""Time evolution of a compact initial wave function by convolution.

The Salpeter propagator is a distribution: besides its principal-value part
it carries the light-cone terms :math:`\tfrac12 e^{imt}[\delta(x-t)+\delta(x+t)]`.
An initial state :math:`\psi_0` supported on :math:`[-\delta/2, \delta/2]`
therefore evolves as

.. math::
    \psi(t, x) = \mathrm{PV}\!\int G(x', t)\,\psi_0(x - x')\,dx'
               + \tfrac12\big[\psi_0(x-t) + \psi_0(x+t)\big]e^{imt}.

The convolution runs over the support window :math:`|x - x'| < \delta/2`.
Inside it the pole part :math:`e^{imt}\,it/(\pi(x'^2-t^2))` of the kernel is
integrated by :func:`relprop.quadrature.principal_value`, and the remainder,
which is only logarithmically singular at the cone, is integrated separately
with the cone points as breakpoints.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import DomainError, GridError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_finite, principal_value
from .salpeter import salpeter_closed, salpeter_regular_part

__all__ = [
    "WaveState",
    "initial_cosine_bump",
    "default_grid",
    "evolve",
    "wave_amplitude",
    "initial_state",
    "total_probability",
]

#: Poles closer than this (relative to ``delta``) to a window edge are ignored:
#: the initial state vanishes there, so the integrand stays bounded.
_EDGE_GUARD = 1e-9

#: Default PV exclusion half-width as a fraction of the smallest pole distance.
_PV_EPS_FRACTION = 1e-3


@dataclass(frozen=True)
class WaveState:
    """Wave function sampled on a uniform grid.

    Attributes
    ----------
    grid : ndarray of float
        Strictly increasing, uniformly spaced positions.
    amplitudes : ndarray of complex
        :math:`\\psi(t, x)` at the grid points.
    time, mass, delta : float
        Evolution time, mass and initial support width.
    """

    grid: np.ndarray
    amplitudes: np.ndarray
    time: float
    mass: float
    delta: float

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        amps = np.array(self.amplitudes, dtype=complex)
        if grid.ndim != 1 or grid.size < 2 or grid.shape != amps.shape:
            raise GridError("grid and amplitudes must be 1-d arrays of equal length >= 2")
        steps = np.diff(grid)
        if not np.all(steps > 0):
            raise GridError("grid must be strictly increasing")
        h = (grid[-1] - grid[0]) / (grid.size - 1)
        if np.max(np.abs(steps - h)) > 1e-12 * max(abs(h), np.max(np.abs(grid))):
            raise GridError("grid must be uniform")
        if not np.all(np.isfinite(amps)):
            raise GridError("amplitudes must be finite")
        if self.time < 0 or self.mass < 0 or not self.delta > 0:
            raise DomainError("need time >= 0, mass >= 0 and delta > 0")
        grid.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def spacing(self) -> float:
        return float((self.grid[-1] - self.grid[0]) / (self.grid.size - 1))

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def initial_cosine_bump(delta: float) -> Callable:
    r"""Normalized half-cosine :math:`\sqrt{2/\delta}\cos(\pi x/\delta)` on :math:`|x| < \delta/2`.

    The returned function is vectorized, zero outside the support and
    continuous at its edges; :math:`\int\psi_0^2 dx = 1`.

    Examples
    --------
    >>> psi0 = initial_cosine_bump(2.0)
    >>> float(psi0(0.0))
    1.0
    """
    if not (delta > 0 and math.isfinite(delta)):
        raise DomainError("delta must be positive and finite")
    amp = math.sqrt(2.0 / delta)
    half = 0.5 * delta

    def psi0(x):
        x = np.asarray(x, dtype=float)
        out = np.where(np.abs(x) < half, amp * np.cos(np.pi * x / delta), 0.0)
        return float(out) if out.ndim == 0 else out

    return psi0


def default_grid(delta: float, t: float, m: float, n_points: int = 4001) -> Tuple[float, float, int]:
    r"""Symmetric grid ``(x_min, x_max, n_points)`` covering the evolved state.

    The outgoing pulses occupy :math:`|x| \le t + \delta/2`; beyond it the
    wave decays like :math:`e^{-m|x|}` (``m > 0``) or :math:`|x|^{-2}`
    (``m = 0``), so the half-width adds ``8/m`` or ``20 delta`` respectively.
    """
    if m > 0:
        half = t + 0.5 * delta + 8.0 / m
    else:
        half = t + 0.5 * delta + 20.0 * delta
    return -half, half, int(n_points)


def _amplitude(x, t, m, delta, psi0, phase, cfg, eps_scale=1.0):
    half = 0.5 * delta
    lo, hi = x - half, x + half
    guard = _EDGE_GUARD * delta
    poles = [p for p in (-t, t) if lo + guard < p < hi - guard]

    def shifted(xp):
        return psi0(x - np.asarray(xp))

    if not poles:
        # the window may still touch the cone at an edge, where psi0 vanishes
        cone = [p for p in (-t, t) if lo - guard <= p <= hi + guard]
        if cone:
            return _split_integral(lambda xp: _closed_safe(xp, t, m) * shifted(xp),
                                   lo, hi, cone, cfg)
        return integrate_finite(lambda xp: salpeter_closed(xp, t, m) * shifted(xp),
                                lo, hi, cfg).value

    def singular(xp):
        xp = np.asarray(xp, dtype=float)
        return phase * 1j * t / (np.pi * (xp - t) * (xp + t)) * shifted(xp)

    points = [lo] + sorted(poles) + [hi]
    separation = min(b - a for a, b in zip(points[:-1], points[1:]))
    eps0 = eps_scale * _PV_EPS_FRACTION * separation
    value = principal_value(singular, poles, lo, hi, cfg, eps0=eps0).value
    if m > 0:
        value += _split_integral(lambda xp: _regular_safe(xp, t, m) * shifted(xp),
                                 lo, hi, poles, cfg)
    return value


def _closed_safe(xp, t, m):
    xp = np.asarray(xp, dtype=float)
    out = np.zeros(xp.shape, dtype=complex)
    ok = np.abs(np.abs(xp) - t) > 1e-12 * t
    if ok.any():
        out[ok] = salpeter_closed(xp[ok], t, m)
    return out


def _regular_safe(xp, t, m):
    xp = np.asarray(xp, dtype=float)
    out = np.zeros(xp.shape, dtype=complex)
    ok = np.abs(np.abs(xp) - t) > 1e-12 * t
    if ok.any():
        out[ok] = salpeter_regular_part(xp[ok], t, m)
    return out


def _split_integral(f, lo, hi, breaks, cfg):
    pts = [lo] + sorted(b for b in breaks if lo < b < hi) + [hi]
    return sum(integrate_finite(f, a, b, cfg).value for a, b in zip(pts[:-1], pts[1:]))


def wave_amplitude(x: float, delta: float, t: float, m: float,
                   cfg: Optional[QuadratureConfig] = None, *, eps_scale: float = 1.0) -> complex:
    """Evolved amplitude at a single position (see :func:`evolve`)."""
    if not (t > 0 and math.isfinite(t)):
        raise DomainError("t must be positive and finite")
    if not (m >= 0 and math.isfinite(m)):
        raise DomainError("m must be non-negative and finite")
    psi0 = initial_cosine_bump(delta)
    phase = cmath.exp(1j * m * t)
    x = float(x)
    residue = 0.5 * (psi0(x - t) + psi0(x + t)) * phase
    return complex(_amplitude(x, t, m, delta, psi0, phase, cfg or DEFAULT_CONFIG, eps_scale) + residue)


def evolve(delta: float, t: float, m: float,
           grid_spec: Optional[Tuple[float, float, int]] = None,
           cfg: Optional[QuadratureConfig] = None, *, eps_scale: float = 1.0) -> WaveState:
    r"""Evolve the cosine bump of width ``delta`` to time ``t``.

    Parameters
    ----------
    delta : float
        Width of the initial support.
    t : float
        Evolution time, ``t > 0``.
    m : float
        Mass, ``m >= 0``.
    grid_spec : (x_min, x_max, n_points), optional
        Uniform output grid; defaults to :func:`default_grid`.
    cfg : QuadratureConfig, optional
    eps_scale : float, optional
        Multiplies the initial principal-value exclusion half-width
        (``1e-3`` of the distance from a pole to the nearest window edge or
        other pole); the extrapolated result should not depend on it.

    Returns
    -------
    WaveState

    Raises
    ------
    GridError
        If the grid does not cover the pulses at :math:`|x| \le t + \delta/2`
        or has fewer than two points.
    """
    if not (t > 0 and math.isfinite(t)):
        raise DomainError("t must be positive and finite")
    if not (m >= 0 and math.isfinite(m)):
        raise DomainError("m must be non-negative and finite")
    psi0 = initial_cosine_bump(delta)
    cfg = cfg or DEFAULT_CONFIG
    x_min, x_max, n = grid_spec if grid_spec is not None else default_grid(delta, t, m)
    n = int(n)
    if n < 2 or not x_min < x_max:
        raise GridError("grid needs x_min < x_max and at least two points")
    reach = t + 0.5 * delta
    if x_min > -reach or x_max < reach:
        raise GridError(f"grid [{x_min}, {x_max}] does not cover |x| <= {reach}")
    grid = np.linspace(x_min, x_max, n)
    phase = cmath.exp(1j * m * t)
    amps = np.empty(n, dtype=complex)
    # the initial state is even, so on a symmetric grid the right half is
    # mirrored onto the left; parity then holds exactly
    symmetric = x_min == -x_max
    start = n // 2 if symmetric else 0
    for i in range(start, n):
        x = float(grid[i])
        residue = 0.5 * (psi0(x - t) + psi0(x + t)) * phase
        amps[i] = _amplitude(x, t, m, delta, psi0, phase, cfg, eps_scale) + residue
    if symmetric:
        amps[:start] = amps[n - 1:n - 1 - start:-1]
    return WaveState(grid=grid, amplitudes=amps, time=float(t), mass=float(m), delta=float(delta))


def initial_state(delta: float, grid_spec: Tuple[float, float, int]) -> WaveState:
    """The cosine bump sampled on a grid, as a time-zero :class:`WaveState`."""
    x_min, x_max, n = grid_spec
    grid = np.linspace(x_min, x_max, int(n))
    return WaveState(grid=grid, amplitudes=initial_cosine_bump(delta)(grid).astype(complex),
                     time=0.0, mass=0.0, delta=float(delta))


def total_probability(state: WaveState) -> float:
    r"""Trapezoid sum of :math:`|\psi|^2` over the grid."""
    dens = state.density
    h = state.spacing
    return float(h * (dens.sum() - 0.5 * (dens[0] + dens[-1])))
