"""Relativistic free propagators in 1+1 dimensions.

Two kernels are provided:

* the Salpeter propagator, kernel of
  :math:`i\\partial_t\\psi = (\\sqrt{m^2-\\partial_x^2} - m)\\psi`
  (closed Bessel forms, contour-rotated integrals, a split perturbative series);
* the Baeumer propagator, its Wick-rotated counterpart, a probability density
  interpolating between Cauchy and Gaussian shapes.

Supporting modules implement the special functions (:mod:`relprop.specfun`),
quadrature (:mod:`relprop.quadrature`), wave-packet evolution
(:mod:`relprop.wavefunc`), consistency checks (:mod:`relprop.verify`) and
the command-line tool (:mod:`relprop.cli`).
"""

from .baeumer import (
    DiffusionSummary,
    baeumer_cauchy_limit,
    baeumer_closed,
    baeumer_gaussian_limit,
    baeumer_integral_inner,
    baeumer_integral_outer,
    baeumer_log_closed,
    diffusion_scan,
    outer_sign,
    second_moment,
    tail_rate,
)
from .exceptions import (
    AccelerationError,
    ConvergenceError,
    DecayError,
    DomainError,
    GridError,
    LightConeSingularity,
    PoleSeparationError,
    RelpropError,
    SignCalibrationError,
    SingularityError,
    UnderflowWarning,
)
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadratureResult,
    integrate_finite,
    integrate_oscillatory_cos,
    integrate_semi_infinite_decaying,
    principal_value,
)
from .salpeter import (
    PropagatorQuery,
    PropagatorSample,
    salpeter_classical,
    salpeter_closed,
    salpeter_integral_inner,
    salpeter_integral_outer,
    salpeter_massless,
    salpeter_regular_part,
    singular_asymptote,
)
from .series import SeriesEvaluation, series_g1, series_g2, series_propagator
from .specfun import (
    bessel_k1,
    bessel_k1_scaled,
    expint_en,
    f_n,
    g1_coefficients,
    g2_coefficients,
    hankel1_order1,
    hyp1f2,
)
from .verify import (
    ValidationReport,
    check_klein_gordon,
    check_scaling,
    check_wick,
    cross_validate,
)
from .wavefunc import WaveState, evolve, initial_cosine_bump, total_probability

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
