"""heatzeta: zeta-regularized spectral invariants from explicit model spectra.

Core layers:

* ``spectral``    -- spectra, certified theta sums, heat-trace models
* ``mellin``      -- one-variable continuation: determinants, torsion, eta
* ``multizeta``   -- two-variable continuation and multi-torsion
* ``geometry``    -- circle/torus factors, finite quotients, twisted traces
* ``matrixmodel`` -- finite-dimensional complexes and closed-form checks
* ``cli``         -- config-driven runner emitting manifests, tables, figures
"""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    CapabilityError,
    ConditioningError,
    DomainError,
    ValidationError,
)
from .spectral import (
    AdmissibleExpansion,
    BigradedSpectrum,
    GradedSpectrum,
    HeatTraceModel,
    LatticeFamily,
    Spectrum,
    circle_dirac_trace_model,
    circle_spectrum,
    eval_weighted_trace,
    poisson_dual_eval,
    spectrum_trace_model,
    theta_sum,
    truncate_with_tail_bound,
    weighted_sum,
)
from .mellin import (
    ZetaResult,
    circle_eta,
    continue_zeta,
    eta_invariant,
    eta_variation_coefficient,
    eta_variation_smooth,
    log_det,
    log_torsion,
    variation_coefficient,
)
from .multizeta import (
    MultiAdmissibleData,
    MultiZetaResult,
    SeparableTerm,
    continue_multizeta,
    from_separable,
    multi_torsion,
)
from .geometry import (
    CircleFactor,
    GroupElement,
    QuotientGeometry,
    Reflection,
    Rotation,
    TorusFactor,
    factor_trace_model,
    factor_twisted_trace,
    klein_bottle_quotient,
    quotient_weighted_trace,
    trivial_quotient,
    validate_geometry,
)
