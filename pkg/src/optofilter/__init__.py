"""Conditional states of a continuously measured, Wiener-filtered optomechanical mirror."""

from .covariance import (
    CovMat2,
    ConditionalState,
    conditional_state,
    covariance_appendix,
    covariance_main,
    covariance_quadrature,
    purity,
)
from .entanglement import (
    NegativityResult,
    TwoModeCovariance,
    assemble_two_mode,
    gie_point,
    log_negativity,
    mode_covariances,
)
from .filter import (
    Susceptibility,
    eval_susceptibility,
    spectrum_conditional,
    spectrum_unconditional,
    wiener_filter,
)
from .params import (
    DerivedParams,
    FilterParams,
    MeasurementCoeffs,
    SystemParams,
    derive,
    figure1_params,
    filter_params,
    from_hz,
    gravitational_delta,
    measurement_coeffs,
)
from .squeezing import (
    SqueezeReport,
    condition_factor,
    omega_ratio_quartic,
    optimal_angle,
    squeeze_report,
    vpp_approx,
)

__version__ = "0.1.0"
