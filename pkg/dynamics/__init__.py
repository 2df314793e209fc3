from .models import (
    Anchor,
    ChaosOnset,
    DeviationTrace,
    Exponents,
    IntegratorConfig,
    IntegratorMethod,
    Trajectory,
)
from .integrators import integrate, integrate_lorenz, integrate_reduced, p_along_trajectory, rk4_integrate, single_sample
from .deviation import (
    closed_form_deviation_s0,
    closed_form_deviation_s0_derivatives,
    closed_form_trace_s0,
    delta_estimate_s0,
    find_t0,
    first_sign_change,
    focusing_tendency,
    instability_exponents,
    integrate_deviation,
    kappa0,
    kappa0_closed_form_s0,
    s0_rates,
    signed_curvature,
)
