from .models import (
    EquilibriumAnalysis,
    EquilibriumKind,
    LinearStability,
    LorenzParams,
    LorenzState,
    ReducedState,
    TheoremResult,
)
from .system import (
    closed_form_berwald,
    closed_form_connection,
    closed_form_first_invariant,
    closed_form_p,
    closed_form_p_trace,
    closed_form_torsion,
    g_functions,
    lorenz_system,
    lorenz_vector_field,
    recover_state,
    recover_y,
    reduce,
    reduced_jet,
    reduced_rhs,
    reduction_residual,
)
from .equilibria import (
    closed_form_eigenvalues,
    closed_form_kappa_theta,
    equilibria,
    equilibrium_kinds,
    equilibrium_location,
    equilibrium_p_closed_form,
    jacobi_theorem,
    linear_stability_full,
    linear_stability_s0,
    rho_crit,
    s0_kcc_lambda_from_linear,
    stable_parameter_points,
)
