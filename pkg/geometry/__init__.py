from .errors import (
    DomainError,
    EvaluationError,
    IntegrationError,
    KccError,
    OutputError,
    ParameterError,
)
from .models import ConnectionData, Jet, KccInvariants, KccReport, SodeSystem, SpectralSummary
from .engine import (
    berwald_connection,
    check_analytic_derivatives,
    connection_data,
    deviation_coefficients,
    deviation_curvature,
    deviation_ode_rhs,
    first_invariant,
    higher_invariants,
    kcc_report,
    nonlinear_connection,
    spectral_summary,
)
