"""
KCC geometry engine.

Given any second-order system  ẍⁱ + 2Gⁱ(x, y, t) = 0  this module computes the
nonlinear and Berwald connections, the five KCC invariants, the deviation
curvature tensor and the Jacobi-stability classification of its spectrum.
All functions are pure; analytic callbacks on the system are used when present.
"""
import logging
import math
from typing import Dict, Iterable

import numpy as np

from .differences import central_difference, first_step, relative_step, scalar_difference
from .errors import EvaluationError, ParameterError
from .models import ConnectionData, Jet, KccInvariants, KccReport, SodeSystem, SpectralSummary

logger = logging.getLogger(__name__)


# ==================== EVALUATION ====================

def _g(sys: SodeSystem, x: np.ndarray, y: np.ndarray, t: float, jet: Jet) -> np.ndarray:
    values = np.asarray(sys.g_eval(x, y, t), dtype=float).reshape(sys.dimension)
    if not np.all(np.isfinite(values)):
        logger.error(f"{sys.name}: non-finite G at {jet!r}")
        raise EvaluationError(f"non-finite G^i for system '{sys.name}' at {jet!r}", jet=jet)
    return values


def _callback(func, x, y, t, shape) -> np.ndarray:
    return np.asarray(func(x, y, t), dtype=float).reshape(shape)


def _check_jet(sys: SodeSystem, jet: Jet) -> None:
    if jet.dimension != sys.dimension:
        raise ParameterError(
            f"jet has dimension {jet.dimension}, system '{sys.name}' has {sys.dimension}"
        )


# ==================== CONNECTIONS ====================

def _n_at(sys, x, y, t, jet) -> np.ndarray:
    n = sys.dimension
    if sys.analytic_dG_dy is not None:
        return _callback(sys.analytic_dG_dy, x, y, t, (n, n))
    return central_difference(lambda yy: _g(sys, x, yy, t, jet), y, first_step)


def _berwald_at(sys, x, y, t, jet) -> np.ndarray:
    n = sys.dimension
    if sys.analytic_berwald is not None:
        return _callback(sys.analytic_berwald, x, y, t, (n, n, n))
    rule = relative_step(sys.second_step)
    if sys.analytic_dG_dy is not None:
        raw = central_difference(lambda yy: _callback(sys.analytic_dG_dy, x, yy, t, (n, n)), y, rule)
    else:
        raw = central_difference(
            lambda yo: central_difference(lambda yi: _g(sys, x, yi, t, jet), yo, rule), y, rule
        )
    return 0.5 * (raw + raw.swapaxes(1, 2))


def _dg_dx_at(sys, x, y, t, jet) -> np.ndarray:
    n = sys.dimension
    if sys.analytic_dG_dx is not None:
        return _callback(sys.analytic_dG_dx, x, y, t, (n, n))
    return central_difference(lambda xx: _g(sys, xx, y, t, jet), x, first_step)


def _dn_dx_at(sys, x, y, t, jet) -> np.ndarray:
    n = sys.dimension
    if sys.analytic_dn_dx is not None:
        return _callback(sys.analytic_dn_dx, x, y, t, (n, n, n))
    rule = relative_step(sys.second_step)
    if sys.analytic_dG_dy is not None:
        return central_difference(lambda xx: _callback(sys.analytic_dG_dy, xx, y, t, (n, n)), x, rule)
    return central_difference(
        lambda xx: central_difference(lambda yy: _g(sys, xx, yy, t, jet), y, rule), x, rule
    )


def _dn_dt_at(sys, x, y, t, jet) -> np.ndarray:
    n = sys.dimension
    if not sys.time_dependent:
        return np.zeros((n, n))
    rule = relative_step(sys.second_step)
    if sys.analytic_dG_dy is not None:
        return scalar_difference(lambda tt: _callback(sys.analytic_dG_dy, x, y, tt, (n, n)), t, rule)
    return scalar_difference(
        lambda tt: central_difference(lambda yy: _g(sys, x, yy, tt, jet), y, rule), t, rule
    )


def nonlinear_connection(sys: SodeSystem, jet: Jet) -> np.ndarray:
    """
    Nonlinear connection Nⁱⱼ = ∂Gⁱ/∂yʲ, indexed [i, j].

    Raises:
        EvaluationError: G is not finite near the jet
    """
    _check_jet(sys, jet)
    return _n_at(sys, jet.x, jet.y, jet.t, jet)


def berwald_connection(sys: SodeSystem, jet: Jet) -> np.ndarray:
    """Berwald connection Gⁱⱼₗ = ∂Nⁱⱼ/∂yˡ, indexed [i, j, l], symmetric in (j, l)."""
    _check_jet(sys, jet)
    return _berwald_at(sys, jet.x, jet.y, jet.t, jet)


def connection_data(sys: SodeSystem, jet: Jet) -> ConnectionData:
    _check_jet(sys, jet)
    x, y, t = jet.x, jet.y, jet.t
    return ConnectionData(
        n_coeffs=_n_at(sys, x, y, t, jet),
        berwald=_berwald_at(sys, x, y, t, jet),
        dg_dx=_dg_dx_at(sys, x, y, t, jet),
        dn_dx=_dn_dx_at(sys, x, y, t, jet),
        dn_dt=_dn_dt_at(sys, x, y, t, jet),
    )


# ==================== INVARIANTS ====================

def first_invariant(sys: SodeSystem, jet: Jet) -> np.ndarray:
    """External force εⁱ = 2Gⁱ − Nⁱⱼyʲ."""
    _check_jet(sys, jet)
    g = _g(sys, jet.x, jet.y, jet.t, jet)
    n_coeffs = _n_at(sys, jet.x, jet.y, jet.t, jet)
    return 2.0 * g - n_coeffs @ jet.y


def _p_at(sys, x, y, t, jet) -> np.ndarray:
    g = _g(sys, x, y, t, jet)
    n_coeffs = _n_at(sys, x, y, t, jet)
    return (
        -2.0 * _dg_dx_at(sys, x, y, t, jet)
        - 2.0 * np.einsum("l,ijl->ij", g, _berwald_at(sys, x, y, t, jet))
        + np.einsum("l,ijl->ij", y, _dn_dx_at(sys, x, y, t, jet))
        + n_coeffs @ n_coeffs
        + _dn_dt_at(sys, x, y, t, jet)
    )


def deviation_curvature(sys: SodeSystem, jet: Jet) -> np.ndarray:
    """
    Deviation curvature tensor Pⁱⱼ (second KCC invariant).

    Pⁱⱼ = −2∂Gⁱ/∂xʲ − 2GˡGⁱⱼₗ + yˡ∂Nⁱⱼ/∂xˡ + NⁱₗNˡⱼ + ∂Nⁱⱼ/∂t,
    stored with the upper index i as the row.
    """
    _check_jet(sys, jet)
    return _p_at(sys, jet.x, jet.y, jet.t, jet)


def _p3_at(sys, x, y, t, jet) -> np.ndarray:
    rule = relative_step(sys.second_step)
    d = central_difference(lambda yy: _p_at(sys, x, yy, t, jet), y, rule)
    return (d - d.swapaxes(1, 2)) / 3.0


def _torsion_at(sys, x, y, t, jet) -> np.ndarray:
    n_coeffs = _n_at(sys, x, y, t, jet)
    berwald = _berwald_at(sys, x, y, t, jet)
    dn_dx = _dn_dx_at(sys, x, y, t, jet)
    # half[i, j, k] = ∂Nⁱⱼ/∂xᵏ − Nˡₖ ∂Nⁱⱼ/∂yˡ
    half = dn_dx - np.einsum("lk,ijl->ijk", n_coeffs, berwald)
    return half - half.swapaxes(1, 2)


def higher_invariants(sys: SodeSystem, jet: Jet) -> KccInvariants:
    """
    All five KCC invariants plus Douglas and torsion tensors.

    Args:
        sys: the system
        jet: evaluation point

    Returns:
        KccInvariants with
        p3[i,j,k]   = ⅓(∂Pⁱⱼ/∂yᵏ − ∂Pⁱₖ/∂yʲ),
        p4[i,j,k,l] = ∂p3ⁱⱼₖ/∂yˡ,
        douglas[i,j,k,l] = ∂Gⁱⱼₖ/∂yˡ,
        torsion_b[i,j,k] = ∂Nⁱⱼ/∂xᵏ − ∂Nⁱₖ/∂xʲ + Nᵐⱼ∂Nⁱₖ/∂yᵐ − Nˡₖ∂Nⁱⱼ/∂yˡ,
        b4[i,j,k,l] = ∂Bⁱₖₗ/∂yʲ.
    """
    _check_jet(sys, jet)
    x, y, t = jet.x, jet.y, jet.t
    rule = relative_step(sys.second_step)

    p_tensor = _p_at(sys, x, y, t, jet)
    p3 = _p3_at(sys, x, y, t, jet)
    p4 = central_difference(lambda yy: _p3_at(sys, x, yy, t, jet), y, rule)
    douglas = central_difference(lambda yy: _berwald_at(sys, x, yy, t, jet), y, rule)
    torsion_b = _torsion_at(sys, x, y, t, jet)
    b4 = np.moveaxis(central_difference(lambda yy: _torsion_at(sys, x, yy, t, jet), y, rule), 3, 1)

    return KccInvariants(
        epsilon=first_invariant(sys, jet),
        p_tensor=p_tensor,
        p_trace=float(np.trace(p_tensor)),
        p3=p3,
        p4=p4,
        douglas=douglas,
        torsion_b=torsion_b,
        b4=b4,
    )


# ==================== SPECTRUM ====================

def spectral_summary(p: np.ndarray) -> SpectralSummary:
    """
    Eigenvalues and Jacobi classification of a 2×2 deviation curvature.

    Real eigenvalues are computed without cancellation (larger root first,
    smaller one from the determinant). Stability follows Routh–Hurwitz:
    stable iff trace < 0 and det > 0. A zero trace or determinant is
    reported as marginal and not stable.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (2, 2):
        raise ParameterError(f"spectral summary needs a 2x2 matrix, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise EvaluationError("deviation curvature has non-finite entries")

    (p11, p12), (p21, p22) = p
    trace = p11 + p22
    det = p11 * p22 - p12 * p21
    half_trace = 0.5 * trace
    # quarter discriminant: (λ₊ − λ₋)² / 4
    disc = (0.5 * (p11 - p22)) ** 2 + p12 * p21

    if disc >= 0.0:
        root = math.sqrt(disc)
        big = half_trace + math.copysign(root, half_trace)
        small = det / big if big != 0.0 else 0.0
        lambda_plus = complex(max(big, small))
        lambda_minus = complex(min(big, small))
    else:
        root = math.sqrt(-disc)
        lambda_plus = complex(half_trace, root)
        lambda_minus = complex(half_trace, -root)

    marginal = trace == 0.0 or det == 0.0
    return SpectralSummary(
        lambda_plus=lambda_plus,
        lambda_minus=lambda_minus,
        kappa=half_trace,
        theta=(lambda_plus - lambda_minus) / 2.0,
        trace_condition=trace,
        det_condition=det,
        jacobi_stable=bool(trace < 0.0 and det > 0.0),
        marginal=bool(marginal),
    )


# ==================== DEVIATION ====================

def deviation_ode_rhs(sys: SodeSystem, jet: Jet, xi: np.ndarray, xi_dot: np.ndarray) -> np.ndarray:
    """Deviation acceleration ξ̈ = −2Nξ̇ − 2(∂G/∂x)ξ at the reference jet."""
    _check_jet(sys, jet)
    xi = np.asarray(xi, dtype=float)
    xi_dot = np.asarray(xi_dot, dtype=float)
    n_coeffs = _n_at(sys, jet.x, jet.y, jet.t, jet)
    dg_dx = _dg_dx_at(sys, jet.x, jet.y, jet.t, jet)
    return -2.0 * n_coeffs @ xi_dot - 2.0 * dg_dx @ xi


def deviation_coefficients(sys: SodeSystem, jet: Jet):
    """(N, ∂G/∂x) at a jet, for integrating deviations with frozen coefficients."""
    _check_jet(sys, jet)
    return _n_at(sys, jet.x, jet.y, jet.t, jet), _dg_dx_at(sys, jet.x, jet.y, jet.t, jet)


# ==================== REPORTS ====================

def kcc_report(sys: SodeSystem, jet: Jet) -> KccReport:
    notes = []
    if not sys.contains(jet):
        notes.append("jet outside the declared validity box")
        logger.warning(f"{sys.name}: {jet!r} outside validity box")
    invariants = higher_invariants(sys, jet)
    spectrum = spectral_summary(invariants.p_tensor) if sys.dimension == 2 else None
    return KccReport(
        jet=jet,
        connection=connection_data(sys, jet),
        invariants=invariants,
        spectrum=spectrum,
        notes=tuple(notes),
    )


def check_analytic_derivatives(sys: SodeSystem, jets: Iterable[Jet]) -> Dict[str, float]:
    """
    Compare each analytic callback with central differences.

    Returns:
        Callback name -> worst relative deviation over the jets
        (max-norm of the difference over max(1, max-norm of the reference)).
    """
    reference = sys.without_analytic()
    checks = {
        "analytic_dG_dy": (sys.analytic_dG_dy, _n_at),
        "analytic_dG_dx": (sys.analytic_dG_dx, _dg_dx_at),
        "analytic_berwald": (sys.analytic_berwald, _berwald_at),
        "analytic_dn_dx": (sys.analytic_dn_dx, _dn_dx_at),
    }
    worst: Dict[str, float] = {name: 0.0 for name, (func, _) in checks.items() if func is not None}
    for jet in jets:
        _check_jet(sys, jet)
        for name in worst:
            func, numeric = checks[name]
            expected = numeric(reference, jet.x, jet.y, jet.t, jet)
            actual = np.asarray(func(jet.x, jet.y, jet.t), dtype=float).reshape(expected.shape)
            scale = max(1.0, float(np.max(np.abs(expected))))
            worst[name] = max(worst[name], float(np.max(np.abs(actual - expected))) / scale)
    for name, value in worst.items():
        if value > 1e-6:
            logger.warning(f"{sys.name}: {name} deviates from differences by {value:.3e}")
    return worst
