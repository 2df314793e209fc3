"""
Equilibria of the Lorenz system: closed-form deviation curvature,
Jacobi stability (the S± theorem) and the linear cross-check.
"""
import cmath
import itertools
import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np

from geometry.engine import spectral_summary
from geometry.errors import DomainError

from .models import EquilibriumAnalysis, EquilibriumKind, LinearStability, LorenzParams, TheoremResult

logger = logging.getLogger(__name__)

# Linear classification labels (2×2 block at the origin)
SADDLE = "saddle"
CENTER = "center"
DEGENERATE = "degenerate"
STABLE_NODE = "stable node"
STABLE_FOCUS = "stable focus"
UNSTABLE_NODE = "unstable node"
UNSTABLE_FOCUS = "unstable focus"
# Full three-dimensional flow at S±
STABLE_FOCUS_NODE = "stable focus-node"
SADDLE_FOCUS = "saddle focus"


# ==================== LOCATIONS ====================

def _branch_x(p: LorenzParams) -> float:
    radicand = p.beta * (p.rho - 1.0)
    if p.rho <= 1.0:
        raise DomainError(f"S± exist only for rho > 1 (rho={p.rho!r})")
    if radicand < 0.0:
        raise DomainError(f"beta*(rho-1) = {radicand!r} < 0, S± are not real")
    return math.sqrt(radicand)


def equilibrium_location(p: LorenzParams, kind: EquilibriumKind) -> Tuple[float, float]:
    """(X¹*, X²*) of an equilibrium."""
    if kind is EquilibriumKind.S0:
        return 0.0, 0.0
    x = _branch_x(p)
    return (x if kind is EquilibriumKind.SPLUS else -x), p.rho - 1.0


def equilibrium_kinds(p: LorenzParams) -> List[EquilibriumKind]:
    if p.rho <= 1.0:
        return [EquilibriumKind.S0]
    return [EquilibriumKind.S0, EquilibriumKind.SPLUS, EquilibriumKind.SMINUS]


def rho_crit(p: LorenzParams) -> Optional[float]:
    """Onset of chaos σ(σ+β+3)/(σ−β−1), defined only for σ > β + 1."""
    if p.sigma <= p.beta + 1.0:
        return None
    return p.sigma * (p.sigma + p.beta + 3.0) / (p.sigma - p.beta - 1.0)


# ==================== CLOSED FORMS ====================

def equilibrium_p_closed_form(p: LorenzParams, kind: EquilibriumKind) -> np.ndarray:
    """
    Deviation curvature at an equilibrium.

    S₀: diag(−(1−ρ)σ + (1+σ)²/4, β²)
    S±: [[(1+σ)²/4, −σx], [x(β(1−7σ)+1−σ²)/(4σ), β² − β(ρ−1)]],  x = ±√(β(ρ−1))
    """
    p.require_reducible()
    sigma, rho, beta = p.as_tuple()
    if kind is EquilibriumKind.S0:
        return np.array([
            [-(1.0 - rho) * sigma + (1.0 + sigma) ** 2 / 4.0, 0.0],
            [0.0, beta * beta],
        ])
    x, _ = equilibrium_location(p, kind)
    return np.array([
        [(1.0 + sigma) ** 2 / 4.0, -sigma * x],
        [x * (beta * (1.0 - 7.0 * sigma) + 1.0 - sigma ** 2) / (4.0 * sigma), beta * beta - beta * (rho - 1.0)],
    ])


def closed_form_eigenvalues(p: LorenzParams, kind: EquilibriumKind) -> Tuple[complex, complex]:
    """
    Eigenvalues of the equilibrium deviation curvature as closed expressions.

    S₀ gives ([σ(4ρ+σ−2)+1]/4, β²); S₊ and S₋ share one pair.
    """
    sigma, rho, beta = p.as_tuple()
    if kind is EquilibriumKind.S0:
        return complex((sigma * (4.0 * rho + sigma - 2.0) + 1.0) / 4.0), complex(beta * beta)
    _branch_x(p)
    kappa, theta = closed_form_kappa_theta(p, kind)
    return kappa + theta, kappa - theta


def closed_form_kappa_theta(p: LorenzParams, kind: EquilibriumKind) -> Tuple[float, complex]:
    """κ = half trace, θ = half eigenvalue gap (complex when the spectrum is)."""
    sigma, rho, beta = p.as_tuple()
    if kind is EquilibriumKind.S0:
        lambda_plus, lambda_minus = closed_form_eigenvalues(p, kind)
        return ((lambda_plus + lambda_minus) / 2.0).real, (lambda_plus - lambda_minus) / 2.0
    _branch_x(p)
    kappa = (4.0 * beta * (beta - rho + 1.0) + (sigma + 1.0) ** 2) / 8.0
    inner = (beta * (beta - rho + 1.0) - (sigma + 1.0) ** 2 / 4.0) ** 2 + beta * (rho - 1.0) * (
        beta * (7.0 * sigma - 1.0) + sigma ** 2 - 1.0
    )
    return kappa, 0.5 * cmath.sqrt(inner)


# ==================== STABILITY ====================

def jacobi_theorem(p: LorenzParams) -> TheoremResult:
    """
    Jacobi stability of S± from the parameters alone.

    Stable iff condition1 < 0 and condition2 > 0, where condition1 is the trace
    and condition2 the determinant of the deviation curvature at S±.

    Raises:
        DomainError: rho <= 1 (S± do not exist)
    """
    _branch_x(p)
    sigma, rho, beta = p.as_tuple()
    condition1 = beta * (beta - rho + 1.0) + (sigma + 1.0) ** 2 / 4.0
    condition2 = (beta / 4.0) * (
        beta * (-7.0 * rho * sigma + rho + sigma * (sigma + 9.0)) - 2.0 * sigma * (rho - 1.0) * (sigma + 1.0)
    )
    marginal = condition1 == 0.0 or condition2 == 0.0
    return TheoremResult(
        condition1=condition1,
        condition2=condition2,
        stable=condition1 < 0.0 and condition2 > 0.0,
        marginal=marginal,
        note="boundary case, classified as not stable" if marginal else None,
    )


def _classify_planar(tau: float, delta: float) -> str:
    if delta < 0:
        return SADDLE
    if delta == 0:
        return DEGENERATE
    if tau == 0:
        return CENTER
    focus = tau * tau - 4.0 * delta < 0
    if tau < 0:
        return STABLE_FOCUS if focus else STABLE_NODE
    return UNSTABLE_FOCUS if focus else UNSTABLE_NODE


def linear_stability_s0(p: LorenzParams) -> LinearStability:
    """
    Linearization of the (X, Y) block at the origin, A = [[−σ, σ], [ρ, −1]].

    The larger KCC eigenvalue of the origin equals (τ² − 4Δ)/4.
    """
    tau = -p.sigma - 1.0
    delta = p.sigma * (1.0 - p.rho)
    root = cmath.sqrt(tau * tau - 4.0 * delta)
    lambda1 = (tau + root) / 2.0
    lambda2 = (tau - root) / 2.0
    return LinearStability(
        tau=tau,
        delta=delta,
        eigenvalues=(lambda1, lambda2),
        label=_classify_planar(tau, delta),
        stable=lambda1.real < 0 and lambda2.real < 0,
    )


def s0_kcc_lambda_from_linear(p: LorenzParams) -> float:
    linear = linear_stability_s0(p)
    return (linear.tau ** 2 - 4.0 * linear.delta) / 4.0


def lorenz_jacobian(p: LorenzParams, x: float, y: float, z: float) -> np.ndarray:
    return np.array([
        [-p.sigma, p.sigma, 0.0],
        [p.rho - z, -1.0, -x],
        [y, x, -p.beta],
    ])


def linear_stability_full(p: LorenzParams, kind: EquilibriumKind) -> LinearStability:
    """Eigenvalues of the three-dimensional Lorenz Jacobian at an equilibrium."""
    x1, x2 = equilibrium_location(p, kind)
    jac = lorenz_jacobian(p, x1, x1, x2)
    eigenvalues = tuple(complex(v) for v in sorted(np.linalg.eigvals(jac), key=lambda v: (-v.real, -v.imag)))
    stable = all(v.real < 0 for v in eigenvalues)
    oscillating = any(v.imag != 0 for v in eigenvalues)
    if stable:
        label = STABLE_FOCUS_NODE if oscillating else STABLE_NODE
    elif all(v.real > 0 for v in eigenvalues):
        label = UNSTABLE_FOCUS if oscillating else UNSTABLE_NODE
    else:
        label = SADDLE_FOCUS if oscillating else SADDLE
    return LinearStability(
        tau=float(np.trace(jac)),
        delta=float(np.linalg.det(jac)),
        eigenvalues=eigenvalues,
        label=label,
        stable=stable,
    )


# ==================== ANALYSIS ====================

def analyze_equilibrium(p: LorenzParams, kind: EquilibriumKind) -> EquilibriumAnalysis:
    x1, x2 = equilibrium_location(p, kind)
    p_matrix = equilibrium_p_closed_form(p, kind)
    spectrum = spectral_summary(p_matrix)
    if kind is EquilibriumKind.S0:
        linear = linear_stability_s0(p)
        condition1, condition2 = spectrum.trace_condition, spectrum.det_condition
    else:
        linear = linear_stability_full(p, kind)
        theorem = jacobi_theorem(p)
        condition1, condition2 = theorem.condition1, theorem.condition2
    return EquilibriumAnalysis(
        kind=kind,
        x1_star=x1,
        x2_star=x2,
        p_matrix=p_matrix,
        spectrum=spectrum,
        theorem_condition1=condition1,
        theorem_condition2=condition2,
        linear=linear,
    )


def equilibria(p: LorenzParams) -> List[EquilibriumAnalysis]:
    """
    All equilibria with their Jacobi and linear classification.

    Returns:
        [S₀] when ρ <= 1, otherwise [S₀, S₊, S₋]

    Raises:
        DomainError: rho > 1 but beta*(rho-1) < 0
    """
    analyses = [analyze_equilibrium(p, kind) for kind in equilibrium_kinds(p)]
    logger.debug(
        f"equilibria at {p.as_tuple()}: "
        + ", ".join(f"{a.kind.value}={a.jacobi_label}" for a in analyses)
    )
    return analyses


def stable_parameter_points(
    sigmas: Iterable[float],
    rhos: Iterable[float],
    betas: Iterable[float],
) -> List[Tuple[float, float, float]]:
    """Grid points (σ, ρ, β) with ρ > 1 where the theorem declares S± Jacobi stable."""
    found = []
    for sigma, rho, beta in itertools.product(sigmas, rhos, betas):
        if rho <= 1.0 or sigma == 0.0 or beta * (rho - 1.0) < 0.0:
            continue
        params = LorenzParams.model_construct(sigma=float(sigma), rho=float(rho), beta=float(beta))
        if jacobi_theorem(params).stable:
            found.append((float(sigma), float(rho), float(beta)))
    logger.info(f"Grid search: {len(found)} Jacobi-stable parameter points")
    return found
