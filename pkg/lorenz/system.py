"""
The Lorenz system and its reduction to a two-dimensional second-order system.

With X¹ = X, X² = Z, Y¹ = Ẋ, Y² = Ż the flow becomes ẍⁱ + 2Gⁱ = 0 with

    G¹ = ½[(1+σ)Y¹ + σX¹X² + σ(1−ρ)X¹]
    G² = ½[cX¹Y¹ − (Y¹)²/σ + (1−ρ+β)(X¹)² + (X¹)²X² − β²X²],  c = (1+σ+β)/σ − 2

and Y is recovered as X¹ + Y¹/σ.
"""
import logging
from typing import Optional, Sequence, Union

import numpy as np

from geometry.models import Jet, SodeSystem

from .models import LorenzParams, LorenzState, ReducedState

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def lorenz_vector_field(p: LorenzParams, s: Sequence[float]) -> np.ndarray:
    """(σ(Y−X), −XZ + ρX − Y, XY − βZ)."""
    x, y, z = s
    return np.array([
        p.sigma * (y - x),
        -x * z + p.rho * x - y,
        x * y - p.beta * z,
    ])


def g_functions(p: LorenzParams, r: Sequence[float]) -> np.ndarray:
    """(G¹, G²) at a reduced state (x1, x2, y1, y2)."""
    c = p.coupling
    x1, x2, y1, _ = r
    sigma, rho, beta = p.as_tuple()
    return np.array([
        0.5 * ((1.0 + sigma) * y1 + sigma * x1 * x2 + sigma * (1.0 - rho) * x1),
        0.5 * (c * x1 * y1 - y1 * y1 / sigma + (1.0 - rho + beta) * x1 * x1 + x1 * x1 * x2 - beta * beta * x2),
    ])


def reduce(p: LorenzParams, s: Sequence[float], s_dot: Optional[Sequence[float]] = None) -> ReducedState:
    """(X, Z, Ẋ, Ż); the derivative defaults to the Lorenz vector field at s."""
    if s_dot is None:
        s_dot = lorenz_vector_field(p, s)
    return ReducedState(float(s[0]), float(s[2]), float(s_dot[0]), float(s_dot[2]))


def recover_y(p: LorenzParams, r: Sequence[float]) -> float:
    p.require_reducible()
    return r[0] + r[2] / p.sigma


def recover_state(p: LorenzParams, r: Sequence[float]) -> LorenzState:
    return LorenzState(float(r[0]), float(recover_y(p, r)), float(r[1]))


def reduced_jet(r: Sequence[float], t: float = 0.0) -> Jet:
    return Jet(x=[r[0], r[1]], y=[r[2], r[3]], t=t)


def reduced_rhs(p: LorenzParams):
    """First-order form (x1, x2, y1, y2)' = (y1, y2, −2G¹, −2G²) of the reduced system."""
    p.require_reducible()

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        g = g_functions(p, state)
        return np.array([state[2], state[3], -2.0 * g[0], -2.0 * g[1]])

    return rhs


def reduction_residual(p: LorenzParams, r: Sequence[float]) -> float:
    """
    Ż − (XY − βZ) with Y recovered from the reduced state.

    Zero on every trajectory that started on the Lorenz flow; along reduced
    integrations it grows like e^{βt} from whatever error is present.
    """
    return r[3] - (r[0] * recover_y(p, r) - p.beta * r[1])


# ==================== SODE SYSTEM ====================

def lorenz_system(p: LorenzParams, analytic: bool = True) -> SodeSystem:
    """
    The reduced Lorenz system for the geometry engine.

    Args:
        p: Lorenz parameters (σ must be nonzero)
        analytic: attach analytic first and second derivatives of G
    """
    p.require_reducible()
    sigma, rho, beta = p.as_tuple()
    c = p.coupling

    def g_eval(x, y, t):
        return g_functions(p, (x[0], x[1], y[0], y[1]))

    if not analytic:
        return SodeSystem(dimension=2, g_eval=g_eval, name=f"lorenz{p.as_tuple()}")

    def dg_dy(x, y, t):
        return np.array([
            [0.5 * (1.0 + sigma), 0.0],
            [0.5 * c * x[0] - y[0] / sigma, 0.0],
        ])

    def dg_dx(x, y, t):
        return np.array([
            [0.5 * sigma * (x[1] + 1.0 - rho), 0.5 * sigma * x[0]],
            [0.5 * c * y[0] + (1.0 - rho + beta) * x[0] + x[0] * x[1], 0.5 * (x[0] * x[0] - beta * beta)],
        ])

    def berwald(x, y, t):
        return closed_form_berwald(p)

    def dn_dx(x, y, t):
        out = np.zeros((2, 2, 2))
        out[1, 0, 0] = 0.5 * c
        return out

    return SodeSystem(
        dimension=2,
        g_eval=g_eval,
        analytic_dG_dy=dg_dy,
        analytic_dG_dx=dg_dx,
        analytic_berwald=berwald,
        analytic_dn_dx=dn_dx,
        name=f"lorenz{p.as_tuple()}",
    )


# ==================== CLOSED FORMS ====================

def closed_form_connection(p: LorenzParams, x1: ArrayLike, y1: ArrayLike) -> np.ndarray:
    """N¹₁ = (1+σ)/2, N²₁ = ½[(1+β)/σ − 1]X¹ − Y¹/σ; the second column vanishes."""
    x1 = np.asarray(x1, dtype=float)
    y1 = np.asarray(y1, dtype=float)
    out = np.zeros(x1.shape + (2, 2))
    out[..., 0, 0] = 0.5 * (1.0 + p.sigma)
    out[..., 1, 0] = 0.5 * ((1.0 + p.beta) / p.sigma - 1.0) * x1 - y1 / p.sigma
    return out


def closed_form_berwald(p: LorenzParams) -> np.ndarray:
    p.require_reducible()
    out = np.zeros((2, 2, 2))
    out[1, 0, 0] = -1.0 / p.sigma
    return out


def closed_form_first_invariant(p: LorenzParams, r: Sequence[float]) -> np.ndarray:
    x1, x2, y1, _ = r
    sigma, rho, beta = p.as_tuple()
    return np.array([
        0.5 * (1.0 + sigma) * y1 + sigma * x1 * x2 + sigma * (1.0 - rho) * x1,
        0.5 * ((1.0 + beta) / sigma - 1.0) * x1 * y1 + (1.0 - rho + beta) * x1 * x1 + x1 * x1 * x2 - beta * beta * x2,
    ])


def closed_form_p(p: LorenzParams, x1: ArrayLike, x2: ArrayLike, y1: ArrayLike) -> np.ndarray:
    """
    Deviation curvature of the Lorenz system, broadcast over arrays.

    Returns:
        Array of shape broadcast(x1, x2, y1).shape + (2, 2)
    """
    p.require_reducible()
    sigma, rho, beta = p.as_tuple()
    x1, x2, y1 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, y1)))
    out = np.empty(x1.shape + (2, 2))
    out[..., 0, 0] = -sigma * x2 - sigma * (1.0 - rho) + (1.0 + sigma) ** 2 / 4.0
    out[..., 0, 1] = -sigma * x1
    out[..., 1, 0] = (
        (1.0 - beta / (2.0 * sigma)) * y1
        + (1.0 - sigma ** 2 - 7.0 * beta * sigma + beta + 4.0 * (rho - 1.0) * sigma) / (4.0 * sigma) * x1
        - x1 * x2
    )
    out[..., 1, 1] = -x1 * x1 + beta * beta
    return out


def closed_form_p_trace(p: LorenzParams, x1: ArrayLike, x2: ArrayLike) -> np.ndarray:
    sigma, rho, beta = p.as_tuple()
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return -sigma * x2 - sigma * (1.0 - rho) + (1.0 + sigma) ** 2 / 4.0 - x1 * x1 + beta * beta


def closed_form_torsion(p: LorenzParams) -> np.ndarray:
    """Torsion of the reduced Lorenz connection; every term carries N¹₂ = 0."""
    p.require_reducible()
    return np.zeros((2, 2, 2))
