"""
Deviation-vector dynamics of the reduced Lorenz system.

Integrates ξ̈ = −2Nξ̇ − 2(∂G/∂x)ξ with coefficients frozen at an equilibrium or
varying along a reference trajectory, and derives the instability exponents
δ(T) and the signed curvature κ₀ of the deviation curve (ξ¹(t), ξ²(t)).
At the origin the equations decouple and have closed-form solutions.
"""
import itertools
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from geometry.engine import deviation_coefficients, deviation_ode_rhs
from geometry.errors import DomainError, ParameterError
from geometry.models import Jet
from lorenz.equilibria import equilibrium_location
from lorenz.models import LorenzParams
from lorenz.system import lorenz_system, lorenz_vector_field

from .integrators import integrate
from .models import Anchor, ChaosOnset, DeviationTrace, Exponents, IntegratorConfig, Trajectory

logger = logging.getLogger(__name__)

SINGULAR_SPEED = 1e-300
T0_APPROX_NUMERATOR = 1.099
T0_APPROX_SHIFT = 10.02


# ==================== DERIVED SERIES ====================

def _log_rate(values: np.ndarray, initial: float, times: np.ndarray) -> np.ndarray:
    """(1/t)·ln(values/initial), NaN where t = 0 or the ratio is not positive."""
    out = np.full(values.shape, np.nan)
    if initial == 0.0:
        return out
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = values / initial
        valid = (times > 0.0) & (ratio > 0.0) & np.isfinite(ratio)
        out[valid] = np.log(ratio[valid]) / times[valid]
    return out


def signed_curvature(xd1, xd2, xdd1, xdd2) -> np.ndarray:
    """
    κ₀ = (ξ̇¹ξ̈² − ξ̈¹ξ̇²)/(ξ̇¹² + ξ̇²²)^{3/2}, NaN where the speed is below 1e-300.

    Evaluated through the unit tangent so that large deviations do not overflow.
    """
    xd1, xd2, xdd1, xdd2 = (np.asarray(v, dtype=float) for v in (xd1, xd2, xdd1, xdd2))
    speed = np.hypot(xd1, xd2)
    out = np.full(np.broadcast(xd1, xd2).shape, np.nan)
    regular = speed >= SINGULAR_SPEED
    if np.any(regular):
        s = speed[regular]
        out[regular] = ((xd1[regular] / s) * (xdd2[regular] / s) - (xdd1[regular] / s) * (xd2[regular] / s)) / s
    return out


def _build_trace(times, xi, xi_dot, xi_ddot, anchor: Anchor, xi10: float, xi20: float) -> DeviationTrace:
    xi1, xi2 = xi[:, 0], xi[:, 1]
    xi_norm = np.hypot(xi1, xi2)
    kappa = signed_curvature(xi_dot[:, 0], xi_dot[:, 1], xi_ddot[:, 0], xi_ddot[:, 1])
    singular = int(np.count_nonzero(np.isnan(kappa)))
    if singular and (xi10 != 0.0 or xi20 != 0.0):
        logger.warning(f"{singular} samples with vanishing deviation speed; κ₀ marked undefined")
    return DeviationTrace(
        times=np.asarray(times, dtype=float),
        xi1=xi1,
        xi2=xi2,
        xi1_dot=xi_dot[:, 0],
        xi2_dot=xi_dot[:, 1],
        xi1_ddot=xi_ddot[:, 0],
        xi2_ddot=xi_ddot[:, 1],
        xi_norm=xi_norm,
        delta1=_log_rate(xi1, xi10, times),
        delta2=_log_rate(xi2, xi20, times),
        delta=_log_rate(xi_norm, xi10, times),
        kappa0=kappa,
        anchor=anchor,
        xi10=float(xi10),
        xi20=float(xi20),
    )


# ==================== INTEGRATION ====================

def integrate_deviation(
    p: LorenzParams,
    anchor: Anchor,
    ic: Tuple[Sequence[float], Sequence[float]],
    cfg: IntegratorConfig,
    reference: Optional[Trajectory] = None,
) -> DeviationTrace:
    """
    Integrate the deviation equations.

    Args:
        p: Lorenz parameters
        anchor: equilibrium whose coefficients are frozen, or ALONG_TRAJECTORY
        ic: (ξ(0), ξ̇(0))
        cfg: integrator settings
        reference: trajectory whose first state starts the reference flow
            (required for ALONG_TRAJECTORY)

    Returns:
        DeviationTrace with norm, exponent and curvature series

    Raises:
        DomainError: S± anchor with rho <= 1
    """
    anchor = Anchor(anchor)
    p.require_reducible()
    system = lorenz_system(p)
    xi0 = np.asarray(ic[0], dtype=float).reshape(2)
    xi_dot0 = np.asarray(ic[1], dtype=float).reshape(2)

    # Linear in (ξ, ξ̇): integrate unit-size data and rescale
    scale = float(np.linalg.norm(np.concatenate([xi0, xi_dot0])))
    if scale == 0.0:
        scale = 1.0
    w0 = np.concatenate([xi0, xi_dot0]) / scale

    if anchor.equilibrium is not None:
        x1, x2 = equilibrium_location(p, anchor.equilibrium)
        jet = Jet(x=[x1, x2], y=[0.0, 0.0])
        n_coeffs, dg_dx = deviation_coefficients(system, jet)

        def rhs(t, w):
            return np.concatenate([w[2:], -2.0 * n_coeffs @ w[2:] - 2.0 * dg_dx @ w[:2]])

        times, w = integrate(rhs, w0, cfg)
        jets = [jet] * len(times)
    else:
        if reference is None or len(reference) == 0:
            raise ParameterError("deviation along a trajectory needs a reference trajectory")

        def rhs(t, w):
            s = w[:3]
            s_dot = lorenz_vector_field(p, s)
            jet_t = Jet(x=[s[0], s[2]], y=[s_dot[0], s_dot[2]], t=t)
            return np.concatenate([s_dot, w[5:], deviation_ode_rhs(system, jet_t, w[3:5], w[5:])])

        start = np.concatenate([np.asarray(reference.states[0], dtype=float), w0])
        times, augmented = integrate(rhs, start, cfg)
        w = augmented[:, 3:]
        jets = []
        for t, s in zip(times, augmented[:, :3]):
            s_dot = lorenz_vector_field(p, s)
            jets.append(Jet(x=[s[0], s[2]], y=[s_dot[0], s_dot[2]], t=t))

    xi = scale * w[:, :2]
    xi_dot = scale * w[:, 2:]
    xi_ddot = np.array([deviation_ode_rhs(system, j, a, b) for j, a, b in zip(jets, xi, xi_dot)])
    logger.info(
        f"Deviation {anchor.value} at {p.as_tuple()}: {len(times)} samples to t={times[-1]:.6g}, "
        f"|ξ(T)|={float(np.hypot(*xi[-1])):.6e}"
    )
    return _build_trace(times, xi, xi_dot, xi_ddot, anchor, xi_dot0[0], xi_dot0[1])


# ==================== CLOSED FORMS AT THE ORIGIN ====================

def s0_rates(p: LorenzParams) -> Tuple[float, float]:
    """(a, b) with a = √(4ρσ + (σ−1)²), b = σ + 1."""
    sigma, rho, _ = p.as_tuple()
    radicand = 4.0 * rho * sigma + (sigma - 1.0) ** 2
    if radicand < 0.0:
        raise DomainError(f"4*rho*sigma + (sigma-1)^2 = {radicand!r} < 0")
    return math.sqrt(radicand), sigma + 1.0


def _s0_components(p: LorenzParams, xi10: float, xi20: float, t):
    """ξ, ξ̇, ξ̈ at the origin with ξ(0) = 0, ξ̇(0) = (ξ₁₀, ξ₂₀)."""
    t = np.asarray(t, dtype=float)
    a, b = s0_rates(p)
    beta = p.beta
    with np.errstate(over="ignore", invalid="ignore"):
        if xi10 == 0.0:
            x1 = xd1 = xdd1 = np.zeros_like(t)
        elif a == 0.0:
            decay = np.exp(-0.5 * b * t)
            x1 = xi10 * t * decay
            xd1 = xi10 * decay * (1.0 - 0.5 * b * t)
            xdd1 = xi10 * decay * (-b + 0.25 * b * b * t)
        else:
            u, v = 0.5 * (a - b), -0.5 * (a + b)
            eu, ev = np.exp(u * t), np.exp(v * t)
            x1 = xi10 * (eu - ev) / a
            xd1 = xi10 * (u * eu - v * ev) / a
            xdd1 = xi10 * (u * u * eu - v * v * ev) / a
        if xi20 == 0.0:
            x2 = xd2 = xdd2 = np.zeros_like(t)
        elif beta == 0.0:
            x2 = xi20 * t
            xd2 = np.full_like(t, xi20)
            xdd2 = np.zeros_like(t)
        else:
            x2 = xi20 * np.sinh(beta * t) / beta
            xd2 = xi20 * np.cosh(beta * t)
            xdd2 = xi20 * beta * np.sinh(beta * t)
    return (x1, x2), (xd1, xd2), (xdd1, xdd2)


def closed_form_deviation_s0(p: LorenzParams, xi10: float, xi20: float, t):
    """
    (ξ¹, ξ²) at the origin.

    ξ¹ = ξ₁₀[e^{(a−b)t/2} − e^{−(a+b)t/2}]/a,  ξ² = ξ₂₀ sinh(βt)/β,
    with the limits ξ₁₀·t·e^{−bt/2} for a = 0 and ξ₂₀·t for β = 0.
    """
    (x1, x2), _, _ = _s0_components(p, xi10, xi20, t)
    return x1, x2


def closed_form_deviation_s0_derivatives(p: LorenzParams, xi10: float, xi20: float, t):
    return _s0_components(p, xi10, xi20, t)


def closed_form_trace_s0(p: LorenzParams, xi10: float, xi20: float, times: Sequence[float]) -> DeviationTrace:
    """DeviationTrace built from the exact solution at the origin."""
    times = np.asarray(times, dtype=float)
    xi, xi_dot, xi_ddot = _s0_components(p, xi10, xi20, times)
    return _build_trace(
        times,
        np.column_stack(xi),
        np.column_stack(xi_dot),
        np.column_stack(xi_ddot),
        Anchor.S0,
        xi10,
        xi20,
    )


def delta_estimate_s0(p: LorenzParams, xi10: float, xi20: float, t: float) -> float:
    """
    Large-t estimate of δ(t) at the origin:
    (1/2t)·ln[(ξ₂₀/ξ₁₀)² e^{2βt}/(4β²) + e^{(a−b)t}/a²].
    """
    a, b = s0_rates(p)
    beta = p.beta
    if a == 0.0 or beta == 0.0:
        raise DomainError("delta estimate needs a > 0 and beta != 0")
    if xi10 == 0.0 or t <= 0.0:
        return math.nan
    log_second = (
        2.0 * math.log(abs(xi20 / xi10)) + 2.0 * beta * t - math.log(4.0 * beta * beta)
        if xi20 != 0.0 else -math.inf
    )
    log_first = (a - b) * t - 2.0 * math.log(a)
    return float(np.logaddexp(log_second, log_first)) / (2.0 * t)


def _kappa0_bracket(a: float, b: float, beta: float, t):
    t = np.asarray(t, dtype=float)
    return (
        (a - b) * (2.0 * beta - a + b) * np.exp((0.5 * a + beta) * t)
        + (a - b) * (b - 2.0 * beta - a) * np.exp((0.5 * a - beta) * t)
        + (a + b) * (2.0 * beta + a + b) * np.exp((-0.5 * a + beta) * t)
        + (a + b) * (a + b - 2.0 * beta) * np.exp((-0.5 * a - beta) * t)
    )


def kappa0_closed_form_s0(p: LorenzParams, xi10: float, xi20: float, t):
    """
    Explicit κ₀(t) at the origin:
    ξ₁₀ξ₂₀e^{−bt/2}/(8a) · [four exponential terms] / (ξ̇¹² + ξ̇²²)^{3/2}.

    Evaluated for the unit initial velocity and divided by its scale, since
    κ₀ scales as 1/|ξ̇(0)|.
    """
    a, b = s0_rates(p)
    if a == 0.0 or p.beta == 0.0:
        _, (xd1, xd2), (xdd1, xdd2) = _s0_components(p, xi10, xi20, t)
        return signed_curvature(xd1, xd2, xdd1, xdd2)
    t = np.asarray(t, dtype=float)
    scale = math.hypot(xi10, xi20)
    if scale == 0.0:
        return np.full(t.shape, np.nan)
    u10, u20 = xi10 / scale, xi20 / scale
    _, (xd1, xd2), _ = _s0_components(p, u10, u20, t)
    numerator = u10 * u20 * np.exp(-0.5 * b * t) / (8.0 * a) * _kappa0_bracket(a, b, p.beta, t)
    speed = np.hypot(xd1, xd2)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(speed * scale >= SINGULAR_SPEED, numerator / speed ** 3 / scale, np.nan)


# ==================== INDICATORS ====================

def instability_exponents(trace: DeviationTrace, xi10: Optional[float] = None) -> Exponents:
    """
    Finite-time exponents at the final sample T:
    δᵢ(T) = ln(ξⁱ(T)/ξᵢ₀)/T,  δ(T) = ln(|ξ(T)|/ξ₁₀)/T.

    Undefined logarithms give NaN.
    """
    if len(trace) == 0:
        raise ParameterError("empty deviation trace")
    xi10 = trace.xi10 if xi10 is None else float(xi10)
    times = trace.times[-1:]
    result = Exponents(
        delta1=float(_log_rate(trace.xi1[-1:], xi10, times)[0]),
        delta2=float(_log_rate(trace.xi2[-1:], trace.xi20, times)[0]),
        delta=float(_log_rate(trace.xi_norm[-1:], xi10, times)[0]),
        t=float(times[0]),
    )
    undefined = [name for name, value in zip(result._fields[:3], result[:3]) if math.isnan(value)]
    if undefined:
        logger.warning(f"Undefined exponents at T={result.t!r}: {', '.join(undefined)}")
    return result


def kappa0(trace: DeviationTrace, k: int) -> float:
    """Signed curvature of the deviation curve at sample k (NaN when singular)."""
    return float(trace.kappa0[k])


def _sign_pattern(values: np.ndarray) -> str:
    symbols = np.where(values > 0, "+", np.where(values < 0, "-", "0"))
    return "".join(symbol for symbol, _ in itertools.groupby(symbols))


def _t0_approximation(p: LorenzParams) -> float:
    return T0_APPROX_NUMERATOR / (p.rho + T0_APPROX_SHIFT)


def find_t0(
    p: LorenzParams,
    xi10: float,
    xi20: float,
    t_max: float = 1.0,
    samples: int = 2000,
) -> ChaosOnset:
    """
    First positive root of κ₀ at the origin.

    The sign of κ₀ is that of ξ₁₀ξ₂₀ times a bracket that depends only on
    (σ, ρ, β), so the root does not depend on the deviation scale. The bracket
    is scanned on a uniform grid of (0, t_max] and the first sign change is
    refined by bisection to 1e-10.
    """
    if t_max <= 0.0:
        raise ParameterError("t_max must be positive")
    approximation = _t0_approximation(p)
    a, b = s0_rates(p)
    beta = p.beta
    if xi10 == 0.0 or xi20 == 0.0:
        logger.warning("κ₀ vanishes identically (one initial deviation velocity is zero)")
        return ChaosOnset(t0=None, approximation=approximation, sign_pattern="0")
    direction = math.copysign(1.0, xi10) * math.copysign(1.0, xi20)

    if a > 0.0 and beta != 0.0:
        damping = 0.5 * a + abs(beta)

        def numerator(t):
            return direction * _kappa0_bracket(a, b, beta, t) * np.exp(-damping * np.asarray(t))
    else:
        def numerator(t):
            _, (xd1, xd2), (xdd1, xdd2) = _s0_components(p, 1.0, 1.0, t)
            return direction * (xd1 * xdd2 - xdd1 * xd2)

    grid = np.linspace(0.0, t_max, samples + 1)
    values = np.asarray(numerator(grid), dtype=float)
    pattern = _sign_pattern(values[1:])

    t0 = None
    for k in range(1, len(grid)):
        if values[k] == 0.0:
            t0 = float(grid[k])
            break
        if values[k - 1] != 0.0 and np.sign(values[k - 1]) != np.sign(values[k]):
            t0 = float(bisect(lambda t: float(numerator(t)), grid[k - 1], grid[k], xtol=1e-10))
            break

    if t0 is None:
        logger.warning(f"No κ₀ sign change on (0, {t_max}] at {p.as_tuple()}; pattern {pattern}")
        return ChaosOnset(t0=None, approximation=approximation, sign_pattern=pattern)

    x1, x2 = closed_form_deviation_s0(p, xi10, xi20, t0)
    horizon = float(kappa0_closed_form_s0(p, xi10, xi20, t_max))
    logger.info(f"t0={t0:.10g} (approximation {approximation:.6g}) at {p.as_tuple()}")
    return ChaosOnset(
        t0=t0,
        approximation=approximation,
        sign_pattern=pattern,
        xi_gap=float(x1 - x2),
        kappa0_at_horizon=horizon,
    )


def first_sign_change(trace: DeviationTrace) -> Optional[float]:
    """First κ₀ sign change of any trace, located by linear interpolation between samples."""
    kappa = trace.kappa0
    times = trace.times
    previous = None
    for k in range(len(kappa)):
        if np.isnan(kappa[k]):
            continue
        if kappa[k] == 0.0 and times[k] > 0.0:
            return float(times[k])
        if previous is not None and np.sign(kappa[previous]) * np.sign(kappa[k]) < 0:
            k0, k1 = previous, k
            weight = kappa[k0] / (kappa[k0] - kappa[k1])
            return float(times[k0] + weight * (times[k1] - times[k0]))
        previous = k
    return None


def focusing_tendency(trace: DeviationTrace, samples: int = 5) -> str:
    """
    Behaviour of the deviation right after t = 0.

    Returns:
        "bunching" when |ξ(t)| < t² on the first positive samples,
        "dispersing" when |ξ(t)| > t², "mixed" otherwise
    """
    positive = np.flatnonzero(trace.times > 0.0)[:samples]
    if positive.size == 0:
        return "mixed"
    t = trace.times[positive]
    norms = trace.xi_norm[positive]
    if np.all(norms < t * t):
        return "bunching"
    if np.all(norms > t * t):
        return "dispersing"
    return "mixed"
