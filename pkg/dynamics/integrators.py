"""
Time integration of the Lorenz flow and of any first-order right-hand side.
"""
import logging
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from geometry.errors import IntegrationError, ParameterError
from lorenz.models import LorenzParams, LorenzState
from lorenz.system import closed_form_p, lorenz_vector_field, recover_y, reduce, reduced_rhs

from .models import IntegratorConfig, IntegratorMethod, Trajectory

logger = logging.getLogger(__name__)

Rhs = Callable[[float, np.ndarray], np.ndarray]

_SCIPY_METHODS = {
    IntegratorMethod.RK45_ADAPTIVE: "RK45",
    IntegratorMethod.DOP853_ADAPTIVE: "DOP853",
}


def rk4_integrate(rhs: Rhs, y0: np.ndarray, step: float, t_end: float, sample_every: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Classical fourth-order Runge–Kutta with a constant step.

    The step is shrunk slightly so that both sample_every and t_end are whole
    multiples of it.

    Returns:
        (times, states) at every sample
    """
    stride = max(1, int(round(sample_every / step)))
    h = sample_every / stride
    n_steps = int(round(t_end / h))
    if n_steps < 1:
        raise ParameterError(f"t_end={t_end!r} is shorter than one step")
    h = t_end / n_steps

    y = np.asarray(y0, dtype=float).copy()
    times = [0.0]
    states = [y.copy()]
    t = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n_steps + 1):
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(y_next)):
                raise IntegrationError("state became non-finite", last_time=t, last_state=y.tolist())
            y = y_next
            t = k * h
            if k % stride == 0 or k == n_steps:
                times.append(t)
                states.append(y.copy())
    return np.array(times), np.array(states)


def solve_adaptive(rhs: Rhs, y0: np.ndarray, cfg: IntegratorConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Error-controlled integration sampled on cfg.sample_times()."""
    t_eval = cfg.sample_times()
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(
            rhs,
            (0.0, cfg.t_end),
            np.asarray(y0, dtype=float),
            method=_SCIPY_METHODS[cfg.method],
            t_eval=t_eval,
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
        )
    last_time = float(sol.t[-1]) if sol.t.size else 0.0
    if sol.status < 0:
        logger.error(f"{cfg.method.value} failed: {sol.message}")
        raise IntegrationError(sol.message, last_time=last_time)
    states = sol.y.T
    if not np.all(np.isfinite(states)):
        bad = int(np.argmax(~np.all(np.isfinite(states), axis=1)))
        raise IntegrationError("state became non-finite", last_time=float(sol.t[max(bad - 1, 0)]))
    return sol.t, states


def integrate(rhs: Rhs, y0: np.ndarray, cfg: IntegratorConfig) -> Tuple[np.ndarray, np.ndarray]:
    if cfg.method is IntegratorMethod.RK4_FIXED:
        return rk4_integrate(rhs, y0, cfg.step, cfg.t_end, cfg.sample_every)
    return solve_adaptive(rhs, y0, cfg)


# ==================== LORENZ ====================

def _reduced_from_states(p: LorenzParams, states: np.ndarray) -> np.ndarray:
    x, y, z = states[:, 0], states[:, 1], states[:, 2]
    return np.column_stack([x, z, p.sigma * (y - x), x * y - p.beta * z])


def integrate_lorenz(p: LorenzParams, s0: LorenzState, cfg: IntegratorConfig) -> Trajectory:
    """
    Sample the first-order Lorenz flow from s0.

    Each sample carries the reduced state (X, Z, Ẋ, Ż) for curvature evaluation.

    Raises:
        IntegrationError: step-size underflow or a non-finite state
    """
    times, states = integrate(lambda t, s: lorenz_vector_field(p, s), np.asarray(s0, dtype=float), cfg)
    logger.info(
        f"Lorenz {p.as_tuple()} from {tuple(s0)}: {len(times)} samples to t={times[-1]:.6g} ({cfg.method.value})"
    )
    return Trajectory(times=times, states=states, reduced=_reduced_from_states(p, states))


def single_sample(p: LorenzParams, s0: LorenzState) -> Trajectory:
    """A one-sample trajectory at s0, used as the start of a reference flow."""
    states = np.asarray([s0], dtype=float)
    return Trajectory(times=np.zeros(1), states=states, reduced=_reduced_from_states(p, states))


def integrate_reduced(p: LorenzParams, s0: LorenzState, cfg: IntegratorConfig) -> Trajectory:
    """
    Integrate the second-order reduced system and map back with recover_y.

    The reduced system carries one extra mode growing like e^{βt}; agreement
    with the first-order flow only lasts while that mode stays below tolerance.
    """
    p.require_reducible()
    r0 = np.asarray(reduce(p, s0), dtype=float)
    times, reduced = integrate(reduced_rhs(p), r0, cfg)
    y = np.array([recover_y(p, r) for r in reduced])
    states = np.column_stack([reduced[:, 0], y, reduced[:, 1]])
    return Trajectory(times=times, states=states, reduced=reduced)


def p_along_trajectory(p: LorenzParams, traj: Trajectory) -> np.ndarray:
    """Closed-form deviation curvature at every sample, shape (k, 2, 2)."""
    if len(traj) == 0:
        raise ParameterError("empty trajectory")
    reduced = traj.reduced
    return closed_form_p(p, reduced[:, 0], reduced[:, 1], reduced[:, 2])
