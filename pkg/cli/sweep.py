"""
Parameter sweeps: independent evaluation of grid points, written in grid order.
"""
import asyncio
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, List, Sequence, Tuple

from dynamics.deviation import find_t0
from geometry.errors import DomainError
from lorenz.equilibria import analyze_equilibrium, jacobi_theorem, rho_crit
from lorenz.models import EquilibriumKind, LorenzParams

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "sigma", "rho", "beta", "rho_crit", "condition1", "condition2",
    "s0", "splus", "sminus", "t0", "t0_approximation",
]

GridPoint = Tuple[float, float, float]


def grid_points(sigmas: Sequence[float], rhos: Sequence[float], betas: Sequence[float]) -> List[GridPoint]:
    """Lexicographic (σ, ρ, β) order."""
    return [tuple(point) for point in itertools.product(sorted(sigmas), sorted(rhos), sorted(betas))]


def evaluate_point(point: GridPoint, with_t0: bool, xi10: float, xi20: float, t0_max: float) -> List[Any]:
    """One sweep row; S± columns read "absent" for rho <= 1 and "undefined" when not real."""
    sigma, rho, beta = point
    p = LorenzParams(sigma=sigma, rho=rho, beta=beta)
    p.require_reducible()
    labels = {kind: "absent" for kind in EquilibriumKind}
    labels[EquilibriumKind.S0] = analyze_equilibrium(p, EquilibriumKind.S0).jacobi_label
    condition1 = condition2 = math.nan
    if rho > 1.0:
        try:
            for kind in (EquilibriumKind.SPLUS, EquilibriumKind.SMINUS):
                labels[kind] = analyze_equilibrium(p, kind).jacobi_label
            theorem = jacobi_theorem(p)
            condition1, condition2 = theorem.condition1, theorem.condition2
        except DomainError as e:
            logger.warning(f"Sweep point {point}: {e.message}")
            labels[EquilibriumKind.SPLUS] = labels[EquilibriumKind.SMINUS] = "undefined"

    t0 = approximation = None
    if with_t0:
        onset = find_t0(p, xi10, xi20, t_max=t0_max)
        t0, approximation = onset.t0, onset.approximation

    return [
        sigma, rho, beta, rho_crit(p), condition1, condition2,
        labels[EquilibriumKind.S0], labels[EquilibriumKind.SPLUS], labels[EquilibriumKind.SMINUS],
        t0, approximation,
    ]


async def run_sweep(
    points: Sequence[GridPoint],
    workers: int,
    with_t0: bool = False,
    xi10: float = 1e-9,
    xi20: float = 1e-8,
    t0_max: float = 1.0,
) -> List[List[Any]]:
    """Evaluate all grid points concurrently; rows come back in grid order."""
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = await asyncio.gather(*(
            loop.run_in_executor(executor, evaluate_point, point, with_t0, xi10, xi20, t0_max)
            for point in points
        ))
    logger.info(f"Sweep finished: {len(rows)} points with {workers} workers")
    return list(rows)
