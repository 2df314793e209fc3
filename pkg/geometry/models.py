"""
Data types of the KCC geometry engine.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .differences import SECOND_STEP

# (x, y, t) -> array
JetFunction = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class Jet:
    """A point of the jet bundle: coordinates x, velocities y, time t."""

    x: np.ndarray
    y: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.shape != y.shape:
            raise ValueError(f"Jet x has {x.size} components but y has {y.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dimension(self) -> int:
        return self.x.size

    def __repr__(self) -> str:
        return f"Jet(x={self.x.tolist()}, y={self.y.tolist()}, t={self.t!r})"


@dataclass(frozen=True)
class SodeSystem:
    """
    Second-order system  d²xⁱ/dt² + 2Gⁱ(x, y, t) = 0.

    Analytic callbacks are optional; whatever is missing is obtained by
    central differences of the next lower-order quantity.
    """

    dimension: int
    g_eval: JetFunction
    analytic_dG_dy: Optional[JetFunction] = None
    analytic_dG_dx: Optional[JetFunction] = None
    analytic_berwald: Optional[JetFunction] = None
    analytic_dn_dx: Optional[JetFunction] = None
    time_dependent: bool = False
    name: str = "sode"
    # Optional (low, high) bounds per coordinate where g_eval is guaranteed finite
    validity_box: Optional[Sequence[Tuple[float, float]]] = None
    second_step: float = SECOND_STEP

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("SODE dimension must be positive")
        if self.second_step <= 0:
            raise ValueError("second_step must be positive")

    def without_analytic(self) -> "SodeSystem":
        """Same G functions, every derivative taken by differences."""
        return SodeSystem(
            dimension=self.dimension,
            g_eval=self.g_eval,
            time_dependent=self.time_dependent,
            name=f"{self.name} (finite differences)",
            validity_box=self.validity_box,
            second_step=self.second_step,
        )

    def contains(self, jet: Jet) -> bool:
        if self.validity_box is None:
            return True
        return all(low <= v <= high for v, (low, high) in zip(jet.x, self.validity_box))


@dataclass(frozen=True)
class ConnectionData:
    """Connection coefficients and first derivatives of G at one jet."""

    n_coeffs: np.ndarray   # N[i, j]      = ∂Gⁱ/∂yʲ
    berwald: np.ndarray    # B[i, j, l]   = ∂Nⁱⱼ/∂yˡ
    dg_dx: np.ndarray      # [i, j]       = ∂Gⁱ/∂xʲ
    dn_dx: np.ndarray      # [i, j, l]    = ∂Nⁱⱼ/∂xˡ
    dn_dt: np.ndarray      # [i, j]       = ∂Nⁱⱼ/∂t


@dataclass(frozen=True)
class KccInvariants:
    """The five KCC invariants plus the tensors derived from them."""

    epsilon: np.ndarray
    p_tensor: np.ndarray
    p_trace: float
    p3: np.ndarray
    p4: np.ndarray
    douglas: np.ndarray
    torsion_b: np.ndarray
    b4: np.ndarray


@dataclass(frozen=True)
class SpectralSummary:
    """Eigen-structure of a 2×2 deviation curvature matrix."""

    lambda_plus: complex
    lambda_minus: complex
    kappa: float
    theta: complex
    trace_condition: float
    det_condition: float
    jacobi_stable: bool
    marginal: bool = False

    @property
    def label(self) -> str:
        if self.marginal:
            return "jacobi_marginal"
        return "jacobi_stable" if self.jacobi_stable else "jacobi_unstable"


@dataclass(frozen=True)
class KccReport:
    """Everything the engine knows about a system at one jet."""

    jet: Jet
    connection: ConnectionData
    invariants: KccInvariants
    spectrum: Optional[SpectralSummary] = None
    notes: Tuple[str, ...] = field(default_factory=tuple)
