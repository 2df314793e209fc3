"""
Lorenz system value types.
"""
import enum
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from geometry.errors import ParameterError
from geometry.models import SpectralSummary

logger = logging.getLogger(__name__)


class LorenzParams(BaseModel):
    """Lorenz parameters (σ, ρ, β)."""

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(10.0, allow_inf_nan=False)
    rho: float = Field(28.0, allow_inf_nan=False)
    beta: float = Field(8.0 / 3.0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _warn_non_physical(self) -> "LorenzParams":
        for warning in self.physical_warnings():
            logger.warning(warning)
        return self

    def physical_warnings(self) -> list[str]:
        """Non-physical but computable values."""
        warnings = []
        if self.sigma <= 0:
            warnings.append(f"sigma={self.sigma!r} is not positive")
        if self.beta <= 0:
            warnings.append(f"beta={self.beta!r} is not positive")
        return warnings

    def require_reducible(self) -> None:
        """The reduction to second order divides by sigma."""
        if self.sigma == 0:
            raise ParameterError("sigma must be nonzero for the second-order reduction")

    @property
    def coupling(self) -> float:
        """c = (1 + σ + β)/σ − 2, the X¹Y¹ coefficient in G²."""
        self.require_reducible()
        return (1.0 + self.sigma + self.beta) / self.sigma - 2.0

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.sigma, self.rho, self.beta


class LorenzState(NamedTuple):
    x: float
    y: float
    z: float


class ReducedState(NamedTuple):
    """X¹ = X, X² = Z, Y¹ = Ẋ, Y² = Ż."""

    x1: float
    x2: float
    y1: float
    y2: float


class EquilibriumKind(enum.Enum):
    """Lorenz fixed points."""
    S0 = "S0"           # origin
    SPLUS = "S+"        # X = +sqrt(β(ρ−1))
    SMINUS = "S-"       # X = −sqrt(β(ρ−1))


@dataclass(frozen=True)
class LinearStability:
    """Linearization of the first-order Lorenz flow at a fixed point."""

    tau: float
    delta: float
    eigenvalues: Tuple[complex, ...]
    label: str
    stable: bool


@dataclass(frozen=True)
class EquilibriumAnalysis:
    kind: EquilibriumKind
    x1_star: float
    x2_star: float
    p_matrix: np.ndarray
    spectrum: SpectralSummary
    theorem_condition1: float
    theorem_condition2: float
    linear: LinearStability

    @property
    def location(self) -> LorenzState:
        """The fixed point in (X, Y, Z); Y = X there."""
        return LorenzState(self.x1_star, self.x1_star, self.x2_star)

    @property
    def jacobi_label(self) -> str:
        return self.spectrum.label

    @property
    def linear_tau(self) -> float:
        return self.linear.tau

    @property
    def linear_delta(self) -> float:
        return self.linear.delta

    @property
    def linear_eigenvalues(self) -> Tuple[complex, ...]:
        return self.linear.eigenvalues

    @property
    def linear_label(self) -> str:
        return self.linear.label

    @property
    def linearly_stable(self) -> bool:
        return self.linear.stable

    @property
    def marginal(self) -> bool:
        return self.spectrum.marginal


@dataclass(frozen=True)
class TheoremResult:
    """Jacobi-stability conditions for S± (stable iff condition1 < 0 and condition2 > 0)."""

    condition1: float
    condition2: float
    stable: bool
    marginal: bool = False
    note: Optional[str] = None
