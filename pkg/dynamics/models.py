"""
Integration settings and the time series produced by the dynamics module.
"""
import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lorenz.models import EquilibriumKind, LorenzState, ReducedState


class IntegratorMethod(str, enum.Enum):
    """Available integrators."""
    RK4_FIXED = "rk4_fixed"              # classical RK4, constant step
    RK45_ADAPTIVE = "rk45_adaptive"      # scipy Dormand–Prince 5(4)
    DOP853_ADAPTIVE = "dop853_adaptive"  # scipy Dormand–Prince 8(5,3)

    @property
    def adaptive(self) -> bool:
        return self is not IntegratorMethod.RK4_FIXED


class Anchor(str, enum.Enum):
    """Where the deviation equations take their coefficients."""
    S0 = "s0"
    SPLUS = "splus"
    SMINUS = "sminus"
    ALONG_TRAJECTORY = "along"

    @property
    def equilibrium(self) -> Optional[EquilibriumKind]:
        return {
            Anchor.S0: EquilibriumKind.S0,
            Anchor.SPLUS: EquilibriumKind.SPLUS,
            Anchor.SMINUS: EquilibriumKind.SMINUS,
        }.get(self)


class IntegratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: IntegratorMethod = IntegratorMethod.RK45_ADAPTIVE
    step: float = Field(1e-3, gt=0, allow_inf_nan=False)
    abs_tol: float = Field(1e-10, gt=0, allow_inf_nan=False)
    rel_tol: float = Field(1e-10, gt=0, allow_inf_nan=False)
    t_end: float = Field(2.0, gt=0, allow_inf_nan=False)
    sample_every: float = Field(1e-2, gt=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check_sampling(self) -> "IntegratorConfig":
        if not self.method.adaptive and self.sample_every < self.step:
            raise ValueError(
                f"sample_every={self.sample_every!r} is smaller than the fixed step {self.step!r}"
            )
        return self

    @classmethod
    def fixed(cls, step: float, t_end: float, sample_every: float = 1e-2) -> "IntegratorConfig":
        return cls(method=IntegratorMethod.RK4_FIXED, step=step, t_end=t_end, sample_every=sample_every)

    @classmethod
    def adaptive(
        cls,
        tol: float,
        t_end: float,
        sample_every: float = 1e-2,
        method: IntegratorMethod = IntegratorMethod.RK45_ADAPTIVE,
    ) -> "IntegratorConfig":
        return cls(method=method, abs_tol=tol, rel_tol=tol, t_end=t_end, sample_every=sample_every)

    def sample_times(self) -> np.ndarray:
        """Output grid 0, Δ, 2Δ, … ending exactly at t_end."""
        count = int(np.floor(self.t_end / self.sample_every + 1e-9))
        times = self.sample_every * np.arange(count + 1)
        if self.t_end - times[-1] > 1e-12 * self.t_end:
            times = np.append(times, self.t_end)
        else:
            times[-1] = self.t_end
        return times


@dataclass(frozen=True)
class Trajectory:
    """Sampled Lorenz flow; states are (X, Y, Z), reduced are (X, Z, Ẋ, Ż)."""

    times: np.ndarray
    states: np.ndarray
    reduced: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.states) == len(self.reduced)):
            raise ValueError("trajectory arrays must have equal length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    def state(self, k: int) -> LorenzState:
        return LorenzState(*(float(v) for v in self.states[k]))

    def reduced_state(self, k: int) -> ReducedState:
        return ReducedState(*(float(v) for v in self.reduced[k]))


@dataclass(frozen=True)
class DeviationTrace:
    """
    Deviation vector samples with derived series.

    delta1/delta2/delta and kappa0 hold NaN where the quantity is undefined
    (logarithm of a nonpositive ratio, vanishing speed).
    """

    times: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    xi1_dot: np.ndarray
    xi2_dot: np.ndarray
    xi1_ddot: np.ndarray
    xi2_ddot: np.ndarray
    xi_norm: np.ndarray
    delta1: np.ndarray
    delta2: np.ndarray
    delta: np.ndarray
    kappa0: np.ndarray
    anchor: Anchor
    xi10: float
    xi20: float

    def __len__(self) -> int:
        return len(self.times)


class Exponents(NamedTuple):
    """Finite-time instability exponents δ(T) at horizon t."""

    delta1: float
    delta2: float
    delta: float
    t: float


@dataclass(frozen=True)
class ChaosOnset:
    """First sign change of the deviation-curve curvature."""

    t0: Optional[float]
    approximation: float
    sign_pattern: str
    xi_gap: Optional[float] = None          # ξ¹(t₀) − ξ²(t₀)
    kappa0_at_horizon: Optional[float] = None

    @property
    def found(self) -> bool:
        return self.t0 is not None

    def is_early(self, t0_crit: float) -> bool:
        """Chaotic onset before a user-supplied critical time."""
        return self.t0 is not None and self.t0 < t0_crit
