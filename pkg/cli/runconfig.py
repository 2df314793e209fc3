"""
Run configuration: settings defaults, then a key=value config file, then flags.
"""
import enum
import logging
import os
from typing import Any, Dict, List, Mapping, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field

from config import settings
from dynamics.models import Anchor, IntegratorConfig, IntegratorMethod
from geometry.errors import ParameterError
from lorenz.models import LorenzParams, LorenzState

from .validation import validate_grid

logger = logging.getLogger(__name__)


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"
    XLSX = "xlsx"


def _default(name: str):
    return Field(default_factory=lambda: getattr(settings, name), allow_inf_nan=False)


class RunConfig(BaseModel):
    """Options shared by all commands after layering."""

    model_config = ConfigDict(frozen=True, extra="ignore")

    sigma: float = _default("sigma")
    rho: float = _default("rho")
    beta: float = _default("beta")
    x0: float = _default("x0")
    y0: float = _default("y0")
    z0: float = _default("z0")
    anchor: Anchor = Anchor.S0
    xi10: float = _default("xi10")
    xi20: float = _default("xi20")
    t_end: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    step: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    tol: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    method: Optional[IntegratorMethod] = None
    sample_every: float = Field(default_factory=lambda: settings.sample_every, gt=0, allow_inf_nan=False)
    t0: bool = False
    t0_max: float = Field(default_factory=lambda: settings.t0_max, gt=0, allow_inf_nan=False)
    t0_crit: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    grid_sigma: Optional[str] = None
    grid_rho: Optional[str] = None
    grid_beta: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
    out: Optional[str] = None

    def params(self) -> LorenzParams:
        return LorenzParams(sigma=self.sigma, rho=self.rho, beta=self.beta)

    def initial_state(self) -> LorenzState:
        return LorenzState(self.x0, self.y0, self.z0)

    def integrator(self, default_method: IntegratorMethod, default_t_end: float) -> IntegratorConfig:
        """
        Integrator settings: --step selects fixed-step RK4, --tol an adaptive
        method, --method overrides either.

        Raises:
            ParameterError: --step and --tol given together
        """
        if self.step is not None and self.tol is not None:
            raise ParameterError("--step and --tol are mutually exclusive")
        method = self.method
        if method is None:
            if self.step is not None:
                method = IntegratorMethod.RK4_FIXED
            elif self.tol is not None:
                method = IntegratorMethod.RK45_ADAPTIVE
            else:
                method = default_method
        tol = self.tol if self.tol is not None else settings.deviation_tol
        return IntegratorConfig(
            method=method,
            step=self.step if self.step is not None else settings.trajectory_step,
            abs_tol=tol,
            rel_tol=tol,
            t_end=self.t_end if self.t_end is not None else default_t_end,
            sample_every=self.sample_every,
        )

    def grid(self, name: str) -> Optional[List[float]]:
        """Expanded grid for one parameter, None when not given."""
        text = getattr(self, f"grid_{name}")
        if text is None:
            return None
        ok, message, values = validate_grid(text)
        if not ok:
            raise ParameterError(f"--grid-{name}: {message}")
        return values


def _normalize_key(key: str) -> str:
    return key.strip().lower().lstrip("-").replace("-", "_")


def load_config_file(path: str) -> Dict[str, str]:
    """
    Read a flat key=value file; keys mirror the flag names.

    Raises:
        ParameterError: file missing
    """
    if not os.path.isfile(path):
        raise ParameterError(f"config file not found: {path}")
    values = {
        _normalize_key(key): value
        for key, value in dotenv_values(path).items()
        if value is not None
    }
    unknown = sorted(set(values) - set(RunConfig.model_fields))
    if unknown:
        logger.warning(f"Ignoring unknown config keys in {path}: {', '.join(unknown)}")
    logger.info(f"Loaded {len(values)} options from {path}")
    return values


def build_run_config(flags: Mapping[str, Any], config_path: Optional[str] = None) -> RunConfig:
    """Layer settings, config file and non-empty flags (flags win)."""
    merged: Dict[str, Any] = {}
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update({key: value for key, value in flags.items() if value is not None})
    return RunConfig(**merged)
