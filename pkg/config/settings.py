from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, field_validator
import logging

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    # Lorenz parameters (classic chaotic regime)
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0

    # Reference initial state used for trajectory figures
    x0: float = 1.0
    y0: float = 5.0
    z0: float = 10.0

    # Deviation protocol: ξ(0) = 0, ξ̇(0) = (xi10, xi20)
    xi10: float = 1e-9
    xi20: float = 1e-8

    # Integration
    trajectory_step: float = 1e-3
    trajectory_t_end: float = 20.0
    deviation_tol: float = 1e-10
    deviation_t_end: float = 2.0
    sample_every: float = 1e-2
    t0_max: float = 1.0

    # Sweeps
    sweep_workers: int = Field(4, ge=1)

    # Logging
    log_dir: str = "logs"
    log_file: str = "kcc.log"
    log_level: str = "INFO"
    debug: bool = False

    model_config = SettingsConfigDict(
        env_prefix="KCC_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",  # Ignore unrelated keys in .env
    )

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value!r}")
        return value

    @property
    def effective_log_level(self) -> int:
        return logging.DEBUG if self.debug else logging.getLevelName(self.log_level)

    def validate_physical(self) -> list[str]:
        """Check default parameters and return warnings."""
        warnings = []
        if self.sigma <= 0:
            warnings.append(f"KCC_SIGMA={self.sigma} is not positive")
        if self.beta <= 0:
            warnings.append(f"KCC_BETA={self.beta} is not positive")
        if self.sample_every < self.trajectory_step:
            warnings.append("KCC_SAMPLE_EVERY is smaller than KCC_TRAJECTORY_STEP")
        return warnings


settings = Settings()

for warning in settings.validate_physical():
    logger.warning(warning)
