"""
Error hierarchy shared by the geometry engine, the Lorenz model,
the integrators and the command line.

Every error carries the process exit code the CLI reports for it.
"""
from typing import Optional, Sequence


class KccError(Exception):
    """Base class for all toolkit failures."""

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ParameterError(KccError):
    """Invalid parameter values (e.g. sigma = 0 where 1/sigma is needed)."""

    exit_code = 2


class OutputError(KccError):
    """Output path cannot be written."""

    exit_code = 2


class DomainError(KccError):
    """Quantity requested outside its domain (S± with rho <= 1, negative radicand)."""

    exit_code = 3


class EvaluationError(KccError):
    """Non-finite G^i encountered while evaluating a system at a jet."""

    exit_code = 4

    def __init__(self, message: str, jet: Optional[object] = None):
        super().__init__(message)
        self.jet = jet


class IntegrationError(KccError):
    """Integration could not advance (step-size underflow or non-finite state)."""

    exit_code = 4

    def __init__(self, message: str, last_time: float = 0.0, last_state: Optional[Sequence[float]] = None):
        super().__init__(f"{message} (last good t={last_time!r})")
        self.last_time = last_time
        self.last_state = last_state
