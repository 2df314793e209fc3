"""
Command-line input validation utilities.
"""
import math
from typing import List, Optional, Tuple

MAX_GRID_POINTS = 100_000


def validate_finite(name: str, value: Optional[float]) -> Tuple[bool, str, Optional[float]]:
    """
    Validate a numeric option.

    Returns:
        Tuple of (is_valid, error_message or normalized_value, normalized_value or None)
    """
    if value is None:
        return True, "", None
    try:
        number = float(value)
    except (TypeError, ValueError):
        return False, VALIDATION_ERRORS["not_a_number"].format(name=name, value=value), None
    if not math.isfinite(number):
        return False, VALIDATION_ERRORS["not_finite"].format(name=name, value=value), None
    return True, repr(number), number


def validate_grid(text: str) -> Tuple[bool, str, Optional[List[float]]]:
    """
    Validate and expand a grid specification.

    Rules:
    - "A:B:STEP" with STEP > 0 and B >= A, endpoints included
    - or a comma-separated list of values
    - all values finite, at least one point, at most MAX_GRID_POINTS

    Returns:
        Tuple of (is_valid, error_message or description, sorted unique values or None)
    """
    if not text or not text.strip():
        return False, VALIDATION_ERRORS["empty_grid"], None

    text = "".join(text.split())
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            return False, VALIDATION_ERRORS["grid_format"].format(text=text), None
        numbers = []
        for part in parts:
            ok, message, number = validate_finite("grid", part)
            if not ok:
                return False, message, None
            numbers.append(number)
        start, stop, step = numbers
        if step <= 0:
            return False, VALIDATION_ERRORS["grid_step"].format(text=text), None
        if stop < start:
            return False, VALIDATION_ERRORS["grid_order"].format(text=text), None
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count > MAX_GRID_POINTS:
            return False, VALIDATION_ERRORS["grid_size"].format(count=count), None
        values = [start + k * step for k in range(count)]
        if abs(values[-1] - stop) <= 1e-9 * max(1.0, abs(stop)):
            values[-1] = stop
    else:
        values = []
        for part in text.split(","):
            if not part:
                continue
            ok, message, number = validate_finite("grid", part)
            if not ok:
                return False, message, None
            values.append(number)
        if not values:
            return False, VALIDATION_ERRORS["empty_grid"], None

    values = sorted(set(values))
    return True, f"{len(values)} points in [{values[0]!r}, {values[-1]!r}]", values


# Error messages dictionary for reference
VALIDATION_ERRORS = {
    "not_a_number": "{name}: '{value}' is not a number",
    "not_finite": "{name}: '{value}' must be finite",
    "empty_grid": "grid specification is empty",
    "grid_format": "grid '{text}' must be A:B:STEP or a comma-separated list",
    "grid_step": "grid '{text}' needs a positive STEP",
    "grid_order": "grid '{text}' ends before it starts",
    "grid_size": "grid has {count} points, too many",
}
