"""
Central-difference derivatives used whenever a system does not supply
analytic callbacks.

First derivatives use a relative step with an absolute floor. Second
derivatives are nested central differences with one common, larger step:
nested 1e-4 steps leave round-off of order eps*|G|/h² in the Berwald
connection, which the G·Berwald term of the deviation curvature magnifies.
"""
from typing import Callable, Union

import numpy as np

FIRST_STEP_REL = 1e-6
FIRST_STEP_FLOOR = 1e-6
SECOND_STEP = 1e-2

Step = Union[float, Callable[[float], float]]


def first_step(value: float) -> float:
    """Step for a first derivative at coordinate value `value`."""
    return max(FIRST_STEP_FLOOR, FIRST_STEP_REL * abs(value))


def relative_step(base: float) -> Callable[[float], float]:
    """Step rule `max(base, base*|v|)`."""
    return lambda value: max(base, base * abs(value))


def central_difference(func: Callable[[np.ndarray], np.ndarray], point: np.ndarray, step: Step = first_step) -> np.ndarray:
    """
    Derivative of an array-valued function by central differences.

    Args:
        func: maps a 1-D point to an array of any shape
        point: where to differentiate
        step: fixed step or a rule giving the step per coordinate value

    Returns:
        Array of shape func(point).shape + (len(point),); the last axis
        indexes the differentiation variable.
    """
    point = np.asarray(point, dtype=float)
    columns = []
    for k in range(point.size):
        h = step(point[k]) if callable(step) else float(step)
        forward = point.copy()
        backward = point.copy()
        forward[k] += h
        backward[k] -= h
        columns.append((np.asarray(func(forward)) - np.asarray(func(backward))) / (2.0 * h))
    return np.stack(columns, axis=-1)


def scalar_difference(func: Callable[[float], np.ndarray], value: float, step: Step = first_step) -> np.ndarray:
    """Derivative with respect to a scalar argument (time)."""
    h = step(value) if callable(step) else float(step)
    return (np.asarray(func(value + h)) - np.asarray(func(value - h))) / (2.0 * h)
