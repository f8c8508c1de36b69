"""Empirical convergence order from fixed-time integrations."""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from ..eldiff import VectorField

logger = logging.getLogger(__name__)

Stepper = Callable[[VectorField, np.ndarray, float], np.ndarray]


@dataclass
class ConvergenceResult:
    """Global errors at the end time for each step size, and the fitted slope."""

    step_sizes: list[float]
    errors: list[float]
    slope: float
    end_time: float = 1.0
    notes: list[str] = field(default_factory=list)

    @property
    def is_exact(self) -> bool:
        return math.isinf(self.slope)

    def to_dict(self) -> dict:
        return asdict(self)


def integrate_to(stepper: Stepper, f: VectorField, x0, end_time: float, h: float) -> np.ndarray:
    """Apply stepper end_time / h times; h must divide end_time."""
    steps = round(end_time / h)
    if steps < 1 or abs(steps * h - end_time) > 1e-9 * max(1.0, end_time):
        raise ValueError(f"step size {h} does not divide the interval length {end_time}")
    x = f.point(x0)
    for _ in range(steps):
        x = stepper(f, x, h)
    return x


def convergence_order_estimate(
    stepper: Stepper,
    f: VectorField,
    x0,
    exact_endpoint,
    h_list: Sequence[float],
    end_time: float = 1.0,
) -> ConvergenceResult:
    """Least-squares slope of log(error) against log(h).

    A zero error at any step size means the method is exact on this problem;
    the slope is then reported as +inf.
    """
    if len(h_list) < 3:
        raise ValueError(f"need at least 3 step sizes, got {len(h_list)}")
    exact = f.point(exact_endpoint)
    errors = []
    for h in h_list:
        x_end = integrate_to(stepper, f, x0, end_time, h)
        errors.append(float(np.max(np.abs(x_end - exact))))
    if any(e == 0.0 for e in errors):
        return ConvergenceResult(list(h_list), errors, math.inf, end_time, ["zero error: method exact here"])
    slope = float(np.polyfit(np.log(h_list), np.log(errors), 1)[0])
    logger.info("convergence fit over %d step sizes: slope %.3f", len(h_list), slope)
    return ConvergenceResult(list(h_list), errors, slope, end_time)
