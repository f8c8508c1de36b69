"""Numerical experiments: convergence fits and recorded trajectories."""

from .convergence import ConvergenceResult, convergence_order_estimate, integrate_to
from .metrics import StepRecord, TrajectoryReader, TrajectoryWriter
from .runner import integrate

__all__ = [
    "ConvergenceResult",
    "StepRecord",
    "TrajectoryReader",
    "TrajectoryWriter",
    "convergence_order_estimate",
    "integrate",
    "integrate_to",
]
