"""One-step maps that are not Runge-Kutta tableaux, but do have B-series."""

import logging

import numpy as np
from numpy.polynomial import legendre

from .config import get_settings
from .eldiff import VectorField
from .rk import solve_fixed_point

logger = logging.getLogger(__name__)

AVF_QUADRATURE_POINTS = 16


def euler_step(f: VectorField, x, h: float) -> np.ndarray:
    x = f.point(x)
    return x + h * f.value(x)


def avf_step(
    f: VectorField,
    x,
    h: float,
    tol: float | None = None,
    max_iter: int | None = None,
    quadrature_points: int = AVF_QUADRATURE_POINTS,
) -> np.ndarray:
    """Average vector field step x1 = x + h int_0^1 f(xi x1 + (1 - xi) x) dxi.

    The integral uses Gauss-Legendre quadrature on [0, 1]; x1 comes from the
    same fixed-point solver as implicit Runge-Kutta stages.
    """
    settings = get_settings()
    tol = settings.solver_tol if tol is None else tol
    max_iter = settings.solver_max_iter if max_iter is None else max_iter
    x = f.point(x)
    nodes, weights = legendre.leggauss(quadrature_points)
    xi = 0.5 * (nodes + 1.0)
    w = 0.5 * weights

    def update(x1: np.ndarray) -> np.ndarray:
        avg = sum(wq * f.value(q * x1 + (1.0 - q) * x) for q, wq in zip(xi, w))
        return x + h * avg

    x1, _ = solve_fixed_point(update, x, tol, max_iter)
    return x1


def phi_matrix(Z: np.ndarray, max_terms: int = 60) -> np.ndarray:
    """phi(Z) = sum_k Z^k / (k+1)!, summed until the terms drop below roundoff."""
    n = Z.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, max_terms):
        term = term @ Z / (k + 1)
        out = out + term
        if np.max(np.abs(term)) < 1e-17 * max(1.0, np.max(np.abs(out))):
            break
    return out


def exponential_integrator_step(f: VectorField, x, h: float) -> np.ndarray:
    """x + phi(h f'(x)) h f(x) with phi(z) = (e^z - 1)/z."""
    x = f.point(x)
    Z = h * f.jacobian(x)
    return x + phi_matrix(Z) @ (h * f.value(x))


def exact_linear_flow(A, x, t: float, max_terms: int = 80) -> np.ndarray:
    """exp(tA) x by a truncated power series; reference for linear test fields."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    x = np.asarray(x, dtype=float)
    out = x.copy()
    term = x.copy()
    for k in range(1, max_terms):
        term = (t / k) * (A @ term)
        out = out + term
        if np.max(np.abs(term)) < 1e-18 * max(1.0, np.max(np.abs(out))):
            break
    return out

