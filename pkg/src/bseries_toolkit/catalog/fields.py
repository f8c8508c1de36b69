"""Built-in vector fields, all with analytic derivatives."""

from collections.abc import Sequence

import numpy as np

from ..aromatic import RelatedFieldPair
from ..eldiff import AffineMap, Hamiltonian, VectorField
from .registry import Registry

field_registry: Registry[VectorField] = Registry("field")

# Pendulum structure matrix: f = J^-1 grad H.
PENDULUM_J = np.array([[0.0, -1.0], [1.0, 0.0]])


def quadratic_field(c, L, Q=None, name: str = "quadratic") -> VectorField:
    """f(x) = c + L x + Q(x, x) / 2 with Q[i] symmetric.

    f'(x)v = L v + Q(x, v), f''(x)(v, w) = Q(v, w), higher derivatives vanish.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    dim = c.shape[0]
    L = np.asarray(L, dtype=float).reshape(dim, dim)
    Q = np.zeros((dim, dim, dim)) if Q is None else np.asarray(Q, dtype=float).reshape(dim, dim, dim)

    def value(x: np.ndarray) -> np.ndarray:
        return c + L @ x + 0.5 * np.einsum("ijk,j,k->i", Q, x, x)

    def derivative(x: np.ndarray, dirs: Sequence[np.ndarray]) -> np.ndarray:
        if len(dirs) == 1:
            return L @ dirs[0] + np.einsum("ijk,j,k->i", Q, x, dirs[0])
        if len(dirs) == 2:
            return np.einsum("ijk,j,k->i", Q, dirs[0], dirs[1])
        return np.zeros(dim)

    return VectorField(dim=dim, value_fn=value, derivative_fn=derivative, name=name)


@field_registry.register(description="x' = x^2 on the line", tags=["polynomial", "1d"])
def poly1d() -> VectorField:
    return quadratic_field([0.0], [[0.0]], [[[2.0]]], name="poly1d")


@field_registry.register(description="Damped linear oscillator in the plane", tags=["linear", "2d"])
def linear2d() -> VectorField:
    return quadratic_field([0.0, 0.0], [[-0.5, 1.0], [-1.0, -0.2]], name="linear2d")


@field_registry.register(description="Lotka-Volterra u' = 2u - uv, v' = uv - v", tags=["polynomial", "2d"])
def lotka() -> VectorField:
    Q = np.zeros((2, 2, 2))
    Q[0, 0, 1] = Q[0, 1, 0] = -1.0
    Q[1, 0, 1] = Q[1, 1, 0] = 1.0
    return quadratic_field([0.0, 0.0], [[2.0, 0.0], [0.0, -1.0]], Q, name="lotka")


@field_registry.register(description="Pendulum q' = p, p' = -sin q", tags=["hamiltonian", "2d"])
def pendulum() -> VectorField:
    def value(x: np.ndarray) -> np.ndarray:
        return np.array([x[1], -np.sin(x[0])])

    def derivative(x: np.ndarray, dirs: Sequence[np.ndarray]) -> np.ndarray:
        k = len(dirs)
        # d^k/dq^k sin q = sin(q + k pi/2)
        second = -np.sin(x[0] + 0.5 * k * np.pi) * np.prod([v[0] for v in dirs])
        first = dirs[0][1] if k == 1 else 0.0
        return np.array([first, second])

    return VectorField(dim=2, value_fn=value, derivative_fn=derivative, name="pendulum")


def pendulum_hamiltonian() -> Hamiltonian:
    """H(q, p) = p^2/2 - cos q."""
    return Hamiltonian(
        value_fn=lambda x: 0.5 * x[1] ** 2 - np.cos(x[0]),
        gradient_fn=lambda x: np.array([np.sin(x[0]), x[1]]),
        J=PENDULUM_J,
    )


@field_registry.register(
    name="related-plane", description="x1' = 1, x2' = x2; projects onto related-line", tags=["related", "2d"]
)
def related_plane() -> VectorField:
    return quadratic_field([1.0, 0.0], [[0.0, 0.0], [0.0, 1.0]], name="related-plane")


@field_registry.register(name="related-line", description="x' = 1", tags=["related", "1d"])
def related_line() -> VectorField:
    return quadratic_field([1.0], [[0.0]], name="related-line")


@field_registry.register(
    name="related-line-perturbed", description="x' = 1 + x; not related to related-plane", tags=["related", "1d"]
)
def related_line_perturbed() -> VectorField:
    return quadratic_field([1.0], [[1.0]], name="related-line-perturbed")


def projection_map() -> AffineMap:
    """(x1, x2) -> x1."""
    return AffineMap(np.array([[1.0, 0.0]]), np.zeros(1))


def related_pair(perturbed: bool = False) -> RelatedFieldPair:
    """related-plane over related-line (or related-line-perturbed) by projection."""
    target = related_line_perturbed() if perturbed else related_line()
    return RelatedFieldPair(related_plane(), target, projection_map())


def get_field(name: str) -> VectorField:
    return field_registry.build(name)
