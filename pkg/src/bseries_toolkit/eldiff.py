"""Vector fields with higher derivatives, elementary differentials, and sample checks.

A VectorField supplies f(x) and the multilinear derivatives
f^(k)(x)(v1, ..., vk). Fields with an analytic derivative evaluator are exact;
fields without one fall back to nested central differences.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Protocol

import numpy as np

from .errors import DerivativeDepthError, DimensionError, SingularMapError, StructureError
from .trees import RootedTree

logger = logging.getLogger(__name__)

ValueFn = Callable[[np.ndarray], np.ndarray]
DerivativeFn = Callable[[np.ndarray, Sequence[np.ndarray]], np.ndarray]
Mode = Literal["analytic", "finite_difference"]

MACHINE_EPS = float(np.finfo(float).eps)


def default_step(k: int) -> float:
    """Central-difference step for a k-th derivative: eps^(1/(k+2))."""
    return MACHINE_EPS ** (1.0 / (k + 2))


def as_point(x, dim: int) -> np.ndarray:
    """Flat float array of length dim, or DimensionError."""
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape[0] != dim:
        raise DimensionError(f"expected a vector of length {dim}, got length {arr.shape[0]}")
    return arr


def nested_difference(
    g: ValueFn, x: np.ndarray, directions: Sequence[np.ndarray], eps: float
) -> np.ndarray:
    """Mixed directional derivative of g along all directions by nested central differences."""
    if not directions:
        return np.asarray(g(x), dtype=float)
    v, rest = directions[0], directions[1:]
    plus = nested_difference(g, x + eps * v, rest, eps)
    minus = nested_difference(g, x - eps * v, rest, eps)
    return (plus - minus) / (2.0 * eps)


@dataclass(frozen=True, eq=False)
class VectorField:
    """A vector field on R^dim with derivative evaluator.

    ``derivative_fn(x, [v1..vk])`` returns f^(k)(x)(v1..vk) for k >= 1. When it
    is missing, derivatives come from nested central differences with step
    ``step`` (default eps^(1/(k+2))). ``max_derivative`` bounds the k the field
    will answer; None means unbounded.
    """

    dim: int
    value_fn: ValueFn
    derivative_fn: DerivativeFn | None = None
    max_derivative: int | None = None
    step: float | None = None
    name: str = "field"
    mode: Mode = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DimensionError(f"field dimension must be positive, got {self.dim}")
        if self.mode is None:
            object.__setattr__(
                self, "mode", "analytic" if self.derivative_fn is not None else "finite_difference"
            )

    def point(self, x) -> np.ndarray:
        return as_point(x, self.dim)

    def value(self, x) -> np.ndarray:
        x = self.point(x)
        out = np.asarray(self.value_fn(x), dtype=float).reshape(-1)
        if out.shape[0] != self.dim:
            raise DimensionError(f"{self.name} returned length {out.shape[0]}, expected {self.dim}")
        return out

    def __call__(self, x) -> np.ndarray:
        return self.value(x)

    def derivative(self, x, directions: Sequence) -> np.ndarray:
        """f^(k)(x)(v1, ..., vk) with k = len(directions); k = 0 gives f(x)."""
        k = len(directions)
        if k == 0:
            return self.value(x)
        if self.max_derivative is not None and k > self.max_derivative:
            raise DerivativeDepthError(
                f"{self.name} supplies derivatives up to order {self.max_derivative}, asked for {k}"
            )
        x = self.point(x)
        dirs = [as_point(v, self.dim) for v in directions]
        if self.derivative_fn is not None:
            return np.asarray(self.derivative_fn(x, dirs), dtype=float).reshape(-1)
        eps = self.step if self.step is not None else default_step(k)
        return nested_difference(self.value, x, dirs, eps)

    def jacobian(self, x) -> np.ndarray:
        x = self.point(x)
        basis = np.eye(self.dim)
        return np.column_stack([self.derivative(x, [basis[i]]) for i in range(self.dim)])

    def divergence(self, x) -> float:
        return float(np.trace(self.jacobian(x)))


@dataclass(frozen=True, eq=False)
class AffineMap:
    """phi(x) = A x + b; any shape, square and invertible for equivariance use."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise DimensionError(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim_in(self) -> int:
        return self.A.shape[1]

    @property
    def dim_out(self) -> int:
        return self.A.shape[0]

    def __call__(self, x) -> np.ndarray:
        return self.A @ as_point(x, self.dim_in) + self.b

    def is_invertible(self) -> bool:
        return self.dim_in == self.dim_out and np.linalg.matrix_rank(self.A) == self.dim_in

    def inverse(self) -> AffineMap:
        if not self.is_invertible():
            raise SingularMapError(f"affine map with {self.dim_out}x{self.dim_in} matrix is not invertible")
        A_inv = np.linalg.inv(self.A)
        return AffineMap(A_inv, -A_inv @ self.b)

    @classmethod
    def identity(cls, dim: int) -> AffineMap:
        return cls(np.eye(dim), np.zeros(dim))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, max_cond: float = 50.0) -> AffineMap:
        """Random invertible map with condition number below max_cond."""
        while True:
            A = rng.normal(size=(dim, dim))
            if np.linalg.cond(A) < max_cond:
                return cls(A, rng.normal(size=dim))


def apply_affine_to_field(phi: AffineMap, f: VectorField) -> VectorField:
    """phi . f : y -> A f(A^-1 (y - b)), derivatives transformed alongside."""
    if phi.dim_in != f.dim:
        raise DimensionError(f"map acts on dimension {phi.dim_in}, field has dimension {f.dim}")
    inv = phi.inverse()
    A, A_inv = phi.A, inv.A

    def value(y: np.ndarray) -> np.ndarray:
        return A @ f.value(inv(y))

    def derivative(y: np.ndarray, dirs: Sequence[np.ndarray]) -> np.ndarray:
        return A @ f.derivative(inv(y), [A_inv @ v for v in dirs])

    return VectorField(
        dim=f.dim,
        value_fn=value,
        derivative_fn=derivative,
        max_derivative=f.max_derivative,
        name=f"phi.{f.name}",
        mode=f.mode,
    )


def elementary_differential(tree: RootedTree, f: VectorField, x) -> np.ndarray:
    """F(leaf)(x) = f(x); F([t1..tk])(x) = f^(k)(x)(F(t1)(x), ..., F(tk)(x))."""
    x = f.point(x)
    memo: dict[RootedTree, np.ndarray] = {}

    def rec(t: RootedTree) -> np.ndarray:
        if t not in memo:
            if t.children:
                memo[t] = f.derivative(x, [rec(kid) for kid in t.children])
            else:
                memo[t] = f.value(x)
        return memo[t]

    return rec(tree)


def differential_tangent(tree: RootedTree, f: VectorField, x, v) -> np.ndarray:
    """Directional derivative D_v F(tree)(x), by differentiating the recursion."""
    x = f.point(x)
    v = f.point(v)
    memo: dict[RootedTree, tuple[np.ndarray, np.ndarray]] = {}

    def rec(t: RootedTree) -> tuple[np.ndarray, np.ndarray]:
        if t in memo:
            return memo[t]
        if not t.children:
            memo[t] = (f.value(x), f.derivative(x, [v]))
            return memo[t]
        kids = [rec(kid) for kid in t.children]
        values = [k[0] for k in kids]
        out = f.derivative(x, values)
        tangent = f.derivative(x, [v, *values])
        for i, (_, d_kid) in enumerate(kids):
            tangent = tangent + f.derivative(x, values[:i] + [d_kid] + values[i + 1 :])
        memo[t] = (out, tangent)
        return memo[t]

    return rec(tree)[1]


def combination_field(
    terms: Mapping[RootedTree, float | Fraction | int], f: VectorField, name: str | None = None
) -> VectorField:
    """x -> sum_t c_t F(t)(x) as a VectorField.

    The first derivative is exact (tangent of the recursion); higher ones are
    central differences of it, so the field reports finite_difference mode.
    """
    items = [(t, float(c)) for t, c in terms.items() if c != 0]

    def value(x: np.ndarray) -> np.ndarray:
        out = np.zeros(f.dim)
        for t, c in items:
            out = out + c * elementary_differential(t, f, x)
        return out

    def first(x: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = np.zeros(f.dim)
        for t, c in items:
            out = out + c * differential_tangent(t, f, x, v)
        return out

    def derivative(x: np.ndarray, dirs: Sequence[np.ndarray]) -> np.ndarray:
        if len(dirs) == 1:
            return first(x, dirs[0])
        last = dirs[-1]
        return nested_difference(lambda y: first(y, last), x, dirs[:-1], default_step(len(dirs)))

    label = name or " + ".join(f"{c:g}*F({t.encoding})" for t, c in items) or "0"
    return VectorField(dim=f.dim, value_fn=value, derivative_fn=derivative, name=label, mode="finite_difference")


def differential_field(tree: RootedTree, f: VectorField) -> VectorField:
    """F(tree) as a VectorField."""
    return combination_field({tree: 1}, f, name=f"F({tree.encoding})")


class HasGradient(Protocol):
    def gradient(self, x) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Scalar energy H with gradient and the structure matrix J (f = J^-1 grad H)."""

    value_fn: Callable[[np.ndarray], float]
    gradient_fn: Callable[[np.ndarray], np.ndarray]
    J: np.ndarray

    def __call__(self, x) -> float:
        return float(self.value_fn(np.asarray(x, dtype=float)))

    def gradient(self, x) -> np.ndarray:
        return np.asarray(self.gradient_fn(np.asarray(x, dtype=float)), dtype=float)


def _require_points(points: Sequence) -> None:
    if len(points) == 0:
        raise DimensionError("at least one sample point is required")


def is_energy_preserving_sample(g: VectorField, H: HasGradient, points: Sequence, tol: float) -> bool:
    """True iff |grad H(x) . g(x)| <= tol at every sample point."""
    _require_points(points)
    for x in points:
        x = g.point(x)
        if abs(float(H.gradient(x) @ g.value(x))) > tol:
            return False
    return True


def is_hamiltonian_sample(g: VectorField, J, points: Sequence, tol: float) -> bool:
    """True iff the Jacobian of x -> J g(x) is symmetric within tol at every point."""
    J = np.atleast_2d(np.asarray(J, dtype=float))
    if J.shape != (g.dim, g.dim):
        raise DimensionError(f"J must be {g.dim}x{g.dim}, got {J.shape[0]}x{J.shape[1]}")
    if not np.allclose(J, -J.T, atol=1e-14):
        raise StructureError("J must be antisymmetric")
    if np.linalg.matrix_rank(J) < g.dim:
        raise SingularMapError("J must be invertible")
    _require_points(points)
    for x in points:
        M = J @ g.jacobian(x)
        if np.max(np.abs(M - M.T)) > tol:
            return False
    return True


def sample_points(dim: int, count: int, rng: np.random.Generator, scale: float = 1.0) -> list[np.ndarray]:
    """count points drawn uniformly from [-scale, scale]^dim."""
    return [rng.uniform(-scale, scale, size=dim) for _ in range(count)]
