"""Runge-Kutta tableaux: elementary weights, order conditions, Gauss methods, stepping."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.polynomial import legendre

from .bseries import BSeries
from .config import get_settings
from .eldiff import VectorField
from .errors import ConvergenceError, DimensionError, FormatError, OrderRangeError, StructureError
from .models import Coefficient, TableauFile, dump_document, format_fraction, load_tableau_file, to_coefficient
from .trees import EMPTY, RootedTree, enumerate_trees, trees_up_to

logger = logging.getLogger(__name__)

NumericMode = Literal["exact", "floating"]

GAUSS_STAGES = (1, 2, 3)


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Stage matrix a and weights b.

    Exact mode when every entry is rational (ints, Fractions, "p/q" strings);
    a single float entry makes the whole tableau floating.
    """

    a: tuple[tuple[Coefficient, ...], ...]
    b: tuple[Coefficient, ...]
    name: str = "tableau"
    numeric_mode: NumericMode = field(init=False)

    def __post_init__(self) -> None:
        rows = [tuple(to_coefficient(x) for x in row) for row in self.a]
        b = tuple(to_coefficient(x) for x in self.b)
        s = len(b)
        if s < 1:
            raise DimensionError("a tableau needs at least one stage")
        if len(rows) != s or any(len(row) != s for row in rows):
            raise DimensionError(f"a must be {s}x{s} to match {s} weights")
        exact = all(isinstance(x, Fraction) for row in rows for x in row) and all(
            isinstance(x, Fraction) for x in b
        )
        if not exact:
            rows = [tuple(float(x) for x in row) for row in rows]
            b = tuple(float(x) for x in b)
        object.__setattr__(self, "a", tuple(rows))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "numeric_mode", "exact" if exact else "floating")

    @property
    def stages(self) -> int:
        return len(self.b)

    @property
    def is_exact(self) -> bool:
        return self.numeric_mode == "exact"

    @property
    def abscissae(self) -> tuple[Coefficient, ...]:
        """c_i = sum_j a_ij; a file's c column is checked against these on load."""
        return tuple(sum(row, Fraction(0) if self.is_exact else 0.0) for row in self.a)

    @property
    def is_explicit(self) -> bool:
        return all(self.a[i][j] == 0 for i in range(self.stages) for j in range(i, self.stages))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ButcherTableau):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def to_floating(self) -> ButcherTableau:
        return ButcherTableau(
            tuple(tuple(float(x) for x in row) for row in self.a),
            tuple(float(x) for x in self.b),
            name=self.name,
        )

    def matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.a])

    def weights(self) -> np.ndarray:
        return np.array([float(x) for x in self.b])

    def to_file(self) -> TableauFile:
        def enc(x: Coefficient) -> str | float:
            return format_fraction(x) if isinstance(x, Fraction) else float(x)

        return TableauFile(
            stages=self.stages,
            a=[[enc(x) for x in row] for row in self.a],
            b=[enc(x) for x in self.b],
            c=[enc(x) for x in self.abscissae],
        )

    @classmethod
    def from_file(cls, data: TableauFile, name: str = "tableau") -> ButcherTableau:
        return cls(tuple(tuple(row) for row in data.a), tuple(data.b), name=name)


def load_tableau(path: Path | str) -> ButcherTableau:
    path = Path(path)
    return ButcherTableau.from_file(load_tableau_file(path), name=path.stem)


def dump_tableau(t: ButcherTableau, path: Path | str) -> None:
    dump_document(t.to_file().model_dump(exclude_none=True), path)


def _one(t: ButcherTableau) -> Coefficient:
    return Fraction(1) if t.is_exact else 1.0


def _stage_weights(t: ButcherTableau, tree: RootedTree, memo: dict) -> tuple[Coefficient, ...]:
    """g_i(leaf) = 1, g_i([t1..tk]) = prod_m sum_j a_ij g_j(t_m)."""
    if tree in memo:
        return memo[tree]
    s = t.stages
    g = [_one(t)] * s
    for kid in tree.children:
        gk = _stage_weights(t, kid, memo)
        for i in range(s):
            g[i] = g[i] * sum((t.a[i][j] * gk[j] for j in range(s)), Fraction(0) if t.is_exact else 0.0)
    memo[tree] = tuple(g)
    return memo[tree]


def elementary_weight(t: ButcherTableau, tree: RootedTree, _memo: dict | None = None) -> Coefficient:
    """Phi(tree) = sum_i b_i g_i(tree)."""
    memo = {} if _memo is None else _memo
    g = _stage_weights(t, tree, memo)
    return sum((bi * gi for bi, gi in zip(t.b, g)), Fraction(0) if t.is_exact else 0.0)


def rk_to_bseries(t: ButcherTableau, order: int) -> BSeries:
    """c(EMPTY) = 1, c(tree) = Phi(tree) / sigma(tree)."""
    memo: dict = {}
    coeffs: dict = {EMPTY: Fraction(1)}
    for tree in trees_up_to(order):
        coeffs[tree] = elementary_weight(t, tree, memo) / tree.symmetry
    return BSeries(order, coeffs)


def order_conditions(p: int, cap: int | None = None) -> list[tuple[RootedTree, Fraction]]:
    """One (tree, 1/gamma(tree)) pair per tree of order <= p: Phi(tree) must equal it."""
    return [(tree, Fraction(1, tree.density)) for tree in trees_up_to(p, cap)]


@dataclass
class OrderReport:
    """Result of check_order."""

    order: int
    max_order: int
    satisfied: int
    total: int
    violations: list[str] = field(default_factory=list)  # encodings at the first failing order
    residuals: dict[str, float] = field(default_factory=dict)  # Phi*gamma - 1 per violated tree

    @property
    def summary(self) -> str:
        return f"order {self.order}; {self.satisfied}/{self.total} conditions satisfied"

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "max_order": self.max_order,
            "satisfied": self.satisfied,
            "total": self.total,
            "violations": self.violations,
            "residuals": self.residuals,
        }


def check_order(t: ButcherTableau, p_max: int, tol: float | None = None) -> OrderReport:
    """Attained order q <= p_max and the conditions violated at order q + 1.

    Exact tableaux are checked with exact equality Phi*gamma == 1; floating
    ones within tol (default 1e-12).
    """
    tol = get_settings().floating_condition_tol if tol is None else tol
    memo: dict = {}
    satisfied = total = 0
    attained: int | None = None
    violations: list[str] = []
    residuals: dict[str, float] = {}
    for n in range(1, p_max + 1):
        failing = []
        for tree in enumerate_trees(n):
            total += 1
            residual = elementary_weight(t, tree, memo) * tree.density - 1
            ok = residual == 0 if t.is_exact else abs(residual) <= tol
            if ok:
                satisfied += 1
            else:
                failing.append((tree, residual))
        if failing and attained is None:
            attained = n - 1
            violations = [tree.encoding for tree, _ in failing]
            residuals = {tree.encoding: float(r) for tree, r in failing}
    if attained is None:
        attained = p_max
    logger.debug("%s: order %d, %d/%d conditions", t.name, attained, satisfied, total)
    return OrderReport(attained, p_max, satisfied, total, violations, residuals)


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals."""
    n = len(rhs)
    m = [list(row) + [r] for row, r in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise StructureError(f"singular {n}x{n} system: no pivot in column {col}")
        m[col], m[pivot] = m[pivot], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col] / m[col][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def gauss_nodes(s: int) -> list[float]:
    """Roots of the shifted Legendre polynomial P_s(2t - 1), ascending.

    Sign changes on a grid bracket each root, bisection narrows the bracket,
    Newton polishes to machine precision.
    """
    p = legendre.Legendre.basis(s)
    dp = p.deriv()
    grid = np.linspace(-1.0, 1.0, 64 * s + 1)
    roots = []
    for lo, hi in zip(grid[:-1], grid[1:]):
        p_lo, p_hi = p(lo), p(hi)
        if p_lo == 0.0:
            roots.append(lo)
            continue
        if p_lo * p_hi > 0 or p_hi == 0.0:
            continue
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            if p(lo) * p(mid) <= 0:
                hi = mid
            else:
                lo = mid
        y = 0.5 * (lo + hi)
        for _ in range(50):
            step = p(y) / dp(y)
            y -= step
            if abs(step) < 1e-17:
                break
        roots.append(y)
    return [0.5 * (y + 1.0) for y in roots]


def collocation_tableau(nodes: Sequence[Coefficient], name: str = "collocation") -> ButcherTableau:
    """Collocation method at the given abscissae.

    Row i of a solves sum_j a_ij c_j^(k-1) = c_i^k / k and b solves
    sum_j b_j c_j^(k-1) = 1/k, for k = 1..s.
    """
    s = len(nodes)
    if s == 0:
        raise FormatError("collocation needs at least one node")
    repeated = sorted(float(c) for c, k in Counter(nodes).items() if k > 1)
    if repeated:
        raise FormatError(f"collocation nodes must be distinct; repeated: {repeated}")
    if all(isinstance(c, Fraction) for c in nodes):
        V = [[c ** (k - 1) for c in nodes] for k in range(1, s + 1)]
        rows = [tuple(_solve_exact(V, [ci**k / k for k in range(1, s + 1)])) for ci in nodes]
        b = _solve_exact(V, [Fraction(1, k) for k in range(1, s + 1)])
        return ButcherTableau(tuple(rows), tuple(b), name=name)
    c = np.array([float(x) for x in nodes])
    V = np.vander(c, s, increasing=True).T
    ks = np.arange(1, s + 1)
    rows = [np.linalg.solve(V, ci**ks / ks) for ci in c]
    b = np.linalg.solve(V, 1.0 / ks)
    return ButcherTableau(
        tuple(tuple(float(x) for x in row) for row in rows), tuple(float(x) for x in b), name=name
    )


def gauss_tableau(s: int) -> ButcherTableau:
    """s-stage Gauss method (order 2s); s = 1 is the exact implicit midpoint rule."""
    if s not in GAUSS_STAGES:
        raise OrderRangeError("Gauss stage count", s, GAUSS_STAGES[0], GAUSS_STAGES[-1])
    if s == 1:
        return collocation_tableau([Fraction(1, 2)], name="gauss1")
    return collocation_tableau(gauss_nodes(s), name=f"gauss{s}")


def solve_fixed_point(
    g: Callable[[np.ndarray], np.ndarray],
    y0: np.ndarray,
    tol: float,
    max_iter: int,
    damping: float = 1.0,
) -> tuple[np.ndarray, int]:
    """Iterate y <- (1 - damping) y + damping g(y) until max |g(y) - y| <= tol."""
    y = np.array(y0, dtype=float)
    residual = float("inf")
    for it in range(max_iter + 1):
        gy = g(y)
        residual = float(np.max(np.abs(gy - y)))
        if residual <= tol:
            logger.debug("fixed point reached in %d iterations (residual %.2e)", it, residual)
            return y, it
        y = (1.0 - damping) * y + damping * gy
    raise ConvergenceError("fixed-point iteration did not converge", residual, max_iter)


def rk_step(
    t: ButcherTableau,
    f: VectorField,
    x,
    h: float,
    tol: float | None = None,
    max_iter: int | None = None,
    damping: float = 1.0,
) -> np.ndarray:
    """One step x -> x + h sum_j b_j f(X_j).

    Explicit tableaux are resolved in one forward pass; implicit ones solve
    X_i = x + h sum_j a_ij f(X_j) by damped fixed-point iteration from X_i = x.
    """
    settings = get_settings()
    tol = settings.solver_tol if tol is None else tol
    max_iter = settings.solver_max_iter if max_iter is None else max_iter
    if h <= 0 or tol <= 0:
        raise ValueError("step size and tolerance must be positive")
    x = f.point(x)
    A, b = t.matrix(), t.weights()
    s = t.stages

    if t.is_explicit:
        K = np.zeros((s, f.dim))
        for i in range(s):
            K[i] = f.value(x + h * (A[i, :i] @ K[:i]))
        return x + h * (b @ K)

    def stage_map(X: np.ndarray) -> np.ndarray:
        F = np.array([f.value(Xi) for Xi in X])
        return x + h * (A @ F)

    X, _ = solve_fixed_point(stage_map, np.tile(x, (s, 1)), tol, max_iter, damping)
    F = np.array([f.value(Xi) for Xi in X])
    return x + h * (b @ F)
