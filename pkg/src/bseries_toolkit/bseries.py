"""B-series as exact coefficient maps, and the Butcher group.

Normalization: a series with coefficients c stands for

    B(c, f)(x0) = c(EMPTY) x0 + sum_t h^|t| c(t) F(t)(x0),

so the exact flow has c(t) = 1 / (sigma(t) gamma(t)) and the printed
coefficients (1/2 f'f, 1/6 f''(f,f), ...) appear verbatim. Internally the
group law works with the sigma-free weights a(t) = sigma(t) c(t).
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType

import numpy as np

from .eldiff import VectorField, elementary_differential
from .errors import FormatError, GroupMembershipError, OrderRangeError
from .models import Coefficient, CoefficientRecord, format_fraction, to_coefficient
from .trees import EMPTY, LEAF, RootedTree, TreeKey, chain, enumerate_trees, parse_key, trees_up_to

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BSeries:
    """Truncation order plus one coefficient per tree of order <= N (and EMPTY).

    Missing entries are filled with 0, so every tree up to the truncation
    order is explicitly present. Keys may be trees or encodings.
    """

    order: int
    coefficients: Mapping[TreeKey, Coefficient] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise OrderRangeError("truncation order", self.order, 1, 10**6)
        given: dict[TreeKey, Coefficient] = {}
        for key, value in self.coefficients.items():
            tree = parse_key(key) if isinstance(key, str) else key
            if tree.order > self.order:
                raise FormatError(f"tree {tree.encoding} exceeds truncation order {self.order}")
            given[tree] = to_coefficient(value)
        full: dict[TreeKey, Coefficient] = {EMPTY: given.get(EMPTY, Fraction(0))}
        for tree in trees_up_to(self.order):
            full[tree] = given.get(tree, Fraction(0))
        object.__setattr__(self, "coefficients", MappingProxyType(full))

    def __getitem__(self, key: TreeKey | str) -> Coefficient:
        tree = parse_key(key) if isinstance(key, str) else key
        if tree.order > self.order:
            raise OrderRangeError("tree order", tree.order, 0, self.order)
        return self.coefficients[tree]

    def __iter__(self) -> Iterator[TreeKey]:
        return iter(self.coefficients)

    def __len__(self) -> int:
        return len(self.coefficients)

    def items(self):
        return self.coefficients.items()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BSeries):
            return NotImplemented
        return self.order == other.order and dict(self.coefficients) == dict(other.coefficients)

    def __repr__(self) -> str:
        nonzero = ", ".join(f"{k.encoding or '()'}: {format_fraction(v)}" for k, v in self.items() if v != 0)
        return f"BSeries(order={self.order}, {{{nonzero}}})"

    @property
    def is_group_element(self) -> bool:
        return self.coefficients[EMPTY] == 1

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.coefficients.values())

    def truncate(self, order: int) -> BSeries:
        if order > self.order:
            raise OrderRangeError("truncation order", order, 1, self.order)
        return BSeries(order, {k: v for k, v in self.items() if k.order <= order})

    def records(self) -> list[CoefficientRecord]:
        """Serialization in canonical tree order."""
        return [CoefficientRecord(tree=k.encoding, coefficient=format_fraction(v)) for k, v in self.items()]

    @classmethod
    def from_records(cls, records: list[CoefficientRecord], order: int | None = None) -> BSeries:
        """Inverse of records(); the order defaults to the largest tree present."""
        coeffs = {parse_key(r.tree): r.value() for r in records}
        if order is None:
            order = max((k.order for k in coeffs), default=0)
        return cls(order, coeffs)


def _require_group(series: BSeries, label: str) -> None:
    if not series.is_group_element:
        raise GroupMembershipError(
            f"{label} has c(empty) = {format_fraction(series.coefficients[EMPTY])}, group operations need 1"
        )


def _weights(series: BSeries) -> dict[TreeKey, Coefficient]:
    """sigma-free weights a(t) = sigma(t) c(t); a(EMPTY) = c(EMPTY)."""
    return {k: (v if k is EMPTY else v * k.symmetry) for k, v in series.items()}


def _from_weights(order: int, weights: Mapping[TreeKey, Coefficient]) -> BSeries:
    return BSeries(order, {k: (v if k is EMPTY else v / k.symmetry) for k, v in weights.items()})


def _rooted_cuts(tree: RootedTree) -> Iterator[tuple[RootedTree, tuple[RootedTree, ...]]]:
    """Subtrees containing the root, each paired with the forest cut away.

    Children are treated as distinct nodes, so equal siblings give separate
    terms; the sum is over node subsets of a labeled copy of the tree.
    """
    options = []
    for kid in tree.children:
        options.append([(None, (kid,))] + list(_rooted_cuts(kid)))
    for combo in itertools.product(*options):
        kept = tuple(sub for sub, _ in combo if sub is not None)
        removed = tuple(piece for _, forest in combo for piece in forest)
        yield RootedTree(kept), removed


@lru_cache(maxsize=None)
def ordered_subtrees(tree: RootedTree) -> tuple[tuple[TreeKey, tuple[RootedTree, ...]], ...]:
    """All (trunk, removed forest) splittings, starting with (EMPTY, (tree,))."""
    return ((EMPTY, (tree,)), *_rooted_cuts(tree))


def compose(a: BSeries, b: BSeries) -> BSeries:
    """Series of the map "apply a, then b".

    With weights, (ab)(t) = sum over splittings of b(trunk) * prod a(piece).
    Operands truncated at different orders are composed at the smaller one.
    """
    _require_group(a, "first operand")
    _require_group(b, "second operand")
    order = min(a.order, b.order)
    wa, wb = _weights(a), _weights(b)
    out: dict[TreeKey, Coefficient] = {EMPTY: Fraction(1)}
    for tree in trees_up_to(order):
        total: Coefficient = Fraction(0)
        for trunk, forest in ordered_subtrees(tree):
            term = wb[trunk]
            if term == 0:
                continue
            for piece in forest:
                term *= wa[piece]
            total += term
        out[tree] = total
    return _from_weights(order, out)


def inverse(a: BSeries) -> BSeries:
    """Series x with compose(a, x) = identity, solved order by order.

    At tree t the unknown x(t) appears once (full trunk) and every other
    term involves only x on strictly smaller trees.
    """
    _require_group(a, "series")
    wa = _weights(a)
    wx: dict[TreeKey, Coefficient] = {EMPTY: Fraction(1)}
    for tree in trees_up_to(a.order):
        rest: Coefficient = wa[tree]
        for trunk, forest in ordered_subtrees(tree):
            if trunk is EMPTY or not forest:
                continue
            term = wx[trunk]
            for piece in forest:
                term *= wa[piece]
            rest += term
        wx[tree] = -rest
    return _from_weights(a.order, wx)


def identity_series(order: int) -> BSeries:
    return BSeries(order, {EMPTY: 1})


def euler_series(order: int) -> BSeries:
    """x0 + h f(x0)."""
    return BSeries(order, {EMPTY: 1, LEAF: 1})


def exact_flow_series(order: int) -> BSeries:
    """c(t) = 1 / (sigma(t) gamma(t))."""
    coeffs: dict[TreeKey, Coefficient] = {EMPTY: Fraction(1)}
    for tree in trees_up_to(order):
        coeffs[tree] = Fraction(1, tree.symmetry * tree.density)
    return BSeries(order, coeffs)


def exponential_integrator_series(order: int) -> BSeries:
    """x0 + phi(h f') h f with phi(z) = (e^z - 1)/z.

    phi(h f') h f = sum_k (h f')^k h f / (k+1)!, and (h f')^k h f is the ladder
    of k+1 nodes, so only ladders get nonzero coefficients.
    """
    coeffs: dict[TreeKey, Coefficient] = {EMPTY: Fraction(1)}
    for k in range(order):
        coeffs[chain(k + 1)] = Fraction(1, math.factorial(k + 1))
    return BSeries(order, coeffs)


def avf_series(order: int) -> BSeries:
    """Average vector field map x1 = x0 + h int_0^1 f(x0 + xi (x1 - x0)) dxi.

    Fixed-point substitution, order by order: inserting the current series for
    x1 - x0 into the integrand, the term f^(k)(x0)(...) built on subtrees
    t1..tk carries xi^k * prod a(ti); integrating over xi gives 1/(k+1).
    """
    weights: dict[TreeKey, Coefficient] = {EMPTY: Fraction(1)}
    for n in range(1, order + 1):
        for tree in enumerate_trees(n):
            term = Fraction(1, len(tree.children) + 1)
            for kid in tree.children:
                term *= weights[kid]
            weights[tree] = term
    return _from_weights(order, weights)


def scaled(series: BSeries, factor: Coefficient) -> BSeries:
    """c(t) -> factor^|t| c(t): the same map with step size factor * h."""
    return BSeries(series.order, {k: v * factor**k.order for k, v in series.items()})


def agreement_order(series: BSeries, reference: BSeries | None = None) -> int:
    """Largest p with series == reference on every tree of order <= p.

    The reference defaults to the exact flow, making this the order of the
    method the series belongs to.
    """
    if reference is None:
        reference = exact_flow_series(series.order)
    if series[EMPTY] != reference[EMPTY]:
        return 0
    order = min(series.order, reference.order)
    for n in range(1, order + 1):
        if any(series[t] != reference[t] for t in enumerate_trees(n)):
            return n - 1
    return order


def evaluate(series: BSeries, f: VectorField, x0, h: float) -> np.ndarray:
    """c(EMPTY) x0 + sum_t h^|t| c(t) F(t)(x0); zero terms are skipped."""
    x0 = f.point(x0)
    out = float(series[EMPTY]) * x0
    for tree, coeff in series.items():
        if tree is EMPTY or coeff == 0:
            continue
        out = out + (h**tree.order) * float(coeff) * elementary_differential(tree, f, x0)
    return out
