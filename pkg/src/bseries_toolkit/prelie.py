"""The free pre-Lie algebra on rooted trees, and its image under F.

Grafting t1 |> t2 attaches the root of t1 by a new edge to each node of t2 in
turn and sums the results. On vector fields the same product is the flat
covariant derivative f |> g = g'(f), and F(t1 |> t2) = F(t1) |> F(t2).
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType

import numpy as np

from .eldiff import VectorField, differential_field, elementary_differential
from .errors import DimensionError
from .models import CoefficientRecord, format_fraction, to_coefficient
from .trees import LEAF, RawTree, RootedTree, canonicalize, sort_key, trees_up_to

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TreeCombination:
    """Finite rational linear combination of rooted trees, zero terms pruned."""

    terms: Mapping[RootedTree, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        merged: dict[RootedTree, Fraction] = {}
        for key, value in self.terms.items():
            tree = canonicalize(key)
            merged[tree] = merged.get(tree, Fraction(0)) + to_coefficient(value)
        kept = {t: merged[t] for t in sorted(merged, key=sort_key) if merged[t] != 0}
        object.__setattr__(self, "terms", MappingProxyType(kept))

    @classmethod
    def of(cls, tree: RawTree, coefficient: int | Fraction = 1) -> TreeCombination:
        return cls({canonicalize(tree): coefficient})

    @classmethod
    def zero(cls) -> TreeCombination:
        return cls({})

    def __getitem__(self, tree: RawTree) -> Fraction:
        return self.terms.get(canonicalize(tree), Fraction(0))

    def __iter__(self) -> Iterator[RootedTree]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self):
        return self.terms.items()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreeCombination):
            return NotImplemented
        return dict(self.terms) == dict(other.terms)

    def __add__(self, other: TreeCombination) -> TreeCombination:
        out = Counter(dict(self.terms))
        for t, c in other.items():
            out[t] += c
        return TreeCombination(dict(out))

    def __neg__(self) -> TreeCombination:
        return TreeCombination({t: -c for t, c in self.items()})

    def __sub__(self, other: TreeCombination) -> TreeCombination:
        return self + (-other)

    def __mul__(self, scalar: int | Fraction) -> TreeCombination:
        return TreeCombination({t: c * scalar for t, c in self.items()})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if not self.terms:
            return "TreeCombination(0)"
        body = " + ".join(f"{format_fraction(c)}*{t.encoding}" for t, c in self.items())
        return f"TreeCombination({body})"

    @property
    def mass(self) -> Fraction:
        """Sum of the coefficients."""
        return sum(self.terms.values(), Fraction(0))

    def records(self) -> list[CoefficientRecord]:
        return [CoefficientRecord(tree=t.encoding, coefficient=format_fraction(c)) for t, c in self.items()]

    @classmethod
    def from_records(cls, records: Sequence[CoefficientRecord]) -> TreeCombination:
        return cls({r.tree: r.value() for r in records})


@lru_cache(maxsize=4096)
def _graft_terms(t1: RootedTree, t2: RootedTree) -> tuple[tuple[RootedTree, int], ...]:
    counts = Counter(t2.graft_at(path, t1) for path in t2.nodes())
    return tuple(counts.items())


def graft(t1: RawTree, t2: RawTree) -> TreeCombination:
    """t1 |> t2: attach the root of t1 to every node of t2; multiplicities add up."""
    return TreeCombination(dict(_graft_terms(canonicalize(t1), canonicalize(t2))))


def graft_lin(a: TreeCombination, b: TreeCombination) -> TreeCombination:
    """Bilinear extension of graft."""
    out: Counter = Counter()
    for ta, ca in a.items():
        for tb, cb in b.items():
            for t, mult in _graft_terms(ta, tb):
                out[t] += ca * cb * mult
    return TreeCombination(dict(out))


def associator(a: TreeCombination, b: TreeCombination, c: TreeCombination) -> TreeCombination:
    """a |> (b |> c) - (a |> b) |> c."""
    return graft_lin(a, graft_lin(b, c)) - graft_lin(graft_lin(a, b), c)


def prelie_defect(a: TreeCombination, b: TreeCombination, c: TreeCombination) -> TreeCombination:
    """Associator symmetric-difference in the first two slots; zero in a pre-Lie algebra."""
    return associator(a, b, c) - associator(b, a, c)


def bracket(a: TreeCombination, b: TreeCombination) -> TreeCombination:
    """[a, b] = a |> b - b |> a."""
    return graft_lin(a, b) - graft_lin(b, a)


def jacobi_defect(a: TreeCombination, b: TreeCombination, c: TreeCombination) -> TreeCombination:
    """[a,[b,c]] + [b,[c,a]] + [c,[a,b]]."""
    return bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))


def flow_derivative(n: int) -> TreeCombination:
    """n-th time derivative of a solution of x' = f(x), as trees.

    d/dt F(t)(x(t)) = F(leaf |> t)(x(t)), so x^(n) = leaf |> x^(n-1) with x' = leaf.
    """
    if n < 1:
        raise ValueError(f"derivative order must be positive, got {n}")
    out = TreeCombination.of(LEAF)
    for _ in range(n - 1):
        out = graft_lin(TreeCombination.of(LEAF), out)
    return out


def random_combination(
    rng: np.random.Generator, max_order: int, size: int = 3, max_numerator: int = 5
) -> TreeCombination:
    """size random trees of order <= max_order with small random rational coefficients."""
    pool = trees_up_to(max_order)
    terms: dict[RootedTree, Fraction] = {}
    for idx in rng.choice(len(pool), size=min(size, len(pool)), replace=False):
        num = int(rng.integers(-max_numerator, max_numerator + 1)) or 1
        den = int(rng.integers(1, max_numerator + 1))
        terms[pool[int(idx)]] = Fraction(num, den)
    return TreeCombination(terms)


def vf_graft(f: VectorField, g: VectorField, x) -> np.ndarray:
    """f |> g at x: g'(x)(f(x))."""
    if f.dim != g.dim:
        raise DimensionError(f"fields of dimension {f.dim} and {g.dim} cannot be grafted")
    x = g.point(x)
    return g.derivative(x, [f.value(x)])


def combination_value(combo: TreeCombination, f: VectorField, x) -> np.ndarray:
    """sum_t c_t F(t)(x)."""
    x = f.point(x)
    out = np.zeros(f.dim)
    for t, c in combo.items():
        out = out + float(c) * elementary_differential(t, f, x)
    return out


def morphism_check(
    t1: RawTree, t2: RawTree, f: VectorField, points: Sequence, tol: float
) -> bool:
    """F(t1 |> t2) == F(t1) |> F(t2) within tol at every sample point."""
    t1, t2 = canonicalize(t1), canonicalize(t2)
    left_combo = graft(t1, t2)
    g1, g2 = differential_field(t1, f), differential_field(t2, f)
    for x in points:
        left = combination_value(left_combo, f, x)
        right = vf_graft(g1, g2, x)
        if np.max(np.abs(left - right)) > tol:
            logger.debug("morphism fails for %s |> %s at %s", t1.encoding, t2.encoding, x)
            return False
    return True


def tree_triples(max_total: int) -> Iterator[tuple[RootedTree, RootedTree, RootedTree]]:
    """All ordered triples of trees whose orders sum to at most max_total."""
    if max_total < 3:
        return
    pool = trees_up_to(max_total - 2)
    for a in pool:
        for b in pool:
            if a.order + b.order > max_total - 1:
                continue
            for c in pool:
                if a.order + b.order + c.order <= max_total:
                    yield a, b, c
