"""Aromatic trees: shapes of partial maps {2..n} -> {1..n}.

Node 1 is the root and has no image. Following images from the root's side
gives one rooted tree at node 1; every other weakly connected component is a
directed cycle (possibly a self-loop) with rooted trees hanging off it. The
aromatic elementary differential contracts derivative tensors of f along the
edges, so cycles become traces such as div f.

Shapes are stored in canonical labeling: the lexicographically smallest parent
sequence (p(2), ..., p(n)) over all relabelings fixing node 1. The wire
encoding is that sequence joined by commas, or "-" for the bare root.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType

import numpy as np

from .config import get_settings
from .eldiff import AffineMap, VectorField, apply_affine_to_field, elementary_differential
from .errors import DimensionError, FormatError, OrderRangeError
from .models import Coefficient, CoefficientRecord, format_fraction, to_coefficient
from .trees import LEAF, RootedTree, enumerate_trees, sort_key, trees_up_to

logger = logging.getLogger(__name__)

ParentMap = Mapping[int, int] | Sequence[int]
Cycle = tuple[RootedTree, ...]

# Largest number of entries in one derivative tensor.
TENSOR_LIMIT = 200_000


@dataclass(frozen=True, eq=False)
class AromaticTree:
    """Canonical aromatic tree. Build with canonicalize_aromatic or parse_aromatic."""

    parents: tuple[int, ...]
    n: int = field(init=False)
    encoding: str = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "n", len(self.parents) + 1)
        object.__setattr__(self, "encoding", ",".join(map(str, self.parents)) or "-")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AromaticTree):
            return NotImplemented
        return self.parents == other.parents

    def __hash__(self) -> int:
        return hash(self.parents)

    def __repr__(self) -> str:
        return f"AromaticTree({self.encoding!r})"

    def __str__(self) -> str:
        return self.encoding

    @property
    def parent_map(self) -> dict[int, int]:
        return {v: p for v, p in zip(range(2, self.n + 1), self.parents)}

    def in_neighbors(self, v: int) -> list[int]:
        """Nodes mapping to v; a self-loop node lists itself."""
        return [u for u, p in self.parent_map.items() if p == v]

    @property
    def is_rooted(self) -> bool:
        """True when there are no cycles, i.e. every node reaches the root."""
        return all(_reaches_root(self.parent_map, v) for v in range(2, self.n + 1))

    def as_rooted_tree(self) -> RootedTree:
        if not self.is_rooted:
            raise FormatError(f"aromatic tree {self.encoding} has cycles")
        return self.components()[0]

    def components(self) -> tuple[RootedTree, tuple[Cycle, ...]]:
        """The rooted tree at node 1 and the cycles, each as its hanging trees."""
        shape = _Shape(self.n, self.parent_map)
        cycles = sorted(
            (tuple(shape.hang[c] for c in cyc) for cyc in shape.cycles),
            key=lambda cyc: [sort_key(t) for t in cyc],
        )
        return shape.hang[1], tuple(_min_rotation(c) for c in cycles)


def _reaches_root(parent: Mapping[int, int], v: int) -> bool:
    seen = set()
    while v != 1:
        if v in seen:
            return False
        seen.add(v)
        v = parent[v]
    return True


def _min_rotation(cycle: Cycle) -> Cycle:
    rotations = [cycle[i:] + cycle[:i] for i in range(len(cycle))]
    return min(rotations, key=lambda r: [sort_key(t) for t in r])


class _Shape:
    """Cycle structure and hanging trees of a labeled functional graph."""

    def __init__(self, n: int, parent: Mapping[int, int]):
        self.n = n
        self.parent = parent
        self.on_cycle: set[int] = set()
        self.cycles: list[list[int]] = []
        for start in range(2, n + 1):
            path: list[int] = []
            v = start
            while v != 1 and v not in path and v not in self.on_cycle:
                path.append(v)
                v = parent[v]
            if v in path:
                cyc = path[path.index(v) :]
                self.on_cycle.update(cyc)
                self.cycles.append(cyc)
        self.children: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
        for v, p in parent.items():
            if not (v in self.on_cycle and p in self.on_cycle):
                self.children[p].append(v)
        self.hang: dict[int, RootedTree] = {}
        for v in range(1, n + 1):
            self._hang(v)
        self.component: dict[int, int] = {}
        self.codes: list[tuple[str, ...]] = []
        for i, cyc in enumerate(self.cycles):
            self.codes.append(tuple(t.encoding for t in _min_rotation(tuple(self.hang[c] for c in cyc))))
            for c in cyc:
                self._mark(c, i)

    def _hang(self, v: int) -> RootedTree:
        if v not in self.hang:
            self.hang[v] = RootedTree(tuple(self._hang(u) for u in self.children[v]))
        return self.hang[v]

    def _mark(self, v: int, comp: int) -> None:
        self.component[v] = comp
        for u in self.children[v]:
            self._mark(u, comp)


def _validate(m: ParentMap) -> tuple[int, dict[int, int]]:
    if isinstance(m, Mapping):
        parent = {int(k): int(v) for k, v in m.items()}
        n = len(parent) + 1
        if set(parent) != set(range(2, n + 1)):
            raise FormatError(f"parent map must be defined exactly on 2..{n}, got keys {sorted(parent)}")
    else:
        seq = [int(p) for p in m]
        n = len(seq) + 1
        parent = dict(zip(range(2, n + 1), seq))
    for v, p in parent.items():
        if not 1 <= p <= n:
            raise FormatError(f"parent of node {v} is {p}, outside 1..{n}")
    return n, parent


def _canonical_sequence(n: int, parent: Mapping[int, int]) -> tuple[int, ...]:
    """Lexicographically smallest parent sequence over relabelings fixing node 1.

    Labels are handed out in order 2, 3, ... The entry written for label k is
    the new label of the node's parent: an already labeled parent gives a value
    below k, a self-loop gives k, and an unlabeled parent gives at best k + 1,
    which forces that parent to take the next label. Only choices reaching the
    smallest value are followed; interchangeable choices (same parent and same
    hanging tree, or isomorphic untouched components) are tried once.
    """
    if n == 1:
        return ()
    shape = _Shape(n, parent)
    label_of: dict[int, int] = {1: 1}
    seq: list[int] = []
    best: list[list[int] | None] = [None]

    def value(v: int, k: int) -> tuple[int, int | None]:
        p = parent[v]
        if p in label_of:
            return label_of[p], None
        if p == v:
            return k, None
        return k + 1, p

    def candidates(k: int) -> list[int]:
        free = [v for v in range(2, n + 1) if v not in label_of]
        attached = [v for v in free if parent[v] in label_of]
        if attached:
            low = min(label_of[parent[v]] for v in attached)
            picked: dict[str, int] = {}
            for v in attached:
                if label_of[parent[v]] == low:
                    picked.setdefault(shape.hang[v].encoding, v)
            return list(picked.values())
        loops = [v for v in free if parent[v] == v]
        if loops:
            by_code: dict[tuple[str, ...], int] = {}
            for v in loops:
                by_code.setdefault(shape.codes[shape.component[v]], v)
            return list(by_code.values())
        reps: dict[tuple[str, ...], int] = {}
        for v in free:
            comp = shape.component[v]
            reps.setdefault(shape.codes[comp], comp)
        return [v for v in free if shape.component[v] in reps.values()]

    def search(forced: int | None) -> None:
        k = len(label_of) + 1
        if k > n:
            if best[0] is None or seq < best[0]:
                best[0] = list(seq)
            return
        for v in [forced] if forced is not None else candidates(k):
            label_of[v] = k
            val, nxt = value(v, k)
            seq.append(val)
            if best[0] is None or seq <= best[0][: len(seq)]:
                search(nxt)
            seq.pop()
            del label_of[v]

    search(None)
    return tuple(best[0])


def canonicalize_aromatic(m: ParentMap) -> AromaticTree:
    """Canonical shape of a parent map, given as {v: p(v)} or as (p(2), ..., p(n))."""
    n, parent = _validate(m)
    return AromaticTree(_canonical_sequence(n, parent))


def parse_aromatic(text: str) -> AromaticTree:
    """Read "p2,...,pn" (any labeling) or "-"; the result is canonical."""
    text = text.strip()
    if text == "-":
        return AromaticTree(())
    try:
        seq = [int(part) for part in text.split(",")]
    except ValueError as e:
        raise FormatError(f"not an aromatic tree encoding: {text!r}") from e
    return canonicalize_aromatic(seq)


def from_rooted_tree(tree: RootedTree) -> AromaticTree:
    parent: dict[int, int] = {}
    _place(tree, None, parent, [0])
    return canonicalize_aromatic(parent)


def _place(tree: RootedTree, up: int | None, parent: dict[int, int], counter: list[int]) -> int:
    counter[0] += 1
    me = counter[0]
    if up is not None:
        parent[me] = up
    for kid in tree.children:
        _place(kid, me, parent, counter)
    return me


def _place_cycle(cycle: Cycle, parent: dict[int, int], counter: list[int]) -> None:
    heads = []
    for _ in cycle:
        counter[0] += 1
        heads.append(counter[0])
    for i, head in enumerate(heads):
        parent[head] = heads[(i + 1) % len(heads)]
        for kid in cycle[i].children:
            _place(kid, head, parent, counter)


def _sequences(total: int, length: int) -> Iterator[Cycle]:
    if length == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - length + 2):
        for tree in enumerate_trees(first, cap=total):
            for rest in _sequences(total - first, length - 1):
                yield (tree, *rest)


@lru_cache(maxsize=None)
def _connected_components(k: int) -> tuple[Cycle, ...]:
    """Cycles of rooted trees with k nodes in total, one per rotation class."""
    found = {_min_rotation(seq) for length in range(1, k + 1) for seq in _sequences(k, length)}
    return tuple(sorted(found, key=lambda c: (len(c), [sort_key(t) for t in c])))


def _component_multisets(total: int, min_size: int, min_index: int) -> Iterator[tuple[Cycle, ...]]:
    if total == 0:
        yield ()
        return
    for size in range(min_size, total + 1):
        pool = _connected_components(size)
        start = min_index if size == min_size else 0
        for i in range(start, len(pool)):
            for rest in _component_multisets(total - size, size, i):
                yield (pool[i], *rest)


def _check_size(n: int, cap: int | None) -> None:
    cap = get_settings().aromatic_cap if cap is None else cap
    if n < 1 or n > cap:
        raise OrderRangeError("aromatic tree size", n, 1, cap)


@lru_cache(maxsize=None)
def _aromatic_of_size(n: int) -> tuple[AromaticTree, ...]:
    shapes = set()
    for r in range(1, n + 1):
        for tree in enumerate_trees(r, cap=n):
            for comps in _component_multisets(n - r, 1, 0):
                parent: dict[int, int] = {}
                counter = [0]
                _place(tree, None, parent, counter)
                for cyc in comps:
                    _place_cycle(cyc, parent, counter)
                shapes.add(canonicalize_aromatic(parent))
    found = tuple(sorted(shapes, key=lambda a: a.parents))
    logger.debug("enumerated %d aromatic trees with %d nodes", len(found), n)
    return found


def enumerate_aromatic(n: int, cap: int | None = None) -> list[AromaticTree]:
    """All aromatic trees with n nodes, sorted by parent sequence."""
    _check_size(n, cap)
    return list(_aromatic_of_size(n))


def count_aromatic(n: int, cap: int | None = None) -> int:
    return len(enumerate_aromatic(n, cap))


def derivative_tensor(f: VectorField, x: np.ndarray, k: int) -> np.ndarray:
    """T[i, j1..jk] = d^k f^i / dx^j1 ... dx^jk at x; T = f(x) for k = 0."""
    if k == 0:
        return f.value(x)
    d = f.dim
    if d ** (k + 1) > TENSOR_LIMIT:
        raise DimensionError(f"derivative tensor of order {k} in dimension {d} is too large")
    basis = np.eye(d)
    out = np.empty((d,) * (k + 1))
    cache: dict[tuple[int, ...], np.ndarray] = {}
    for idx in itertools.product(range(d), repeat=k):
        key = tuple(sorted(idx))
        if key not in cache:
            cache[key] = f.derivative(x, [basis[j] for j in key])
        out[(slice(None), *idx)] = cache[key]
    return out


def aromatic_differential(tree: AromaticTree, f: VectorField, x) -> np.ndarray:
    """Contract f^{i_v}_{(i_u : u -> v)} over all nodes; i_1 stays free."""
    x = f.point(x)
    tensors: dict[int, np.ndarray] = {}
    operands: list = []
    for v in range(1, tree.n + 1):
        ins = tree.in_neighbors(v)
        if len(ins) not in tensors:
            tensors[len(ins)] = derivative_tensor(f, x, len(ins))
        operands.append(tensors[len(ins)])
        operands.append([v - 1, *(u - 1 for u in ins)])
    return np.asarray(np.einsum(*operands, [0]), dtype=float)


def aromatic_equivariance_check(
    tree: AromaticTree, f: VectorField, phi: AffineMap, points: Sequence, tol: float
) -> bool:
    """A F_tree(f)(x) == F_tree(phi . f)(phi(x)) within tol at every point."""
    g = apply_affine_to_field(phi, f)
    for x in points:
        left = phi.A @ aromatic_differential(tree, f, x)
        right = aromatic_differential(tree, g, phi(x))
        if np.max(np.abs(left - right)) > tol:
            return False
    return True


@dataclass(frozen=True, eq=False)
class RelatedFieldPair:
    """f on V, g on W and phi: V -> W, expected to satisfy g(A x + b) = A f(x)."""

    f: VectorField
    g: VectorField
    phi: AffineMap

    def __post_init__(self) -> None:
        if self.phi.dim_in != self.f.dim or self.phi.dim_out != self.g.dim:
            raise DimensionError(
                f"map {self.phi.dim_in}->{self.phi.dim_out} does not connect fields of "
                f"dimension {self.f.dim} and {self.g.dim}"
            )

    def transports(self, source: np.ndarray, target: np.ndarray, tol: float) -> bool:
        """A source == target within tol."""
        return bool(np.max(np.abs(self.phi.A @ source - target), initial=0.0) <= tol)


def affine_related_check(pair: RelatedFieldPair, points: Sequence, tol: float) -> bool:
    for x in points:
        x = pair.f.point(x)
        if not pair.transports(pair.f.value(x), pair.g.value(pair.phi(x)), tol):
            return False
    return True


SELF_LOOP = AromaticTree((2,))


@dataclass
class KnockoutReport:
    """Outcome of transporting the self-loop term and rooted-tree terms across a related pair."""

    point: list[float]
    self_loop_source: list[float]
    self_loop_target: list[float]
    pair_related: bool
    self_loop_transported: bool
    tree_checks: dict[str, bool]

    @property
    def passed(self) -> bool:
        """The pair is related, every tree term transports, and the self-loop term does not."""
        return self.pair_related and all(self.tree_checks.values()) and not self.self_loop_transported

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "self_loop_source": self.self_loop_source,
            "self_loop_target": self.self_loop_target,
            "pair_related": self.pair_related,
            "self_loop_transported": self.self_loop_transported,
            "tree_checks": self.tree_checks,
            "passed": self.passed,
        }


def knockout_report(
    pair: RelatedFieldPair,
    points: Sequence | None = None,
    tol: float = 1e-10,
    max_order: int = 3,
) -> KnockoutReport:
    """Transport the self-loop term and every rooted-tree term up to max_order across pair.

    Without points, three fixed points of the plane are used.
    """
    if points is None:
        points = [np.array([0.3, -0.7]), np.array([1.2, 0.5]), np.array([-0.4, 2.0])]
    points = [pair.f.point(x) for x in points]

    def transported(compute) -> bool:
        return all(pair.transports(compute(pair.f, x), compute(pair.g, pair.phi(x)), tol) for x in points)

    tree_checks = {
        t.encoding: transported(lambda fld, y, t=t: elementary_differential(t, fld, y))
        for t in trees_up_to(max_order)
    }
    x0 = points[0]
    report = KnockoutReport(
        point=x0.tolist(),
        self_loop_source=aromatic_differential(SELF_LOOP, pair.f, x0).tolist(),
        self_loop_target=aromatic_differential(SELF_LOOP, pair.g, pair.phi(x0)).tolist(),
        pair_related=affine_related_check(pair, points, tol),
        self_loop_transported=transported(lambda fld, y: aromatic_differential(SELF_LOOP, fld, y)),
        tree_checks=tree_checks,
    )
    logger.info("knockout demo: passed=%s", report.passed)
    return report


def aromatic_first_order_method_demo(f: VectorField, x0, h: float) -> np.ndarray:
    """x1 = x0 + h f(x0) (1 + h div f(x0)): affine-equivariant, not a B-series method."""
    x0 = f.point(x0)
    return x0 + h * f.value(x0) * (1.0 + h * f.divergence(x0))


@dataclass(frozen=True, eq=False)
class AromaticSeries:
    """Coefficients on aromatic trees with at most ``order`` nodes.

    Evaluates as constant * x0 + sum_A h^|A| c(A) F_A(x0). There is no group
    law; the container only stores and evaluates.
    """

    order: int
    coefficients: Mapping[AromaticTree, Coefficient] = field(default_factory=dict)
    constant: Coefficient = Fraction(1)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise OrderRangeError("aromatic series order", self.order, 1, get_settings().aromatic_cap)
        kept: dict[AromaticTree, Coefficient] = {}
        for key, value in self.coefficients.items():
            tree = parse_aromatic(key) if isinstance(key, str) else key
            if tree.n > self.order:
                raise FormatError(f"aromatic tree {tree.encoding} exceeds series order {self.order}")
            coeff = to_coefficient(value)
            if coeff != 0:
                kept[tree] = coeff
        ordered = {t: kept[t] for t in sorted(kept, key=lambda a: (a.n, a.parents))}
        object.__setattr__(self, "coefficients", MappingProxyType(ordered))
        object.__setattr__(self, "constant", to_coefficient(self.constant))

    def __getitem__(self, key: AromaticTree | str) -> Coefficient:
        tree = parse_aromatic(key) if isinstance(key, str) else key
        return self.coefficients.get(tree, Fraction(0))

    def items(self):
        return self.coefficients.items()

    def records(self) -> list[CoefficientRecord]:
        return [CoefficientRecord(tree=t.encoding, coefficient=format_fraction(c)) for t, c in self.items()]

    def evaluate(self, f: VectorField, x0, h: float) -> np.ndarray:
        x0 = f.point(x0)
        out = float(self.constant) * x0
        for tree, coeff in self.items():
            out = out + h**tree.n * float(coeff) * aromatic_differential(tree, f, x0)
        return out


def aromatic_method_series() -> AromaticSeries:
    """Series of aromatic_first_order_method_demo: x0 + h f + h^2 f div f."""
    return AromaticSeries(2, {from_rooted_tree(LEAF): 1, SELF_LOOP: 1})
