"""Rooted trees: canonical form, enumeration by order, and the statistics sigma and gamma.

A tree is stored with its children already in canonical order, so two trees are
equal exactly when their text encodings are equal. The encoding is the wire
format used everywhere else:

    leaf    "[]"
    chain2  "[[]]"
    cherry  "[[][]]"

Children are ordered ascending by (encoding length, encoding).
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import lru_cache, total_ordering
from typing import Union

from .config import get_settings
from .errors import FormatError, OrderRangeError

logger = logging.getLogger(__name__)


def sort_key(tree: "RootedTree | EmptyTree") -> tuple[int, str]:
    """Canonical total order: by encoding length (twice the order), then bytewise."""
    return (len(tree.encoding), tree.encoding)


@total_ordering
@dataclass(frozen=True, eq=False)
class RootedTree:
    """Unlabeled rooted tree with canonically ordered children.

    Construct with any child order; the constructor sorts them. Derived
    statistics are computed once at construction from the children's values.
    """

    children: tuple[RootedTree, ...] = ()
    encoding: str = field(init=False, repr=False)
    order: int = field(init=False, repr=False)
    symmetry: int = field(init=False, repr=False)
    density: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        kids = tuple(self.children)
        for kid in kids:
            if not isinstance(kid, RootedTree):
                raise TypeError(f"children must be RootedTree, got {type(kid).__name__}")
        kids = tuple(sorted(kids, key=sort_key))
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "encoding", "[" + "".join(k.encoding for k in kids) + "]")
        object.__setattr__(self, "order", 1 + sum(k.order for k in kids))

        # sigma([t1^m1 ... tk^mk]) = prod mi! * sigma(ti)^mi over distinct child types
        sigma = 1
        for kid, mult in Counter(kids).items():
            sigma *= math.factorial(mult) * kid.symmetry**mult
        object.__setattr__(self, "symmetry", sigma)
        object.__setattr__(self, "density", self.order * math.prod(k.density for k in kids))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RootedTree):
            return NotImplemented
        return self.encoding == other.encoding

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, (RootedTree, EmptyTree)):
            return NotImplemented
        return sort_key(self) < sort_key(other)

    def __hash__(self) -> int:
        return hash(self.encoding)

    def __repr__(self) -> str:
        return f"RootedTree({self.encoding!r})"

    def __str__(self) -> str:
        return self.encoding

    def nodes(self) -> Iterator[tuple[int, ...]]:
        """Preorder walk; each node is addressed by its path of child indices."""
        yield ()
        for i, kid in enumerate(self.children):
            for path in kid.nodes():
                yield (i, *path)

    def graft_at(self, path: tuple[int, ...], sub: RootedTree) -> RootedTree:
        """Attach ``sub`` as a new child of the node at ``path``."""
        if not path:
            return RootedTree(self.children + (sub,))
        head, rest = path[0], path[1:]
        kids = list(self.children)
        kids[head] = kids[head].graft_at(rest, sub)
        return RootedTree(tuple(kids))

    @property
    def is_chain(self) -> bool:
        """True for the ladder trees (every node has at most one child)."""
        return len(self.children) == 0 or (len(self.children) == 1 and self.children[0].is_chain)


class EmptyTree:
    """The empty tree: slot of the c(empty) * x0 term of a series. Singleton."""

    _instance: EmptyTree | None = None
    order = 0
    encoding = ""
    children: tuple[RootedTree, ...] = ()

    def __new__(cls) -> EmptyTree:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, (RootedTree, EmptyTree)):
            return NotImplemented
        return sort_key(self) < sort_key(other)

    def __le__(self, other: object) -> bool:
        if not isinstance(other, (RootedTree, EmptyTree)):
            return NotImplemented
        return sort_key(self) <= sort_key(other)

    def __repr__(self) -> str:
        return "EMPTY"

    def __str__(self) -> str:
        return ""


EMPTY = EmptyTree()
LEAF = RootedTree()

TreeKey = Union[RootedTree, EmptyTree]
RawTree = Union[RootedTree, str, Sequence]


def order(tree: TreeKey) -> int:
    """Node count; 0 for the empty tree."""
    return tree.order


def symmetry(tree: RootedTree) -> int:
    """Number of root-fixing automorphisms."""
    return tree.symmetry


def density(tree: RootedTree) -> int:
    """gamma(leaf) = 1, gamma(t) = |t| * prod gamma(child)."""
    return tree.density


def chain(k: int) -> RootedTree:
    """Ladder of k nodes (f'f'...f)."""
    if k < 1:
        raise OrderRangeError("chain length", k, 1, 10**6)
    tree = LEAF
    for _ in range(k - 1):
        tree = RootedTree((tree,))
    return tree


def bushy(k: int) -> RootedTree:
    """Root with k - 1 leaf children (f^(k-1)(f,...,f))."""
    if k < 1:
        raise OrderRangeError("bushy tree order", k, 1, 10**6)
    return RootedTree((LEAF,) * (k - 1))


def butcher_product(u: RootedTree, v: RootedTree) -> RootedTree:
    """Attach v as an extra child of the root of u."""
    return RootedTree(u.children + (v,))


def parse_tree(text: str) -> RootedTree:
    """Parse a bracket encoding. Children may appear in any order."""
    text = text.strip()
    if not text:
        raise FormatError("empty string is not a rooted tree encoding")

    stack: list[list[RootedTree]] = []
    result: RootedTree | None = None
    for pos, ch in enumerate(text):
        if result is not None:
            raise FormatError(f"trailing characters after position {pos} in {text!r}")
        if ch == "[":
            stack.append([])
        elif ch == "]":
            if not stack:
                raise FormatError(f"unbalanced ']' at position {pos} in {text!r}")
            node = RootedTree(tuple(stack.pop()))
            if stack:
                stack[-1].append(node)
            else:
                result = node
        else:
            raise FormatError(f"unexpected character {ch!r} in tree encoding {text!r}")
    if result is None:
        raise FormatError(f"unbalanced '[' in tree encoding {text!r}")
    return result


def parse_key(text: str) -> TreeKey:
    """Like parse_tree, but the empty string means the empty tree."""
    return EMPTY if text.strip() == "" else parse_tree(text)


def canonicalize(raw: RawTree) -> RootedTree:
    """Canonical tree from a RootedTree, an encoding string, or nested sequences.

    Nested sequences: a node is a sequence of its children, so ``[]`` is a
    leaf and ``[[], [[]]]`` is a root with a leaf and a chain2 below it.
    """
    if isinstance(raw, RootedTree):
        return raw
    if isinstance(raw, str):
        return parse_tree(raw)
    if isinstance(raw, Sequence):
        return RootedTree(tuple(canonicalize(kid) for kid in raw))
    raise FormatError(f"cannot interpret {raw!r} as a rooted tree")


def _check_order(n: int, cap: int | None) -> int:
    cap = get_settings().order_cap if cap is None else cap
    if n < 1 or n > cap:
        raise OrderRangeError("tree order", n, 1, cap)
    return cap


def _forests(pool: Sequence[RootedTree], total: int, start: int) -> Iterator[tuple[RootedTree, ...]]:
    """Non-decreasing (in pool order) multisets from pool whose orders sum to total."""
    if total == 0:
        yield ()
        return
    for i in range(start, len(pool)):
        tree = pool[i]
        if tree.order > total:
            break
        for rest in _forests(pool, total - tree.order, i):
            yield (tree, *rest)


@lru_cache(maxsize=None)
def _trees_of_order(n: int) -> tuple[RootedTree, ...]:
    if n == 1:
        return (LEAF,)
    pool = [t for k in range(1, n) for t in _trees_of_order(k)]
    found = sorted((RootedTree(kids) for kids in _forests(pool, n - 1, 0)), key=sort_key)
    logger.debug("enumerated %d rooted trees of order %d", len(found), n)
    return tuple(found)


def enumerate_trees(n: int, cap: int | None = None) -> list[RootedTree]:
    """All rooted trees with n nodes, each once, in canonical order."""
    _check_order(n, cap)
    return list(_trees_of_order(n))


def trees_up_to(n: int, cap: int | None = None) -> list[RootedTree]:
    """All rooted trees with 1..n nodes in canonical order."""
    _check_order(n, cap)
    return [t for k in range(1, n + 1) for t in _trees_of_order(k)]


def count_trees(n: int, cap: int | None = None) -> int:
    return len(enumerate_trees(n, cap))
