import itertools
import math
import time

import pytest

from bseries_toolkit.config import ENV_ORDER_CAP, get_settings
from bseries_toolkit.errors import ConfigError, FormatError, OrderRangeError
from bseries_toolkit.trees import (
    EMPTY,
    LEAF,
    RootedTree,
    bushy,
    butcher_product,
    canonicalize,
    chain,
    count_trees,
    enumerate_trees,
    parse_key,
    parse_tree,
    trees_up_to,
)


def test_rooted_counts(cases):
    case = cases["trees"]["rooted_counts"]
    start = time.perf_counter()
    counts = [count_trees(n) for n in case["orders"]]
    assert counts == case["expected"]
    assert time.perf_counter() - start < 1.0


def test_cumulative_counts(cases):
    case = cases["trees"]["cumulative_condition_counts"]
    assert [len(trees_up_to(n)) for n in case["orders"]] == case["expected"]


@pytest.mark.parametrize("case_id", ["stats_order_4", "stats_small"])
def test_symmetry_and_density(cases, case_id):
    for encoding, stats in cases["trees"][case_id]["trees"].items():
        tree = parse_tree(encoding)
        assert tree.symmetry == stats["symmetry"], encoding
        assert tree.density == stats["density"], encoding


@pytest.mark.parametrize("case_id", ["canonical_order_3", "canonical_order_4"])
def test_canonical_order(cases, case_id):
    case = cases["trees"][case_id]
    assert [t.encoding for t in enumerate_trees(case["order"])] == case["expected"]


def test_equivalent_spellings_canonicalize_equal(cases):
    case = cases["trees"]["equivalent_spellings"]
    parsed = [parse_tree(s) for s in case["spellings"]]
    assert {t.encoding for t in parsed} == {case["expected"]}
    assert parsed[0] == parsed[1]
    assert hash(parsed[0]) == hash(parsed[1])


def test_enumeration_has_no_duplicates_and_is_canonical():
    for n in range(1, 9):
        found = enumerate_trees(n)
        assert len({t.encoding for t in found}) == len(found)
        for t in found:
            assert parse_tree(t.encoding).encoding == t.encoding
            assert t.order == n
            assert t.encoding.count("[") == n


def test_sum_of_inverse_symmetries_over_labelings():
    # n! / sigma(t) labelings per shape; labeled rooted trees number n^(n-1)
    for n in range(1, 8):
        total = sum(math.factorial(n) // t.symmetry for t in enumerate_trees(n))
        assert total == n ** (n - 1)


def test_constructors():
    assert chain(1) == LEAF
    assert chain(3).encoding == "[[[]]]"
    assert chain(4).is_chain
    assert bushy(4).encoding == "[[][][]]"
    assert not bushy(3).is_chain
    assert butcher_product(LEAF, LEAF).encoding == "[[]]"
    assert butcher_product(chain(2), LEAF) == bushy(3)


def test_nested_sequence_input():
    assert canonicalize([]) == LEAF
    assert canonicalize([[], [[]]]).encoding == "[[][[]]]"
    assert canonicalize("[[[]][]]").encoding == "[[][[]]]"


def test_nodes_preorder_paths():
    tree = parse_tree("[[][[]]]")
    assert list(tree.nodes()) == [(), (0,), (1,), (1, 0)]
    assert tree.graft_at((1, 0), LEAF).encoding == "[[][[[]]]]"


def test_empty_tree_key():
    assert parse_key("") is EMPTY
    assert EMPTY.order == 0
    assert EMPTY < LEAF


@pytest.mark.parametrize("bad", ["", "[", "]", "[]]", "[][]", "[x]", "[[]"])
def test_parse_errors(bad):
    with pytest.raises(FormatError):
        parse_tree(bad)


def test_children_must_be_trees():
    with pytest.raises(TypeError):
        RootedTree(("[]",))


@pytest.mark.parametrize("n", [0, -1, 13])
def test_order_out_of_range(n):
    with pytest.raises(OrderRangeError):
        enumerate_trees(n)


def test_order_cap_from_environment(monkeypatch):
    monkeypatch.setenv(ENV_ORDER_CAP, "5")
    get_settings.cache_clear()
    assert count_trees(5) == 9
    with pytest.raises(OrderRangeError):
        count_trees(6)


def test_invalid_environment_cap(monkeypatch):
    monkeypatch.setenv(ENV_ORDER_CAP, "many")
    get_settings.cache_clear()
    with pytest.raises(ConfigError):
        count_trees(3)


def labeled_rooted_trees(n: int):
    """Every labeled rooted tree on nodes 0..n-1 as nested child lists."""
    for root in range(n):
        others = [v for v in range(n) if v != root]
        for parents in itertools.product(range(n), repeat=n - 1):
            parent = dict(zip(others, parents))
            if any(v == p for v, p in parent.items()):
                continue

            def reaches_root(v, seen=()):
                return v == root or (v not in seen and reaches_root(parent[v], (*seen, v)))

            if not all(reaches_root(v) for v in others):
                continue

            def nest(v):
                return [nest(u) for u in others if parent[u] == v]

            yield nest(root)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_labeled_trees_collapse_to_enumeration(n):
    labeled = list(labeled_rooted_trees(n))
    assert len(labeled) == n ** (n - 1)
    shapes = {canonicalize(t) for t in labeled}
    assert sorted(shapes) == enumerate_trees(n)
