import numpy as np
import pytest

from treemod import (
    CapExceededError,
    GraphError,
    Multigraph,
    SpanningTree,
    count_trees,
    effective_resistance,
    enumerate_trees,
    from_edge_list,
    is_spanning_tree,
    min_tree,
    tree_cost,
)
from treemod.graphs import (
    complete_graph,
    cycle_graph,
    doubled_slashed_square,
    house_graph,
    petersen_graph,
    slashed_square,
    triangle_pendant,
)

TRIANGLE = from_edge_list("a b\nb c\nc a")


def test_min_tree_unique_minimum():
    t = min_tree(TRIANGLE, [1.0, 1.0, 2.0])
    assert t.edges == (0, 1)
    assert tree_cost([1.0, 1.0, 2.0], t) == 2.0


def test_min_tree_tie_break_is_lexicographic():
    g = triangle_pendant()
    trees = enumerate_trees(g)
    costs = [tree_cost(np.ones(4), t) for t in trees]
    assert costs == [3.0, 3.0, 3.0]
    # the deterministic pick is the lexicographically least edge set
    assert min_tree(g, np.ones(4)).edges == min(t.edges for t in trees)


def test_min_tree_symmetric_costs():
    t = min_tree(TRIANGLE, np.ones(3))
    assert tree_cost(np.ones(3), t) == 2.0


def test_min_tree_optimal_with_respect_to_enumeration():
    rng = np.random.default_rng(42)
    for g in (slashed_square(), house_graph(), triangle_pendant(), cycle_graph(5)):
        trees = enumerate_trees(g)
        for _ in range(20):
            rho = rng.random(g.n_edges)
            best = min(tree_cost(rho, t) for t in trees)
            assert tree_cost(rho, min_tree(g, rho)) <= best + 1e-12


def test_min_tree_rejects_disconnected():
    g = Multigraph(("a", "b", "c", "d"), ((0, 1), (2, 3)))
    with pytest.raises(GraphError):
        min_tree(g, np.ones(2))


def test_tree_cost_examples():
    t = SpanningTree.of([0, 1, 2])
    assert tree_cost(np.full(4, 1 / 3), t) == pytest.approx(1.0)
    assert tree_cost([0.4, 0.6, 0.9], SpanningTree.of([0, 1])) == pytest.approx(1.0)


def test_tree_cost_optimal_density_slashed_square():
    # optimal density 1/3 per edge: every 3-edge tree pays exactly 1
    g = slashed_square()
    rho = np.full(5, 1 / 3)
    for t in enumerate_trees(g):
        assert tree_cost(rho, t) == pytest.approx(1.0)


def test_enumerate_counts():
    assert len(enumerate_trees(slashed_square())) == 8
    assert len(enumerate_trees(doubled_slashed_square())) == 48
    assert len(enumerate_trees(TRIANGLE)) == 3


def test_enumerate_is_exact_and_sorted():
    for g in (slashed_square(), house_graph(), doubled_slashed_square()):
        trees = enumerate_trees(g)
        assert len(set(trees)) == len(trees) == count_trees(g)
        assert trees == sorted(trees)
        for t in trees:
            assert is_spanning_tree(g, t.edges)


def test_enumerate_cap_reports_exact_count():
    with pytest.raises(CapExceededError) as err:
        enumerate_trees(doubled_slashed_square(), cap=10)
    assert err.value.count == 48


def test_count_trees_values():
    assert count_trees(complete_graph(4)) == 16
    assert count_trees(complete_graph(5)) == 125
    assert count_trees(cycle_graph(5)) == 5
    assert count_trees(doubled_slashed_square()) == 48
    assert count_trees(petersen_graph()) == 2000
    assert count_trees(Multigraph(("only",), ())) == 1


def test_count_trees_matches_enumeration():
    for g in (triangle_pendant(), slashed_square(), house_graph(), petersen_graph()):
        assert count_trees(g) == len(enumerate_trees(g, cap=5000))


def test_effective_resistance_triangle():
    r = effective_resistance(TRIANGLE)
    assert np.allclose(r.values, 2 / 3, atol=1e-12)


def test_effective_resistance_slashed_square():
    r = effective_resistance(slashed_square())
    assert np.allclose(r.values[:4], 5 / 8, atol=1e-12)
    assert r.values[4] == pytest.approx(0.5, abs=1e-12)


def test_effective_resistance_cycles():
    for n in (3, 5, 8):
        r = effective_resistance(cycle_graph(n))
        assert np.allclose(r.values, (n - 1) / n, atol=1e-12)


def test_effective_resistance_sums_to_vertex_count_minus_one():
    for g in (TRIANGLE, slashed_square(), petersen_graph(), doubled_slashed_square()):
        r = effective_resistance(g)
        assert float(r.values.sum()) == pytest.approx(g.n_vertices - 1, abs=1e-9)


def test_effective_resistance_equals_uniform_tree_frequency():
    for g in (slashed_square(), house_graph(), doubled_slashed_square(), petersen_graph()):
        trees = enumerate_trees(g, cap=5000)
        freq = np.zeros(g.n_edges)
        for t in trees:
            freq[list(t.edges)] += 1.0
        freq /= len(trees)
        r = effective_resistance(g)
        assert np.max(np.abs(freq - r.values)) < 1e-9


def test_effective_resistance_iterative_path_matches_dense(monkeypatch):
    import treemod.trees as trees_mod

    g = petersen_graph()
    dense = effective_resistance(g).values
    monkeypatch.setattr(trees_mod, "_DENSE_RESISTANCE_LIMIT", 1)
    iterative = effective_resistance(g).values
    assert np.max(np.abs(dense - iterative)) < 1e-9


def test_is_spanning_tree():
    assert is_spanning_tree(TRIANGLE, [0, 1])
    assert not is_spanning_tree(TRIANGLE, [0, 1, 2])
    square = cycle_graph(4)
    assert not is_spanning_tree(square, [0, 2])  # disjoint edges, not spanning
    assert not is_spanning_tree(TRIANGLE, [0, 0])
    assert not is_spanning_tree(TRIANGLE, [0, 99])
