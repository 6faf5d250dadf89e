import numpy as np
import pytest

from treemod import DualActiveSetLDP, enumerate_trees, qp_subproblem, usage_matrix
from treemod.graphs import (
    house_graph,
    random_connected_multigraph,
    slashed_square,
    triangle_pendant,
)


def test_single_row_projection():
    rows = np.zeros((1, 5))
    rows[0, [0, 2, 4]] = 1.0
    rho, lam = qp_subproblem(rows)
    assert np.allclose(rho.values, [1 / 3, 0, 1 / 3, 0, 1 / 3])
    assert lam[0] == pytest.approx(2 / 3)
    assert float(rho.values @ rho.values) == pytest.approx(1 / 3)


def test_triangle_all_three_trees():
    # trees of a triangle: the three 2-edge subsets
    rows = np.array(
        [
            [1.0, 1.0, 0.0],
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
        ]
    )
    rho, lam = qp_subproblem(rows)
    assert np.allclose(rho.values, 0.5)
    assert float(rho.values @ rho.values) == pytest.approx(3 / 4)
    # stationarity 2*rho = N^T lam forces lam = 1/2 per row
    assert np.allclose(lam, 0.5)
    assert np.allclose(rows.T @ lam, 2 * rho.values, atol=1e-12)


def test_exterior_point_first_step_reaches_feasibility():
    ldp = DualActiveSetLDP(4)
    idx = ldp.add_row(ids=[1, 3])
    assert ldp.row_value(idx) == 0.0  # infeasible start
    ldp.process(idx)
    assert ldp.row_value(idx) == pytest.approx(1.0, abs=1e-12)


def test_incremental_matches_batch():
    g = house_graph()
    trees = enumerate_trees(g)
    rows = usage_matrix(trees, g.n_edges)
    rho_batch, lam_batch = qp_subproblem(rows)

    ldp = DualActiveSetLDP(g.n_edges)
    for t in trees:
        idx = ldp.add_row(ids=np.fromiter(t.edges, dtype=np.int32))
        ldp.process(idx)
        ldp.resolve_all()
    assert np.allclose(ldp.x, rho_batch.values, atol=1e-10)
    assert ldp.energy() == pytest.approx(float(rho_batch.values @ rho_batch.values), abs=1e-12)


def _check_kkt(rows, rho, lam, tol=1e-9):
    costs = rows @ rho
    assert costs.min() >= 1.0 - tol                      # primal feasibility
    assert lam.min() >= -tol                             # dual feasibility
    assert np.allclose(rows.T @ lam, 2 * rho, atol=tol)  # stationarity
    slack = lam * (1.0 - costs)
    assert np.max(np.abs(slack)) <= tol                  # complementarity


@pytest.mark.parametrize("seed", range(8))
def test_random_tree_families_satisfy_kkt(seed):
    g = random_connected_multigraph(seed + 100)
    trees = enumerate_trees(g, cap=3000)
    rows = usage_matrix(trees, g.n_edges)
    rho, lam = qp_subproblem(rows)
    _check_kkt(rows, rho.values, lam)


@pytest.mark.parametrize("seed", range(5))
def test_random_weighted_rows_satisfy_kkt(seed):
    rng = np.random.default_rng(seed)
    k, m = 12, 7
    rows = rng.random((k, m)) * (rng.random((k, m)) < 0.5)
    rows[rows.sum(axis=1) == 0, 0] = 1.0
    rho, lam = qp_subproblem(rows)
    _check_kkt(rows, rho.values, lam, tol=1e-8)


def test_qp_matches_full_family_modulus():
    # feeding every tree reproduces the exact modulus
    from treemod import exact_mod2

    for g in (triangle_pendant(), slashed_square(), house_graph()):
        trees = enumerate_trees(g)
        rows = usage_matrix(trees, g.n_edges)
        rho, _ = qp_subproblem(rows)
        value, _ = exact_mod2(g)
        assert float(rho.values @ rho.values) == pytest.approx(value, abs=1e-10)


def test_rejects_empty_and_zero_rows():
    with pytest.raises(ValueError):
        qp_subproblem(np.zeros((0, 3)))
    ldp = DualActiveSetLDP(3)
    with pytest.raises(ValueError):
        ldp.add_row(vector=np.zeros(3))
