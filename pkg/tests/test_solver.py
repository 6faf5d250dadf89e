from fractions import Fraction

import numpy as np
import pytest

from treemod import (
    DualActiveSetLDP,
    EdgeVector,
    GraphError,
    ModulusResult,
    Multigraph,
    SolverConfig,
    SolverError,
    TreePmf,
    effective_resistance,
    extract_pmf,
    kkt_residuals,
    meo_value,
    min_tree,
    solve,
)
from treemod.trees import SpanningTree

from conftest import CORPUS, corpus_graph, corpus_solve


def test_slashed_square_values():
    g = corpus_graph("slashed_square")
    res = corpus_solve("slashed_square")
    assert res.mod2 == pytest.approx(5 / 9, abs=1e-9)
    assert meo_value(res) == pytest.approx(1.8, abs=1e-9)
    assert np.allclose(res.eta.values, 0.6, atol=1e-9)
    assert np.allclose(res.rho.values, 1 / 3, atol=1e-9)


def test_triangle_pendant_values():
    res = corpus_solve("triangle_pendant")
    assert res.mod2 == pytest.approx(3 / 7, abs=1e-9)
    assert meo_value(res) == pytest.approx(7 / 3, abs=1e-9)
    assert res.eta.values[3] == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(res.eta.values[:3], 2 / 3, atol=1e-9)


def test_doubled_square_values():
    res = corpus_solve("doubled_slashed_square")
    assert meo_value(res) == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(res.eta.values, 1 / 3, atol=1e-9)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_result_invariants(name):
    g = corpus_graph(name)
    res = corpus_solve(name)
    # usage = density / modulus, componentwise
    assert np.allclose(res.eta.values, res.rho.values / res.mod2, atol=1e-12)
    # usage probabilities sum to |V| - 1
    assert float(res.eta.values.sum()) == pytest.approx(g.n_vertices - 1, abs=1e-6)
    # energy identity
    assert res.mod2 == pytest.approx(float(res.rho.values @ res.rho.values), abs=1e-12)
    # every tree in the law's support pays exactly 1
    for tree, p in res.pmf.items():
        cost = float(res.rho.values[list(tree.edges)].sum())
        assert abs(cost - 1.0) <= res.config.tol
    # exit certificate
    assert res.worst_violation <= res.config.tol
    cheapest = min_tree(g, res.rho)
    assert float(res.rho.values[list(cheapest.edges)].sum()) >= 1.0 - res.config.tol


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_duality_product(name):
    res = corpus_solve(name)
    e_rho = float(res.rho.values @ res.rho.values)
    e_eta = float(res.eta.values @ res.eta.values)
    assert e_rho * e_eta == pytest.approx(1.0, abs=2 * res.config.tol)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_homogeneous_lower_bound_and_equality(name):
    g = corpus_graph(name)
    res = corpus_solve(name)
    bound = (g.n_vertices - 1) ** 2 / g.n_edges
    meo = meo_value(res)
    assert meo >= bound - 1e-8
    homogeneous = CORPUS[name][1]
    if homogeneous:
        assert meo == pytest.approx(bound, abs=1e-6)
    else:
        assert meo > bound + 1e-6


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_resistance_lower_bound(name):
    g = corpus_graph(name)
    res = corpus_solve(name)
    reff = effective_resistance(g).values
    assert res.mod2 >= 1.0 / float(reff @ reff) - 1e-8


def test_subproblem_values_are_monotone():
    # replicate the outer loop, recording the subproblem energy each pass
    g = corpus_graph("layered_ring")
    ldp = DualActiveSetLDP(g.n_edges)
    seen = set()
    energies = []
    for _ in range(10 * g.n_edges):
        tree = min_tree(g, ldp.x)
        if float(ldp.x[list(tree.edges)].sum()) >= 1.0 - 1e-8:
            break
        assert tree not in seen
        seen.add(tree)
        idx = ldp.add_row(ids=np.fromiter(tree.edges, dtype=np.int32))
        ldp.process(idx)
        ldp.resolve_all()
        energies.append(ldp.energy())
    assert all(b >= a - 1e-12 for a, b in zip(energies, energies[1:]))
    assert len(energies) >= 3


def test_working_family_stays_modest():
    for name in ("layered_ring", "twin_block", "petersen"):
        g = corpus_graph(name)
        res = corpus_solve(name)
        assert len(res.active_trees) <= g.n_edges + 1


def test_extract_pmf_point_mass():
    t = SpanningTree.of([0, 1, 2])
    pmf = extract_pmf(np.array([2 / 3]), 1 / 3, [t])
    assert pmf[t] == pytest.approx(1.0)


def test_extract_pmf_reproduces_usage():
    res = corpus_solve("slashed_square")
    pmf = extract_pmf(res.lam, res.mod2, res.active_trees, eta=res.eta)
    usage = np.zeros(5)
    for tree, p in pmf.items():
        usage[list(tree.edges)] += p
    assert np.allclose(usage, 0.6, atol=1e-8)


def test_extract_pmf_rejects_zero_multipliers():
    with pytest.raises(ValueError):
        extract_pmf(np.zeros(3), 1.0, [SpanningTree.of([0])] * 3)


def test_extract_pmf_flags_inconsistent_sum():
    from treemod import NumericalError

    with pytest.raises(NumericalError):
        extract_pmf(np.array([2 / 3]), 10.0, [SpanningTree.of([0, 1, 2])])


def test_kkt_residuals_on_solved_instance():
    g = corpus_graph("slashed_square")
    report = kkt_residuals(g, corpus_solve("slashed_square"))
    assert report.worst() <= 1e-8


def test_kkt_residuals_detect_zero_density():
    g = corpus_graph("slashed_square")
    res = corpus_solve("slashed_square")
    fake = ModulusResult(
        rho=EdgeVector(np.zeros(5)),
        mod2=1.0,
        eta=res.eta,
        active_trees=res.active_trees,
        lam=res.lam,
        pmf=res.pmf,
        iterations=0,
        worst_violation=1.0,
    )
    report = kkt_residuals(g, fake)
    assert report.admissibility == pytest.approx(1.0)


def test_kkt_residuals_detect_perturbed_eta():
    g = corpus_graph("slashed_square")
    res = corpus_solve("slashed_square")
    bumped = res.eta.values.copy()
    bumped[0] += 0.01
    fake = ModulusResult(
        rho=res.rho,
        mod2=res.mod2,
        eta=EdgeVector(bumped, "usage"),
        active_trees=res.active_trees,
        lam=res.lam,
        pmf=res.pmf,
        iterations=res.iterations,
        worst_violation=res.worst_violation,
    )
    report = kkt_residuals(g, fake)
    assert report.eta_relation == pytest.approx(0.01, abs=1e-9)


def test_meo_values():
    assert meo_value(corpus_solve("triangle_pendant")) == pytest.approx(7 / 3, abs=1e-9)
    assert meo_value(corpus_solve("doubled_slashed_square")) == pytest.approx(1.0, abs=1e-9)


def test_solve_rejects_bad_inputs():
    with pytest.raises(GraphError):
        solve(Multigraph(("a",), ()))
    with pytest.raises(GraphError):
        solve(Multigraph(("a", "b", "c", "d"), ((0, 1), (2, 3))))


def test_iteration_cap_raises_with_diagnostics():
    g = corpus_graph("layered_ring")
    with pytest.raises(SolverError) as err:
        solve(g, SolverConfig(max_iterations=3))
    assert err.value.iterations == 3
    assert err.value.worst_violation > 0


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iterations=0)
    assert SolverConfig().iteration_budget(12) == 120


def test_tree_pmf_validation():
    t = SpanningTree.of([0, 1])
    with pytest.raises(ValueError):
        TreePmf({t: 0.5})
    with pytest.raises(ValueError):
        TreePmf({})
    pmf = TreePmf({t: 0.25, SpanningTree.of([0, 2]): 0.75})
    assert len(pmf) == 2
    assert pmf[SpanningTree.of([9, 9])] == 0.0


def test_exact_rational_quality_of_small_solutions():
    # fixture-grade accuracy: solutions on small graphs land on the exact
    # rationals to near machine precision
    res = corpus_solve("triangle_pendant")
    for value, expect in zip(res.eta.values, [Fraction(2, 3)] * 3 + [Fraction(1)]):
        assert value == pytest.approx(float(expect), abs=1e-12)
