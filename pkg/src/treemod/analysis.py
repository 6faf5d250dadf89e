"""Edge-usage statistics, overlap identities, homogeneity and uniformity tests.

The expected overlap of two iid random trees equals the squared 2-norm of
the edge usage probabilities, and the mean usage is always (|V|-1)/|E|
whatever the law.  Together these give

    energy = |E| * Var(eta) + (|V|-1)^2 / |E|

(the plus-sign form; see README), so minimizing overlap and minimizing the
usage variance are the same problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphError
from .multigraph import Multigraph
from .solver import ModulusResult, TreePmf
from .trees import ROLE_USAGE, EdgeVector, SpanningTree, effective_resistance, is_spanning_tree

DEFAULT_HOMOGENEITY_TOL = 1e-6


@dataclass(frozen=True)
class UsageStats:
    mean: float
    variance: float
    energy: float


@dataclass(frozen=True)
class HomogeneityCertificate:
    homogeneous: bool
    condition: str
    residual: float
    expected_usage: float


def edge_usage(g: Multigraph, pmf: TreePmf) -> EdgeVector:
    """Per-edge probability of appearing in a random tree with law `pmf`."""
    usage = np.zeros(g.n_edges)
    for tree, p in pmf.items():
        if not is_spanning_tree(g, tree.edges):
            raise GraphError(f"pmf support contains a non spanning tree: {tree.edges}")
        usage[list(tree.edges)] += p
    return EdgeVector(usage, ROLE_USAGE)


def expected_overlap(g: Multigraph, pmf: TreePmf) -> float:
    """Expected size of the intersection of two iid random trees."""
    eta = edge_usage(g, pmf)
    return float(eta.values @ eta.values)


def usage_stats(g: Multigraph, eta) -> UsageStats:
    vals = np.asarray(eta, dtype=float)
    if vals.shape != (g.n_edges,):
        raise ValueError("usage vector length must match the edge count")
    mean = float(vals.mean())
    variance = float(vals.var())
    energy = float(vals @ vals)
    # energy = |E| Var + |E| mean^2; guards against silent identity drift
    recon = g.n_edges * (variance + mean * mean)
    if abs(energy - recon) > 1e-9 * max(1.0, energy):
        raise AssertionError("energy/variance identity violated beyond roundoff")
    return UsageStats(mean=mean, variance=variance, energy=energy)


def homogeneous_lower_bound(g: Multigraph) -> float:
    """Overlap of the flat usage profile: (|V|-1)^2 / |E|, a universal lower bound."""
    if g.n_edges == 0:
        raise GraphError("needs at least one edge")
    return (g.n_vertices - 1) ** 2 / g.n_edges


def is_homogeneous(
    g: Multigraph, result: ModulusResult, tol: float = DEFAULT_HOMOGENEITY_TOL
) -> HomogeneityCertificate:
    """Constant optimal usage test: max |eta - (|V|-1)/|E|| <= tol."""
    expected = (g.n_vertices - 1) / g.n_edges
    residual = float(np.max(np.abs(result.eta.values - expected)))
    return HomogeneityCertificate(
        homogeneous=residual <= tol,
        condition="optimal usage deviates from the flat profile",
        residual=residual,
        expected_usage=expected,
    )


def is_uniform(
    g: Multigraph, result: ModulusResult, tol: float = DEFAULT_HOMOGENEITY_TOL
) -> bool:
    """Uniform-law optimality test via the resistance identity.

    The uniform law's usage probabilities equal the effective resistances,
    and the optimal usage vector is unique, so the uniform law is optimal
    exactly when the two vectors agree.
    """
    reff = effective_resistance(g)
    return float(np.max(np.abs(reff.values - result.eta.values))) <= tol


def fair_tree_candidate(result: ModulusResult, tree: SpanningTree, tol: float = 1e-8) -> bool:
    """Necessary fairness test: the tree's cost under rho* must be 1.

    Passing is not sufficient; only the brute-force oracle decides exact
    fairness.
    """
    cost = float(result.rho.values[list(tree.edges)].sum())
    return abs(cost - 1.0) <= tol


def sample_tree(pmf: TreePmf, seed: int) -> SpanningTree:
    """One reproducible categorical draw from the law."""
    return sample_trees(pmf, 1, seed)[0]


def sample_trees(pmf: TreePmf, count: int, seed: int) -> list[SpanningTree]:
    support = pmf.support()
    probs = np.array([pmf[t] for t in support])
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(support), size=count, p=probs)
    return [support[int(i)] for i in picks]
