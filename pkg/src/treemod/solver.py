"""Spanning-tree modulus by constraint generation.

The solve loop grows a working family of trees: each pass asks Kruskal for
the cheapest tree under the current density (the most violated constraint),
adds it, and re-optimizes the least-distance subproblem with warm starts.
It terminates once the cheapest tree costs at least 1 - tol, which certifies
near-admissibility against *all* spanning trees because the oracle is exact.

The subproblem multipliers, normalized to a probability mass function, give
an optimal law for the minimum-expected-overlap problem on the working
family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import GraphError, NumericalError, SolverError
from .multigraph import Multigraph, is_connected
from .qp import DualActiveSetLDP
from .trees import ROLE_DENSITY, ROLE_USAGE, EdgeVector, SpanningTree, min_tree


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets for the constraint-generation loop."""

    tol: float = 1e-8
    max_iterations: int | None = None  # defaults to 10 * |E|
    subproblem_tol: float = 1e-12

    def __post_init__(self):
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    def iteration_budget(self, n_edges: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 10 * n_edges


@dataclass(frozen=True)
class TreePmf:
    """Sparse probability mass function over spanning trees."""

    probs: Mapping[SpanningTree, float]

    def __post_init__(self):
        cleaned = {t: float(p) for t, p in self.probs.items() if p > 0.0}
        if not cleaned:
            raise ValueError("pmf must give positive mass to at least one tree")
        total = sum(cleaned.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {total}, not 1")
        object.__setattr__(self, "probs", cleaned)

    def support(self) -> list[SpanningTree]:
        return sorted(self.probs)

    def items(self):
        return self.probs.items()

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, tree: SpanningTree) -> float:
        return self.probs.get(tree, 0.0)

    @staticmethod
    def uniform(trees) -> "TreePmf":
        trees = list(trees)
        p = 1.0 / len(trees)
        return TreePmf({t: p for t in trees})

    @staticmethod
    def point_mass(tree: SpanningTree) -> "TreePmf":
        return TreePmf({tree: 1.0})


@dataclass
class ModulusResult:
    """Everything the solve produced, enough to audit every optimality condition."""

    rho: EdgeVector
    mod2: float
    eta: EdgeVector
    active_trees: list[SpanningTree]
    lam: np.ndarray
    pmf: TreePmf
    iterations: int
    worst_violation: float
    config: SolverConfig = field(default_factory=SolverConfig)


@dataclass(frozen=True)
class KKTReport:
    """Max violation of each optimality condition for a solver result."""

    admissibility: float
    eta_relation: float
    complementary_slackness: float
    pmf_sum: float

    def worst(self) -> float:
        return max(
            self.admissibility,
            self.eta_relation,
            self.complementary_slackness,
            self.pmf_sum,
        )


def solve(g: Multigraph, cfg: SolverConfig | None = None) -> ModulusResult:
    """Compute the spanning-tree modulus of g with its dual law.

    Raises SolverError when the iteration budget runs out before the
    stopping rule fires.
    """
    cfg = cfg or SolverConfig()
    if g.n_edges == 0:
        raise GraphError("modulus needs at least one edge")
    if not is_connected(g):
        raise GraphError("modulus requires a connected graph")
    m = g.n_edges
    budget = cfg.iteration_budget(m)
    ldp = DualActiveSetLDP(m, tol=cfg.subproblem_tol)
    trees: list[SpanningTree] = []
    row_of: dict[SpanningTree, int] = {}
    rescan_tol = max(10.0 * cfg.subproblem_tol, 1e-14)

    iterations = 0
    worst_violation = np.inf
    converged = False
    while iterations < budget:
        iterations += 1
        tree = min_tree(g, ldp.x)
        cost = float(ldp.x[list(tree.edges)].sum())
        worst_violation = 1.0 - cost
        if worst_violation <= cfg.tol:
            converged = True
            break
        if tree in row_of:
            # floating-point seam: the oracle re-found a known tree that the
            # subproblem believes satisfied; re-process it and stop if the
            # iterate cannot move.
            moved = ldp.process(row_of[tree])
            ldp.resolve_all(rescan_tol)
            still = 1.0 - ldp.row_value(row_of[tree])
            if not moved and still > cfg.tol:
                converged = True
                worst_violation = still
                break
            continue
        idx = ldp.add_row(ids=np.fromiter(tree.edges, dtype=np.int32))
        row_of[tree] = idx
        trees.append(tree)
        ldp.process(idx)
        ldp.resolve_all(rescan_tol)

    if not converged:
        raise SolverError(
            f"no convergence within {budget} iterations "
            f"(worst violation {worst_violation:.3e})",
            iterations=iterations,
            worst_violation=float(worst_violation),
        )

    rho_vals = ldp.x.copy()
    mod2 = float(rho_vals @ rho_vals)
    if mod2 <= 0.0:
        raise NumericalError("vanishing modulus on a connected graph")
    eta_vals = rho_vals / mod2
    lam = ldp.multipliers()
    rho = EdgeVector(rho_vals, ROLE_DENSITY)
    eta = EdgeVector(eta_vals, ROLE_USAGE)
    pmf = extract_pmf(lam, mod2, trees, eta=eta)
    result = ModulusResult(
        rho=rho,
        mod2=mod2,
        eta=eta,
        active_trees=trees,
        lam=lam,
        pmf=pmf,
        iterations=iterations,
        worst_violation=float(worst_violation),
        config=cfg,
    )
    _check_result_invariants(g, result)
    return result


def _check_result_invariants(g: Multigraph, res: ModulusResult) -> None:
    eta_sum = float(np.sum(res.eta.values))
    if abs(eta_sum - (g.n_vertices - 1)) > 1e-6:
        raise NumericalError(
            f"usage probabilities sum to {eta_sum}, expected {g.n_vertices - 1}"
        )
    energy = float(res.rho.values @ res.rho.values)
    if abs(energy - res.mod2) > max(1e-9, 10 * res.config.subproblem_tol * energy):
        raise NumericalError("modulus does not match the density energy")


def extract_pmf(lam, mod2: float, active_trees, eta: EdgeVector | None = None) -> TreePmf:
    """Normalize subproblem multipliers into an optimal tree law.

    Verifies the stationarity identity sum(lam) = 2 * mod2 and, when `eta`
    is supplied, that the law reproduces the usage probabilities.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.size == 0 or np.all(lam <= 0.0):
        raise ValueError("multipliers are all zero; no law to extract")
    if lam.min() < -1e-12:
        raise ValueError("multipliers must be nonnegative")
    total = float(lam.sum())
    if abs(total - 2.0 * mod2) > 1e-6 * max(1.0, 2.0 * mod2):
        raise NumericalError(
            f"multiplier sum {total} deviates from 2*mod2 = {2 * mod2}"
        )
    trees = list(active_trees)
    if len(trees) != lam.size:
        raise ValueError("one multiplier per tree required")
    probs: dict[SpanningTree, float] = {}
    for tree, weight in zip(trees, lam):
        if weight > 0.0:
            probs[tree] = probs.get(tree, 0.0) + weight / total
    pmf = TreePmf(probs)
    if eta is not None:
        m = len(eta)
        usage = np.zeros(m)
        for tree, p in pmf.items():
            usage[list(tree.edges)] += p
        if float(np.max(np.abs(usage - eta.values))) > 1e-8:
            raise NumericalError("extracted law does not reproduce the usage vector")
    return pmf


def kkt_residuals(g: Multigraph, res: ModulusResult) -> KKTReport:
    """Audit a result against each optimality condition.

    Admissibility is re-checked with a fresh minimum-tree call, so it holds
    against the whole tree family rather than just the working set.
    """
    cheapest = min_tree(g, res.rho)
    adm = max(0.0, 1.0 - float(res.rho.values[list(cheapest.edges)].sum()))
    eta_rel = float(np.max(np.abs(res.eta.values - res.rho.values / res.mod2)))
    slack = 0.0
    for tree, p in res.pmf.items():
        cost = float(res.rho.values[list(tree.edges)].sum())
        slack = max(slack, abs(p * (1.0 - cost)))
    pmf_sum = abs(sum(p for _, p in res.pmf.items()) - 1.0)
    return KKTReport(
        admissibility=adm,
        eta_relation=eta_rel,
        complementary_slackness=slack,
        pmf_sum=pmf_sum,
    )


def meo_value(res: ModulusResult) -> float:
    """Minimum expected overlap: the reciprocal of the modulus."""
    if res.mod2 <= 0.0:
        raise ValueError("modulus must be positive")
    return 1.0 / res.mod2
