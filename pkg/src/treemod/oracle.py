"""Exhaustive ground truth for desk-scale graphs.

Everything here is solved over the *full* enumerated tree family with
algorithms deliberately different from the fast path: projected gradient on
the simplex (overlap) and on the nonnegative orthant (modulus dual), plus a
terminating exact polish step that solves the support's KKT system directly.
Agreement between the two paths is therefore meaningful evidence, not a
shared bug.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapExceededError, NumericalError, OracleDisagreementError
from .multigraph import Multigraph
from .partitions import FeasiblePartition, iter_feasible_partitions
from .solver import SolverConfig, TreePmf, solve
from .trees import SpanningTree, enumerate_trees, usage_matrix

DEFAULT_TREE_CAP = 2000
_STATIONARITY_TOL = 1e-10
_FAIR_THRESHOLD = 1e-9


def _power_lmax(q: np.ndarray, iters: int = 60) -> float:
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(q.shape[0])
    v /= np.linalg.norm(v)
    lam = 1.0
    for _ in range(iters):
        w = q @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 1.0
        lam = norm
        v = w / norm
    return float(lam) * 1.05


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[cond][-1] / rho
    return np.maximum(v - theta, 0.0)


def _polish_simplex(q: np.ndarray, support: np.ndarray) -> tuple[np.ndarray, float] | None:
    """Solve the equality-KKT system on a candidate support; certify globally."""
    k = q.shape[0]
    s = np.flatnonzero(support)
    if s.size == 0:
        return None
    kkt = np.zeros((s.size + 1, s.size + 1))
    kkt[: s.size, : s.size] = 2.0 * q[np.ix_(s, s)]
    kkt[: s.size, s.size] = -1.0
    kkt[s.size, : s.size] = 1.0
    rhs = np.zeros(s.size + 1)
    rhs[s.size] = 1.0
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    mu_s = sol[: s.size]
    nu = sol[s.size]
    if mu_s.min() < -1e-12:
        return None
    mu = np.zeros(k)
    mu[s] = np.maximum(mu_s, 0.0)
    mu /= mu.sum()
    grad = 2.0 * (q @ mu)
    on = grad[s]
    if float(np.max(np.abs(on - nu))) > _STATIONARITY_TOL * max(1.0, abs(nu)):
        return None
    off = np.delete(grad, s)
    if off.size and float(off.min()) < nu - _STATIONARITY_TOL * max(1.0, abs(nu)):
        return None
    return mu, float(mu @ q @ mu)


def _minimize_overlap(q: np.ndarray) -> tuple[np.ndarray, float]:
    """min mu^T Q mu over the probability simplex, to 1e-10 stationarity."""
    k = q.shape[0]
    mu = np.full(k, 1.0 / k)
    step = 1.0 / (2.0 * _power_lmax(q))
    best = None
    for it in range(20001):
        if it % 25 == 0 or it == 20000:
            support = mu > 1e-7
            polished = _polish_simplex(q, support)
            if polished is not None:
                return polished
            if best is None or float(mu @ q @ mu) < best[1]:
                best = (mu.copy(), float(mu @ q @ mu))
        grad = 2.0 * (q @ mu)
        mu = _project_simplex(mu - step * grad)
    # fall back: try progressively tighter supports
    for cut in (1e-6, 1e-8, 1e-10):
        polished = _polish_simplex(q, mu > cut)
        if polished is not None:
            return polished
    raise NumericalError("simplex projected gradient failed to certify optimality")


def exact_meo(
    g: Multigraph, cap: int = DEFAULT_TREE_CAP
) -> tuple[float, TreePmf]:
    """Global minimum expected overlap over the full tree family."""
    trees = enumerate_trees(g, cap)
    n = usage_matrix(trees, g.n_edges)
    q = n @ n.T
    mu, value = _minimize_overlap(q)
    pmf = TreePmf({t: p for t, p in zip(trees, mu) if p > 0.0})
    return value, pmf


def _maximize_dual(q: np.ndarray) -> np.ndarray:
    """max 1.lam - lam^T Q lam / 4 over lam >= 0, to 1e-10 stationarity."""
    k = q.shape[0]
    lam = np.zeros(k)
    lip = 0.5 * _power_lmax(q)
    step = 1.0 / lip
    for it in range(20001):
        if it % 25 == 0 or it == 20000:
            polished = _polish_dual(q, lam > 1e-9)
            if polished is not None:
                return polished
        grad = 1.0 - 0.5 * (q @ lam)
        lam = np.maximum(lam + step * grad, 0.0)
    for cut in (1e-6, 1e-8, 1e-12):
        polished = _polish_dual(q, lam > cut)
        if polished is not None:
            return polished
    raise NumericalError("orthant projected gradient failed to certify optimality")


def _polish_dual(q: np.ndarray, support: np.ndarray) -> np.ndarray | None:
    k = q.shape[0]
    s = np.flatnonzero(support)
    if s.size == 0:
        return None
    sub = q[np.ix_(s, s)]
    lam_s, *_ = np.linalg.lstsq(sub, 2.0 * np.ones(s.size), rcond=None)
    if lam_s.min() < -1e-12:
        return None
    lam = np.zeros(k)
    lam[s] = np.maximum(lam_s, 0.0)
    costs = 0.5 * (q @ lam)          # = N rho with rho = N^T lam / 2
    if float(costs.min()) < 1.0 - _STATIONARITY_TOL:
        return None
    tight = costs[s]
    if float(np.max(np.abs(tight - 1.0))) > _STATIONARITY_TOL:
        return None
    return lam


def exact_mod2(
    g: Multigraph, cap: int = DEFAULT_TREE_CAP
) -> tuple[float, np.ndarray]:
    """Global spanning-tree modulus over the enumerated family; returns (value, rho)."""
    trees = enumerate_trees(g, cap)
    n = usage_matrix(trees, g.n_edges)
    q = n @ n.T
    lam = _maximize_dual(q)
    rho = 0.5 * (n.T @ lam)
    return float(rho @ rho), rho


def fair_trees(
    g: Multigraph, cap: int = DEFAULT_TREE_CAP
) -> tuple[list[int], list[int]]:
    """Indices (into the enumerated family) of fair and forbidden trees.

    A tree is fair when some optimal law gives it positive mass: decided by
    maximizing its own probability over the optimal-usage polytope.  Trees
    whose cost under rho* is off 1 are forbidden outright by complementary
    slackness and skip the linear program.
    """
    from scipy.optimize import linprog

    trees = enumerate_trees(g, cap)
    n = usage_matrix(trees, g.n_edges)
    q = n @ n.T
    mu, value = _minimize_overlap(q)
    eta = n.T @ mu
    mod2 = 1.0 / value
    rho = eta * mod2
    costs = n @ rho
    k = len(trees)
    a_eq = np.vstack([n.T, np.ones((1, k))])
    b_eq = np.concatenate([eta, [1.0]])
    fair: list[int] = []
    forbidden: list[int] = []
    for i in range(k):
        if abs(costs[i] - 1.0) > 1e-7:
            forbidden.append(i)
            continue
        c = np.zeros(k)
        c[i] = -1.0
        res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if not res.success:
            raise NumericalError(f"fair-tree program failed for tree {i}: {res.message}")
        if -res.fun > _FAIR_THRESHOLD:
            fair.append(i)
        else:
            forbidden.append(i)
    return fair, sorted(forbidden)


def min_partition_exhaustive(
    g: Multigraph, max_vertices: int = 12
) -> FeasiblePartition:
    """Global minimum-weight feasible partition by exhaustive search."""
    best: FeasiblePartition | None = None
    for feasible in iter_feasible_partitions(g, max_vertices):
        if best is None or feasible.weight < best.weight:
            best = feasible
    if best is None:
        raise CapExceededError("graph admits no feasible partition")
    return best


def densest_subgraph_exhaustive(
    g: Multigraph, max_vertices: int = 12
) -> tuple[Fraction, list[tuple[str, ...]]]:
    """All maximally dense connected vertex-induced subgraphs (exact ties)."""
    n = g.n_vertices
    if n > max_vertices:
        raise CapExceededError(
            f"{n} vertices exceeds the exhaustive-subgraph cap of {max_vertices}"
        )
    adj_masks = [0] * n
    edge_pairs = []
    for u, v in g.edges:
        adj_masks[u] |= 1 << v
        adj_masks[v] |= 1 << u
        edge_pairs.append((1 << u) | (1 << v))
    best: Fraction | None = None
    winners: list[tuple[str, ...]] = []
    for mask in range(3, 1 << n):
        size = mask.bit_count()
        if size < 2:
            continue
        if not _mask_conn(mask, adj_masks):
            continue
        edges = sum(1 for ep in edge_pairs if ep & mask == ep)
        if edges == 0:
            continue
        theta = Fraction(edges, size - 1)
        if best is None or theta > best:
            best = theta
            winners = []
        if theta == best:
            winners.append(tuple(g.vertices[i] for i in range(n) if mask >> i & 1))
    if best is None:
        raise CapExceededError("no connected subgraph with an edge exists")
    return best, winners


def _mask_conn(mask: int, adj_masks: list[int]) -> bool:
    start = mask & -mask
    seen = start
    frontier = start
    while frontier:
        reach = 0
        f = frontier
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            reach |= adj_masks[v]
        frontier = reach & mask & ~seen
        seen |= frontier
    return seen == mask


@dataclass
class CheckOutcome:
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class OracleReport:
    """Fast-path vs oracle agreement on one graph."""

    n_vertices: int
    n_edges: int
    n_trees: int
    meo_fast: float
    meo_exact: float
    mod2_fast: float
    mod2_exact: float
    eta_fast: list[float]
    eta_exact: list[float]
    fair_tree_count: int | None
    forbidden_tree_count: int | None
    min_partition_weight: str
    densest_theta: str
    densest_sets: list[list[str]]
    checks: dict[str, CheckOutcome] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_json_dict(self) -> dict:
        return {
            "graph": {"vertices": self.n_vertices, "edges": self.n_edges},
            "tree_count": self.n_trees,
            "meo": {"fast": self.meo_fast, "exact": self.meo_exact},
            "mod2": {"fast": self.mod2_fast, "exact": self.mod2_exact},
            "eta_fast": self.eta_fast,
            "eta_exact": self.eta_exact,
            "fair_trees": self.fair_tree_count,
            "forbidden_trees": self.forbidden_tree_count,
            "min_partition_weight": self.min_partition_weight,
            "densest_theta": self.densest_theta,
            "densest_sets": self.densest_sets,
            "checks": {
                name: {"passed": c.passed, "residual": c.residual, "detail": c.detail}
                for name, c in sorted(self.checks.items())
            },
            "all_passed": self.all_passed,
        }


def cross_check(
    g: Multigraph,
    cap: int = DEFAULT_TREE_CAP,
    cfg: SolverConfig | None = None,
    include_fair_trees: bool = True,
    raise_on_failure: bool = True,
) -> OracleReport:
    """Run the fast path and every oracle path; any disagreement beyond the
    stated tolerances is the failure signal (raised unless told otherwise)."""
    from .deflation import densest_subgraph
    from .partitions import min_feasible_partition

    cfg = cfg or SolverConfig()
    trees = enumerate_trees(g, cap)
    n = usage_matrix(trees, g.n_edges)
    q = n @ n.T

    result = solve(g, cfg)
    meo_fast = 1.0 / result.mod2

    mu, meo_or = _minimize_overlap(q)
    eta_or = n.T @ mu
    lam = _maximize_dual(q)
    rho_or = 0.5 * (n.T @ lam)
    mod2_or = float(rho_or @ rho_or)

    checks: dict[str, CheckOutcome] = {}

    def record(name: str, residual: float, tol: float, detail: str = ""):
        checks[name] = CheckOutcome(passed=residual <= tol, residual=float(residual), detail=detail)

    record("meo_agreement", abs(meo_fast - meo_or), 1e-6)
    record("eta_agreement", float(np.max(np.abs(result.eta.values - eta_or))), 1e-6)
    record("fulkerson_product", abs(mod2_or * meo_or - 1.0), 1e-10)
    record(
        "eta_two_directions",
        float(np.max(np.abs(eta_or - rho_or / mod2_or))),
        1e-8,
        "usage from the overlap law vs density over modulus",
    )

    fair = forbidden = None
    if include_fair_trees:
        fair, forbidden = fair_trees(g, cap)
        record(
            "fair_forbidden_cover",
            0.0 if len(fair) + len(forbidden) == len(trees) else 1.0,
            0.0,
        )
        rho_vals = result.rho.values
        worst_cs = 0.0
        for i in fair:
            cost = float(rho_vals[list(trees[i].edges)].sum())
            worst_cs = max(worst_cs, abs(cost - 1.0))
        record("fair_trees_cost_one", worst_cs, 1e-8)

    part_fast = min_feasible_partition(g, result)
    part_or = min_partition_exhaustive(g)
    record(
        "min_partition_weight",
        abs(float(part_fast.weight) - float(part_or.weight)),
        1e-12,
        f"fast {part_fast.weight}, exhaustive {part_or.weight}",
    )
    record(
        "partition_vs_max_usage",
        abs(float(part_or.weight) - 1.0 / float(result.eta.values.max())),
        1e-6,
    )

    core = densest_subgraph(g, cfg)
    theta_or, dense_sets = densest_subgraph_exhaustive(g)
    record(
        "densest_theta",
        0.0 if core.theta == theta_or else 1.0,
        0.0,
        f"fast {core.theta}, exhaustive {theta_or}",
    )

    report = OracleReport(
        n_vertices=g.n_vertices,
        n_edges=g.n_edges,
        n_trees=len(trees),
        meo_fast=meo_fast,
        meo_exact=meo_or,
        mod2_fast=result.mod2,
        mod2_exact=mod2_or,
        eta_fast=[float(x) for x in result.eta.values],
        eta_exact=[float(x) for x in eta_or],
        fair_tree_count=len(fair) if fair is not None else None,
        forbidden_tree_count=len(forbidden) if forbidden is not None else None,
        min_partition_weight=str(part_or.weight),
        densest_theta=str(theta_or),
        densest_sets=[list(s) for s in dense_sets],
        checks=checks,
    )
    if raise_on_failure and not report.all_passed:
        failed = [name for name, c in checks.items() if not c.passed]
        raise OracleDisagreementError(
            f"oracle disagreement on: {', '.join(sorted(failed))}", report=report
        )
    return report
