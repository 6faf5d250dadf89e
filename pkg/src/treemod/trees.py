"""Spanning-tree primitives.

Minimum-weight spanning trees under an edge density, exhaustive enumeration
via contraction/deletion, exact tree counting through the Kirchhoff matrix,
and effective resistance.  Everything here is pure and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, GraphError, NumericalError
from .multigraph import Multigraph, RollbackUnionFind, UnionFind, is_connected

ROLE_DENSITY = "density"
ROLE_USAGE = "usage"
ROLE_RESISTANCE = "resistance"

# dense factorization below this vertex count, iterative solves above
_DENSE_RESISTANCE_LIMIT = 2000


@dataclass(frozen=True, order=True)
class SpanningTree:
    """Sorted tuple of edge ids forming a spanning tree."""

    edges: tuple[int, ...]

    @staticmethod
    def of(edge_ids: Iterable[int]) -> "SpanningTree":
        return SpanningTree(tuple(sorted(edge_ids)))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, eid: int) -> bool:
        return eid in self.edges


@dataclass(frozen=True)
class EdgeVector:
    """One real value per edge with a role tag (density, usage, resistance)."""

    values: np.ndarray
    role: str = ROLE_DENSITY

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).copy()
        if vals.ndim != 1:
            raise ValueError("edge vector must be one-dimensional")
        if self.role in (ROLE_DENSITY, ROLE_USAGE, ROLE_RESISTANCE):
            if vals.size and vals.min() < -1e-9:
                raise ValueError(f"{self.role} vector has negative entry {vals.min()}")
            np.maximum(vals, 0.0, out=vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _as_values(rho, m: int | None = None) -> np.ndarray:
    vals = np.asarray(rho, dtype=float)
    if m is not None and vals.shape != (m,):
        raise ValueError(f"expected edge vector of length {m}, got shape {vals.shape}")
    return vals


def tree_cost(rho, tree: SpanningTree) -> float:
    """Total usage cost of a tree: sum of rho over its edges."""
    vals = _as_values(rho)
    return float(vals[list(tree.edges)].sum())


def min_tree(g: Multigraph, rho) -> SpanningTree:
    """Kruskal minimum spanning tree under `rho`.

    Ties break by ascending edge id (stable sort), so repeated runs return
    the same tree; with constant rho this is the lexicographically least
    edge set.
    """
    vals = _as_values(rho, g.n_edges)
    if g.n_edges == 0:
        if g.n_vertices == 1:
            return SpanningTree(())
        raise GraphError("graph has no edges")
    order = np.argsort(vals, kind="stable")
    uf = UnionFind(g.n_vertices)
    chosen: list[int] = []
    need = g.n_vertices - 1
    edges = g.edges
    for eid in order:
        e = int(eid)
        u, v = edges[e]
        if uf.union(u, v):
            chosen.append(e)
            if len(chosen) == need:
                break
    if len(chosen) != need:
        raise GraphError("graph is disconnected; no spanning tree exists")
    return SpanningTree.of(chosen)


def is_spanning_tree(g: Multigraph, edge_ids: Iterable[int]) -> bool:
    ids = list(edge_ids)
    if len(ids) != g.n_vertices - 1 or len(set(ids)) != len(ids):
        return False
    if any(not (0 <= e < g.n_edges) for e in ids):
        return False
    uf = UnionFind(g.n_vertices)
    for e in ids:
        u, v = g.edges[e]
        if not uf.union(u, v):
            return False
    return uf.n_components == 1


def _reduced_laplacian_int(g: Multigraph) -> list[list[int]]:
    n = g.n_vertices
    lap = [[0] * n for _ in range(n)]
    for u, v in g.edges:
        lap[u][u] += 1
        lap[v][v] += 1
        lap[u][v] -= 1
        lap[v][u] -= 1
    return [row[1:] for row in lap[1:]]


def _det_bareiss(mat: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; exact integer determinant."""
    n = len(mat)
    if n == 0:
        return 1
    m = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i = m[i]
            row_k = m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def count_trees(g: Multigraph) -> int:
    """Exact spanning-tree count via an integer determinant of a Laplacian minor."""
    if g.n_vertices <= 1:
        return 1
    if not is_connected(g):
        raise GraphError("tree counting requires a connected graph")
    return _det_bareiss(_reduced_laplacian_int(g))


def enumerate_trees(g: Multigraph, cap: int | None = 100_000) -> list[SpanningTree]:
    """All spanning trees, each exactly once, in lexicographic edge-id order.

    Recursive contraction/deletion: branch on the smallest edge still joining
    two components, include first; the deletion branch is pruned whenever it
    would disconnect the graph.  Raises CapExceededError (with the exact
    count) when the matrix-tree count exceeds `cap`.
    """
    if not is_connected(g):
        raise GraphError("tree enumeration requires a connected graph")
    if g.n_vertices <= 1:
        return [SpanningTree(())]
    total = count_trees(g)
    if cap is not None and total > cap:
        raise CapExceededError(
            f"graph has {total} spanning trees, above the cap of {cap}", count=total
        )
    n, m = g.n_vertices, g.n_edges
    edges = g.edges
    uf = RollbackUnionFind(n)
    alive = [True] * m
    chosen: list[int] = []
    out: list[tuple[int, ...]] = []

    def still_connectable() -> bool:
        probe = UnionFind(n)
        comps = n
        for e in chosen:
            if probe.union(*edges[e]):
                comps -= 1
        for e in range(m):
            if alive[e] and probe.union(*edges[e]):
                comps -= 1
                if comps == 1:
                    return True
        return comps == 1

    def rec() -> None:
        if uf.n_components == 1:
            out.append(tuple(chosen))
            return
        pick = -1
        for e in range(m):
            if alive[e] and uf.find(edges[e][0]) != uf.find(edges[e][1]):
                pick = e
                break
        if pick == -1:
            return
        mark = uf.checkpoint()
        uf.union(*edges[pick])
        chosen.append(pick)
        alive[pick] = False
        rec()
        alive[pick] = True
        chosen.pop()
        uf.rollback(mark)

        alive[pick] = False
        if still_connectable():
            rec()
        alive[pick] = True

    rec()
    out.sort()
    if len(out) != total:
        raise NumericalError(
            f"enumeration found {len(out)} trees but the Kirchhoff count is {total}"
        )
    return [SpanningTree(t) for t in out]


def usage_matrix(trees: Sequence[SpanningTree], m: int) -> np.ndarray:
    """Rows are tree indicator vectors over edge ids 0..m-1."""
    mat = np.zeros((len(trees), m), dtype=float)
    for i, t in enumerate(trees):
        mat[i, list(t.edges)] = 1.0
    return mat


def _weighted_laplacian(g: Multigraph) -> np.ndarray:
    n = g.n_vertices
    lap = np.zeros((n, n))
    for u, v in g.edges:
        lap[u, u] += 1.0
        lap[v, v] += 1.0
        lap[u, v] -= 1.0
        lap[v, u] -= 1.0
    return lap


def effective_resistance(g: Multigraph) -> EdgeVector:
    """Per-edge effective resistance with unit conductances.

    Parallel edges each report the resistance of their endpoint pair, which
    equals the probability that the particular copy appears in a uniform
    random spanning tree.
    """
    if not is_connected(g):
        raise GraphError("effective resistance requires a connected graph")
    n = g.n_vertices
    if g.n_edges == 0:
        return EdgeVector(np.zeros(0), ROLE_RESISTANCE)
    if n <= _DENSE_RESISTANCE_LIMIT:
        lap = _weighted_laplacian(g)
        pinv = np.linalg.pinv(lap, hermitian=True)
        vals = np.empty(g.n_edges)
        for eid, (u, v) in enumerate(g.edges):
            vals[eid] = pinv[u, u] + pinv[v, v] - 2.0 * pinv[u, v]
    else:
        vals = _resistance_iterative(g)
    if vals.size and (vals.min() <= 0.0 or vals.max() > 1.0 + 1e-8):
        raise NumericalError("effective resistance outside (0, 1]")
    return EdgeVector(np.minimum(vals, 1.0), ROLE_RESISTANCE)


def _resistance_iterative(g: Multigraph) -> np.ndarray:
    from scipy.sparse import csr_matrix
    from scipy.sparse.linalg import cg

    n = g.n_vertices
    lap = _weighted_laplacian(g)
    red = csr_matrix(lap[1:, 1:])
    diag = red.diagonal()

    def precondition(x):
        return x / diag

    from scipy.sparse.linalg import LinearOperator

    mop = LinearOperator(red.shape, matvec=precondition)
    vals = np.empty(g.n_edges)
    cache: dict[tuple[int, int], float] = {}
    for eid, (u, v) in enumerate(g.edges):
        key = (u, v) if u < v else (v, u)
        if key in cache:
            vals[eid] = cache[key]
            continue
        rhs = np.zeros(n - 1)
        if u > 0:
            rhs[u - 1] = 1.0
        if v > 0:
            rhs[v - 1] = -1.0
        x, info = cg(red, rhs, rtol=1e-10, atol=0.0, M=mop)
        if info != 0:
            raise NumericalError(f"conjugate gradient failed for edge {eid} (info={info})")
        xu = x[u - 1] if u > 0 else 0.0
        xv = x[v - 1] if v > 0 else 0.0
        cache[key] = xu - xv
        vals[eid] = cache[key]
    return vals
