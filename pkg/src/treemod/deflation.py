"""Homogeneous cores, graph shrinking, and the deflation hierarchy.

A core is a connected component of the subgraph spanned by the edges of
minimal optimal usage, closed to a vertex-induced subgraph.  Shrinking every
core found in a pass to a single vertex and re-solving yields a strictly
increasing sequence of usage levels; overlap values add across the levels
(the serial rule), and so do the laws via product coupling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceededError, GraphError, ToleranceError
from .multigraph import (
    Multigraph,
    UnionFind,
    biconnected_components,
    contract,
    is_connected,
    vertex_induced_subgraph,
)
from .solver import ModulusResult, SolverConfig, TreePmf, solve
from .trees import ROLE_USAGE, EdgeVector, SpanningTree, is_spanning_tree

_CORE_THETA_TOL = 1e-6


def denseness(g: Multigraph) -> float:
    """|E| / (|V|-1): 1 on trees, maximal on the densest core."""
    if g.n_vertices < 2:
        raise GraphError("denseness needs at least two vertices")
    return g.n_edges / (g.n_vertices - 1)


def denseness_exact(g: Multigraph) -> Fraction:
    if g.n_vertices < 2:
        raise GraphError("denseness needs at least two vertices")
    return Fraction(g.n_edges, g.n_vertices - 1)


@dataclass(frozen=True)
class CoreRecord:
    """One homogeneous core: a vertex-induced subgraph at the minimal usage level."""

    vertices: tuple[str, ...]
    subgraph: Multigraph
    edge_ids: tuple[int, ...]            # ids in the graph the core was found in
    original_edge_ids: tuple[int, ...]   # same edges, as ids of the original graph
    kappa: Fraction                      # (|V_H|-1)/|E_H|

    @property
    def meo(self) -> Fraction:
        return Fraction((self.subgraph.n_vertices - 1) ** 2, self.subgraph.n_edges)

    @property
    def theta(self) -> Fraction:
        return 1 / self.kappa


@dataclass(frozen=True)
class DeflationLevel:
    """All cores shrunk in one pass; they share the usage level kappa."""

    kappa: Fraction
    cores: tuple[CoreRecord, ...]

    @property
    def meo(self) -> Fraction:
        return sum((c.meo for c in self.cores), Fraction(0))


@dataclass(frozen=True)
class DeflationHierarchy:
    graph: Multigraph
    levels: tuple[DeflationLevel, ...]
    edge_level: tuple[int, ...]
    terminal_label: str

    def cores_flat(self) -> list[CoreRecord]:
        return [c for level in self.levels for c in level.cores]

    def meo_exact(self) -> Fraction:
        return sum((level.meo for level in self.levels), Fraction(0))

    def to_json_dict(self) -> dict:
        return {
            "levels": [
                {
                    "kappa": float(level.kappa),
                    "kappa_exact": f"{level.kappa.numerator}/{level.kappa.denominator}",
                    "cores": [
                        {
                            "vertices": list(core.vertices),
                            "vertex_count": core.subgraph.n_vertices,
                            "edge_count": core.subgraph.n_edges,
                            "original_edges": list(core.original_edge_ids),
                            "meo": float(core.meo),
                        }
                        for core in level.cores
                    ],
                }
                for level in self.levels
            ],
            "edge_levels": list(self.edge_level),
            "meo": float(self.meo_exact()),
            "terminal_vertex": self.terminal_label,
        }


def _min_usage_components(
    g: Multigraph, result: ModulusResult, tol: float | None
) -> tuple[float, list[list[str]]]:
    """Vertex sets of the connected components of the minimal-usage subgraph."""
    eta = result.eta.values
    kappa = float(eta.min())
    if tol is None:
        tol = max(10.0 * result.config.tol * float(eta.max()), 1e-12)
    member = [eid for eid in range(g.n_edges) if eta[eid] - kappa <= tol]
    uf = UnionFind(g.n_vertices)
    for eid in member:
        uf.union(*g.edges[eid])
    comps: dict[int, set[int]] = {}
    for eid in member:
        u, v = g.edges[eid]
        comps.setdefault(uf.find(u), set()).update((u, v))
    vertex_sets = [
        sorted(g.vertices[i] for i in vs) for vs in comps.values()
    ]
    vertex_sets.sort(key=lambda labels: labels[0])
    return kappa, vertex_sets


def _build_core(
    g: Multigraph,
    labels: list[str],
    eta: np.ndarray,
    kappa: float,
    tol: float,
    orig_of: dict[int, int],
) -> CoreRecord:
    sub, edge_map = vertex_induced_subgraph(g, labels)
    for new_id in range(sub.n_edges):
        eid = edge_map[new_id]
        if eta[eid] - kappa > tol:
            raise ToleranceError(
                "vertex-induced closure of a core picked up an edge above the "
                f"minimal usage level (edge {eid}, usage {eta[eid]} vs {kappa})"
            )
    kappa_exact = Fraction(sub.n_vertices - 1, sub.n_edges)
    if abs(float(kappa_exact) - kappa) > _CORE_THETA_TOL:
        raise ToleranceError(
            f"core denseness {float(1 / kappa_exact)} does not match the usage "
            f"level {kappa}; solve tolerance too loose"
        )
    ids = tuple(edge_map[i] for i in range(sub.n_edges))
    return CoreRecord(
        vertices=tuple(labels),
        subgraph=sub,
        edge_ids=ids,
        original_edge_ids=tuple(orig_of[e] for e in ids),
        kappa=kappa_exact,
    )


def homogeneous_core(
    g: Multigraph, result: ModulusResult, tol: float | None = None
) -> CoreRecord:
    """The first homogeneous core of g (least vertex label among components).

    For a homogeneous graph this is the whole graph.
    """
    eta = result.eta.values
    kappa, vertex_sets = _min_usage_components(g, result, tol)
    level_tol = tol if tol is not None else max(
        10.0 * result.config.tol * float(eta.max()), 1e-12
    )
    identity = {i: i for i in range(g.n_edges)}
    return _build_core(g, vertex_sets[0], eta, kappa, level_tol, identity)


def deflate(g: Multigraph, cfg: SolverConfig | None = None) -> DeflationHierarchy:
    """Iteratively extract and shrink all minimal-usage cores until one vertex
    remains.  All cores found in the same pass share the level's kappa."""
    if g.n_edges == 0:
        raise GraphError("deflation needs at least one edge")
    if not is_connected(g):
        raise GraphError("deflation requires a connected graph")
    cfg = cfg or SolverConfig()

    current = g
    orig_of = {i: i for i in range(g.n_edges)}
    levels: list[DeflationLevel] = []
    edge_level = [-1] * g.n_edges

    while current.n_edges > 0:
        result = solve(current, cfg)
        eta = result.eta.values
        kappa, vertex_sets = _min_usage_components(current, result, None)
        level_tol = max(10.0 * cfg.tol * float(eta.max()), 1e-12)
        cores = [
            _build_core(current, labels, eta, kappa, level_tol, orig_of)
            for labels in vertex_sets
        ]
        level_index = len(levels)
        for core in cores:
            for orig in core.original_edge_ids:
                edge_level[orig] = level_index
        if levels and cores[0].kappa <= levels[-1].kappa:
            raise ToleranceError(
                f"usage level {cores[0].kappa} did not increase past "
                f"{levels[-1].kappa}; deflation order violated"
            )
        levels.append(DeflationLevel(kappa=cores[0].kappa, cores=tuple(cores)))

        # contract the cores one after another (they are vertex-disjoint)
        work = current
        forward_maps: list[dict[int, int]] = []
        for core in cores:
            work, bij = contract(work, core.vertices)
            forward_maps.append(bij.forward)
        new_orig: dict[int, int] = {}
        for old_eid, orig in orig_of.items():
            e = old_eid
            alive = True
            for fmap in forward_maps:
                if e not in fmap:
                    alive = False
                    break
                e = fmap[e]
            if alive:
                new_orig[e] = orig
        orig_of = new_orig
        current = work

    if any(level < 0 for level in edge_level):
        raise ToleranceError("some edges were never assigned to a deflation level")
    return DeflationHierarchy(
        graph=g,
        levels=tuple(levels),
        edge_level=tuple(edge_level),
        terminal_label=current.vertices[0],
    )


def eta_from_hierarchy(h: DeflationHierarchy) -> EdgeVector:
    """Usage probabilities implied by the hierarchy: each edge gets its level's kappa."""
    vals = np.array([float(h.levels[lvl].kappa) for lvl in h.edge_level])
    return EdgeVector(vals, ROLE_USAGE)


def meo_from_hierarchy(h: DeflationHierarchy) -> float:
    """Serial rule: overlap is the sum of (|V_H|-1)^2/|E_H| over all cores."""
    return float(h.meo_exact())


def compose_pmf(
    h: DeflationHierarchy, pmfs, max_support: int = 200_000
) -> TreePmf:
    """Product coupling of per-core laws, pulled back to the original graph.

    `pmfs` holds one TreePmf per core, in hierarchy order (see cores_flat).
    The support size is the product of the per-core support sizes.
    """
    cores = h.cores_flat()
    pmfs = list(pmfs)
    if len(pmfs) != len(cores):
        raise ValueError(f"need one law per core: {len(cores)} cores, {len(pmfs)} laws")
    size = 1
    for core, pmf in zip(cores, pmfs):
        for tree in pmf.support():
            if not is_spanning_tree(core.subgraph, tree.edges):
                raise GraphError(
                    "law support contains a set that does not span its core"
                )
        size *= len(pmf)
        if size > max_support:
            raise CapExceededError(
                f"coupled support would exceed {max_support} trees", count=size
            )
    probs: dict[SpanningTree, float] = {}
    supports = [pmf.support() for pmf in pmfs]
    for combo in itertools.product(*supports):
        edges: list[int] = []
        p = 1.0
        for core, pmf, tree in zip(cores, pmfs, combo):
            edges.extend(core.original_edge_ids[e] for e in tree.edges)
            p *= pmf[tree]
        full = SpanningTree.of(edges)
        if not is_spanning_tree(h.graph, full.edges):
            raise ToleranceError("coupled tree fails to span the original graph")
        probs[full] = probs.get(full, 0.0) + p
    return TreePmf(probs)


@dataclass(frozen=True)
class SerialBlock:
    edge_ids: tuple[int, ...]
    subgraph: Multigraph
    edge_map: dict[int, int]   # subgraph edge id -> original edge id
    result: ModulusResult


@dataclass(frozen=True)
class SerialDecomposition:
    blocks: tuple[SerialBlock, ...]
    meo: float
    eta: EdgeVector


def serial_decompose(g: Multigraph, cfg: SolverConfig | None = None) -> SerialDecomposition:
    """Solve each biconnected block independently; overlap values add and the
    usage vector is assembled blockwise."""
    cfg = cfg or SolverConfig()
    eta = np.zeros(g.n_edges)
    blocks = []
    total = 0.0
    for edge_ids in biconnected_components(g):
        touched = sorted({v for eid in edge_ids for v in g.edges[eid]})
        labels = [g.vertices[i] for i in touched]
        remap = {old: new for new, old in enumerate(touched)}
        sub_edges = tuple((remap[g.edges[e][0]], remap[g.edges[e][1]]) for e in edge_ids)
        sub = Multigraph(tuple(labels), sub_edges)
        res = solve(sub, cfg)
        emap = {i: edge_ids[i] for i in range(len(edge_ids))}
        for i, orig in emap.items():
            eta[orig] = res.eta.values[i]
        total += 1.0 / res.mod2
        blocks.append(SerialBlock(tuple(edge_ids), sub, emap, res))
    return SerialDecomposition(tuple(blocks), total, EdgeVector(eta, ROLE_USAGE))


def densest_subgraph(g: Multigraph, cfg: SolverConfig | None = None) -> CoreRecord:
    """A maximally dense connected vertex-induced subgraph: the first core."""
    if g.n_edges == 0:
        raise GraphError("densest subgraph needs at least one edge")
    result = solve(g, cfg or SolverConfig())
    return homogeneous_core(g, result)
