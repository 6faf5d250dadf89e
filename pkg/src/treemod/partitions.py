"""Feasible vertex partitions and the minimum feasible partition.

A partition is feasible when it has at least two blocks and every block
induces a connected subgraph.  Its weight is |E_P| / (k_P - 1) where E_P is
the set of cross-block edges.  (The literature sometimes displays |E| in
the weight; every actual use needs |E_P|, which is what we implement.)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import CapExceededError, GraphError, InfeasiblePartitionError, ToleranceError
from .multigraph import Multigraph, UnionFind, VertexPartition
from .solver import ModulusResult
from .trees import SpanningTree

# edges within this relative distance of the max usage are grouped together
LEVEL_GROUP_FACTOR = 10.0
MAX_EXHAUSTIVE_VERTICES = 12


@dataclass(frozen=True)
class FeasiblePartition:
    partition: VertexPartition
    cross_edges: tuple[int, ...]
    weight: Fraction

    @property
    def n_blocks(self) -> int:
        return self.partition.n_blocks

    def block_labels(self, g: Multigraph) -> list[list[str]]:
        return [[g.vertices[v] for v in block] for block in self.partition.blocks()]


def validate_feasible(g: Multigraph, partition: VertexPartition) -> FeasiblePartition:
    """Check feasibility and attach the cross-edge set and weight."""
    if len(partition.assignment) != g.n_vertices:
        raise GraphError("partition must assign every vertex of the graph")
    k = partition.n_blocks
    if k < 2:
        raise InfeasiblePartitionError("partition needs at least two blocks", block=0)
    blocks = partition.blocks()
    adj = g.adjacency
    for b, members in enumerate(blocks):
        if not members:
            raise InfeasiblePartitionError(f"block {b} is empty", block=b)
        member_set = set(members)
        seen = {members[0]}
        stack = [members[0]]
        while stack:
            x = stack.pop()
            for y, _ in adj[x]:
                if y in member_set and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != member_set:
            labels = sorted(g.vertices[v] for v in member_set)
            raise InfeasiblePartitionError(
                f"block {b} ({labels}) does not induce a connected subgraph", block=b
            )
    assign = partition.assignment
    cross = tuple(
        eid for eid, (u, v) in enumerate(g.edges) if assign[u] != assign[v]
    )
    return FeasiblePartition(
        partition=partition,
        cross_edges=cross,
        weight=Fraction(len(cross), k - 1),
    )


def _components_without(g: Multigraph, removed: set[int]) -> VertexPartition:
    uf = UnionFind(g.n_vertices)
    for eid, (u, v) in enumerate(g.edges):
        if eid not in removed:
            uf.union(u, v)
    roots: dict[int, int] = {}
    assignment = []
    for v in range(g.n_vertices):
        r = uf.find(v)
        if r not in roots:
            roots[r] = len(roots)
        assignment.append(roots[r])
    return VertexPartition(tuple(assignment), len(roots))


def min_feasible_partition(
    g: Multigraph, result: ModulusResult, level_tol: float | None = None
) -> FeasiblePartition:
    """Minimum-weight feasible partition read off the optimal usage vector.

    The cross edges are exactly the edges of maximal usage; removing them
    splits the graph into the partition blocks.  On a homogeneous graph this
    degenerates to the all-singletons partition.
    """
    eta = result.eta.values
    if level_tol is None:
        level_tol = LEVEL_GROUP_FACTOR * result.config.tol * float(eta.max())
    top = float(eta.max())
    estar = {eid for eid in range(g.n_edges) if top - eta[eid] <= level_tol}
    partition = _components_without(g, estar)
    feasible = validate_feasible(g, partition)
    if set(feasible.cross_edges) != estar:
        raise ToleranceError(
            "max-usage edges do not form the cross set of their component "
            "partition; the solve is too loose for level grouping"
        )
    inv_w = 1.0 / float(feasible.weight)
    if abs(top - inv_w) > max(1e-6, 2 * level_tol):
        raise ToleranceError(
            f"max usage {top} does not match the partition weight reciprocal {inv_w}"
        )
    return feasible


def tree_crossings(g: Multigraph, feasible: FeasiblePartition, tree: SpanningTree) -> int:
    """Number of tree edges crossing between blocks (always >= k - 1)."""
    cross = set(feasible.cross_edges)
    return sum(1 for e in tree.edges if e in cross)


def _mask_connected(mask: int, adj_masks: list[int]) -> bool:
    if mask == 0:
        return False
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


def iter_feasible_partitions(
    g: Multigraph, max_vertices: int = MAX_EXHAUSTIVE_VERTICES
) -> Iterator[FeasiblePartition]:
    """All feasible partitions, by exhaustive search over block assignments.

    Desk scale only; raises CapExceededError above `max_vertices` vertices.
    Vertices are assigned in index order (restricted-growth form) and a
    partial block is abandoned as soon as no completion could connect it.
    """
    n = g.n_vertices
    if n > max_vertices:
        raise CapExceededError(
            f"{n} vertices exceeds the exhaustive-partition cap of {max_vertices}"
        )
    adj_masks = [0] * n
    for u, v in g.edges:
        adj_masks[u] |= 1 << v
        adj_masks[v] |= 1 << u

    assignment = [0] * n
    block_masks: list[int] = []

    def viable(block_mask: int, next_vertex: int) -> bool:
        remaining = ((1 << n) - 1) ^ ((1 << next_vertex) - 1)
        return _mask_connected_within(block_mask, block_mask | remaining, adj_masks)

    def rec(v: int):
        if v == n:
            if len(block_masks) >= 2 and all(
                _mask_connected(mask, adj_masks) for mask in block_masks
            ):
                yield VertexPartition(tuple(assignment), len(block_masks))
            return
        for b in range(len(block_masks)):
            block_masks[b] |= 1 << v
            assignment[v] = b
            if viable(block_masks[b], v + 1):
                yield from rec(v + 1)
            block_masks[b] &= ~(1 << v)
        block_masks.append(1 << v)
        assignment[v] = len(block_masks) - 1
        yield from rec(v + 1)
        block_masks.pop()

    for partition in rec(0):
        yield validate_feasible(g, partition)


def _mask_connected_within(target: int, allowed: int, adj_masks: list[int]) -> bool:
    """True when all bits of `target` lie in one component of `allowed`."""
    if target == 0:
        return True
    start = target & -target
    seen = start
    frontier = start
    while frontier and (seen & target) != target:
        reach = 0
        f = frontier
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            reach |= adj_masks[v]
        frontier = reach & allowed & ~seen
        seen |= frontier
    return (seen & target) == target


def homogeneity_by_partitions(
    g: Multigraph, max_vertices: int = MAX_EXHAUSTIVE_VERTICES
) -> bool:
    """Homogeneity via the partition criterion: every feasible partition
    must weigh at least |E|/(|V|-1).  Exact rational comparison."""
    theta = Fraction(g.n_edges, g.n_vertices - 1)
    for feasible in iter_feasible_partitions(g, max_vertices):
        if feasible.weight < theta:
            return False
    return True
