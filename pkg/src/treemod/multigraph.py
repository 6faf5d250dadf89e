"""Multigraph data model: parallel edges, no self loops.

Vertices carry arbitrary string labels; internally they get dense indices in
first-seen order so all outputs are stable.  Edge ids are 0..m-1 in input
order.  Graphs are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import GraphError


class UnionFind:
    """Union by size with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.n_components = n

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.n_components -= 1
        return True


class RollbackUnionFind:
    """Union by size without path compression so unions can be undone."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.n_components = n
        self._trail: list[int] = []

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.n_components -= 1
        self._trail.append(rb)
        return True

    def checkpoint(self) -> int:
        return len(self._trail)

    def rollback(self, mark: int) -> None:
        while len(self._trail) > mark:
            rb = self._trail.pop()
            ra = self.parent[rb]
            self.parent[rb] = rb
            self.size[ra] -= self.size[rb]
            self.n_components += 1


@dataclass(frozen=True)
class Multigraph:
    """Finite multigraph.  `edges[i]` holds the endpoint indices of edge i."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for label in self.vertices:
            if label in seen:
                raise GraphError(f"duplicate vertex label {label!r}")
            seen.add(label)
        n = len(self.vertices)
        for eid, (u, v) in enumerate(self.edges):
            if u == v:
                raise GraphError(f"edge {eid} is a self loop on {self.vertices[u]!r}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {eid} references unknown vertex index")

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[str, str]], vertices: Sequence[str] | None = None) -> "Multigraph":
        """Build from label pairs; vertex order is first-seen unless given."""
        labels: list[str] = list(vertices) if vertices is not None else []
        index = {lab: i for i, lab in enumerate(labels)}
        edges: list[tuple[int, int]] = []
        for u, v in pairs:
            u, v = str(u), str(v)
            for lab in (u, v):
                if lab not in index:
                    index[lab] = len(labels)
                    labels.append(lab)
            edges.append((index[u], index[v]))
        return Multigraph(tuple(labels), tuple(edges))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.vertices)}

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex: tuple of (neighbor index, edge id)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.vertices]
        for eid, (u, v) in enumerate(self.edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        return tuple(tuple(a) for a in adj)

    def endpoints(self, eid: int) -> tuple[str, str]:
        u, v = self.edges[eid]
        return self.vertices[u], self.vertices[v]

    def degree(self, label: str) -> int:
        return len(self.adjacency[self.vertex_index[label]])

    def to_edge_list(self) -> str:
        """One `u v` line per edge, in edge-id order; re-parses to the same graph."""
        lines = []
        for u, v in self.edges:
            lines.append(f"{self.vertices[u]} {self.vertices[v]}")
        return "\n".join(lines) + ("\n" if lines else "")


def from_edge_list(text: str, max_edges: int = 1_000_000) -> Multigraph:
    """Parse an edge-list text: `u v` or `u v mult` per line, `#` comments.

    A multiplicity expands to that many parallel edges at parse time, so the
    solver core only ever sees unweighted multigraphs.  `max_edges` caps the
    total expanded edge count.
    """
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) == 2:
            u, v = fields
            mult = 1
        elif len(fields) == 3:
            u, v, ms = fields
            try:
                mult = int(ms)
            except ValueError:
                raise GraphError(f"line {lineno}: multiplicity {ms!r} is not an integer")
            if mult <= 0:
                raise GraphError(f"line {lineno}: multiplicity must be positive, got {mult}")
        else:
            raise GraphError(f"line {lineno}: expected 'u v' or 'u v mult', got {line!r}")
        if u == v:
            raise GraphError(f"line {lineno}: self loop {u!r}-{v!r} not allowed")
        if len(pairs) + mult > max_edges:
            raise GraphError(
                f"line {lineno}: expanded edge count exceeds cap of {max_edges} edges"
            )
        pairs.extend([(u, v)] * mult)
    if not pairs:
        raise GraphError("empty input: no edges found")
    return Multigraph.from_pairs(pairs)


def is_connected(g: Multigraph) -> bool:
    """True iff one traversal component covers V (single vertex counts)."""
    n = g.n_vertices
    if n <= 1:
        return True
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    adj = g.adjacency
    while stack:
        x = stack.pop()
        for y, _ in adj[x]:
            if not seen[y]:
                seen[y] = True
                count += 1
                stack.append(y)
    return count == n


def connected_components(g: Multigraph) -> list[list[int]]:
    """Vertex-index components, each sorted, ordered by smallest member."""
    n = g.n_vertices
    seen = [False] * n
    comps: list[list[int]] = []
    adj = g.adjacency
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            x = stack.pop()
            for y, _ in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def biconnected_components(g: Multigraph) -> list[list[int]]:
    """Partition of edge ids into maximal biconnected blocks.

    Iterative Hopcroft-Tarjan on the multigraph; a parallel copy of the tree
    edge counts as a back edge, so parallel edges always share a block.
    Blocks are sorted internally and ordered by their smallest edge id.
    """
    if not is_connected(g):
        raise GraphError("biconnected decomposition requires a connected graph")
    n = g.n_vertices
    adj = g.adjacency
    disc = [-1] * n
    low = [0] * n
    timer = 0
    edge_stack: list[int] = []
    blocks: list[list[int]] = []

    for root in range(n):
        if disc[root] != -1:
            continue
        # frame: (vertex, incoming edge id, iterator position)
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, 0)]
        while stack:
            x, in_edge, i = stack.pop()
            if i < len(adj[x]):
                stack.append((x, in_edge, i + 1))
                y, eid = adj[x][i]
                if eid == in_edge:
                    continue
                if disc[y] == -1:
                    edge_stack.append(eid)
                    disc[y] = low[y] = timer
                    timer += 1
                    stack.append((y, eid, 0))
                elif disc[y] < disc[x]:
                    edge_stack.append(eid)
                    low[x] = min(low[x], disc[y])
            else:
                if in_edge == -1:
                    continue
                # returning from x into its parent p
                p = stack[-1][0]
                low[p] = min(low[p], low[x])
                if low[x] >= disc[p]:
                    block = []
                    while True:
                        eid = edge_stack.pop()
                        block.append(eid)
                        if eid == in_edge:
                            break
                    blocks.append(sorted(block))
    blocks.sort(key=lambda b: b[0])
    return blocks


def articulation_points(g: Multigraph) -> list[str]:
    """Vertices appearing in more than one biconnected block."""
    blocks = biconnected_components(g)
    count: dict[int, int] = {}
    for block in blocks:
        touched = set()
        for eid in block:
            touched.update(g.edges[eid])
        for v in touched:
            count[v] = count.get(v, 0) + 1
    return sorted((g.vertices[v] for v, c in count.items() if c > 1))


def vertex_induced_subgraph(g: Multigraph, labels: Iterable[str]) -> tuple[Multigraph, dict[int, int]]:
    """Subgraph on the given vertex set; returns (subgraph, new id -> old id)."""
    wanted = set(labels)
    if not wanted:
        raise GraphError("vertex set must be nonempty")
    unknown = wanted - set(g.vertices)
    if unknown:
        raise GraphError(f"unknown vertices: {sorted(unknown)}")
    keep = [i for i, lab in enumerate(g.vertices) if lab in wanted]
    remap = {old: new for new, old in enumerate(keep)}
    sub_edges = []
    edge_map: dict[int, int] = {}
    for eid, (u, v) in enumerate(g.edges):
        if u in remap and v in remap:
            edge_map[len(sub_edges)] = eid
            sub_edges.append((remap[u], remap[v]))
    sub = Multigraph(tuple(g.vertices[i] for i in keep), tuple(sub_edges))
    return sub, edge_map


@dataclass(frozen=True)
class EdgeBijection:
    """Bijection between surviving edge ids of G and the edge ids of G/H."""

    forward: dict[int, int]
    inverse: dict[int, int]

    def __post_init__(self):
        if len(self.forward) != len(self.inverse):
            raise GraphError("edge bijection maps have different sizes")
        for old, new in self.forward.items():
            if self.inverse.get(new) != old:
                raise GraphError("edge bijection maps are not mutually inverse")


def _fresh_label(base: str, taken: set[str]) -> str:
    label = f"[{base}]"
    while label in taken:
        label += "'"
    return label


def contract(g: Multigraph, core_labels: Iterable[str]) -> tuple[Multigraph, EdgeBijection]:
    """Shrink the vertex set `core_labels` to a single vertex.

    The induced subgraph on the core must be connected.  Edges inside the
    core are dropped; edges touching it are re-aimed at the new vertex with
    multiplicity preserved.  Contracting all of V yields the legal terminal
    single-vertex graph.
    """
    core = set(core_labels)
    sub, _ = vertex_induced_subgraph(g, core)
    if not is_connected(sub):
        raise GraphError("core must induce a connected subgraph")
    core_idx = {g.vertex_index[lab] for lab in core}
    survivors = [i for i in range(g.n_vertices) if i not in core_idx]
    new_labels = [g.vertices[i] for i in survivors]
    vh_label = _fresh_label(min(core), set(new_labels))
    new_labels.append(vh_label)
    vh = len(survivors)
    remap = {old: new for new, old in enumerate(survivors)}

    new_edges: list[tuple[int, int]] = []
    forward: dict[int, int] = {}
    inverse: dict[int, int] = {}
    for eid, (u, v) in enumerate(g.edges):
        iu = u in core_idx
        iv = v in core_idx
        if iu and iv:
            continue
        nu = vh if iu else remap[u]
        nv = vh if iv else remap[v]
        new_id = len(new_edges)
        forward[eid] = new_id
        inverse[new_id] = eid
        new_edges.append((nu, nv))
    shrunk = Multigraph(tuple(new_labels), tuple(new_edges))
    return shrunk, EdgeBijection(forward, inverse)


@dataclass(frozen=True)
class VertexPartition:
    """Assignment of every vertex to a block index 0..k-1."""

    assignment: tuple[int, ...]
    n_blocks: int = field(default=0)

    def __post_init__(self):
        k = self.n_blocks or (max(self.assignment) + 1 if self.assignment else 0)
        object.__setattr__(self, "n_blocks", k)
        if k < 1:
            raise GraphError("partition needs at least one block")
        used = set(self.assignment)
        if used != set(range(k)):
            raise GraphError("block indices must be exactly 0..k-1 with none empty")

    @staticmethod
    def from_blocks(g: Multigraph, blocks: Sequence[Iterable[str]]) -> "VertexPartition":
        assignment = [-1] * g.n_vertices
        for b, members in enumerate(blocks):
            for lab in members:
                i = g.vertex_index.get(lab)
                if i is None:
                    raise GraphError(f"unknown vertex {lab!r}")
                if assignment[i] != -1:
                    raise GraphError(f"vertex {lab!r} assigned to two blocks")
                assignment[i] = b
        if any(a == -1 for a in assignment):
            missing = [g.vertices[i] for i, a in enumerate(assignment) if a == -1]
            raise GraphError(f"vertices not assigned to any block: {missing}")
        return VertexPartition(tuple(assignment), len(blocks))

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for v, b in enumerate(self.assignment):
            out[b].append(v)
        return out
