"""Standard and test-corpus graph constructions.

All builders return immutable multigraphs with deterministic vertex and
edge order, so downstream results are reproducible byte for byte.
"""

from __future__ import annotations

import numpy as np

from .multigraph import Multigraph


def complete_graph(n: int) -> Multigraph:
    labels = [f"v{i}" for i in range(n)]
    pairs = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n)]
    return Multigraph.from_pairs(pairs, vertices=labels)


def cycle_graph(n: int) -> Multigraph:
    labels = [f"v{i}" for i in range(n)]
    pairs = [(labels[i], labels[(i + 1) % n]) for i in range(n)]
    return Multigraph.from_pairs(pairs, vertices=labels)


def path_graph(n: int) -> Multigraph:
    labels = [f"v{i}" for i in range(n)]
    pairs = [(labels[i], labels[i + 1]) for i in range(n - 1)]
    return Multigraph.from_pairs(pairs, vertices=labels)


def triangle_pendant() -> Multigraph:
    """Triangle a-b-c with a pendant edge c-d."""
    return Multigraph.from_pairs([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])


def slashed_square() -> Multigraph:
    """4-cycle a-b-c-d with the diagonal a-c (edge id 4)."""
    return Multigraph.from_pairs(
        [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")]
    )


def doubled_slashed_square() -> Multigraph:
    """Slashed square with every side doubled; the diagonal stays single."""
    pairs = []
    for u, v in [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]:
        pairs.extend([(u, v), (u, v)])
    pairs.append(("a", "c"))
    return Multigraph.from_pairs(pairs)


def house_graph() -> Multigraph:
    """Unit square with a roof triangle on its top edge."""
    return Multigraph.from_pairs(
        [
            ("bl", "br"),
            ("br", "tr"),
            ("tr", "tl"),
            ("tl", "bl"),
            ("tl", "ap"),
            ("tr", "ap"),
        ]
    )


def k3_with_double_parallel() -> Multigraph:
    """Triangle with two extra parallel copies of one edge (5 edges total)."""
    return Multigraph.from_pairs(
        [("a", "b"), ("a", "b"), ("a", "b"), ("b", "c"), ("c", "a")]
    )


def petersen_graph() -> Multigraph:
    outer = [f"o{i}" for i in range(5)]
    inner = [f"i{i}" for i in range(5)]
    pairs = [(outer[i], outer[(i + 1) % 5]) for i in range(5)]
    pairs += [(outer[i], inner[i]) for i in range(5)]
    pairs += [(inner[i], inner[(i + 2) % 5]) for i in range(5)]
    return Multigraph.from_pairs(pairs, vertices=outer + inner)


def layered_ring_graph() -> Multigraph:
    """Complete core of 10, a middle ring stitched to it, and an outer ring.

    Core vertices c0..c9 are pairwise adjacent.  Middle vertex mi joins core
    neighbors c(i-1) and c(i+1), its ring neighbors, and outer vertex oi;
    outer vertices form their own ring.
    """
    core = [f"c{i}" for i in range(10)]
    mid = [f"m{i}" for i in range(10)]
    out = [f"o{i}" for i in range(10)]
    pairs = [(core[i], core[j]) for i in range(10) for j in range(i + 1, 10)]
    for i in range(10):
        pairs.append((mid[i], core[(i - 1) % 10]))
        pairs.append((mid[i], core[(i + 1) % 10]))
    pairs += [(mid[i], mid[(i + 1) % 10]) for i in range(10)]
    pairs += [(mid[i], out[i]) for i in range(10)]
    pairs += [(out[i], out[(i + 1) % 10]) for i in range(10)]
    return Multigraph.from_pairs(pairs, vertices=core + mid + out)


def _bipartite_block(prefix: str) -> list[tuple[str, str]]:
    # complete bipartite 3+3 with an apex below one side and above the other
    low = f"{prefix}1"
    mids = [f"{prefix}{i}" for i in (2, 3, 4)]
    tops = [f"{prefix}{i}" for i in (5, 6, 7)]
    high = f"{prefix}8"
    pairs = [(m, t) for m in mids for t in tops]
    pairs += [(low, m) for m in mids]
    pairs += [(high, t) for t in tops]
    return pairs


def twin_block_graph() -> Multigraph:
    """Two 8-vertex blocks (complete bipartite 3+3 plus two apexes) joined by
    two edges between the apexes; 4-regular and biconnected."""
    pairs = _bipartite_block("a") + _bipartite_block("b")
    pairs += [("a1", "b1"), ("a8", "b8")]
    labels = [f"a{i}" for i in range(1, 9)] + [f"b{i}" for i in range(1, 9)]
    return Multigraph.from_pairs(pairs, vertices=labels)


def random_connected_multigraph(
    seed: int,
    n_min: int = 4,
    n_max: int = 8,
    extra_max: int = 6,
    parallel_prob: float = 0.25,
) -> Multigraph:
    """Seeded random connected multigraph: a random spanning tree plus a few
    extra (possibly parallel) edges."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    labels = [f"v{i}" for i in range(n)]
    pairs = []
    for i in range(1, n):
        j = int(rng.integers(0, i))
        pairs.append((labels[j], labels[i]))
    extra = int(rng.integers(0, extra_max + 1))
    for _ in range(extra):
        if pairs and rng.random() < parallel_prob:
            u, v = pairs[int(rng.integers(0, len(pairs)))]
        else:
            u, v = rng.choice(n, size=2, replace=False)
            u, v = labels[int(u)], labels[int(v)]
        pairs.append((u, v))
    return Multigraph.from_pairs(pairs, vertices=labels)


def random_geometric_graph(seed: int, n: int, radius: float) -> Multigraph:
    """Points in the unit square joined when closer than `radius`; any stray
    components are stitched to the main one by nearest-point edges."""
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    labels = [f"p{i}" for i in range(n)]
    pairs: list[tuple[str, str]] = []
    r2 = radius * radius
    for i in range(n):
        d = pts[i + 1 :] - pts[i]
        close = np.flatnonzero((d * d).sum(axis=1) <= r2)
        for j in close:
            pairs.append((labels[i], labels[i + 1 + int(j)]))
    g = Multigraph.from_pairs(pairs, vertices=labels) if pairs else Multigraph(tuple(labels), ())
    from .multigraph import connected_components

    comps = connected_components(g)
    while len(comps) > 1:
        main = comps[0]
        other = comps[1]
        best = None
        for i in main:
            d = pts[other] - pts[i]
            dist = (d * d).sum(axis=1)
            j = int(np.argmin(dist))
            if best is None or dist[j] < best[0]:
                best = (float(dist[j]), i, other[j])
        pairs.append((labels[best[1]], labels[best[2]]))
        g = Multigraph.from_pairs(pairs, vertices=labels)
        comps = connected_components(g)
    return g
