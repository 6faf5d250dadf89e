import pytest

from treemod import (
    GraphError,
    Multigraph,
    VertexPartition,
    articulation_points,
    biconnected_components,
    contract,
    from_edge_list,
    is_connected,
    vertex_induced_subgraph,
)
from treemod.graphs import cycle_graph, house_graph, layered_ring_graph


def test_parse_triangle():
    g = from_edge_list("a b\nb c\nc a")
    assert g.vertices == ("a", "b", "c")
    assert g.n_edges == 3
    assert g.edges == ((0, 1), (1, 2), (2, 0))


def test_parse_multiplicity_makes_parallel_edges():
    g = from_edge_list("a b 2")
    assert g.n_vertices == 2
    assert g.edges == ((0, 1), (0, 1))


def test_parse_comments_and_blanks():
    g = from_edge_list("# header\n\na b  # trailing\n b c\n")
    assert g.n_edges == 2


def test_parse_rejects_self_loop():
    with pytest.raises(GraphError, match="self loop"):
        from_edge_list("a a")


def test_parse_rejects_nonpositive_multiplicity():
    with pytest.raises(GraphError, match="positive"):
        from_edge_list("a b 0")
    with pytest.raises(GraphError, match="positive"):
        from_edge_list("a b -3")


def test_parse_rejects_empty_input():
    with pytest.raises(GraphError, match="empty"):
        from_edge_list("# nothing here\n\n")


def test_parse_respects_edge_cap():
    with pytest.raises(GraphError, match="cap"):
        from_edge_list("a b 100", max_edges=50)


def test_roundtrip_through_edge_list():
    g = from_edge_list("a b 2\nb c\nc a")
    again = from_edge_list(g.to_edge_list())
    assert again.vertices == g.vertices
    assert again.edges == g.edges


def test_constructor_rejects_self_loop_and_dupes():
    with pytest.raises(GraphError):
        Multigraph(("a", "b"), ((0, 0),))
    with pytest.raises(GraphError):
        Multigraph(("a", "a"), ())


def test_is_connected():
    assert is_connected(from_edge_list("a b\nb c\nc a"))
    two_parts = Multigraph(("a", "b", "c", "d"), ((0, 1), (2, 3)))
    assert not is_connected(two_parts)
    assert is_connected(Multigraph(("solo",), ()))


def test_biconnected_triangle_with_pendant(fig_triangle_pendant):
    blocks = biconnected_components(fig_triangle_pendant)
    assert blocks == [[0, 1, 2], [3]]
    assert articulation_points(fig_triangle_pendant) == ["c"]


def test_biconnected_cycle_is_single_block():
    assert biconnected_components(cycle_graph(5)) == [[0, 1, 2, 3, 4]]


def test_biconnected_path_gives_singleton_blocks():
    g = from_edge_list("a b\nb c")
    assert biconnected_components(g) == [[0], [1]]


def test_biconnected_parallel_edges_share_block():
    g = from_edge_list("a b 2\nb c")
    assert biconnected_components(g) == [[0, 1], [2]]


def test_biconnected_partitions_edges():
    for g in (layered_ring_graph(), house_graph(), cycle_graph(6)):
        blocks = biconnected_components(g)
        seen = sorted(e for b in blocks for e in b)
        assert seen == list(range(g.n_edges))


def test_biconnected_requires_connected():
    with pytest.raises(GraphError):
        biconnected_components(Multigraph(("a", "b", "c", "d"), ((0, 1), (2, 3))))


def test_induced_subgraph_inner_core(fig_layered):
    core = [f"c{i}" for i in range(10)]
    sub, emap = vertex_induced_subgraph(fig_layered, core)
    assert sub.n_vertices == 10
    assert sub.n_edges == 45  # complete graph on the core
    for new, old in emap.items():
        u, v = fig_layered.edges[old]
        assert fig_layered.vertices[u] in core and fig_layered.vertices[v] in core
        assert new < sub.n_edges


def test_induced_subgraph_identity(fig_slashed_square):
    sub, emap = vertex_induced_subgraph(fig_slashed_square, fig_slashed_square.vertices)
    assert sub.edges == fig_slashed_square.edges
    assert emap == {i: i for i in range(5)}


def test_induced_subgraph_house_roof(house):
    sub, _ = vertex_induced_subgraph(house, ["tl", "tr", "ap"])
    assert sub.n_vertices == 3
    assert sub.n_edges == 3


def test_induced_subgraph_errors(house):
    with pytest.raises(GraphError):
        vertex_induced_subgraph(house, [])
    with pytest.raises(GraphError):
        vertex_induced_subgraph(house, ["nope"])


def test_contract_core_of_layered_graph(fig_layered):
    core = [f"c{i}" for i in range(10)]
    shrunk, bij = contract(fig_layered, core)
    assert shrunk.n_vertices == 30 - 10 + 1
    assert shrunk.n_edges == 95 - 45
    # every middle vertex now holds two parallel edges to the merged vertex
    hub = shrunk.vertex_index[shrunk.vertices[-1]]
    for i in range(10):
        m = shrunk.vertex_index[f"m{i}"]
        count = sum(
            1 for u, v in shrunk.edges if {u, v} == {m, hub}
        )
        assert count == 2
    # bijection is total and mutually inverse
    assert len(bij.forward) == shrunk.n_edges
    for old, new in bij.forward.items():
        assert bij.inverse[new] == old


def test_contract_edge_endpoints_in_triangle():
    g = from_edge_list("a b\nb c\nc a")
    shrunk, _ = contract(g, ["a", "b"])
    assert shrunk.n_vertices == 2
    assert shrunk.n_edges == 2
    assert shrunk.edges[0] == shrunk.edges[1]  # parallel pair


def test_contract_everything_terminal_case(fig_slashed_square):
    shrunk, bij = contract(fig_slashed_square, fig_slashed_square.vertices)
    assert shrunk.n_vertices == 1
    assert shrunk.n_edges == 0
    assert bij.forward == {}


def test_contract_rejects_disconnected_core(fig_slashed_square):
    with pytest.raises(GraphError, match="connected"):
        contract(fig_slashed_square, ["b", "d"])  # opposite corners, no edge


def test_contract_arithmetic_invariants():
    cases = [
        (layered_ring_graph(), [f"c{i}" for i in range(10)]),
        (house_graph(), ["tl", "tr", "ap"]),
        (cycle_graph(6), ["v0", "v1"]),
    ]
    for g, core in cases:
        sub, _ = vertex_induced_subgraph(g, core)
        shrunk, _ = contract(g, core)
        assert shrunk.n_vertices == g.n_vertices - sub.n_vertices + 1
        assert shrunk.n_edges == g.n_edges - sub.n_edges


def test_vertex_partition_from_blocks(house):
    p = VertexPartition.from_blocks(house, [["tl", "tr", "ap"], ["bl", "br"]])
    assert p.n_blocks == 2
    assert sorted(len(b) for b in p.blocks()) == [2, 3]
    with pytest.raises(GraphError):
        VertexPartition.from_blocks(house, [["tl"], ["tl", "tr", "ap", "bl", "br"]])
    with pytest.raises(GraphError):
        VertexPartition.from_blocks(house, [["tl", "tr"]])
