import pytest

from treemod import SolverConfig, solve
from treemod.graphs import (
    complete_graph,
    cycle_graph,
    doubled_slashed_square,
    house_graph,
    k3_with_double_parallel,
    layered_ring_graph,
    path_graph,
    petersen_graph,
    slashed_square,
    triangle_pendant,
    twin_block_graph,
)

# name -> (builder, homogeneous?)
CORPUS = {
    "triangle_pendant": (triangle_pendant, False),
    "slashed_square": (slashed_square, True),
    "doubled_slashed_square": (doubled_slashed_square, True),
    "house": (house_graph, True),
    "k3_parallel": (k3_with_double_parallel, False),
    "k4": (lambda: complete_graph(4), True),
    "k5": (lambda: complete_graph(5), True),
    "c5": (lambda: cycle_graph(5), True),
    "c6": (lambda: cycle_graph(6), True),
    "path3": (lambda: path_graph(4), True),
    "petersen": (petersen_graph, True),
    "layered_ring": (layered_ring_graph, False),
    "twin_block": (twin_block_graph, False),
}

_graph_cache = {}
_solve_cache = {}


def corpus_graph(name):
    if name not in _graph_cache:
        _graph_cache[name] = CORPUS[name][0]()
    return _graph_cache[name]


def corpus_solve(name):
    if name not in _solve_cache:
        _solve_cache[name] = solve(corpus_graph(name), SolverConfig())
    return _solve_cache[name]


@pytest.fixture
def fig_triangle_pendant():
    return corpus_graph("triangle_pendant")


@pytest.fixture
def fig_slashed_square():
    return corpus_graph("slashed_square")


@pytest.fixture
def fig_doubled():
    return corpus_graph("doubled_slashed_square")


@pytest.fixture
def fig_layered():
    return corpus_graph("layered_ring")


@pytest.fixture
def fig_twin():
    return corpus_graph("twin_block")


@pytest.fixture
def house():
    return corpus_graph("house")
