import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from postqaoa.graphs import (
    Graph,
    GraphError,
    ball,
    cycle_counts,
    distance,
    distances_within,
    format_graph,
    graph_from_matching,
    grid_graph,
    is_tree_ball,
    read_graph,
    ring_graph,
    sample_configuration_model,
    sample_simple_regular,
    shell,
    write_graph,
)


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


@given(st.integers(2, 60), st.sampled_from([3, 4]), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_configuration_model_is_regular(half, d, seed):
    n = 2 * half
    g = sample_configuration_model(n, d, seed)
    assert g.degrees.tolist() == [d] * n
    assert g.num_edges == n * d // 2
    g.check()


def test_configuration_model_rejects_odd():
    with pytest.raises(GraphError):
        sample_configuration_model(5, 3, 0)


def test_configuration_model_is_deterministic():
    a = sample_configuration_model(100, 3, 7)
    b = sample_configuration_model(100, 3, 7)
    assert a.edges == b.edges


def test_matching_roundtrip():
    g = sample_configuration_model(20, 3, 1)
    h = graph_from_matching(20, 3, g.matching)
    assert h.edges == g.edges


def test_single_multigraph_probability():
    # n=2, d=3: 15 matchings; the triple edge arises from 6 of them
    counts = {}
    rng = np.random.default_rng(0)
    trials = 30000
    for _ in range(trials):
        g = sample_configuration_model(2, 3, rng)
        key = tuple(sorted(g.edges))
        counts[key] = counts.get(key, 0) + 1
    assert abs(counts[((0, 1),) * 3] / trials - 6 / 15) < 0.015


def test_simple_sampler_gives_simple_graphs():
    for s in range(5):
        g = sample_simple_regular(50, 3, s)
        assert g.is_simple and g.d == 3


def test_loops_and_multiedges_flagged():
    g = Graph.from_edges(3, [(0, 0), (1, 2), (1, 2)])
    assert g.has_loops and not g.is_simple
    assert g.degrees.tolist() == [2, 2, 2]
    assert g.multiplicity[(1, 2)] == 2


def test_distances_match_networkx():
    g = sample_simple_regular(80, 3, 4)
    h = to_nx(g)
    ref = nx.single_source_shortest_path_length(h, 0, cutoff=4)
    assert distances_within(g, 0, 4) == ref
    assert distance(g, 0, 17) == nx.shortest_path_length(h, 0, 17)
    assert shell(g, 0, 2) == {v for v, d in ref.items() if d == 2}
    assert ball(g, 0, 1) == {0, *g.adjacency[0]}


def test_distance_unreachable():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert distance(g, 0, 3) == math.inf


def test_tree_ball_on_ring_and_tree():
    assert is_tree_ball(ring_graph(12), 0, 5)
    assert not is_tree_ball(ring_graph(10), 0, 5)
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert is_tree_ball(g, 0, 3)
    assert not is_tree_ball(Graph.from_edges(2, [(0, 1), (0, 1)]), 0, 1)


def test_tree_ball_fraction_large_graph():
    # radius-2 balls are almost all trees at n = 1e4; radius-5 ones get better with n
    g = sample_configuration_model(10_000, 3, 1)
    frac2 = np.mean([is_tree_ball(g, v, 2) for v in range(0, g.n, 5)])
    assert frac2 >= 0.99
    small = sample_configuration_model(1000, 3, 1)
    f_small = np.mean([is_tree_ball(small, v, 5) for v in range(small.n)])
    f_large = np.mean([is_tree_ball(g, v, 5) for v in range(0, g.n, 5)])
    assert f_large > f_small


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_cycle_counts_match_networkx(seed):
    g = sample_simple_regular(16, 3, seed)
    ref = {k: 0 for k in range(3, 9)}
    for c in nx.simple_cycles(to_nx(g), length_bound=8):
        ref[len(c)] += 1
    got = cycle_counts(g, 8)
    assert {k: got[k] for k in ref} == ref
    assert got[1] == got[2] == 0


def test_cycle_counts_known_graphs():
    assert cycle_counts(ring_graph(7), 7)[7] == 1
    assert cycle_counts(grid_graph(6), 5) == {1: 0, 2: 0, 3: 0, 4: 36, 5: 0}
    k4 = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    assert cycle_counts(k4, 4) == {1: 0, 2: 0, 3: 4, 4: 3}
    multi = Graph.from_edges(3, [(0, 0), (0, 1), (0, 1), (1, 2), (2, 0)])
    c = cycle_counts(multi, 3)
    assert c[1] == 1 and c[2] == 1 and c[3] == 2


def test_grid_graph_degrees():
    g = grid_graph(5)
    assert g.d == 4 and g.n == 25
    assert grid_graph(3, 3).d == 6


@pytest.mark.parametrize("fmt", ["txt", "json"])
def test_graph_io_roundtrip(tmp_path, fmt):
    g = sample_configuration_model(30, 3, 2)
    path = tmp_path / f"g.{fmt}"
    write_graph(g, path, fmt)
    assert read_graph(path).edges == g.edges
    assert format_graph(g, fmt) == path.read_text()


def test_read_graph_rejects_wrong_degree(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("3 3\n0 1\n1 2\n")
    with pytest.raises(GraphError):
        read_graph(path)


def test_cut_value():
    g = ring_graph(4)
    assert g.cut_value([1, -1, 1, -1]) == 4
    assert g.cut_value([1, 1, 1, 1]) == 0
