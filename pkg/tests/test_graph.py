import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hbrsim.geometry import WeightModel
from hbrsim.graph import Disconnected, WeightedGraph, argmax_max_id, argmax_per_label, sssp
from hbrsim.fixtures import path

from conftest import bellman_ford, small_graph


def test_sssp_single_node():
    g = WeightedGraph.from_edges(1, [])
    dist, parent = sssp(g, 0)
    assert dist == {0: 0.0} and parent == {0: None}


def test_sssp_path_sum():
    g = WeightedGraph.from_edges(3, [(0, 1, 2.0), (1, 2, 3.0)])
    dist, parent = sssp(g, 0)
    assert dist[2] == 5.0 and parent[2] == 1


def test_sssp_parent_prefers_smaller_id():
    # two equal paths 0-1-3 and 0-2-3
    g = WeightedGraph.from_edges(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
    assert sssp(g, 0)[1][3] == 1


def test_sssp_restricted_and_disconnected():
    g = path(4)
    dist, _ = sssp(g, 0, allowed={0, 1})
    assert dist == {0: 0.0, 1: 1.0}
    with pytest.raises(Disconnected):
        sssp(g, 0, allowed={0, 2})
    with pytest.raises(ValueError):
        sssp(g, 3, allowed={0, 1})


@given(st.integers(0, 2**32 - 1), st.sampled_from(["energy", "unit", "coarsened:4"]))
def test_sssp_matches_bellman_ford(seed, model):
    g = small_graph(seed, 50, WeightModel.parse(model))
    src = seed % g.n
    dist, parent = sssp(g, src)
    assert dist == bellman_ford(g, src)
    for v, p in parent.items():
        if p is not None:
            assert dist[v] == dist[p] + g.weight(p, v)


@given(st.integers(0, 2**32 - 1))
def test_bulk_distances_match_sssp(seed):
    g = small_graph(seed, 50)
    dist, _ = sssp(g, 0)
    bulk = g.distances(0)
    assert [bulk[u] for u in range(g.n)] == [dist[u] for u in range(g.n)]


@given(st.integers(0, 2**32 - 1))
def test_level_distances_stay_inside_labels(seed):
    g = small_graph(seed, 50)
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, g.n)
    sources = [int(np.flatnonzero(labels == k)[0]) for k in (0, 1) if (labels == k).any()]
    got = g.distances(sources, labels)
    for s in sources:
        members = set(np.flatnonzero(labels == labels[s]).tolist())
        ref = bellman_ford(g, s, members)
        for u in members:
            assert got[u] == ref.get(u, math.inf)


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        WeightedGraph.from_edges(2, [(0, 1, 0.0)])


def test_weight_lookup_is_symmetric():
    g = WeightedGraph.from_edges(3, [(0, 1, 2.0), (1, 2, 7.0)])
    assert g.weight(2, 1) == g.weight(1, 2) == 7.0
    with pytest.raises(KeyError):
        g.weight(0, 2)


def test_argmax_ties_go_to_larger_id():
    values = np.array([1.0, 3.0, 2.0, 3.0])
    assert argmax_max_id(values) == 3
    assert argmax_max_id(values, [0, 1, 2]) == 1
    labels = np.array([0, 0, 1, 1])
    assert argmax_per_label(values, labels, 2).tolist() == [1, 3]


def test_coarsened_graph_carries_energy_tie_key():
    g = small_graph(3, 40, WeightModel.coarsened(2))
    assert np.array_equal(g.tie, WeightModel.energy().cost(g.network.lengths, 50.0))
    assert not small_graph(3, 40).tie.any()
