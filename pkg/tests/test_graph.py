# -*- coding: utf-8 -*-
"""
Test for graph ingestion, probability models and seed set statistics
"""
import os
import tempfile

import numpy as np
import pytest

from crim import TEST_DATA_DIR
from crim.analysis.analysis import Instances
from crim.graph.graph import DirectedGraph, ProbabilityModel, SeedSetStats
from crim.utilities.exceptions import DomainError, ParseError


EDGES = os.path.join(TEST_DATA_DIR, 'edges.txt')


def test_load_edge_list():
    """Test dense id remapping, duplicate and self-loop removal."""
    graph = DirectedGraph.load_edge_list(EDGES)

    assert graph.n_nodes == 4
    assert graph.n_edges == 4
    assert graph.node_ids.tolist() == [10, 20, 30, 40]
    assert graph.src.tolist() == [0, 1, 0, 3]
    assert graph.dst.tolist() == [1, 2, 2, 0]
    assert (graph.p == 0).all()


def test_load_edge_list_reverse():
    """Test that edge reversal keeps node ids and edge order."""
    graph = DirectedGraph.load_edge_list(EDGES, reverse=True)

    assert graph.node_ids.tolist() == [10, 20, 30, 40]
    assert graph.src.tolist() == [1, 2, 2, 0]
    assert graph.dst.tolist() == [0, 1, 0, 3]


def test_load_edge_list_dedup_error():
    """Test the strict duplicate policy reports the duplicate line."""
    with pytest.raises(ParseError) as excinfo:
        DirectedGraph.load_edge_list(EDGES, dedup='error')

    assert excinfo.value.line_number == 6


@pytest.mark.parametrize('text,line', [('0 1\n1 2 3\n', 2),
                                       ('a b\n', 1),
                                       ('0 1\n\n-1 2\n', 3),
                                       ('# header\n7\n', 2)])
def test_load_edge_list_bad_lines(text, line):
    """Test malformed edge list lines raise a ParseError with the line."""
    with pytest.raises(ParseError) as excinfo:
        DirectedGraph.from_text(text)

    assert excinfo.value.line_number == line


def test_isolated_self_loop_node():
    """Test that a self-loop line declares a node without an edge."""
    graph = DirectedGraph.from_text('1 2\n5 5\n')

    assert graph.n_nodes == 3
    assert graph.n_edges == 1
    assert graph.node_ids.tolist() == [1, 2, 5]


def test_empty_edge_list():
    """Test that an edge list with only comments gives an empty graph."""
    graph = DirectedGraph.from_text('# nothing here\n')
    assert graph.n_nodes == 0
    assert graph.n_edges == 0


def test_graph_invariants():
    """Test constructor checks on self-loops, duplicates and probabilities"""
    with pytest.raises(DomainError):
        DirectedGraph(2, [0], [0])
    with pytest.raises(DomainError):
        DirectedGraph(2, [0, 0], [1, 1])
    with pytest.raises(DomainError):
        DirectedGraph(2, [0], [1], p=[1.5])
    with pytest.raises(DomainError):
        DirectedGraph(2, [0], [2])

    graph = DirectedGraph(2, [0], [1], p=[0.5])
    with pytest.raises(ValueError):
        graph.p[0] = 0.1


def test_edge_list_idempotent():
    """Test that re-loading a written edge list gives the same graph."""
    graph = DirectedGraph.from_text('1 2\n5 5\n2 9\n9 1\n')

    with tempfile.TemporaryDirectory() as td:
        fp = os.path.join(td, 'graph.txt')
        graph.to_edge_list(fp)
        reloaded = DirectedGraph.load_edge_list(fp)

        fp2 = os.path.join(td, 'graph2.txt')
        reloaded.to_edge_list(fp2)
        with open(fp) as f1, open(fp2) as f2:
            assert f1.read() == f2.read()

    assert reloaded == graph


def test_csv_round_trip():
    """Test that a graph csv keeps probabilities and isolated nodes."""
    graph = DirectedGraph.from_text('1 2\n5 5\n2 9\n9 1\n')
    graph = graph.assign_probabilities('unif01', seed=3)

    with tempfile.TemporaryDirectory() as td:
        fp = os.path.join(td, 'graph.csv')
        graph.to_csv(fp, config={'seed': 3})
        assert os.path.exists(os.path.join(td, 'graph.json'))
        reloaded = DirectedGraph.from_csv(fp)

    assert reloaded == graph


def test_csv_round_trip_exact_probabilities():
    """Test that every 17 digit probability reloads bit for bit."""
    rng = np.random.default_rng(3)
    src = rng.integers(0, 40, size=300)
    dst = rng.integers(0, 40, size=300)
    keep = src != dst
    graph = DirectedGraph._from_pairs(src[keep], dst[keep])
    graph = graph.assign_probabilities('unif01', seed=3)

    with tempfile.TemporaryDirectory() as td:
        fp = os.path.join(td, 'graph.csv')
        graph.to_csv(fp)
        reloaded = DirectedGraph.from_csv(fp)

    assert reloaded.p.tobytes() == graph.p.tobytes()
    assert reloaded.node_types is None


def test_csv_round_trip_node_types():
    """Test that node type labels survive a graph csv round trip."""
    graph = Instances.gen_poc_tree(4, 3)

    with tempfile.TemporaryDirectory() as td:
        fp = os.path.join(td, 'graph.csv')
        graph.to_csv(fp)
        reloaded = DirectedGraph.from_csv(fp)

        bad = os.path.join(td, 'bad.csv')
        with open(bad, 'w') as f:
            f.write('src,dst,p,node_type\n0,0,0,0\n1,1,0,\n0,1,0.5,\n')
        with pytest.raises(ParseError):
            DirectedGraph.from_csv(bad)

    assert reloaded == graph
    assert reloaded.node_types.tolist() == graph.node_types.tolist()



def test_from_csv_missing_columns():
    """Test that a graph csv without the p column is rejected."""
    with tempfile.TemporaryDirectory() as td:
        fp = os.path.join(td, 'bad.csv')
        with open(fp, 'w') as f:
            f.write('src,dst\n0,1\n')
        with pytest.raises(ParseError):
            DirectedGraph.from_csv(fp)


def test_identical_model():
    """Test the identical probability model and its parsing."""
    graph = DirectedGraph.load_edge_list(EDGES)
    graph = graph.assign_probabilities('identical:0.01')
    assert (graph.p == 0.01).all()

    model = ProbabilityModel.parse('identical:0.25')
    assert model.kind == 'identical'
    assert model.p == 0.25
    assert str(model) == 'identical:0.25'


@pytest.mark.parametrize('text,error', [('bogus', ParseError),
                                        ('identical:x', ParseError),
                                        ('identical:1.5', DomainError),
                                        ('wcascade:sideways', ParseError)])
def test_bad_models(text, error):
    """Test probability model string errors."""
    with pytest.raises(error):
        ProbabilityModel.parse(text)


def test_weighted_cascade():
    """Test both weighted cascade degree conventions."""
    graph = DirectedGraph.load_edge_list(EDGES)

    p = graph.assign_probabilities('wcascade').p
    assert p.tolist() == [1 / 3, 1 / 2, 1 / 3, 1.0]
    assert (p == 1.0 / graph.degree[graph.src]).all()

    p = graph.assign_probabilities('wcascade:target_in').p
    assert p.tolist() == [1.0, 1 / 2, 1 / 2, 1.0]


def test_random_models():
    """Test that random models are seeded, in range and reproducible."""
    src = np.repeat(np.arange(30), 30)
    dst = np.tile(np.arange(30), 30)
    keep = src != dst
    graph = DirectedGraph(30, src[keep], dst[keep])

    tri = graph.assign_probabilities('trivalency', seed=1).p
    assert set(tri.tolist()) == {0.1, 0.01, 0.001}
    assert np.array_equal(
        tri, graph.assign_probabilities('trivalency', seed=1).p)

    unif = graph.assign_probabilities('unif01', seed=1).p
    assert ((unif >= 0) & (unif < 1)).all()
    assert not np.array_equal(
        unif, graph.assign_probabilities('unif01', seed=2).p)
    assert abs(unif.mean() - 0.5) < 0.05


def test_seed_set():
    """Test seed set validation in dense and original ids."""
    graph = DirectedGraph.load_edge_list(EDGES)

    assert graph.seed_set([2, 0, 2]) == (0, 2)
    assert graph.seed_set([30, 10], original_ids=True) == (0, 2)

    with pytest.raises(DomainError) as excinfo:
        graph.seed_set([99], original_ids=True)
    assert '99' in str(excinfo.value)

    with pytest.raises(DomainError):
        graph.seed_set([4])


def test_seed_set_stats():
    """Test degree statistics and undirected diameter of seed sets."""
    graph = DirectedGraph.load_edge_list(EDGES)

    stats = graph.seed_set_stats([0, 2])
    assert stats.size == 2
    assert stats.min_degree == 2
    assert stats.mean_degree == 2.5
    assert stats.max_degree == 3
    assert stats.diameter == 1
    assert stats.degrees == (3, 2)

    assert graph.seed_set_stats([1, 3]).diameter == 2
    assert graph.seed_set_stats([3]).diameter == 0
    assert graph.seed_set_stats([1, 3]).to_dict() == {
        'min_deg': 1, 'avg_deg': 1.5, 'max_deg': 2, 'diam': 2}

    with pytest.raises(DomainError):
        graph.seed_set_stats([])


def test_seed_set_stats_disconnected():
    """Test that seeds in different components report disconnected."""
    graph = DirectedGraph.from_text('1 2\n3 4\n')
    stats = graph.seed_set_stats([0, 2])
    assert stats.diameter == SeedSetStats.DISCONNECTED


def test_summary():
    """Test the dataset summary record."""
    summary = DirectedGraph.load_edge_list(EDGES).summary()
    assert summary == {'n_nodes': 4, 'n_edges': 4, 'min_deg': 1,
                       'avg_deg': 2.0, 'max_deg': 3}
