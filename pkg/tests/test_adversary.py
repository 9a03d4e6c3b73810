# -*- coding: utf-8 -*-
"""
Test for the adversarial coupling
"""
import numpy as np
import pytest

from crim.adversary.adversary import Adversary
from crim.analysis.analysis import Instances
from crim.graph.graph import DirectedGraph
from crim.robust.robust import RobustInfluence
from crim.utilities.exceptions import DomainError


def setup(text, p, seeds=(0,)):
    """Graph from edge list text with probabilities p and its profile"""
    graph = DirectedGraph.from_text(text)
    graph = graph.with_probabilities(np.broadcast_to(p, graph.n_edges))
    return graph, RobustInfluence.influence_profile(graph, seeds)


def random_instance(rng):
    """Random graph with n <= 8, |E| <= 16, Unif(0,1) p, random seeds"""
    n = int(rng.integers(2, 9))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    n_edges = int(rng.integers(1, min(16, len(pairs)) + 1))
    pick = rng.choice(len(pairs), size=n_edges, replace=False)
    graph = DirectedGraph(n, [pairs[e][0] for e in pick],
                          [pairs[e][1] for e in pick], p=rng.random(n_edges))
    seeds = rng.choice(n, size=int(rng.integers(1, 3)), replace=False)
    return graph, RobustInfluence.influence_profile(graph, seeds)


def test_draw_single_edge():
    """Test the single edge draw below the edge probability."""
    graph, profile = setup('0 1\n', 0.1)
    draw = Adversary.draw_coupling(graph, profile, 0.05)

    assert draw.live.live.tolist() == [True]
    assert draw.active.tolist() == [True, True]
    assert draw.n_active == 2


def test_draw_chain():
    """Test the chain draw inside the removal interval of (a, b)."""
    graph, profile = setup('0 1\n1 2\n', 0.75)
    draw = Adversary.draw_coupling(graph, profile, 0.6)

    assert draw.live.live.tolist() == [True, False]
    assert draw.active.tolist() == [True, True, False]

    draw = Adversary.draw_coupling(graph, profile, 0.999)
    assert draw.active.tolist() == [True, False, False]

    df = Adversary.draw_coupling(graph, profile, 0.6).to_frame(graph)
    assert df['record'].tolist() == ['q', 'edge', 'node', 'node']
    assert df['q'].iloc[0] == 0.6


@pytest.mark.parametrize('q', [-0.1, 1.5])
def test_draw_out_of_range(q):
    """Test that q outside [0, 1] is rejected."""
    graph, profile = setup('0 1\n', 0.1)
    with pytest.raises(DomainError):
        Adversary.draw_coupling(graph, profile, q)


def test_breakpoints():
    """Test breakpoints of the single edge, chain and edgeless graphs."""
    graph, profile = setup('0 1\n', 0.1)
    points = Adversary.breakpoints(graph, profile).points
    assert len(points) == 3
    assert list(points) == pytest.approx([0, 0.1, 1])

    graph, profile = setup('0 1\n1 2\n', 0.75)
    partition = Adversary.breakpoints(graph, profile)
    assert partition.points == (0.0, 0.5, 0.75, 1.0)
    assert len(partition) == 3
    assert partition.midpoints == [0.25, 0.625, 0.875]

    graph = DirectedGraph(2, [], [])
    profile = RobustInfluence.influence_profile(graph, [0])
    assert Adversary.breakpoints(graph, profile).points == (0.0, 1.0)


def test_exact_expected_influence():
    """Test exact integration over q on the chain, series and S = V."""
    graph, profile = setup('0 1\n1 2\n', 0.75)
    assert Adversary.exact_expected_influence(graph, profile) == 2.25

    profile = RobustInfluence.influence_profile(graph, [0, 1, 2])
    assert Adversary.exact_expected_influence(graph, profile) == 3.0

    graph = Instances.gen_series(3)
    profile = RobustInfluence.influence_profile(graph, [0])
    expected = Adversary.exact_expected_influence(graph, profile)
    assert expected == pytest.approx(2.0, abs=1e-9)


def test_cell_report():
    """Test active node and live edge counts per chain cell."""
    graph, profile = setup('0 1\n1 2\n', 0.75)
    df = Adversary.cell_report(graph, profile)

    assert list(df.columns) == ['q_lo', 'q_hi', 'n_active',
                                'live_edge_count']
    assert df['n_active'].tolist() == [3, 2, 1]
    assert df['live_edge_count'].tolist() == [2, 1, 1]


def test_edge_marginal():
    """Test exact marginals and the clipped interval discrepancy."""
    graph, profile = setup('0 1\n1 2\n2 1\n', 0.75)
    for e in range(graph.n_edges):
        assert Adversary.edge_marginal(graph, profile, e) == 0.75

    graph = DirectedGraph(3, [0, 1], [1, 2], p=[0.1, 0.5])
    profile = RobustInfluence.influence_profile(graph, [0])
    assert Adversary.edge_marginal(graph, profile, 0) == 0.1
    assert Adversary.edge_marginal(graph, profile, 1) == pytest.approx(0.9)

    df = Adversary.edge_marginals(graph, profile)
    assert list(df.columns) == ['src', 'dst', 'p', 'marginal',
                                'discrepancy']
    assert df['discrepancy'].tolist() == pytest.approx([0.0, 0.4])

    with pytest.raises(DomainError):
        Adversary.edge_marginal(graph, profile, 2)


def test_reachability_identity():
    """Test the reachability identity on the chain and certain edges."""
    graph, profile = setup('0 1\n1 2\n', 0.75)
    check = Adversary.check_reachability_identity(graph, profile)
    assert check.holds
    assert check.n_cells == 3

    graph, profile = setup('0 1\n1 2\n2 0\n3 1\n', 1.0)
    assert Adversary.check_reachability_identity(graph, profile)


def test_random_coupling_identities():
    """Test expected influence, marginals and reachability on random
    graphs."""
    rng = np.random.default_rng(2024)
    failures = 0
    for _ in range(100):
        graph, profile = random_instance(rng)

        expected = Adversary.exact_expected_influence(graph, profile)
        assert expected == pytest.approx(profile.value, abs=1e-9)

        pi = profile.pi
        for e in range(graph.n_edges):
            pk, pj = pi[graph.src[e]], pi[graph.dst[e]]
            p = graph.p[e]
            if pk <= pj or pk - 1 + p >= 0:
                assert Adversary.edge_marginal(graph, profile, e) == p

        if not Adversary.check_reachability_identity(graph, profile):
            failures += 1

    assert failures == 0


def test_path_dominance():
    """Test path dominance on the chain and the tied diamond."""
    graph, profile = setup('0 1\n1 2\n', 0.75)
    paths = RobustInfluence.best_paths(graph, [0], 2)
    assert Adversary.check_path_dominance(graph, profile, paths)

    graph, profile = setup('0 1\n', 0.3)
    paths = RobustInfluence.best_paths(graph, [0], 1)
    assert Adversary.check_path_dominance(graph, profile, paths)

    graph, profile = setup('0 1\n0 2\n1 3\n2 3\n', 0.75)
    paths = RobustInfluence.best_paths(graph, [0], 3)
    assert len(paths) == 2
    assert Adversary.check_path_dominance(graph, profile, paths)


def test_simulate():
    """Test Monte Carlo over q against the exact expectation."""
    graph, profile = setup('0 1\n1 2\n', 0.75)
    mean, stderr = Adversary.simulate(profile, n_draws=100000, seed=0)

    assert stderr > 0
    assert abs(mean - 2.25) < 3 * stderr
    assert Adversary.simulate(profile, n_draws=100, seed=5) == \
        Adversary.simulate(profile, n_draws=100, seed=5)

    with pytest.raises(DomainError):
        Adversary.simulate(profile, n_draws=0)
