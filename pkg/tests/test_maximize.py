# -*- coding: utf-8 -*-
"""
Test for greedy, lazy greedy and exhaustive seed set maximization
"""
import math
import os
import tempfile

import numpy as np
import pandas as pd
import pytest

from crim.analysis.analysis import Instances
from crim.graph.graph import DirectedGraph
from crim.ic.ic import IndependentCascade
from crim.maximize.maximize import (CorrEvaluator, IcBankEvaluator,
                                    IcExactEvaluator, InfluenceEvaluator,
                                    Maximizer, make_evaluator)
from crim.utilities.exceptions import BudgetRefusalError, DomainError


def random_graph(rng, n, max_edges):
    """Random directed graph with Unif(0,1) probabilities"""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    n_edges = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    pick = rng.choice(len(pairs), size=n_edges, replace=False)
    return DirectedGraph(n, [pairs[e][0] for e in pick],
                         [pairs[e][1] for e in pick], p=rng.random(n_edges))


class SizePenalty(InfluenceEvaluator):
    """Deliberately non-monotone objective -|S|"""

    KIND = 'size-penalty'

    def initial_state(self):
        return ()

    def value(self, seeds):
        return -float(len(set(seeds)))

    def value_of(self, state):
        return self.value(state)

    def marginal(self, state, v):
        return self.value(state + (v,)) - self.value(state)

    def commit(self, state, v):
        return state + (v,)


class ResimulatingIc(InfluenceEvaluator):
    """Independent cascade objective re-estimated from scratch on fixed
    samples for every evaluation"""

    KIND = 'ic-resimulate'

    def __init__(self, graph, n_samples, seed):
        super().__init__(graph)
        self._n = n_samples
        self._seed = seed

    def initial_state(self):
        return ()

    def value(self, seeds):
        if not len(seeds):
            return 0.0
        return IndependentCascade.f_ic_estimate(
            self._graph, seeds, n_samples=self._n, seed=self._seed).mean

    def value_of(self, state):
        return self.value(state)

    def marginal(self, state, v):
        return self.value(state + (v,)) - self.value(state)

    def commit(self, state, v):
        return state + (v,)


def test_poc_tree_corr_greedy():
    """Test that robust greedy picks a type 2 node of the POC tree."""
    graph = Instances.gen_poc_tree(4, 3)
    trace = Maximizer.greedy(CorrEvaluator(graph), graph, 1)

    assert len(trace) == 1
    assert graph.node_types[trace.nodes[0]] == 2
    assert trace.value == 4.0


def test_poc_tree_ic_greedy():
    """Test that independent cascade greedy picks the POC tree root."""
    graph = Instances.gen_poc_tree(4, 3)
    trace = Maximizer.greedy(IcExactEvaluator(graph), graph, 1)

    assert trace.nodes == [0]
    assert trace.value == pytest.approx(7.0, abs=1e-12)


def test_full_budget():
    """Test that k = |V| seeds every node."""
    graph = Instances.gen_series(5)
    trace = Maximizer.lazy_greedy(CorrEvaluator(graph), graph, 5)

    assert trace.seeds == (0, 1, 2, 3, 4)
    assert trace.value == 5.0


@pytest.mark.parametrize('k', [0, 6])
def test_budget_range(k):
    """Test that k outside [1, |V|] is rejected."""
    graph = Instances.gen_series(5)
    with pytest.raises(DomainError):
        Maximizer.greedy(CorrEvaluator(graph), graph, k)
    with pytest.raises(DomainError):
        Maximizer.lazy_greedy(CorrEvaluator(graph), graph, k)


def test_star():
    """Test that the star center goes first and then the smallest leaf."""
    graph = DirectedGraph.from_text('0 1\n0 2\n0 3\n0 4\n')
    graph = graph.assign_probabilities('identical:0.5')
    for method in (Maximizer.greedy, Maximizer.lazy_greedy):
        trace = method(CorrEvaluator(graph), graph, 2)
        assert trace.nodes == [0, 1]
        assert trace.gains == [3.0, 0.5]


def test_zero_gain_selection():
    """Test that zero gain nodes are still selected to fill the budget."""
    graph = DirectedGraph.from_text('0 1\n').assign_probabilities(
        'identical:1')
    trace = Maximizer.lazy_greedy(CorrEvaluator(graph), graph, 2)

    assert trace.nodes == [0, 1]
    assert trace.gains == [2.0, 0.0]


def test_lazy_matches_greedy():
    """Test identical lazy and plain traces with fewer evaluations."""
    rng = np.random.default_rng(8)
    for _ in range(30):
        graph = random_graph(rng, int(rng.integers(3, 11)), 25)
        k = int(rng.integers(1, graph.n_nodes + 1))
        for evaluator in (CorrEvaluator(graph),
                          IcBankEvaluator(graph, n_samples=50, seed=1)):
            plain = Maximizer.greedy(evaluator, graph, k)
            lazy = Maximizer.lazy_greedy(evaluator, graph, k)

            assert lazy.nodes == plain.nodes
            assert lazy.gains == plain.gains
            assert lazy.values == plain.values
            assert lazy.n_evaluations <= plain.n_evaluations


def test_corr_gains_nonincreasing():
    """Test that robust greedy gains never increase."""
    rng = np.random.default_rng(12)
    for _ in range(20):
        graph = random_graph(rng, int(rng.integers(3, 11)), 25)
        trace = Maximizer.lazy_greedy(CorrEvaluator(graph), graph,
                                      graph.n_nodes)
        assert all(a >= b - 1e-12
                   for a, b in zip(trace.gains[:-1], trace.gains[1:]))


def test_bank_greedy_matches_resimulation():
    """Test that sample bank greedy equals re-simulating greedy."""
    rng = np.random.default_rng(21)
    for _ in range(5):
        graph = random_graph(rng, int(rng.integers(3, 9)), 20)
        k = min(3, graph.n_nodes)
        bank = Maximizer.greedy(IcBankEvaluator(graph, n_samples=200,
                                                seed=7), graph, k)
        naive = Maximizer.greedy(ResimulatingIc(graph, 200, 7), graph, k)

        assert bank.nodes == naive.nodes
        assert bank.values == naive.values


def test_exhaustive_poc_tree():
    """Test the exhaustive robust optimum of the POC tree."""
    graph = Instances.gen_poc_tree(4, 3)
    seeds, value = Maximizer.exhaustive_opt(CorrEvaluator(graph), graph, 1)

    assert seeds == (2,)
    assert graph.node_types[2] == 2
    assert value == 4.0

    seeds, value = Maximizer.exhaustive_opt(CorrEvaluator(graph), graph,
                                            graph.n_nodes)
    assert seeds == tuple(range(graph.n_nodes))


def test_exhaustive_budget():
    """Test that oversized enumerations are refused."""
    graph = Instances.gen_series(30)
    with pytest.raises(BudgetRefusalError) as excinfo:
        Maximizer.exhaustive_opt(CorrEvaluator(graph), graph, 15)
    assert str(Maximizer.EXHAUSTIVE_LIMIT) in str(excinfo.value)

    with pytest.raises(BudgetRefusalError):
        Maximizer.exhaustive_opt(CorrEvaluator(graph), graph, 2, limit=10)


def test_greedy_guarantee():
    """Test the 1 - 1/e guarantee of robust greedy on random instances."""
    rng = np.random.default_rng(31)
    for _ in range(50):
        graph = random_graph(rng, int(rng.integers(3, 11)), 20)
        k = int(rng.integers(1, 4))
        evaluator = CorrEvaluator(graph)
        greedy = Maximizer.lazy_greedy(evaluator, graph, k)
        _, best = Maximizer.exhaustive_opt(evaluator, graph, k)

        assert best >= greedy.value - 1e-12
        assert greedy.value >= (1 - 1 / math.e) * best


def test_corr_submodular_monotone():
    """Test monotone submodularity of robust influence."""
    rng = np.random.default_rng(41)
    for i in range(10):
        graph = random_graph(rng, int(rng.integers(2, 11)), 30)
        report = Maximizer.check_submodular_monotone(
            CorrEvaluator(graph), graph, trials=20, seed=i, tol=1e-12)
        assert report.trials == 20
        assert report.holds, report.to_frame()


def test_ic_exact_submodular_monotone():
    """Test monotone submodularity of exact independent cascade
    influence."""
    rng = np.random.default_rng(51)
    for i in range(10):
        graph = random_graph(rng, int(rng.integers(2, 7)), 10)
        report = Maximizer.check_submodular_monotone(
            IcExactEvaluator(graph), graph, trials=10, seed=i, tol=1e-12)
        assert report.holds, report.to_frame()


def test_property_harness_detects_violations():
    """Test that a decreasing objective reports monotonicity
    violations."""
    graph = Instances.gen_series(6)
    report = Maximizer.check_submodular_monotone(SizePenalty(graph), graph,
                                                 trials=50, seed=0)
    assert not report.holds
    kinds = set(report.to_frame()['kind'])
    assert kinds == {'monotone'}


def test_make_evaluator():
    """Test evaluator construction by kind tag."""
    graph = Instances.gen_series(4)
    assert isinstance(make_evaluator('corr', graph), CorrEvaluator)
    assert make_evaluator('ic-exact', graph).kind == 'ic-exact'
    bank = make_evaluator('ic-bank', graph, n_samples=20, seed=1)
    assert bank.n_samples == 20

    with pytest.raises(DomainError):
        make_evaluator('lt', graph)


def test_evaluator_stderr():
    """Test that only the sample bank evaluator reports a standard error."""
    graph = Instances.gen_poc_tree(4, 3)
    bank = IcBankEvaluator(graph, n_samples=400, seed=2)
    est = IndependentCascade.f_ic_estimate(graph, [0, 5], n_samples=400,
                                           seed=2)
    assert bank.value([0, 5]) == est.mean
    assert bank.stderr([0, 5]) == est.stderr
    assert bank.stderr([0, 5]) > 0

    assert CorrEvaluator(graph).stderr([0]) == 0.0
    assert IcExactEvaluator(graph).stderr([0]) == 0.0



def test_trace_csv():
    """Test the trace table in original ids."""
    graph = DirectedGraph.from_text('7 8\n7 9\n8 9\n')
    graph = graph.assign_probabilities('identical:0.5')
    trace = Maximizer.lazy_greedy(CorrEvaluator(graph), graph, 2)

    with tempfile.TemporaryDirectory() as td:
        fp = os.path.join(td, 'trace.csv')
        trace.to_csv(fp, graph=graph, config={'k': 2})
        df = pd.read_csv(fp, float_precision='round_trip')
        assert os.path.exists(os.path.join(td, 'trace.json'))

    assert list(df.columns) == ['step', 'node_id', 'gain',
                                'cumulative_value', 'evaluations',
                                'elapsed_ms']
    assert df['step'].tolist() == [1, 2]
    assert df['node_id'].tolist() == graph.original_ids(trace.nodes)
    assert df['node_id'].iloc[0] == 7
    assert df['cumulative_value'].tolist() == trace.values
    assert trace.prefix(1).nodes == trace.nodes[:1]
