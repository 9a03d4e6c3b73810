# -*- coding: utf-8 -*-
"""
Seed set maximization with greedy, lazy greedy and exhaustive search over
any influence evaluator.
"""
import math
import time
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from heapq import heapify, heappush, heappop
from itertools import combinations

import numpy as np
import pandas as pd

from crim.ic.ic import ExactIcOracle, SampleBank
from crim.robust.robust import RobustInfluence
from crim.utilities.exceptions import BudgetRefusalError, DomainError
from crim.utilities.io import write_frame
from crim.utilities.rng import rng_stream


logger = logging.getLogger(__name__)


class InfluenceEvaluator(ABC):
    """Objective function contract for seed set maximization.

    An evaluator carries an opaque state for the current seed set so that
    marginal gains can be computed incrementally. ``marginal(state, v)`` must
    equal ``value(S + v) - value(S)`` for the state's seed set S.
    """

    #: evaluator kind tag
    KIND = None

    def __init__(self, graph):
        self._graph = graph

    def __str__(self):
        return f'{self.__class__.__name__} on {self._graph}'

    @property
    def kind(self):
        """Evaluator kind tag."""
        return self.KIND

    @property
    def graph(self):
        """Graph being evaluated."""
        return self._graph

    @abstractmethod
    def initial_state(self):
        """State of the empty seed set."""

    @abstractmethod
    def value(self, seeds):
        """Objective value of a seed set."""

    @abstractmethod
    def value_of(self, state):
        """Objective value of the seed set of a state."""

    @abstractmethod
    def marginal(self, state, v):
        """Marginal gain of adding node v to the state's seed set."""

    @abstractmethod
    def commit(self, state, v):
        """Add node v to the state's seed set and return the new state."""

    def stderr(self, seeds):
        """Standard error of value(seeds), zero for exact objectives."""
        return 0.0


class CorrEvaluator(InfluenceEvaluator):
    """Correlation robust influence, state is an InfluenceProfile."""

    KIND = 'corr'

    def initial_state(self):
        return RobustInfluence.influence_profile(self._graph, ())

    def value(self, seeds):
        return RobustInfluence.f_corr(self._graph, seeds)

    def value_of(self, state):
        return state.value

    def marginal(self, state, v):
        if v in state.seeds:
            return 0.0
        return RobustInfluence.marginal_gain_corr(self._graph, state, v)

    def commit(self, state, v):
        if v in state.seeds:
            return state
        return RobustInfluence.extend_profile(self._graph, state, v)


class IcExactEvaluator(InfluenceEvaluator):
    """Exact independent cascade influence by enumeration of the uncertain
    edges. State is a (seeds, value) tuple."""

    KIND = 'ic-exact'

    def __init__(self, graph, max_edges=None):
        super().__init__(graph)
        self._oracle = ExactIcOracle(graph, max_edges=max_edges)

    def initial_state(self):
        return ((), 0.0)

    def value(self, seeds):
        return self._oracle.value(seeds)

    def value_of(self, state):
        return state[1]

    def marginal(self, state, v):
        seeds, value = state
        if v in seeds:
            return 0.0
        return self._oracle.value(seeds + (v,)) - value

    def commit(self, state, v):
        seeds, _ = state
        if v in seeds:
            return state
        seeds = tuple(sorted(seeds + (v,)))
        return (seeds, self._oracle.value(seeds))


class IcBankEvaluator(InfluenceEvaluator):
    """Monte Carlo independent cascade influence on a fixed bank of live-edge
    samples. State is a SampleBank, which is updated in place on commit."""

    KIND = 'ic-bank'

    def __init__(self, graph, n_samples=None, seed=0):
        super().__init__(graph)
        self._seed = seed
        self._samples = SampleBank(graph, n_samples=n_samples,
                                   seed=seed).samples

    @property
    def n_samples(self):
        """Number of Monte Carlo samples in the bank."""
        return len(self._samples)

    def _bank(self):
        return SampleBank(self._graph, seed=self._seed,
                          samples=self._samples)

    def initial_state(self):
        return self._bank()

    def _committed(self, seeds):
        bank = self._bank()
        for v in self._graph.seed_set(seeds):
            bank.commit(v)
        return bank

    def value(self, seeds):
        return self._committed(seeds).value

    def stderr(self, seeds):
        return self._committed(seeds).estimate().stderr

    def value_of(self, state):
        return state.value

    def marginal(self, state, v):
        return state.marginal_gain(v)

    def commit(self, state, v):
        state.commit(v)
        return state


EVALUATORS = {e.KIND: e for e in (CorrEvaluator, IcExactEvaluator,
                                  IcBankEvaluator)}


def make_evaluator(kind, graph, n_samples=None, seed=0, max_edges=None):
    """Build an evaluator from its kind tag.

    Parameters
    ----------
    kind : str
        One of "corr", "ic-exact", "ic-bank".
    graph : DirectedGraph
        Graph with edge probabilities.
    n_samples : int | None
        Monte Carlo sample count for "ic-bank".
    seed : int
        Master seed for "ic-bank".
    max_edges : int | None
        Uncertain edge limit for "ic-exact".

    Returns
    -------
    InfluenceEvaluator
    """
    if kind not in EVALUATORS:
        msg = ('Unknown evaluator "{}", must be one of {}'
               .format(kind, sorted(EVALUATORS)))
        logger.error(msg)
        raise DomainError(msg)

    if kind == IcExactEvaluator.KIND:
        return IcExactEvaluator(graph, max_edges=max_edges)
    if kind == IcBankEvaluator.KIND:
        return IcBankEvaluator(graph, n_samples=n_samples, seed=seed)

    return CorrEvaluator(graph)


@dataclass
class GreedyTrace:
    """Ordered greedy selections with per-step gains, cumulative values,
    cumulative evaluation counts and cumulative elapsed milliseconds.

    Greedy is prefix-consistent, so the first k steps of a trace are the
    trace of budget k.
    """

    evaluator: str
    nodes: list = field(default_factory=list)
    gains: list = field(default_factory=list)
    values: list = field(default_factory=list)
    evaluations: list = field(default_factory=list)
    elapsed_ms: list = field(default_factory=list)

    def __len__(self):
        return len(self.nodes)

    def append(self, node, gain, value, evaluations, elapsed_ms):
        """Record one selection."""
        self.nodes.append(int(node))
        self.gains.append(float(gain))
        self.values.append(float(value))
        self.evaluations.append(int(evaluations))
        self.elapsed_ms.append(float(elapsed_ms))

    @property
    def selections(self):
        """List of (node, gain) in selection order."""
        return list(zip(self.nodes, self.gains))

    @property
    def seeds(self):
        """Sorted seed set."""
        return tuple(sorted(self.nodes))

    @property
    def value(self):
        """Objective value of the final seed set."""
        return self.values[-1] if self.values else 0.0

    @property
    def n_evaluations(self):
        """Total number of marginal gain evaluations."""
        return self.evaluations[-1] if self.evaluations else 0

    @property
    def duration(self):
        """Wall-clock duration in seconds."""
        return self.elapsed_ms[-1] / 1000 if self.elapsed_ms else 0.0

    def prefix(self, k):
        """Trace of the first k selections."""
        return GreedyTrace(self.evaluator, self.nodes[:k], self.gains[:k],
                           self.values[:k], self.evaluations[:k],
                           self.elapsed_ms[:k])

    def to_frame(self, graph=None):
        """Get the trace table, node ids in original ids when a graph is
        given."""
        nodes = self.nodes
        if graph is not None:
            nodes = graph.original_ids(nodes)

        return pd.DataFrame({'step': np.arange(1, len(self) + 1),
                             'node_id': nodes,
                             'gain': self.gains,
                             'cumulative_value': self.values,
                             'evaluations': self.evaluations,
                             'elapsed_ms': self.elapsed_ms})

    def to_csv(self, fpath, graph=None, config=None):
        """Write the trace table to csv."""
        write_frame(self.to_frame(graph=graph), fpath, config=config)


@dataclass(frozen=True)
class PropertyViolation:
    """One violated monotonicity or diminishing returns inequality, with
    S a subset of T and v outside T."""

    kind: str
    small: tuple
    large: tuple
    node: int = None
    amount: float = 0.0


@dataclass
class PropertyReport:
    """Outcome of a monotone submodularity check."""

    evaluator: str
    trials: int
    violations: list = field(default_factory=list)

    @property
    def n_violations(self):
        """Number of violated inequalities."""
        return len(self.violations)

    @property
    def holds(self):
        """True if no violation was found."""
        return not self.violations

    def to_frame(self):
        """Get the violations as a table."""
        return pd.DataFrame([v.__dict__ for v in self.violations],
                            columns=['kind', 'small', 'large', 'node',
                                     'amount'])


class Maximizer:
    """Greedy, lazy greedy and exhaustive seed set maximization."""

    # gains within this of the best gain are ties, smallest node id wins
    TIE_TOL = 1e-12

    # default cap on the number of enumerated k-subsets
    EXHAUSTIVE_LIMIT = 10 ** 6

    @staticmethod
    def _check_k(graph, k):
        k = int(k)
        if not 1 <= k <= graph.n_nodes:
            msg = ('Seed set budget k must be between 1 and the number of '
                   'nodes {} but received {}'.format(graph.n_nodes, k))
            logger.error(msg)
            raise DomainError(msg)
        return k

    @classmethod
    def _pick(cls, gains):
        """Smallest node among the (node, gain) pairs with gain within
        TIE_TOL of the best gain."""
        best = max(g for _, g in gains)
        return min(v for v, g in gains if g >= best - cls.TIE_TOL)

    @classmethod
    def greedy(cls, evaluator, graph, k):
        """Plain greedy: k rounds of exact argmax over the marginal gains
        of every unselected node.

        Parameters
        ----------
        evaluator : InfluenceEvaluator
        graph : DirectedGraph
        k : int
            Seed set budget, 1 <= k <= n_nodes.

        Returns
        -------
        GreedyTrace
        """
        k = cls._check_k(graph, k)
        trace = GreedyTrace(evaluator.kind)
        state = evaluator.initial_state()
        selected = set()
        evaluations = 0
        start = time.perf_counter()

        for step in range(k):
            gains = [(v, evaluator.marginal(state, v))
                     for v in range(graph.n_nodes) if v not in selected]
            evaluations += len(gains)
            v = cls._pick(gains)
            gain = dict(gains)[v]
            state = evaluator.commit(state, v)
            selected.add(v)
            elapsed = 1000 * (time.perf_counter() - start)
            trace.append(v, gain, evaluator.value_of(state), evaluations,
                         elapsed)
            logger.debug(f'Greedy step {step + 1}: selected node {v} with '
                         f'gain {gain:.6g}')

        logger.info(f'Greedy ({evaluator.kind}) selected {k} seeds with '
                    f'value {trace.value:.6g} after {evaluations} '
                    'evaluations')
        return trace

    @classmethod
    def lazy_greedy(cls, evaluator, graph, k):
        """Lazy (accelerated) greedy with stale upper bounds on the marginal
        gains.

        Bounds are kept in a max-heap with the iteration of their last
        evaluation. Each iteration re-evaluates stale entries from the top
        while the top bound could still tie or beat the best fresh gain, so
        every node is evaluated at most once per iteration. Selections match
        ``greedy`` for a submodular evaluator.

        Parameters
        ----------
        evaluator : InfluenceEvaluator
        graph : DirectedGraph
        k : int
            Seed set budget, 1 <= k <= n_nodes.

        Returns
        -------
        GreedyTrace
        """
        k = cls._check_k(graph, k)
        trace = GreedyTrace(evaluator.kind)
        state = evaluator.initial_state()
        start = time.perf_counter()

        heap = [(-evaluator.marginal(state, v), v, 0)
                for v in range(graph.n_nodes)]
        heapify(heap)
        evaluations = graph.n_nodes

        for step in range(k):
            fresh = []
            best = -math.inf
            while heap and -heap[0][0] >= best - cls.TIE_TOL:
                neg_bound, v, stamp = heappop(heap)
                gain = -neg_bound
                if stamp != step:
                    gain = evaluator.marginal(state, v)
                    evaluations += 1
                fresh.append((v, gain))
                best = max(best, gain)

            v = cls._pick(fresh)
            gain = dict(fresh)[v]
            for u, g in fresh:
                if u != v:
                    heappush(heap, (-g, u, step))

            state = evaluator.commit(state, v)
            elapsed = 1000 * (time.perf_counter() - start)
            trace.append(v, gain, evaluator.value_of(state), evaluations,
                         elapsed)
            logger.debug(f'Lazy greedy step {step + 1}: selected node {v} '
                         f'with gain {gain:.6g} ({len(fresh)} evaluated)')

        logger.info(f'Lazy greedy ({evaluator.kind}) selected {k} seeds '
                    f'with value {trace.value:.6g} after {evaluations} '
                    'evaluations')
        return trace

    @classmethod
    def exhaustive_opt(cls, evaluator, graph, k, limit=None):
        """Exact optimum over all k-subsets of nodes.

        Parameters
        ----------
        evaluator : InfluenceEvaluator
        graph : DirectedGraph
        k : int
            Seed set size.
        limit : int | None
            Maximum number of subsets to enumerate, EXHAUSTIVE_LIMIT by
            default.

        Returns
        -------
        tuple
            (seeds, value) with the lexicographically smallest optimal seed
            set.
        """
        k = cls._check_k(graph, k)
        limit = cls.EXHAUSTIVE_LIMIT if limit is None else int(limit)
        n_sets = math.comb(graph.n_nodes, k)
        if n_sets > limit:
            msg = ('Exhaustive search refused: C({}, {}) = {} seed sets '
                   'exceed the enumeration budget of {}'
                   .format(graph.n_nodes, k, n_sets, limit))
            logger.error(msg)
            raise BudgetRefusalError(msg)

        logger.debug(f'Enumerating {n_sets} seed sets of size {k}')
        best_seeds, best = None, -math.inf
        for seeds in combinations(range(graph.n_nodes), k):
            value = evaluator.value(seeds)
            if value > best + cls.TIE_TOL:
                best_seeds, best = seeds, value

        return best_seeds, best

    @staticmethod
    def check_submodular_monotone(evaluator, graph, trials=200, seed=0,
                                  tol=1e-9):
        """Check monotonicity and diminishing returns on random nested seed
        sets S <= T and nodes v outside T.

        Parameters
        ----------
        evaluator : InfluenceEvaluator
        graph : DirectedGraph
        trials : int
            Number of random (S, T, v) triples.
        seed : int
            Master seed, trial t uses its own stream.
        tol : float
            Absolute tolerance on both inequalities.

        Returns
        -------
        PropertyReport
        """
        report = PropertyReport(evaluator.kind, int(trials))
        n = graph.n_nodes
        if n == 0:
            return report

        for t in range(int(trials)):
            rng = rng_stream(seed, 'trials', t)
            perm = rng.permutation(n).tolist()
            b = int(rng.integers(0, n))
            a = int(rng.integers(0, b + 1))
            small, large, v = tuple(perm[:a]), tuple(perm[:b]), perm[b]

            f_s = evaluator.value(small)
            f_t = evaluator.value(large)
            if f_s > f_t + tol:
                report.violations.append(PropertyViolation(
                    'monotone', small, large, amount=f_s - f_t))

            gain_s = evaluator.value(small + (v,)) - f_s
            gain_t = evaluator.value(large + (v,)) - f_t
            if gain_t > gain_s + tol:
                report.violations.append(PropertyViolation(
                    'submodular', small, large, node=v,
                    amount=gain_t - gain_s))

        if report.violations:
            logger.warning(f'{report.n_violations} monotone submodularity '
                           f'violations found for the {evaluator.kind} '
                           f'evaluator in {trials} trials')

        return report
