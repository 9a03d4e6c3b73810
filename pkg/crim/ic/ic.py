# -*- coding: utf-8 -*-
"""
Independent cascade influence estimation.

Influence of a seed set under one edge realization is the number of nodes
reachable from the seeds along live edges. The independent cascade influence
is its expectation when every edge is live independently with its own
probability.
"""
import math
import logging
from dataclasses import dataclass, field

import numpy as np
from rex.utilities.execution import SpawnProcessPool

from crim.utilities.exceptions import BudgetRefusalError, DomainError
from crim.utilities.rng import rng_stream


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LiveEdgeSample:
    """One binary realization of edge states aligned to the edge index."""

    live: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.live)

    @property
    def n_live(self):
        """Number of live edges."""
        return int(np.count_nonzero(self.live))

    @classmethod
    def all_live(cls, graph):
        """Realization with every edge live."""
        return cls(np.ones(graph.n_edges, dtype=bool))

    @classmethod
    def none_live(cls, graph):
        """Realization with no edge live."""
        return cls(np.zeros(graph.n_edges, dtype=bool))


@dataclass(frozen=True)
class IcEstimate:
    """Independent cascade influence estimate.

    ``stderr`` is the standard error of the mean over all samples (unbiased
    sample variance). With ``n_sets`` > 1 the samples were split into equal
    disjoint sets and ``set_std`` is the standard deviation of the set means.
    Exact evaluations have zero standard error and ``method`` "exact".
    """

    mean: float
    stderr: float
    n_samples: int
    seed: int = None
    n_sets: int = 1
    set_std: float = None
    method: str = 'monte_carlo'

    def to_dict(self):
        """Get the estimate as a flat record."""
        return {'R': self.n_samples,
                'mean': self.mean,
                'stderr': self.stderr,
                'seed': self.seed,
                'n_sets': self.n_sets,
                'set_std': self.set_std,
                'method': self.method}


def _spread(out_edges, dst, live, active, starts, touched=None):
    """Breadth-first spread over live edges from starts, never entering
    nodes already marked in ``active``. Marks reached nodes in place.

    Parameters
    ----------
    out_edges : list
        Outgoing edge indices per node.
    dst : list
        Edge target per edge index.
    live : bytes | bytearray | list
        Truthy entry per live edge index.
    active : bytearray
        Activation flag per node, updated in place.
    starts : iterable
        Start nodes, already marked active by the caller.
    touched : list | None
        Optional list that collects every newly marked node.

    Returns
    -------
    int
        Number of newly marked nodes (starts excluded).
    """
    queue = list(starts)
    new = 0
    while queue:
        u = queue.pop()
        for e in out_edges[u]:
            if live[e]:
                v = dst[e]
                if not active[v]:
                    active[v] = 1
                    new += 1
                    queue.append(v)
                    if touched is not None:
                        touched.append(v)
    return new


def _count(graph, live, seeds):
    """Number of nodes reachable from seeds under a live-edge byte mask."""
    _, dst, _ = graph.edge_lists
    active = bytearray(graph.n_nodes)
    for s in seeds:
        active[s] = 1
    return len(seeds) + _spread(graph.out_edges, dst, live, active, seeds)


class IndependentCascade:
    """Independent cascade sampling, reachability counting and estimation."""

    # default Monte Carlo sample count
    N_SAMPLES = 10000

    # default cap on the number of enumerated uncertain edges
    EXACT_EDGE_LIMIT = 20

    @staticmethod
    def sample_live_edges(graph, rng):
        """Draw one realization with edge e live independently w.p. p_e.

        Parameters
        ----------
        graph : DirectedGraph
        rng : np.random.Generator
            Random stream, consumed for exactly n_edges uniforms.

        Returns
        -------
        LiveEdgeSample
        """
        return LiveEdgeSample(rng.random(graph.n_edges) < graph.p)

    @classmethod
    def sample(cls, graph, seed, index):
        """Draw Monte Carlo sample number ``index`` for a master seed."""
        return cls.sample_live_edges(graph,
                                     rng_stream(seed, 'ic_samples', index))

    @staticmethod
    def count_influenced(graph, sample, seeds):
        """Number of nodes reachable from the seeds along live edges,
        seeds included.

        Parameters
        ----------
        graph : DirectedGraph
        sample : LiveEdgeSample
        seeds : iterable
            Seed set (dense node ids).

        Returns
        -------
        int
        """
        seeds = graph.seed_set(seeds)
        return _count(graph, sample.live.tobytes(), seeds)

    @staticmethod
    def reachable(graph, sample, seeds):
        """Boolean mask of nodes reachable from the seeds along live edges.

        Parameters
        ----------
        graph : DirectedGraph
        sample : LiveEdgeSample
        seeds : iterable
            Seed set (dense node ids).

        Returns
        -------
        np.ndarray
        """
        seeds = graph.seed_set(seeds)
        _, dst, _ = graph.edge_lists
        active = bytearray(graph.n_nodes)
        for s in seeds:
            active[s] = 1
        _spread(graph.out_edges, dst, sample.live.tobytes(), active, seeds)
        return np.frombuffer(bytes(active), dtype=np.uint8).astype(bool)

    @classmethod
    def sample_counts(cls, graph, seeds, seed, start, stop):
        """Influence counts for Monte Carlo samples start..stop-1.

        Returns
        -------
        np.ndarray
            int64 count per sample.
        """
        seeds = graph.seed_set(seeds)
        out = np.empty(stop - start, dtype=np.int64)
        for i, r in enumerate(range(start, stop)):
            live = cls.sample(graph, seed, r).live.tobytes()
            out[i] = _count(graph, live, seeds)
        return out

    @classmethod
    def _counts(cls, graph, seeds, n_samples, seed, offset=0,
                max_workers=None):
        """Counts for samples offset..offset+n_samples-1, optionally in
        parallel. Chunks are concatenated in sample order."""
        stop = offset + n_samples
        if max_workers is None or max_workers <= 1 or n_samples < 2:
            return cls.sample_counts(graph, seeds, seed, offset, stop)

        bounds = np.linspace(offset, stop, max_workers + 1).astype(int)
        chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])
                  if b > a]
        logger.debug(f'Running {len(chunks)} sample chunks on '
                     f'{max_workers} workers')

        loggers = [__name__, 'crim']
        with SpawnProcessPool(max_workers=max_workers,
                              loggers=loggers) as exe:
            futures = [exe.submit(cls.sample_counts, graph, seeds, seed,
                                  a, b)
                       for a, b in chunks]
            return np.concatenate([future.result() for future in futures])

    @staticmethod
    def _check_samples(n_samples):
        if int(n_samples) < 1:
            msg = ('Monte Carlo estimation requires at least one sample but '
                   'received R={}'.format(n_samples))
            logger.error(msg)
            raise DomainError(msg)

    @classmethod
    def f_ic_estimate(cls, graph, seeds, n_samples=None, seed=0,
                      max_workers=None, offset=0):
        """Monte Carlo estimate of the independent cascade influence.

        Sample r is drawn from the (seed, r) stream so the result is
        identical for any worker count.

        Parameters
        ----------
        graph : DirectedGraph
        seeds : iterable
            Seed set (dense node ids).
        n_samples : int | None
            Number of samples R, N_SAMPLES by default.
        seed : int
            Master seed.
        max_workers : int | None
            Number of worker processes, serial if None or 1.
        offset : int
            Index of the first sample.

        Returns
        -------
        IcEstimate
        """
        n_samples = cls.N_SAMPLES if n_samples is None else int(n_samples)
        cls._check_samples(n_samples)
        counts = cls._counts(graph, seeds, n_samples, seed, offset=offset,
                             max_workers=max_workers)
        return cls._summarize(counts, seed)

    @staticmethod
    def _summarize(counts, seed, n_sets=1):
        """Build an estimate from per-sample counts."""
        n = len(counts)
        mean = int(counts.sum()) / n
        stderr = 0.0
        if n > 1:
            stderr = float(counts.std(ddof=1) / math.sqrt(n))

        set_std = None
        if n_sets > 1:
            means = counts.reshape(n_sets, -1).sum(axis=1) / (n // n_sets)
            set_std = float(means.std(ddof=1))

        return IcEstimate(mean=mean, stderr=stderr, n_samples=n, seed=seed,
                          n_sets=n_sets, set_std=set_std)

    @classmethod
    def repeated_estimate(cls, graph, seeds, n_samples=None, seed=0,
                          n_sets=10, max_workers=None):
        """Monte Carlo estimate pooled over n_sets disjoint sets of
        n_samples samples each, reporting both the pooled standard error and
        the spread of the set means.

        Returns
        -------
        IcEstimate
        """
        n_samples = cls.N_SAMPLES if n_samples is None else int(n_samples)
        cls._check_samples(n_samples)
        if int(n_sets) < 1:
            msg = f'Number of sample sets must be >= 1, got {n_sets}'
            logger.error(msg)
            raise DomainError(msg)

        counts = cls._counts(graph, seeds, n_samples * n_sets, seed,
                             max_workers=max_workers)
        return cls._summarize(counts, seed, n_sets=int(n_sets))

    @classmethod
    def f_ic_exact(cls, graph, seeds, max_edges=None):
        """Exact independent cascade influence by enumerating every
        realization of the uncertain edges (0 < p < 1).

        Parameters
        ----------
        graph : DirectedGraph
        seeds : iterable
            Seed set (dense node ids).
        max_edges : int | None
            Maximum number of uncertain edges, EXACT_EDGE_LIMIT by default.

        Returns
        -------
        float
        """
        return ExactIcOracle(graph, max_edges=max_edges).value(seeds)


class ExactIcOracle:
    """Precomputed realizations of the uncertain edges of a graph for
    repeated exact independent cascade evaluations."""

    def __init__(self, graph, max_edges=None):
        """
        Parameters
        ----------
        graph : DirectedGraph
            Graph with edge probabilities.
        max_edges : int | None
            Maximum number of uncertain edges (0 < p < 1) to enumerate.
        """
        if max_edges is None:
            max_edges = IndependentCascade.EXACT_EDGE_LIMIT

        p = graph.p
        uncertain = np.flatnonzero((p > 0) & (p < 1))
        u = len(uncertain)
        if u > max_edges:
            msg = ('Exact independent cascade evaluation refused: {} '
                   'uncertain edges exceed the limit of {} (2^{} edge '
                   'realizations)'.format(u, max_edges, u))
            logger.error(msg)
            raise BudgetRefusalError(msg)

        self._graph = graph
        codes = np.arange(2 ** u, dtype=np.int64)
        bits = ((codes[:, None] >> np.arange(u)) & 1).astype(bool)
        pu = p[uncertain]
        self._probs = np.where(bits, pu, 1.0 - pu).prod(axis=1).tolist()

        base = p >= 1
        self._live = []
        for row in bits:
            mask = base.copy()
            mask[uncertain] = row
            self._live.append(mask.tobytes())

        logger.debug(f'Exact IC oracle enumerates {len(self._live)} '
                     'realizations')

    @property
    def n_realizations(self):
        """Number of enumerated edge realizations."""
        return len(self._live)

    def value(self, seeds):
        """Exact expected number of influenced nodes.

        Parameters
        ----------
        seeds : iterable
            Seed set (dense node ids).

        Returns
        -------
        float
        """
        seeds = self._graph.seed_set(seeds)
        terms = [prob * _count(self._graph, live, seeds)
                 for prob, live in zip(self._probs, self._live)]
        return math.fsum(terms)


class SampleBank:
    """Fixed Monte Carlo samples with the activated node set of the current
    seed set in each sample, for incremental greedy evaluation.

    The bank value always equals the Monte Carlo estimate of the committed
    seed set on the same samples.
    """

    # refuse banks whose live-edge and activation storage would exceed this
    # many bytes
    MEMORY_LIMIT = 2 ** 30

    def __init__(self, graph, n_samples=None, seed=0, samples=None):
        """
        Parameters
        ----------
        graph : DirectedGraph
            Graph with edge probabilities.
        n_samples : int | None
            Number of samples R, IndependentCascade.N_SAMPLES by default.
            Ignored when samples are given.
        seed : int
            Master seed, sample r is drawn from the (seed, r) stream.
        samples : list | None
            Pre-drawn live-edge byte masks to share between banks.
        """
        self._graph = graph
        self._seed = seed

        if samples is None:
            if n_samples is None:
                n_samples = IndependentCascade.N_SAMPLES
            IndependentCascade._check_samples(n_samples)
            samples = self.draw(graph, n_samples, seed)

        self._samples = samples
        self._active = [bytearray(graph.n_nodes) for _ in samples]
        self._total = 0
        self._seeds = ()

    def __str__(self):
        return (f'SampleBank with {self.n_samples} samples and seed set of '
                f'size {len(self._seeds)}')

    @classmethod
    def draw(cls, graph, n_samples, seed):
        """Draw live-edge byte masks for samples 0..n_samples-1.

        Returns
        -------
        list
        """
        size = int(n_samples) * (graph.n_edges + graph.n_nodes)
        if size > cls.MEMORY_LIMIT:
            msg = ('Sample bank refused: {} samples x ({} edges + {} nodes) '
                   'exceeds the memory limit of {} bytes'
                   .format(n_samples, graph.n_edges, graph.n_nodes,
                           cls.MEMORY_LIMIT))
            logger.error(msg)
            raise BudgetRefusalError(msg)

        logger.debug(f'Drawing {n_samples} live-edge samples with seed {seed}')
        return [IndependentCascade.sample(graph, seed, r).live.tobytes()
                for r in range(int(n_samples))]

    @property
    def samples(self):
        """Live-edge byte masks, one per sample."""
        return self._samples

    @property
    def n_samples(self):
        """Number of samples R."""
        return len(self._samples)

    @property
    def seeds(self):
        """Committed seed set."""
        return self._seeds

    @property
    def value(self):
        """Mean influence of the committed seed set over the samples."""
        return self._total / self.n_samples

    def counts(self):
        """Activated node count per sample."""
        return np.array([sum(a) for a in self._active], dtype=np.int64)

    def estimate(self):
        """IcEstimate of the committed seed set on the bank samples."""
        return IndependentCascade._summarize(self.counts(), self._seed)

    def _gain(self, v, commit):
        """Total newly activated nodes over all samples when adding v."""
        v = int(v)
        out_edges = self._graph.out_edges
        _, dst, _ = self._graph.edge_lists
        total = 0
        for live, active in zip(self._samples, self._active):
            if active[v]:
                continue
            active[v] = 1
            touched = None if commit else [v]
            total += 1 + _spread(out_edges, dst, live, active, [v],
                                 touched=touched)
            if touched is not None:
                # undo the query
                for u in touched:
                    active[u] = 0

        return total

    def marginal_gain(self, v):
        """Mean number of nodes newly reached from v per sample, traversal
        pruned at nodes already activated by the committed seed set.

        Parameters
        ----------
        v : int
            Candidate node (dense id).

        Returns
        -------
        float
        """
        return self._gain(v, commit=False) / self.n_samples

    def commit(self, v):
        """Add v to the seed set and activate its reach in every sample.
        Committing an already activated node is allowed (gain 0).

        Parameters
        ----------
        v : int
            Node to add (dense id).
        """
        v, = self._graph.seed_set([v])
        self._total += self._gain(v, commit=True)
        self._seeds = tuple(sorted(set(self._seeds) | {v}))
