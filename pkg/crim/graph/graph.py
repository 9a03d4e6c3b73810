# -*- coding: utf-8 -*-
"""
Directed graph representation, edge probability models, edge-list ingestion
and seed-set structural statistics.
"""
import io
import os
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.sparse import csgraph

from crim.utilities.exceptions import DomainError, ParseError
from crim.utilities.io import write_frame
from crim.utilities.rng import rng_stream


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProbabilityModel:
    """Edge activation probability model.

    Parameters
    ----------
    kind : str
        One of "identical", "uniform01", "trivalency", "weighted_cascade".
    p : float | None
        Probability for the "identical" model.
    convention : str
        Degree convention for "weighted_cascade": "source_total" (total
        degree of the edge source) or "target_in" (in-degree of the edge
        target).
    """

    kind: str
    p: float = None
    convention: str = 'source_total'

    KINDS = ('identical', 'uniform01', 'trivalency', 'weighted_cascade')
    CONVENTIONS = ('source_total', 'target_in')
    TRIVALENCY = (0.1, 0.01, 0.001)

    # cli aliases
    ALIASES = {'unif01': 'uniform01',
               'uniform': 'uniform01',
               'wcascade': 'weighted_cascade',
               'wc': 'weighted_cascade',
               }

    def __post_init__(self):
        if self.kind not in self.KINDS:
            msg = ('Unknown probability model "{}", available models: {}'
                   .format(self.kind, self.KINDS))
            logger.error(msg)
            raise ParseError(msg)

        if self.kind == 'identical':
            if self.p is None or not 0 <= float(self.p) <= 1:
                msg = ('Identical probability model requires p in [0, 1] '
                       'but received: {}'.format(self.p))
                logger.error(msg)
                raise DomainError(msg)

        if self.convention not in self.CONVENTIONS:
            msg = ('Unknown weighted cascade degree convention "{}", '
                   'available: {}'.format(self.convention, self.CONVENTIONS))
            logger.error(msg)
            raise ParseError(msg)

    def __str__(self):
        if self.kind == 'identical':
            return f'identical:{self.p}'
        if self.kind == 'weighted_cascade':
            return f'weighted_cascade:{self.convention}'
        return self.kind

    @classmethod
    def parse(cls, text):
        """Parse a model string such as "identical:0.01", "unif01",
        "trivalency" or "wcascade:target_in".

        Parameters
        ----------
        text : str
            Probability model string.

        Returns
        -------
        ProbabilityModel
        """
        kind, _, arg = str(text).strip().partition(':')
        kind = cls.ALIASES.get(kind.lower(), kind.lower())

        if kind == 'identical':
            try:
                p = float(arg)
            except ValueError as e:
                msg = f'Could not parse identical probability from "{text}"'
                logger.error(msg)
                raise ParseError(msg) from e
            return cls(kind, p=p)

        if kind == 'weighted_cascade' and arg:
            return cls(kind, convention=arg)

        return cls(kind)

    def probabilities(self, graph, seed=0):
        """Compute the per-edge probabilities of this model for a graph.

        Parameters
        ----------
        graph : DirectedGraph
            Graph whose edges get probabilities.
        seed : int
            Seed for the random models. The draw for edge index e is a
            function of (seed, e) only.

        Returns
        -------
        np.ndarray
            Probability per edge index.
        """
        m = graph.n_edges

        if self.kind == 'identical':
            return np.full(m, float(self.p))

        if self.kind == 'uniform01':
            return edge_uniforms(seed, m)

        if self.kind == 'trivalency':
            choice = np.floor(edge_uniforms(seed, m) * 3).astype(np.int64)
            choice = np.minimum(choice, 2)
            return np.asarray(self.TRIVALENCY)[choice]

        if self.convention == 'source_total':
            deg = graph.degree[graph.src]
        else:
            deg = graph.in_degree[graph.dst]

        # every edge contributes to its own endpoint's degree so deg >= 1
        return 1.0 / deg.astype(np.float64)


def edge_uniforms(seed, n_edges):
    """Draw one Unif[0, 1) value per edge from a counter-based generator.

    The value at position e only depends on (seed, e), so results do not
    depend on edge processing order or on the number of workers.

    Parameters
    ----------
    seed : int
        Nonnegative master seed.
    n_edges : int
        Number of values to draw.

    Returns
    -------
    np.ndarray
    """
    return rng_stream(seed, 'probabilities').random(n_edges)


@dataclass(frozen=True)
class SeedSetStats:
    """Structural statistics of a seed set.

    Degrees are total (in + out) degrees. The diameter is the largest
    undirected hop distance between two seeds, or DISCONNECTED.
    """

    DISCONNECTED = 'disconnected'

    size: int
    min_degree: int
    mean_degree: float
    max_degree: int
    diameter: object
    degrees: tuple = field(default=(), repr=False)

    def to_dict(self):
        """Get the statistics as a flat record (no per-node degrees)."""
        return {'min_deg': self.min_degree,
                'avg_deg': self.mean_degree,
                'max_deg': self.max_degree,
                'diam': self.diameter}


class DirectedGraph:
    """Immutable directed graph with one activation probability per edge.

    Nodes are dense integers 0..n_nodes-1. Edges are indexed 0..n_edges-1
    in ingestion order; every per-edge array (src, dst, p) is aligned to
    that index.
    """

    DEDUP_POLICIES = ('first', 'error')

    def __init__(self, n_nodes, src, dst, p=None, node_ids=None,
                 node_types=None):
        """
        Parameters
        ----------
        n_nodes : int
            Number of nodes.
        src : array-like
            Edge source node per edge index.
        dst : array-like
            Edge target node per edge index.
        p : array-like | None
            Edge activation probability per edge index, each in [0, 1].
            Zeros if None (probabilities unset).
        node_ids : array-like | None
            Original dataset id per dense node id. Defaults to the dense ids.
        node_types : array-like | None
            Optional integer type label per node (generated instances).
        """
        self._n = int(n_nodes)
        self._src = np.asarray(src, dtype=np.int64).copy()
        self._dst = np.asarray(dst, dtype=np.int64).copy()

        if p is None:
            p = np.zeros(len(self._src))
        self._p = np.asarray(p, dtype=np.float64).copy()

        if node_ids is None:
            node_ids = np.arange(self._n)
        self._node_ids = np.asarray(node_ids, dtype=np.int64).copy()

        self._node_types = None
        if node_types is not None:
            self._node_types = np.asarray(node_types, dtype=np.int64).copy()

        self._check()

        for arr in (self._src, self._dst, self._p, self._node_ids,
                    self._node_types):
            if arr is not None:
                arr.flags.writeable = False

    def _check(self):
        """Check the structural invariants of the graph."""
        m = len(self._src)
        if self._n < 0:
            msg = f'Number of nodes must be nonnegative, got {self._n}'
            logger.error(msg)
            raise DomainError(msg)

        if len(self._dst) != m or len(self._p) != m:
            msg = ('Edge arrays have mismatched lengths: src {}, dst {}, p {}'
                   .format(m, len(self._dst), len(self._p)))
            logger.error(msg)
            raise DomainError(msg)

        if len(self._node_ids) != self._n:
            msg = ('Expected {} original node ids but received {}'
                   .format(self._n, len(self._node_ids)))
            logger.error(msg)
            raise DomainError(msg)

        if m:
            lo = min(self._src.min(), self._dst.min())
            hi = max(self._src.max(), self._dst.max())
            if lo < 0 or hi >= self._n:
                msg = ('Edge endpoints must be dense node ids in [0, {}) '
                       'but found range [{}, {}]'.format(self._n, lo, hi))
                logger.error(msg)
                raise DomainError(msg)

        bad = ~((self._p >= 0) & (self._p <= 1))
        if bad.any():
            e = int(np.flatnonzero(bad)[0])
            msg = ('Edge probabilities must lie in [0, 1] but edge {} has p={}'
                   .format(e, self._p[e]))
            logger.error(msg)
            raise DomainError(msg)

        if (self._src == self._dst).any():
            msg = 'Self-loops are not allowed in a DirectedGraph'
            logger.error(msg)
            raise DomainError(msg)

        keys = self._src * max(self._n, 1) + self._dst
        if len(np.unique(keys)) != m:
            msg = 'Duplicate (source, target) edges are not allowed'
            logger.error(msg)
            raise DomainError(msg)

    def __str__(self):
        return (f'DirectedGraph with {self.n_nodes} nodes and '
                f'{self.n_edges} edges')

    def __repr__(self):
        return str(self)

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (self.n_nodes == other.n_nodes
                and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.p, other.p)
                and np.array_equal(self.node_ids, other.node_ids))

    __hash__ = object.__hash__

    def __getstate__(self):
        # cached adjacency lists are rebuilt on demand after unpickling
        return {k: v for k, v in self.__dict__.items() if k.startswith('_')
                and k != '_id_lookup'}

    @property
    def n_nodes(self):
        """Number of nodes."""
        return self._n

    @property
    def n_edges(self):
        """Number of edges."""
        return len(self._src)

    @property
    def src(self):
        """Source node per edge index (read-only array)."""
        return self._src

    @property
    def dst(self):
        """Target node per edge index (read-only array)."""
        return self._dst

    @property
    def p(self):
        """Activation probability per edge index (read-only array)."""
        return self._p

    @property
    def node_ids(self):
        """Original dataset id per dense node id (read-only array)."""
        return self._node_ids

    @property
    def node_types(self):
        """Optional node type labels, None for ingested datasets."""
        return self._node_types

    @cached_property
    def weights(self):
        """Robust shortest-path edge weights 1 - p."""
        w = 1.0 - self._p
        w.flags.writeable = False
        return w

    @cached_property
    def edge_lists(self):
        """(src, dst, 1 - p) per edge index as python lists for tight
        loops."""
        return (self._src.tolist(), self._dst.tolist(),
                self.weights.tolist())

    @cached_property
    def out_edges(self):
        """Outgoing edge indices per node (list of lists)."""
        out = [[] for _ in range(self._n)]
        for e, u in enumerate(self._src.tolist()):
            out[u].append(e)
        return out

    @cached_property
    def in_edges(self):
        """Incoming edge indices per node (list of lists)."""
        out = [[] for _ in range(self._n)]
        for e, v in enumerate(self._dst.tolist()):
            out[v].append(e)
        return out

    @cached_property
    def out_degree(self):
        """Out-degree per node."""
        return np.bincount(self._src, minlength=self._n)

    @cached_property
    def in_degree(self):
        """In-degree per node."""
        return np.bincount(self._dst, minlength=self._n)

    @cached_property
    def degree(self):
        """Total (in + out) degree per node."""
        return self.out_degree + self.in_degree

    @cached_property
    def _id_lookup(self):
        return {int(orig): i for i, orig in enumerate(self._node_ids)}

    def edge_index(self, src, dst):
        """Get the edge index of the (src, dst) edge in dense ids.

        Raises
        ------
        DomainError
            If the edge does not exist.
        """
        for e in self.out_edges[int(src)]:
            if self._dst[e] == dst:
                return e

        msg = f'Edge ({src}, {dst}) is not in the graph'
        logger.error(msg)
        raise DomainError(msg)

    def original_ids(self, nodes):
        """Map dense node ids to original dataset ids.

        Parameters
        ----------
        nodes : iterable
            Dense node ids.

        Returns
        -------
        list
        """
        return [int(self._node_ids[v]) for v in nodes]

    def seed_set(self, nodes, original_ids=False):
        """Validate nodes and make a seed set (sorted tuple of dense ids).

        Parameters
        ----------
        nodes : iterable
            Node ids, either dense ids or original dataset ids.
        original_ids : bool
            Flag to interpret nodes as original dataset ids.

        Returns
        -------
        tuple
        """
        out = set()
        for v in nodes:
            v = int(v)
            if original_ids:
                if v not in self._id_lookup:
                    msg = f'Unknown node id in seed set: {v}'
                    logger.error(msg)
                    raise DomainError(msg)
                v = self._id_lookup[v]
            elif not 0 <= v < self._n:
                msg = ('Seed node {} is not a node id in [0, {})'
                       .format(v, self._n))
                logger.error(msg)
                raise DomainError(msg)
            out.add(v)

        return tuple(sorted(out))

    def with_probabilities(self, p):
        """Get a copy of this graph with new edge probabilities."""
        return DirectedGraph(self._n, self._src, self._dst, p=p,
                             node_ids=self._node_ids,
                             node_types=self._node_types)

    def assign_probabilities(self, model, seed=0):
        """Get a copy of this graph with probabilities from a model.

        Parameters
        ----------
        model : ProbabilityModel | str
            Probability model or a model string, e.g. "trivalency".
        seed : int
            Seed for the random models.

        Returns
        -------
        DirectedGraph
        """
        if isinstance(model, str):
            model = ProbabilityModel.parse(model)

        logger.debug(f'Assigning edge probabilities with model "{model}" '
                     f'and seed {seed}')
        return self.with_probabilities(model.probabilities(self, seed=seed))

    def seed_set_stats(self, seeds):
        """Compute degree statistics and the undirected diameter of a seed
        set.

        Parameters
        ----------
        seeds : iterable
            Nonempty collection of dense node ids.

        Returns
        -------
        SeedSetStats
        """
        seeds = self.seed_set(seeds)
        if not seeds:
            msg = 'Seed set statistics require a nonempty seed set'
            logger.error(msg)
            raise DomainError(msg)

        deg = self.degree[list(seeds)]

        if len(seeds) == 1:
            diameter = 0
        else:
            adj = sparse.csr_matrix(
                (np.ones(self.n_edges), (self._src, self._dst)),
                shape=(self._n, self._n))
            dist = csgraph.shortest_path(adj, directed=False,
                                         unweighted=True,
                                         indices=list(seeds))
            dist = dist[:, list(seeds)]
            if np.isinf(dist).any():
                diameter = SeedSetStats.DISCONNECTED
            else:
                diameter = int(dist.max())

        return SeedSetStats(size=len(seeds),
                            min_degree=int(deg.min()),
                            mean_degree=float(deg.mean()),
                            max_degree=int(deg.max()),
                            diameter=diameter,
                            degrees=tuple(int(d) for d in deg))

    def summary(self):
        """Dataset summary: node/edge counts and total degree statistics.

        Returns
        -------
        dict
        """
        deg = self.degree if self._n else np.zeros(1, dtype=np.int64)
        return {'n_nodes': self.n_nodes,
                'n_edges': self.n_edges,
                'min_deg': int(deg.min()),
                'avg_deg': float(deg.mean()),
                'max_deg': int(deg.max()),
                }

    def to_frame(self):
        """Get the graph as a "src,dst,p" table in original ids.

        Every node is first declared with a self-loop row so that isolated
        nodes and the dense id order survive a reload. Graphs with node
        types carry them in a "node_type" column on the declaration rows.
        """
        ids = self._node_ids
        src = np.concatenate([ids, ids[self._src]])
        dst = np.concatenate([ids, ids[self._dst]])
        p = np.concatenate([np.zeros(self._n), self._p])
        df = pd.DataFrame({'src': src, 'dst': dst, 'p': p})
        if self._node_types is not None:
            node_type = self._node_types.tolist() + [pd.NA] * len(self._p)
            df['node_type'] = pd.array(node_type, dtype='Int64')

        return df

    def to_csv(self, fpath, config=None):
        """Write the graph to a "src,dst,p" csv.

        Parameters
        ----------
        fpath : str
            Output .csv filepath.
        config : dict | None
            Optional run config to write as a json sidecar.
        """
        write_frame(self.to_frame(), fpath, config=config)

    def to_edge_list(self, fpath):
        """Write the graph as a whitespace separated edge list in original
        ids. Probabilities are not written.

        Parameters
        ----------
        fpath : str
            Output filepath.
        """
        df = self.to_frame()
        with open(fpath, 'w') as f:
            f.write(f'# nodes: {self.n_nodes} edges: {self.n_edges}\n')
            for s, d in zip(df['src'].tolist(), df['dst'].tolist()):
                f.write(f'{s} {d}\n')

        logger.info(f'Saved: {fpath}')

    @classmethod
    def from_csv(cls, fpath):
        """Load a graph written by DirectedGraph.to_csv().

        Parameters
        ----------
        fpath : str
            Path to a csv with columns src, dst, p.

        Returns
        -------
        DirectedGraph
        """
        try:
            df = pd.read_csv(fpath, float_precision='round_trip')
        except Exception as e:
            msg = f'Could not read graph csv "{fpath}": {e}'
            logger.error(msg)
            raise ParseError(msg) from e

        missing = [c for c in ('src', 'dst', 'p') if c not in df]
        if any(missing):
            msg = f'Graph csv had missing required columns: {missing}'
            logger.error(msg)
            raise ParseError(msg)

        try:
            src = df['src'].astype(np.int64).values
            dst = df['dst'].astype(np.int64).values
        except (TypeError, ValueError) as e:
            msg = f'Non-integer node ids in graph csv "{fpath}"'
            logger.error(msg)
            raise ParseError(msg) from e

        p = df['p'].astype(np.float64).values
        graph = cls._from_pairs(src, dst, p=p)
        if 'node_type' in df:
            graph = cls._with_csv_node_types(graph, df, fpath)

        return graph

    @classmethod
    def _with_csv_node_types(cls, graph, df, fpath):
        """Attach the "node_type" column of the self-loop declaration rows."""
        decl = df.loc[df['src'] == df['dst']].drop_duplicates('src')
        lookup = dict(zip(decl['src'].astype(np.int64).tolist(),
                          decl['node_type'].tolist()))
        try:
            node_types = [int(lookup[v]) for v in graph.node_ids.tolist()]
        except (KeyError, TypeError, ValueError) as e:
            msg = (f'Graph csv "{fpath}" has a node_type column without an '
                   f'integer type for every declared node: {e}')
            logger.error(msg)
            raise ParseError(msg) from e

        return cls(graph.n_nodes, graph.src, graph.dst, p=graph.p,
                   node_ids=graph.node_ids, node_types=node_types)

    @classmethod
    def load_edge_list(cls, source, reverse=False, dedup='first'):
        """Load a SNAP-style edge list: one "src dst" integer pair per line,
        "#" comment lines.

        Node ids are re-mapped to dense ids in order of first appearance.
        Self-loops are dropped (their nodes are kept). Probabilities are
        zero until assign_probabilities() runs.

        Parameters
        ----------
        source : str | file-like
            Filepath or text stream.
        reverse : bool
            Flag to store every edge (i, j) as (j, i).
        dedup : str
            Duplicate edge policy: "first" keeps the first occurrence,
            "error" raises a ParseError.

        Returns
        -------
        DirectedGraph
        """
        if dedup not in cls.DEDUP_POLICIES:
            msg = ('Unknown dedup policy "{}", available: {}'
                   .format(dedup, cls.DEDUP_POLICIES))
            logger.error(msg)
            raise ParseError(msg)

        if isinstance(source, (str, os.PathLike)):
            logger.info(f'Loading edge list: {source}')
            with open(source) as f:
                return cls.load_edge_list(f, reverse=reverse, dedup=dedup)

        src = []
        dst = []
        line_numbers = []
        for i, line in enumerate(source, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue

            tokens = line.split()
            if len(tokens) != 2:
                msg = ('Expected two node ids on line {} but found: "{}"'
                       .format(i, line))
                logger.error(msg)
                raise ParseError(msg, line_number=i)

            try:
                s, d = int(tokens[0]), int(tokens[1])
            except ValueError as e:
                msg = f'Non-integer node id on line {i}: "{line}"'
                logger.error(msg)
                raise ParseError(msg, line_number=i) from e

            if s < 0 or d < 0:
                msg = f'Negative node id on line {i}: "{line}"'
                logger.error(msg)
                raise ParseError(msg, line_number=i)

            src.append(s)
            dst.append(d)
            line_numbers.append(i)

        graph = cls._from_pairs(np.array(src, dtype=np.int64),
                                np.array(dst, dtype=np.int64),
                                reverse=reverse, dedup=dedup,
                                line_numbers=line_numbers)
        logger.info(f'Loaded {graph}')
        return graph

    @classmethod
    def from_text(cls, text, **kwargs):
        """Load an edge list from a string, see load_edge_list()."""
        return cls.load_edge_list(io.StringIO(text), **kwargs)

    @classmethod
    def _from_pairs(cls, src, dst, p=None, reverse=False, dedup='first',
                    line_numbers=None):
        """Normalize raw (src, dst) id pairs into a DirectedGraph."""
        if not len(src):
            return cls(0, [], [])

        tokens = np.empty(2 * len(src), dtype=np.int64)
        tokens[0::2] = src
        tokens[1::2] = dst
        uniq, first = np.unique(tokens, return_index=True)
        node_ids = uniq[np.argsort(first, kind='stable')]

        # dense id of each unique original id
        dense_of_uniq = np.empty(len(uniq), dtype=np.int64)
        dense_of_uniq[np.argsort(first, kind='stable')] = np.arange(len(uniq))
        s = dense_of_uniq[np.searchsorted(uniq, src)]
        d = dense_of_uniq[np.searchsorted(uniq, dst)]

        if reverse:
            s, d = d, s

        keep = s != d
        s, d = s[keep], d[keep]
        rows = np.flatnonzero(keep)
        if p is not None:
            p = np.asarray(p, dtype=np.float64)[keep]

        keys = s * len(node_ids) + d
        _, first_edge = np.unique(keys, return_index=True)
        if len(first_edge) < len(keys):
            if dedup == 'error':
                is_first = np.zeros(len(keys), dtype=bool)
                is_first[first_edge] = True
                row = int(rows[np.flatnonzero(~is_first)[0]])
                line = None if line_numbers is None else line_numbers[row]
                msg = f'Duplicate edge found on line {line}'
                logger.error(msg)
                raise ParseError(msg, line_number=line)

            logger.debug('Dropping {} duplicate edges'
                         .format(len(keys) - len(first_edge)))
            first_edge = np.sort(first_edge)
            s, d = s[first_edge], d[first_edge]
            if p is not None:
                p = p[first_edge]

        return cls(len(node_ids), s, d, p=p, node_ids=node_ids)
