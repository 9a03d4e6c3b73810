# -*- coding: utf-8 -*-
"""
Worst-case coupling of edge activations.

The adversarial distribution over edge states is realized from a single
uniform draw q: given the robust likelihoods pi of a seed set, every edge is
live or dead as a deterministic function of q, and the active node set is
V(q) = {i : q < pi_i}. Everything here is piecewise constant in q, so
expectations are integrated exactly over the cells between breakpoints.
"""
import math
import logging
from dataclasses import dataclass, field
from warnings import warn

import numpy as np
import pandas as pd

from crim.ic.ic import IndependentCascade, LiveEdgeSample
from crim.utilities.exceptions import DomainError
from crim.utilities.rng import rng_stream


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CouplingDraw:
    """Edge states and active nodes of the adversarial coupling at q."""

    q: float
    live: LiveEdgeSample = field(repr=False)
    active: np.ndarray = field(repr=False)

    @property
    def n_active(self):
        """Size of V(q)."""
        return int(np.count_nonzero(self.active))

    def to_frame(self, graph):
        """Get the draw as a long table with columns (record, u, v, q).

        The first row (record "q") holds q, followed by one "edge" row per
        live edge (u -> v) and one "node" row per active node (u), all in
        original node ids.
        """
        rows = [('q', None, None, self.q)]
        ids = graph.node_ids
        for e in np.flatnonzero(self.live.live):
            rows.append(('edge', ids[graph.src[e]], ids[graph.dst[e]], None))
        for i in np.flatnonzero(self.active):
            rows.append(('node', ids[i], None, None))

        df = pd.DataFrame(rows, columns=['record', 'u', 'v', 'q'])
        df['u'] = df['u'].astype('Int64')
        df['v'] = df['v'].astype('Int64')
        return df


@dataclass(frozen=True)
class BreakpointPartition:
    """Sorted critical values of q, from 0 to 1. Edge states and active
    nodes are constant on each open cell between consecutive points."""

    points: tuple

    def __len__(self):
        return len(self.points) - 1

    @property
    def cells(self):
        """List of (q_lo, q_hi) cells in increasing order."""
        return list(zip(self.points[:-1], self.points[1:]))

    @property
    def midpoints(self):
        """Representative q of every cell."""
        return [0.5 * (lo + hi) for lo, hi in self.cells]


@dataclass(frozen=True)
class IdentityCheck:
    """Result of a reachability identity check. When the identity fails,
    ``cell`` is the first failing (q_lo, q_hi) and ``missing``/``extra``
    list the nodes of V(q) not reachable and reachable nodes not in V(q)."""

    holds: bool
    n_cells: int
    cell: tuple = None
    missing: tuple = ()
    extra: tuple = ()

    def __bool__(self):
        return self.holds


class Adversary:
    """Adversarial coupling construction and exact integration over q."""

    # cells shorter than this are merged into their neighbor
    MIN_CELL = 1e-15

    @staticmethod
    def _edge_terms(graph, profile):
        """Likelihood at the edge source and target and the lower end of the
        removal interval for every edge."""
        pi = np.asarray(profile.pi, dtype=np.float64)
        pk = pi[graph.src]
        pj = pi[graph.dst]
        lo = pk - 1.0 + graph.p
        return pk, pj, lo

    @classmethod
    def _live(cls, graph, profile, q):
        """Live-edge mask at q."""
        pk, pj, lo = cls._edge_terms(graph, profile)
        removed = (q >= lo) & (q <= pk)
        return np.where(pk > pj, ~removed, (q > 0) & (q <= graph.p))

    @classmethod
    def draw_coupling(cls, graph, profile, q):
        """Realize the adversarial coupling for one uniform draw.

        Edge (k, j) is live iff either pi_k > pi_j and q is outside
        [pi_k - 1 + p_kj, pi_k], or pi_k <= pi_j and 0 < q <= p_kj.

        Parameters
        ----------
        graph : DirectedGraph
        profile : InfluenceProfile
            Profile of the seed set on graph.
        q : float
            Uniform draw in [0, 1].

        Returns
        -------
        CouplingDraw
        """
        q = float(q)
        if not 0 <= q <= 1:
            msg = f'Coupling draw q must be in [0, 1] but received {q}'
            logger.error(msg)
            raise DomainError(msg)

        live = LiveEdgeSample(cls._live(graph, profile, q))
        active = np.asarray(profile.pi) > q
        return CouplingDraw(q=q, live=live, active=active)

    @classmethod
    def breakpoints(cls, graph, profile):
        """Critical values of q: every pi, the removal interval ends of edges
        with pi_k > pi_j and p of all other edges, clipped to [0, 1] and
        with 0 and 1 added.

        Parameters
        ----------
        graph : DirectedGraph
        profile : InfluenceProfile

        Returns
        -------
        BreakpointPartition
        """
        pk, pj, lo = cls._edge_terms(graph, profile)
        down = pk > pj
        values = np.concatenate([np.asarray(profile.pi), lo[down], pk[down],
                                 graph.p[~down], [0.0, 1.0]])
        values = np.unique(np.clip(values, 0.0, 1.0))

        points = [0.0]
        for x in values[1:].tolist():
            if x - points[-1] >= cls.MIN_CELL:
                points.append(x)

        if points[-1] != 1.0:
            if len(points) > 1 and 1.0 - points[-1] < cls.MIN_CELL:
                points[-1] = 1.0
            else:
                points.append(1.0)

        return BreakpointPartition(points=tuple(points))

    @classmethod
    def exact_expected_influence(cls, graph, profile):
        """Expected |V(q)| under a uniform q, integrated exactly over the
        breakpoint cells. Equals f_corr of the profile seed set.

        Returns
        -------
        float
        """
        pi = np.sort(np.asarray(profile.pi))
        n = len(pi)
        terms = []
        for (lo, hi), mid in zip(*cls._cells(graph, profile)):
            n_active = n - int(np.searchsorted(pi, mid, side='right'))
            terms.append((hi - lo) * n_active)

        return math.fsum(terms)

    @classmethod
    def _cells(cls, graph, profile):
        partition = cls.breakpoints(graph, profile)
        return partition.cells, partition.midpoints

    @classmethod
    def edge_marginal(cls, graph, profile, e):
        """Measure of the q values for which an edge is live.

        This is exactly p_e except for edges with pi_k > pi_j whose removal
        interval starts below 0, where the clipped interval leaves the edge
        live with probability 1 - pi_k.

        Parameters
        ----------
        graph : DirectedGraph
        profile : InfluenceProfile
        e : int
            Edge index.

        Returns
        -------
        float
        """
        e = int(e)
        if not 0 <= e < graph.n_edges:
            msg = f'Edge index {e} out of range for {graph.n_edges} edges'
            logger.error(msg)
            raise DomainError(msg)

        pk, pj, lo = cls._edge_terms(graph, profile)
        p = float(graph.p[e])
        if pk[e] <= pj[e] or lo[e] >= 0:
            return p

        return 1.0 - float(pk[e])

    @classmethod
    def edge_marginals(cls, graph, profile):
        """Coupling marginal of every edge against its probability.

        Returns
        -------
        pd.DataFrame
            Columns src, dst (original ids), p, marginal and discrepancy
            (marginal - p), one row per edge in edge index order.
        """
        marginals = [cls.edge_marginal(graph, profile, e)
                     for e in range(graph.n_edges)]
        df = pd.DataFrame({'src': graph.original_ids(graph.src),
                           'dst': graph.original_ids(graph.dst),
                           'p': graph.p,
                           'marginal': marginals})
        df['discrepancy'] = df['marginal'] - df['p']

        n_off = int((df['discrepancy'] != 0).sum())
        if n_off:
            msg = ('Adversarial coupling marginals differ from the edge '
                   'probabilities on {} of {} edges (clipped removal '
                   'intervals), max discrepancy {:.6g}'
                   .format(n_off, len(df), df['discrepancy'].abs().max()))
            logger.warning(msg)

        return df

    @classmethod
    def cell_report(cls, graph, profile):
        """Active node and live edge counts on every breakpoint cell.

        Returns
        -------
        pd.DataFrame
            Columns q_lo, q_hi, n_active, live_edge_count.
        """
        rows = []
        for (lo, hi), mid in zip(*cls._cells(graph, profile)):
            draw = cls.draw_coupling(graph, profile, mid)
            rows.append((lo, hi, draw.n_active, draw.live.n_live))

        return pd.DataFrame(rows, columns=['q_lo', 'q_hi', 'n_active',
                                           'live_edge_count'])

    @classmethod
    def check_reachability_identity(cls, graph, profile):
        """Check on every cell that V(q) is exactly the set of nodes
        reachable from the seeds over the live edges E(q).

        A failure is returned and reported as a warning, never raised.

        Returns
        -------
        IdentityCheck
        """
        cells, mids = cls._cells(graph, profile)
        for cell, mid in zip(cells, mids):
            draw = cls.draw_coupling(graph, profile, mid)
            reach = IndependentCascade.reachable(graph, draw.live,
                                                 profile.seeds)
            if not np.array_equal(reach, draw.active):
                missing = tuple(np.flatnonzero(draw.active & ~reach).tolist())
                extra = tuple(np.flatnonzero(reach & ~draw.active).tolist())
                msg = ('Reachability identity fails on cell q in ({:.17g}, '
                       '{:.17g}): active but unreachable {}, reachable but '
                       'inactive {}'.format(cell[0], cell[1], missing, extra))
                logger.warning(msg)
                warn(msg)
                return IdentityCheck(holds=False, n_cells=len(cells),
                                     cell=cell, missing=missing, extra=extra)

        return IdentityCheck(holds=True, n_cells=len(cells))

    @classmethod
    def check_path_dominance(cls, graph, profile, paths):
        """Check on every cell that all best paths to a node are present
        together exactly when q < pi_target and that no best path ever
        misses more than one arc.

        Parameters
        ----------
        graph : DirectedGraph
        profile : InfluenceProfile
        paths : PathSet
            Best paths to one target for the profile seed set.

        Returns
        -------
        bool
        """
        pi_t = float(profile.pi[paths.target])
        arcs = [[graph.edge_index(u, v) for u, v in zip(path[:-1], path[1:])]
                for path in paths.paths]

        for (lo, hi), mid in zip(*cls._cells(graph, profile)):
            live = cls._live(graph, profile, mid)
            missing = [int(np.count_nonzero(~live[a])) for a in arcs]
            all_present = all(m == 0 for m in missing)
            if all_present != (mid < pi_t) or any(m > 1 for m in missing):
                msg = ('Path dominance fails for node {} on cell q in '
                       '({:.17g}, {:.17g}): missing arcs per path {}'
                       .format(paths.target, lo, hi, missing))
                logger.warning(msg)
                return False

        return True

    @staticmethod
    def simulate(profile, n_draws=10000, seed=0):
        """Monte Carlo estimate of E|V(q)| over uniform draws of q.

        Parameters
        ----------
        profile : InfluenceProfile
        n_draws : int
            Number of uniform draws.
        seed : int
            Master seed for the coupling stream.

        Returns
        -------
        tuple
            (mean, stderr) of |V(q)|.
        """
        n_draws = int(n_draws)
        if n_draws < 1:
            msg = f'Coupling simulation requires n_draws >= 1, got {n_draws}'
            logger.error(msg)
            raise DomainError(msg)

        q = rng_stream(seed, 'coupling').random(n_draws)
        pi = np.sort(np.asarray(profile.pi))
        sizes = len(pi) - np.searchsorted(pi, q, side='right')

        stderr = 0.0
        if n_draws > 1:
            stderr = float(sizes.std(ddof=1) / math.sqrt(n_draws))

        return float(sizes.mean()), stderr
