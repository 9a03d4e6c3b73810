# -*- coding: utf-8 -*-
"""
Exact evaluation of the correlation robust influence function.

The worst-case expected influence over all edge-state distributions with the
given marginals is a linear program whose optimal potentials are shortest
path distances under edge weights 1 - p: a node at robust distance d from the
seed set is influenced with worst-case likelihood max(1 - d, 0).
"""
import math
import logging
from dataclasses import dataclass, field
from heapq import heappush, heappop
from itertools import count

import numpy as np
import pandas as pd

from crim.utilities.exceptions import DomainError
from crim.utilities.io import write_frame


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InfluenceProfile:
    """Robust distance and influence likelihood of every node for one seed
    set.

    Distances below ``cutoff`` are exact shortest path distances; nodes at
    or beyond the cutoff (or unreachable) hold +inf. With the default cutoff
    of 1 this loses nothing since the likelihood of such nodes is zero.
    """

    seeds: tuple
    d: np.ndarray = field(repr=False)
    pi: np.ndarray = field(repr=False)
    value: float
    cutoff: float = 1.0

    def to_frame(self, graph=None):
        """Get the profile as a (node_id, d, pi) table, in original ids when
        a graph is given."""
        nodes = np.arange(len(self.d))
        if graph is not None:
            nodes = graph.node_ids
        return pd.DataFrame({'node_id': nodes, 'd': self.d, 'pi': self.pi})

    def to_csv(self, fpath, graph=None, config=None):
        """Write the profile to a (node_id, d, pi) csv."""
        write_frame(self.to_frame(graph=graph), fpath, config=config)


@dataclass(frozen=True)
class PathSet:
    """All best paths from a seed set to one target node.

    ``value`` is max L(path) = 1 - d_target (possibly <= 0 or -inf, in which
    case ``paths`` is empty).
    """

    target: int
    value: float
    paths: tuple
    truncated: bool = False

    def __len__(self):
        return len(self.paths)


@dataclass(frozen=True)
class LpViolation:
    """One violated constraint of the robust influence linear program.

    kind is "seed" (pi != 1 on a seed), "edge" (pi_i - pi_j > 1 - p_ij) or
    "bounds" (pi outside [0, 1]). ``amount`` is the size of the violation.
    """

    kind: str
    where: tuple
    amount: float


class RobustInfluence:
    """Correlation robust influence evaluation via shortest paths."""

    # absolute tolerance to detect tight (shortest path) edges
    TIGHT_TOL = 1e-12

    # default cap on the number of enumerated best paths
    PATH_CAP = 10 ** 4

    @staticmethod
    def _finish(seeds, d, cutoff):
        """Build a profile from a list of distances."""
        d = np.array(d, dtype=np.float64)
        pi = np.clip(1.0 - d, 0.0, 1.0)
        pi.flags.writeable = False
        d.flags.writeable = False
        return InfluenceProfile(seeds=tuple(seeds), d=d, pi=pi,
                                value=math.fsum(pi.tolist()), cutoff=cutoff)

    @staticmethod
    def _relax(graph, d, sources, cutoff):
        """Label-setting Dijkstra from sources over edge weights 1 - p.

        ``d`` (a list) is updated in place. Only nodes whose distance improves
        are settled, so this serves both the from-scratch computation (all
        distances +inf) and the incremental one (existing distances).
        """
        out_edges = graph.out_edges
        _, dst, w = graph.edge_lists
        limit = math.inf if cutoff is None else cutoff

        c = count()
        fringe = []
        for s in sources:
            heappush(fringe, (d[s], next(c), s))

        settled = set()
        while fringe:
            du, _, u = heappop(fringe)
            if u in settled or du > d[u]:
                continue
            settled.add(u)

            for e in out_edges[u]:
                v = dst[e]
                nd = du + w[e]
                if nd < limit and nd < d[v]:
                    d[v] = nd
                    heappush(fringe, (nd, next(c), v))

        return d

    @classmethod
    def influence_profile(cls, graph, seeds, cutoff=1.0):
        """Compute robust distances and influence likelihoods.

        Parameters
        ----------
        graph : DirectedGraph
            Graph with edge probabilities.
        seeds : iterable
            Seed set (dense node ids).
        cutoff : float | None
            Distance at which the search stops expanding. The default of 1 is
            exact for the likelihoods; None computes every finite distance.

        Returns
        -------
        InfluenceProfile
        """
        seeds = graph.seed_set(seeds)
        d = [math.inf] * graph.n_nodes
        for s in seeds:
            d[s] = 0.0
        cls._relax(graph, d, seeds, cutoff)
        return cls._finish(seeds, d, cutoff)

    @classmethod
    def f_corr(cls, graph, seeds):
        """Correlation robust influence: the worst-case expected number of
        influenced nodes over all distributions with the edge marginals.

        Parameters
        ----------
        graph : DirectedGraph
            Graph with edge probabilities.
        seeds : iterable
            Seed set (dense node ids).

        Returns
        -------
        float
        """
        return cls.influence_profile(graph, seeds).value

    @classmethod
    def extend_profile(cls, graph, base, v):
        """Add node v to the seed set of a profile with an incremental
        relaxation pass. Bit-identical to recomputing from scratch.

        Parameters
        ----------
        graph : DirectedGraph
        base : InfluenceProfile
            Profile of the current seed set.
        v : int
            Node to add, not already a seed.

        Returns
        -------
        InfluenceProfile
        """
        v, = graph.seed_set([v])
        if v in base.seeds:
            msg = f'Node {v} is already in the seed set'
            logger.error(msg)
            raise DomainError(msg)

        d = base.d.tolist()
        d[v] = 0.0
        cls._relax(graph, d, [v], base.cutoff)
        seeds = tuple(sorted(base.seeds + (v,)))
        return cls._finish(seeds, d, base.cutoff)

    @classmethod
    def marginal_gain_corr(cls, graph, base, v):
        """Exact marginal gain f_corr(S + v) - f_corr(S).

        Parameters
        ----------
        graph : DirectedGraph
        base : InfluenceProfile
            Profile of the current seed set S.
        v : int
            Candidate node not in S.

        Returns
        -------
        float
        """
        return cls.extend_profile(graph, base, v).value - base.value

    @staticmethod
    def verify_lp_feasibility(graph, profile, tol=1e-9):
        """Check the robust influence linear program constraints against a
        profile.

        Parameters
        ----------
        graph : DirectedGraph
        profile : InfluenceProfile
        tol : float
            Absolute tolerance.

        Returns
        -------
        list
            LpViolation entries, empty if the profile is feasible.
        """
        pi = np.asarray(profile.pi, dtype=np.float64)
        out = []

        for s in profile.seeds:
            if abs(pi[s] - 1.0) > tol:
                out.append(LpViolation('seed', (int(s),),
                                       float(abs(pi[s] - 1.0))))

        slack = pi[graph.src] - pi[graph.dst] - (1.0 - graph.p)
        for e in np.flatnonzero(slack > tol):
            out.append(LpViolation('edge',
                                   (int(graph.src[e]), int(graph.dst[e])),
                                   float(slack[e])))

        excess = np.maximum(-pi, pi - 1.0)
        for i in np.flatnonzero(excess > tol):
            out.append(LpViolation('bounds', (int(i),), float(excess[i])))

        if out:
            logger.debug(f'Found {len(out)} LP constraint violations')

        return out

    @classmethod
    def best_paths(cls, graph, seeds, target, cap=None, profile=None):
        """Enumerate the paths from the seed set to target with maximum
        L(path) = 1 - sum(1 - p) by backward traversal over tight edges.

        A path starts at the first seed met when walking backwards from the
        target, so listed paths never pass through another seed.

        Parameters
        ----------
        graph : DirectedGraph
        seeds : iterable
            Seed set, must not contain target.
        target : int
            Target node.
        cap : int | None
            Maximum number of paths to list, PATH_CAP by default.
        profile : InfluenceProfile | None
            Profile computed without cutoff for these seeds. Computed if None.

        Returns
        -------
        PathSet
        """
        cap = cls.PATH_CAP if cap is None else int(cap)
        seeds = graph.seed_set(seeds)
        target = int(target)
        if target in seeds:
            msg = f'Best paths target {target} is in the seed set'
            logger.error(msg)
            raise DomainError(msg)

        if profile is None or profile.cutoff is not None:
            profile = cls.influence_profile(graph, seeds, cutoff=None)

        d = profile.d
        value = 1.0 - d[target]
        if not value > 0:
            return PathSet(target=target, value=float(value), paths=())

        seed_set = set(seeds)
        in_edges = graph.in_edges
        src = graph.src
        w = graph.weights
        paths = []
        truncated = False

        # iterative dfs over (node, path-so-far reversed)
        stack = [(target, (target,))]
        while stack:
            u, rpath = stack.pop()
            if u in seed_set:
                if len(paths) >= cap:
                    truncated = True
                    break
                paths.append(tuple(reversed(rpath)))
                continue

            for e in reversed(in_edges[u]):
                j = int(src[e])
                if j in rpath:
                    continue
                if abs(d[j] + w[e] - d[u]) <= cls.TIGHT_TOL:
                    stack.append((j, rpath + (j,)))

        if truncated:
            logger.warning('Best path enumeration to node {} truncated at {} '
                           'paths'.format(target, cap))

        return PathSet(target=target, value=float(value), paths=tuple(paths),
                       truncated=truncated)

    @staticmethod
    def path_value(graph, path):
        """L(path) = 1 - sum(1 - p) along a node sequence.

        Parameters
        ----------
        graph : DirectedGraph
        path : sequence
            Node ids, consecutive pairs must be edges.

        Returns
        -------
        float
        """
        dist = 0.0
        for u, v in zip(path[:-1], path[1:]):
            dist += graph.weights[graph.edge_index(u, v)]
        return 1.0 - dist
