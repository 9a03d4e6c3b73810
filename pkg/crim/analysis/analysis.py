# -*- coding: utf-8 -*-
"""
Price of correlations, correlation gap and misspecification analysis, plus
the extreme-case benchmark instances with their closed forms.
"""
import math
import logging
from dataclasses import dataclass, asdict

import numpy as np
import pandas as pd

from crim.graph.graph import DirectedGraph, ProbabilityModel
from crim.maximize.maximize import (CorrEvaluator, Maximizer,
                                    make_evaluator)
from crim.utilities.exceptions import CrimError, DomainError


logger = logging.getLogger(__name__)


class Instances:
    """Generators and closed forms for the series and price of correlations
    tree instances."""

    @staticmethod
    def gen_series(n):
        """Chain 0 -> 1 -> ... -> n-1 with every edge probability 1 - 1/n.

        Parameters
        ----------
        n : int
            Number of nodes, at least 2.

        Returns
        -------
        DirectedGraph
        """
        n = int(n)
        if n < 2:
            msg = f'Series graph requires n >= 2 nodes but received {n}'
            logger.error(msg)
            raise DomainError(msg)

        src = np.arange(n - 1)
        p = np.full(n - 1, 1.0 - 1.0 / n)
        return DirectedGraph(n, src, src + 1, p=p)

    @staticmethod
    def in_poc_regime(l, m):
        """True if 4m / (m + 3) <= l <= 2m."""
        return 4 * m <= l * (m + 3) and l <= 2 * m

    @classmethod
    def gen_poc_tree(cls, l, m, override=False):
        """Root with l disjoint directed paths of m + 2 nodes each.

        The root is node 0 with type 0. Path j holds nodes
        1 + j(m + 2) + t with type t + 1 for t = 0..m+1. The edges from the
        root into type 1 and from type 1 into type 2 have probability 0.5,
        all deeper edges have probability 1.

        Parameters
        ----------
        l : int
            Number of paths (root children).
        m : int
            Number of nodes below the type 2 node on each path.
        override : bool
            Flag to allow (l, m) outside 4m / (m + 3) <= l <= 2m, where the
            root is no longer the independent cascade optimum or a type 2
            node no longer the robust optimum.

        Returns
        -------
        DirectedGraph
        """
        l, m = int(l), int(m)
        if l < 1 or m < 1:
            msg = f'POC tree requires l >= 1 and m >= 1, got l={l}, m={m}'
            logger.error(msg)
            raise DomainError(msg)

        if not override and not cls.in_poc_regime(l, m):
            msg = ('POC tree parameters l={}, m={} are outside the regime '
                   '4m/(m+3) <= l <= 2m'.format(l, m))
            logger.error(msg)
            raise DomainError(msg)

        src, dst, p = [], [], []
        types = [0]
        for j in range(l):
            base = 1 + j * (m + 2)
            src.append(0)
            dst.append(base)
            p.append(0.5)
            for t in range(m + 2):
                types.append(t + 1)
                if t < m + 1:
                    src.append(base + t)
                    dst.append(base + t + 1)
                    p.append(0.5 if t == 0 else 1.0)

        return DirectedGraph(len(types), src, dst, p=p, node_types=types)

    @staticmethod
    def series_closed_form(n):
        """Closed-form robust influence, independent cascade influence and
        correlation gap of the first node of the series graph.

        Returns
        -------
        tuple
            (f_corr, f_ic, kappa)
        """
        n = int(n)
        if n < 2:
            msg = f'Series graph requires n >= 2 nodes but received {n}'
            logger.error(msg)
            raise DomainError(msg)

        q = 1.0 - 1.0 / n
        f_corr = 1 + (n - 1) / 2
        f_ic = 1 + math.fsum(q ** i for i in range(1, n))
        return f_corr, f_ic, f_corr / f_ic

    @staticmethod
    def poc_tree_closed_form(l, m):
        """Price of correlations of the POC tree with k = 1,
        (l/2 + 1) / (m + 1)."""
        return (l / 2 + 1) / (m + 1)


@dataclass(frozen=True)
class PocReport:
    """Optimal (or greedy surrogate) seed sets under both objectives and
    the ratios between them.

    ``f_corr_ic`` reads "robust influence of the independent cascade seed
    set", the other value fields follow the same pattern.
    """

    k: int
    mode: str
    surrogate: bool
    s_corr: tuple
    s_ic: tuple
    f_corr_corr: float
    f_corr_ic: float
    f_ic_corr: float
    f_ic_ic: float
    ic_method: str
    n_samples: int = None
    seed: int = None
    ic_stderr_corr: float = 0.0
    ic_stderr_ic: float = 0.0

    # standard errors of S_corr beating S_ic that still count as noise
    NOISE_SIGMAS = 3

    @property
    def poc(self):
        """Price of correlations f_corr(S_ic) / f_corr(S_corr)."""
        return self.f_corr_ic / self.f_corr_corr

    @property
    def kappa(self):
        """Correlation gap f_corr(S_ic) / f_ic(S_ic)."""
        return self.f_corr_ic / self.f_ic_ic

    @property
    def misspec_ic(self):
        """Loss in independent cascade influence from using S_corr,
        f_ic(S_corr) / f_ic(S_ic)."""
        return self.f_ic_corr / self.f_ic_ic

    @property
    def misspec_corr(self):
        """Loss in robust influence from using S_ic,
        f_corr(S_ic) / f_corr(S_corr)."""
        return self.poc

    @property
    def misspec_ic_rel_stderr(self):
        """Relative standard error of misspec_ic from the Monte Carlo
        errors of both independent cascade values."""
        return math.hypot(self.ic_stderr_corr / self.f_ic_corr,
                          self.ic_stderr_ic / self.f_ic_ic)

    @property
    def noise_flag(self):
        """True if misspec_ic exceeds 1 but by no more than NOISE_SIGMAS
        relative standard errors."""
        bound = 1 + self.NOISE_SIGMAS * self.misspec_ic_rel_stderr
        return 1 < self.misspec_ic <= bound

    def chain_holds(self, tol=1e-9):
        """True if kappa <= POC <= 1 within tol."""
        return (self.kappa <= self.poc + tol) and (self.poc <= 1 + tol)

    def to_dict(self, graph=None):
        """Flat record with the ratios, seed sets in original ids when a
        graph is given."""
        out = asdict(self)
        if graph is not None:
            out['s_corr'] = graph.original_ids(self.s_corr)
            out['s_ic'] = graph.original_ids(self.s_ic)

        out['s_corr'] = ' '.join(str(v) for v in out['s_corr'])
        out['s_ic'] = ' '.join(str(v) for v in out['s_ic'])
        out.update({'poc': self.poc,
                    'kappa': self.kappa,
                    'misspec_ic': self.misspec_ic,
                    'misspec_corr': self.misspec_corr,
                    'misspec_ic_rel_stderr': self.misspec_ic_rel_stderr,
                    'noise_flag': self.noise_flag})
        return out


class CorrelationAnalysis:
    """Price of correlations and misspecification studies."""

    MODES = ('exact', 'greedy')

    # default probability models of the seed set property table
    TABLE_MODELS = ('unif01', 'trivalency', 'wcascade')

    @classmethod
    def poc_report(cls, graph, k, mode='exact', evaluator='ic-exact',
                   n_samples=None, seed=0, budget=None, max_edges=None):
        """Compare the seed sets that maximize robust and independent
        cascade influence.

        Parameters
        ----------
        graph : DirectedGraph
            Graph with edge probabilities.
        k : int
            Seed set size.
        mode : str
            "exact" for exhaustive optima (independent cascade always
            evaluated with the exact oracle), "greedy" for lazy greedy
            surrogates.
        evaluator : str
            Independent cascade evaluator for greedy mode, "ic-exact" or
            "ic-bank".
        n_samples : int | None
            Monte Carlo sample count for "ic-bank".
        seed : int
            Master seed for "ic-bank".
        budget : int | None
            Exhaustive enumeration budget.
        max_edges : int | None
            Uncertain edge limit of the exact oracle.

        Returns
        -------
        PocReport
        """
        if mode not in cls.MODES:
            msg = f'Unknown POC mode "{mode}", must be one of {cls.MODES}'
            logger.error(msg)
            raise DomainError(msg)

        if mode == 'exact':
            evaluator = 'ic-exact'

        corr = CorrEvaluator(graph)
        ic = make_evaluator(evaluator, graph, n_samples=n_samples, seed=seed,
                            max_edges=max_edges)

        if mode == 'exact':
            s_corr, _ = Maximizer.exhaustive_opt(corr, graph, k, limit=budget)
            s_ic, _ = Maximizer.exhaustive_opt(ic, graph, k, limit=budget)
        else:
            s_corr = Maximizer.lazy_greedy(corr, graph, k).seeds
            s_ic = Maximizer.lazy_greedy(ic, graph, k).seeds

        report = PocReport(k=int(k), mode=mode, surrogate=mode == 'greedy',
                           s_corr=tuple(s_corr), s_ic=tuple(s_ic),
                           f_corr_corr=corr.value(s_corr),
                           f_corr_ic=corr.value(s_ic),
                           f_ic_corr=ic.value(s_corr),
                           f_ic_ic=ic.value(s_ic),
                           ic_method=ic.kind,
                           n_samples=getattr(ic, 'n_samples', None),
                           seed=seed if ic.kind == 'ic-bank' else None,
                           ic_stderr_corr=ic.stderr(s_corr),
                           ic_stderr_ic=ic.stderr(s_ic))

        logger.info(f'POC ({mode}) for k={k}: {report.poc:.6g}, correlation '
                    f'gap {report.kappa:.6g}')

        if mode == 'exact' and not report.chain_holds():
            msg = ('Correlation gap <= POC <= 1 violated with exact optima: '
                   'kappa={}, POC={}'.format(report.kappa, report.poc))
            logger.error(msg)
            raise CrimError(msg)

        return report

    @classmethod
    def misspec_table_row(cls, graph, k, evaluator='ic-bank', n_samples=None,
                          seed=0, dataset=None, prob_model=None,
                          max_edges=None):
        """Seed set property rows for one graph and probability model: the
        misspecification ratio, degree statistics and diameter of the greedy
        robust and greedy independent cascade seed sets.

        Returns
        -------
        pd.DataFrame
            Two rows, seed_set_kind "corr" then "ic".
        """
        report = cls.poc_report(graph, k, mode='greedy', evaluator=evaluator,
                                n_samples=n_samples, seed=seed,
                                max_edges=max_edges)
        rows = []
        # robust values are exact, only the corr row ratio carries noise
        for kind, seeds, ratio, rel, flag in (
                ('corr', report.s_corr, report.misspec_ic,
                 report.misspec_ic_rel_stderr, report.noise_flag),
                ('ic', report.s_ic, report.misspec_corr, 0.0, False)):
            row = {'dataset': dataset,
                   'seed_set_kind': kind,
                   'prob_model': prob_model,
                   'misspec_ratio': ratio,
                   'ratio_rel_stderr': rel,
                   'noise_flag': flag}
            row.update(graph.seed_set_stats(seeds).to_dict())
            row.update({'ic_method': report.ic_method,
                        'R': report.n_samples,
                        'seed': report.seed,
                        'ic_stderr_corr': report.ic_stderr_corr,
                        'ic_stderr_ic': report.ic_stderr_ic,
                        'k': report.k})
            rows.append(row)

        return pd.DataFrame(rows)

    @classmethod
    def table2(cls, graph, k, dataset=None, models=None, evaluator='ic-bank',
               n_samples=None, seed=0, max_edges=None):
        """Seed set property table over several probability models.

        Parameters
        ----------
        graph : DirectedGraph
            Graph, its probabilities are replaced by each model in turn.
        k : int
            Seed set size.
        dataset : str | None
            Dataset label for the dataset column.
        models : list | None
            Probability model strings, TABLE_MODELS by default.
        evaluator : str
            Independent cascade evaluator, "ic-bank" or "ic-exact".
        n_samples : int | None
            Monte Carlo sample count.
        seed : int
            Master seed for probabilities and samples.
        max_edges : int | None
            Uncertain edge limit of the exact oracle.

        Returns
        -------
        pd.DataFrame
            Two rows per model in model order.
        """
        models = cls.TABLE_MODELS if models is None else models
        tables = []
        for model in models:
            model = ProbabilityModel.parse(model) if isinstance(model, str) \
                else model
            logger.info(f'Seed set properties with probability model '
                        f'"{model}"')
            g = graph.assign_probabilities(model, seed=seed)
            tables.append(cls.misspec_table_row(g, k, evaluator=evaluator,
                                                n_samples=n_samples,
                                                seed=seed, dataset=dataset,
                                                prob_model=str(model),
                                                max_edges=max_edges))

        return pd.concat(tables, ignore_index=True)

    @classmethod
    def misspec_sweep(cls, graph, k, p_values, evaluator='ic-bank',
                      n_samples=None, seed=0, max_edges=None):
        """Expected influence of both greedy seed sets under both models
        against an identical edge probability.

        Parameters
        ----------
        graph : DirectedGraph
        k : int
            Seed set size.
        p_values : iterable
            Identical edge probabilities in [0, 1].

        Returns
        -------
        pd.DataFrame
            One row per p: p, f_corr_corr, f_corr_ic, f_ic_corr, f_ic_ic,
            ic_method.
        """
        rows = []
        for p in p_values:
            g = graph.assign_probabilities(ProbabilityModel('identical',
                                                            float(p)))
            report = cls.poc_report(g, k, mode='greedy', evaluator=evaluator,
                                    n_samples=n_samples, seed=seed,
                                    max_edges=max_edges)
            rows.append({'p': float(p),
                         'f_corr_corr': report.f_corr_corr,
                         'f_corr_ic': report.f_corr_ic,
                         'f_ic_corr': report.f_ic_corr,
                         'f_ic_ic': report.f_ic_ic,
                         'ic_method': report.ic_method})

        return pd.DataFrame(rows)
