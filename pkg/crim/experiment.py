# -*- coding: utf-8 -*-
"""
Experiment runner: builds graphs from datasets or generator specs, runs one
configured job and writes its csv tables with json config sidecars.
"""
import os
import re
import logging
from dataclasses import dataclass, asdict, fields

import pandas as pd

from crim import DATA_DIR
from crim.adversary.adversary import Adversary
from crim.analysis.analysis import CorrelationAnalysis, Instances
from crim.graph.graph import DirectedGraph
from crim.ic.ic import IndependentCascade
from crim.maximize.maximize import Maximizer, make_evaluator
from crim.robust.robust import RobustInfluence
from crim.utilities.exceptions import DomainError, ParseError
from crim.utilities.io import write_frame
from crim.utilities.rng import rng_stream


logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """Configuration of one crim job. Every output table gets this config
    as a json sidecar.

    Parameters
    ----------
    command : str
        One of Experiment.COMMANDS.
    graph : str
        Edge list filepath, graph csv filepath (``.csv``, as written by
        ``crim gen``) or generator spec "series:<n>" /
        "poctree:<l>,<m>[,override]".
    out_dir : str
        Output directory.
    reverse_edges : bool
        Flag to reverse every edge of an edge list.
    prob_model : str | None
        Probability model string. None keeps the probabilities of a
        generated instance or a graph csv.
    k : int
        Seed set budget.
    seeds : str | None
        Seed set as original node ids separated by spaces or commas.
    evaluator : str
        Objective(s), comma separated: "corr", "ic-bank", "ic-exact".
    samples : int
        Monte Carlo sample count R.
    n_sets : int
        Number of Monte Carlo sample sets for ``eval``.
    seed : int
        Master seed.
    budget : int
        Exhaustive enumeration budget.
    exact_edge_limit : int
        Uncertain edge limit of the exact independent cascade oracle.
    threads : int | None
        Worker process cap for Monte Carlo estimation.
    mode : str
        POC mode, "exact" or "greedy".
    dataset : str | None
        Dataset label for table outputs.
    p_grid : str | None
        Identical probabilities for ``sweep``, comma separated.
    models : str | None
        Probability models for ``table2``, space separated.
    """

    command: str
    graph: str
    out_dir: str
    reverse_edges: bool = False
    prob_model: str = None
    k: int = 1
    seeds: str = None
    evaluator: str = 'corr'
    samples: int = IndependentCascade.N_SAMPLES
    n_sets: int = 1
    seed: int = 0
    budget: int = Maximizer.EXHAUSTIVE_LIMIT
    exact_edge_limit: int = IndependentCascade.EXACT_EDGE_LIMIT
    threads: int = None
    mode: str = 'exact'
    dataset: str = None
    p_grid: str = None
    models: str = None

    INTS = ('k', 'samples', 'n_sets', 'seed', 'budget', 'exact_edge_limit',
            'threads')
    BOOLS = ('reverse_edges',)

    def to_dict(self):
        """Get the config as a plain dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, row):
        """Build a config from a dictionary, e.g. one row of a batch config
        table. Missing and NaN entries take their defaults.

        Parameters
        ----------
        row : dict
            Config entries keyed by RunConfig field name.

        Returns
        -------
        RunConfig
        """
        kwargs = {}
        for f in fields(cls):
            value = row.get(f.name, None)
            if value is None or (isinstance(value, float) and value != value):
                continue

            try:
                if f.name in cls.INTS:
                    value = int(value)
                elif f.name in cls.BOOLS:
                    value = (str(value).strip().lower()
                             in ('true', '1', 'yes'))
                elif isinstance(value, float) and value.is_integer():
                    # integer columns with blanks are read as floats
                    value = str(int(value))
                else:
                    value = str(value)
            except ValueError as e:
                msg = ('Could not parse config entry "{}" from value "{}"'
                       .format(f.name, value))
                logger.error(msg)
                raise ParseError(msg) from e

            kwargs[f.name] = value

        return cls(**kwargs)


class Experiment:
    """Run one configured crim job."""

    COMMANDS = ('eval', 'maximize', 'coupling', 'poc', 'table2', 'gen',
                'sweep')

    def __init__(self, config):
        """
        Parameters
        ----------
        config : RunConfig
            Job configuration.
        """
        if config.command not in self.COMMANDS:
            msg = ('Unknown command "{}", must be one of {}'
                   .format(config.command, self.COMMANDS))
            logger.error(msg)
            raise ParseError(msg)

        self._config = config
        self._graph = None

    def __str__(self):
        return f'crim {self._config.command} on "{self._config.graph}"'

    @property
    def config(self):
        """Job configuration."""
        return self._config

    @property
    def graph(self):
        """Graph of this job with probabilities assigned."""
        if self._graph is None:
            self._graph = self.load_graph(self._config)
        return self._graph

    @staticmethod
    def generate(spec):
        """Build a generated instance from a generator spec.

        Parameters
        ----------
        spec : str
            "series:<n>" or "poctree:<l>,<m>[,override]".

        Returns
        -------
        DirectedGraph
        """
        name, _, args = spec.partition(':')
        args = [a.strip() for a in args.split(',') if a.strip()]
        override = bool(args) and args[-1].lower() == 'override'
        if override:
            args = args[:-1]

        try:
            args = [int(a) for a in args]
        except ValueError as e:
            msg = f'Non-integer generator argument in "{spec}"'
            logger.error(msg)
            raise ParseError(msg) from e

        if name == 'series' and len(args) == 1:
            return Instances.gen_series(*args)
        if name == 'poctree' and len(args) == 2:
            return Instances.gen_poc_tree(*args, override=override)

        msg = ('Could not parse generator spec "{}", expected "series:<n>" '
               'or "poctree:<l>,<m>"'.format(spec))
        logger.error(msg)
        raise ParseError(msg)

    @classmethod
    def load_graph(cls, config):
        """Build the job graph and assign its edge probabilities.

        Parameters
        ----------
        config : RunConfig

        Returns
        -------
        DirectedGraph
        """
        source = config.graph
        if re.match(r'^(series|poctree):', source):
            graph = cls.generate(source)
        elif source.endswith('.csv'):
            graph = DirectedGraph.from_csv(source)
            if config.reverse_edges:
                graph = DirectedGraph(graph.n_nodes, graph.dst, graph.src,
                                      p=graph.p, node_ids=graph.node_ids,
                                      node_types=graph.node_types)
        else:
            graph = DirectedGraph.load_edge_list(
                source, reverse=config.reverse_edges)
            if config.prob_model is None:
                logger.warning(f'No probability model given for edge list '
                               f'"{source}", all edge probabilities are 0')

        if config.prob_model is not None:
            graph = graph.assign_probabilities(config.prob_model,
                                               seed=config.seed)

        logger.info(f'Graph for {config.command}: {graph}')
        return graph

    @staticmethod
    def parse_seeds(graph, text):
        """Parse a seed set of original node ids separated by spaces or
        commas into dense ids.

        Returns
        -------
        tuple
        """
        if text is None or not str(text).strip():
            msg = 'A seed set (original node ids) is required'
            logger.error(msg)
            raise DomainError(msg)

        tokens = re.split(r'[\s,]+', str(text).strip())
        try:
            ids = [int(t) for t in tokens]
        except ValueError as e:
            msg = f'Could not parse seed set "{text}" as integer node ids'
            logger.error(msg)
            raise ParseError(msg) from e

        return graph.seed_set(ids, original_ids=True)

    def _fpath(self, name):
        return os.path.join(self._config.out_dir, name)

    def _write(self, df, name):
        fpath = self._fpath(name)
        write_frame(df, fpath, config=self._config.to_dict())
        return fpath

    def _seed_label(self, seeds):
        return ' '.join(str(v) for v in self.graph.original_ids(seeds))

    def _evaluators(self):
        kinds = [e.strip() for e in self._config.evaluator.split(',')
                 if e.strip()]
        return [make_evaluator(kind, self.graph,
                               n_samples=self._config.samples,
                               seed=self._config.seed,
                               max_edges=self._config.exact_edge_limit)
                for kind in kinds]

    def run(self):
        """Run the configured job.

        Returns
        -------
        list
            Output filepaths.
        """
        logger.info(f'Running {self}')
        return getattr(self, f'run_{self._config.command}')()

    def run_eval(self):
        """Write the influence profile, the robust influence and the
        independent cascade estimate of the configured seed set."""
        c = self._config
        graph = self.graph
        seeds = self.parse_seeds(graph, c.seeds)

        profile = RobustInfluence.influence_profile(graph, seeds)
        out = [self._write(profile.to_frame(graph), 'profile.csv')]

        if 'ic-exact' in c.evaluator:
            value = IndependentCascade.f_ic_exact(
                graph, seeds, max_edges=c.exact_edge_limit)
            est = {'R': None, 'mean': value, 'stderr': 0.0, 'seed': None,
                   'method': 'exact'}
        elif c.n_sets > 1:
            est = IndependentCascade.repeated_estimate(
                graph, seeds, n_samples=c.samples, seed=c.seed,
                n_sets=c.n_sets, max_workers=c.threads).to_dict()
        else:
            est = IndependentCascade.f_ic_estimate(
                graph, seeds, n_samples=c.samples, seed=c.seed,
                max_workers=c.threads).to_dict()

        label = self._seed_label(seeds)
        ic = pd.DataFrame([dict(seed_set=label, **est)])
        cols = ['seed_set', 'R', 'mean', 'stderr', 'seed']
        cols += [col for col in ic if col not in cols]
        out.append(self._write(ic[cols], 'ic_estimate.csv'))

        summary = pd.DataFrame([{'seed_set': label,
                                 'f_corr': profile.value,
                                 'f_ic': est['mean'],
                                 'kappa': profile.value / est['mean']}])
        out.append(self._write(summary, 'eval.csv'))
        logger.info(f'Robust influence {profile.value:.6g}, independent '
                    f'cascade influence {est["mean"]:.6g}')
        return out

    def run_maximize(self):
        """Write a lazy greedy trace per configured evaluator and a timing
        table (k, evaluator, elapsed_ms)."""
        out = []
        timing = []
        for evaluator in self._evaluators():
            trace = Maximizer.lazy_greedy(evaluator, self.graph,
                                          self._config.k)
            name = 'trace_{}.csv'.format(evaluator.kind.replace('-', '_'))
            out.append(self._write(trace.to_frame(self.graph), name))
            timing += [{'k': i + 1, 'evaluator': evaluator.kind,
                        'elapsed_ms': ms}
                       for i, ms in enumerate(trace.elapsed_ms)]

        out.append(self._write(pd.DataFrame(timing), 'timing.csv'))
        return out

    def run_coupling(self):
        """Write the adversarial coupling cell report, edge marginals and
        the exact expected influence of the configured seed set. The
        draw table holds the coupling realized at one q sampled from the
        "coupling" stream of the master seed."""
        graph = self.graph
        seeds = self.parse_seeds(graph, self._config.seeds)
        profile = RobustInfluence.influence_profile(graph, seeds)

        cells = Adversary.cell_report(graph, profile)
        marginals = Adversary.edge_marginals(graph, profile)
        identity = Adversary.check_reachability_identity(graph, profile)
        q = float(rng_stream(self._config.seed, 'coupling', 1).random())
        draw = Adversary.draw_coupling(graph, profile, q)

        summary = pd.DataFrame([{
            'seed_set': self._seed_label(seeds),
            'f_corr': profile.value,
            'expected_influence': Adversary.exact_expected_influence(
                graph, profile),
            'n_cells': len(cells),
            'reachability_identity': identity.holds,
            'n_discrepant_edges': int((marginals['discrepancy'] != 0).sum()),
            'max_discrepancy': (float(marginals['discrepancy'].abs().max())
                                if len(marginals) else 0.0)}])

        return [self._write(cells, 'cells.csv'),
                self._write(marginals, 'marginals.csv'),
                self._write(draw.to_frame(graph), 'draw.csv'),
                self._write(summary, 'coupling.csv')]

    def run_poc(self):
        """Write the price of correlations report."""
        c = self._config
        ic = [e for e in c.evaluator.split(',') if e.startswith('ic')]
        report = CorrelationAnalysis.poc_report(
            self.graph, c.k, mode=c.mode,
            evaluator=ic[0] if ic else 'ic-exact',
            n_samples=c.samples, seed=c.seed, budget=c.budget,
            max_edges=c.exact_edge_limit)
        df = pd.DataFrame([report.to_dict(self.graph)])
        return [self._write(df, 'poc.csv')]

    def run_table2(self):
        """Write the seed set property table over the configured
        probability models."""
        c = self._config
        if c.prob_model is not None:
            logger.warning('table2 reassigns probabilities per model, '
                           f'prob_model "{c.prob_model}" is ignored')

        models = c.models.split() if c.models else None
        evaluator = 'ic-exact' if 'ic-exact' in c.evaluator else 'ic-bank'
        df = CorrelationAnalysis.table2(
            self.graph, c.k, dataset=c.dataset, models=models,
            evaluator=evaluator, n_samples=c.samples, seed=c.seed,
            max_edges=c.exact_edge_limit)
        return [self._write(df, 'table2.csv')]

    def run_sweep(self):
        """Write expected influence curves against an identical edge
        probability."""
        c = self._config
        if not c.p_grid:
            msg = 'The sweep command requires a probability grid (p_grid)'
            logger.error(msg)
            raise DomainError(msg)

        try:
            p_values = [float(p) for p in re.split(r'[\s,]+',
                                                   c.p_grid.strip())]
        except ValueError as e:
            msg = f'Could not parse probability grid "{c.p_grid}"'
            logger.error(msg)
            raise ParseError(msg) from e

        evaluator = 'ic-exact' if 'ic-exact' in c.evaluator else 'ic-bank'
        df = CorrelationAnalysis.misspec_sweep(
            self.graph, c.k, p_values, evaluator=evaluator,
            n_samples=c.samples, seed=c.seed, max_edges=c.exact_edge_limit)
        return [self._write(df, 'sweep.csv')]

    def run_gen(self):
        """Write the job graph as a graph csv named after its source."""
        name = os.path.basename(self._config.graph)
        name = re.sub(r'[^A-Za-z0-9]+', '_', os.path.splitext(name)[0])
        fpath = self._fpath(f'{name.strip("_")}.csv')
        self.graph.to_csv(fpath, config=self._config.to_dict())
        return [fpath]

    @classmethod
    def run_config(cls, config):
        """Run multiple crim jobs from a csv config.

        Parameters
        ----------
        config : str
            Path to .csv config file with one row per job and columns
            named after the RunConfig fields. command, graph and out_dir are
            required. "DATA_DIR" in graph and out_dir is replaced by the
            crim data directory.

        Returns
        -------
        list
            Output filepaths of all jobs.
        """
        if not os.path.exists(config) or not config.endswith('.csv'):
            msg = f'Config must be an existing .csv filepath: {config}'
            logger.error(msg)
            raise ParseError(msg)

        table = pd.read_csv(config)

        required = ('command', 'graph', 'out_dir')
        missing = [r for r in required if r not in table]
        if any(missing):
            msg = f'Config had missing required columns: {missing}'
            logger.error(msg)
            raise ParseError(msg)

        out = []
        for i, row in table.iterrows():
            row = row.to_dict()
            for key in ('graph', 'out_dir'):
                row[key] = re.sub(r'\bDATA_DIR', DATA_DIR.replace('\\', '/'),
                                  str(row[key]))

            logger.info(f'Running config job {i + 1} of {len(table)}')
            out += cls(RunConfig.from_dict(row)).run()

        return out
