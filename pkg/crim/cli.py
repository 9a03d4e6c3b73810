# -*- coding: utf-8 -*-
"""
crim command line interface (CLI)
"""
import functools
import logging

import click
from rex import init_logger

from crim.experiment import Experiment, RunConfig
from crim.ic.ic import IndependentCascade
from crim.maximize.maximize import Maximizer
from crim.utilities.exceptions import (BudgetRefusalError, CrimError,
                                       DomainError, ParseError)
from crim.version import __version__


logger = logging.getLogger(__name__)

# exit codes per error class, first match wins
EXIT_CODES = ((ParseError, 3),
              (BudgetRefusalError, 4),
              (DomainError, 5),
              (CrimError, 1),
              )


class CrimGroup(click.Group):
    """Click group that maps crim errors to exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except CrimError as e:
            code = next(c for err, c in EXIT_CODES if isinstance(e, err))
            click.echo(f'Error: {e}', err=True)
            ctx.exit(code)


def graph_options(func):
    """Options shared by every job subcommand."""
    options = [
        click.option('--graph', '-g', required=True, type=str,
                     help='Edge list filepath, graph .csv filepath from '
                     '"crim gen", or generator spec "series:<n>" / '
                     '"poctree:<l>,<m>".'),
        click.option('--reverse-edges', is_flag=True,
                     help='Flag to reverse every edge of the edge list.'),
        click.option('--prob-model', '-p', default=None, type=str,
                     help='Edge probability model: identical:<p>, unif01, '
                     'trivalency, wcascade[:source_total|target_in]. '
                     'Defaults to the probabilities of a generated '
                     'instance or graph csv.'),
        click.option('--seed', default=0, type=int, show_default=True,
                     help='Master seed for probabilities and samples.'),
        click.option('--budget', '-b', default=Maximizer.EXHAUSTIVE_LIMIT,
                     type=int, show_default=True,
                     help='Maximum number of seed sets to enumerate in '
                     'exhaustive searches.'),
        click.option('--threads', default=None, type=int,
                     help='Maximum number of worker processes for Monte '
                     'Carlo estimation. Outputs do not depend on it.'),
        click.option('--out', '-o', 'out_dir', required=True, type=str,
                     help='Output directory.'),
        click.option('-v', '--verbose', is_flag=True,
                     help='Flag to turn on debug logging. Default is not '
                     'verbose.'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def sample_options(func):
    """Monte Carlo options."""
    options = [
        click.option('--samples', '-r', default=IndependentCascade.N_SAMPLES,
                     type=int, show_default=True,
                     help='Number of Monte Carlo samples R.'),
        click.option('--exact-edge-limit', default=IndependentCascade
                     .EXACT_EDGE_LIMIT, type=int, show_default=True,
                     help='Maximum number of uncertain edges for exact '
                     'independent cascade evaluation.'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _run(command, verbose, **kwargs):
    """Set up logging and run one job."""
    if verbose:
        init_logger('crim', log_level='DEBUG')
    else:
        init_logger('crim', log_level='INFO')

    config = RunConfig(command=command, **kwargs)
    for fpath in Experiment(config).run():
        click.echo(fpath)


def job(func):
    """Run the decorated subcommand as a crim job named after it."""
    @functools.wraps(func)
    def wrapper(ctx, verbose, **kwargs):
        ctx.ensure_object(dict)
        func(ctx, **kwargs)
        _run(ctx.command.name, verbose, **kwargs)
    return wrapper


@click.group(cls=CrimGroup)
@click.version_option(version=__version__)
@click.pass_context
def main(ctx):
    """crim command line interface (CLI)."""
    ctx.ensure_object(dict)


@main.command(name='eval')
@graph_options
@sample_options
@click.option('--seeds', '-s', required=True, type=str,
              help='Seed set as original node ids, e.g. "3 17 42".')
@click.option('--evaluator', '-e', default='ic-bank', show_default=True,
              type=click.Choice(['ic-bank', 'ic-exact']),
              help='Independent cascade evaluation: Monte Carlo or exact '
              'enumeration.')
@click.option('--sets', 'n_sets', default=1, type=int, show_default=True,
              help='Number of disjoint Monte Carlo sample sets.')
@click.pass_context
@job
def eval_cmd(ctx, **kwargs):
    """Evaluate robust and independent cascade influence of a seed set."""


@main.command()
@graph_options
@sample_options
@click.option('--k', '-k', required=True, type=int,
              help='Seed set budget.')
@click.option('--evaluator', '-e', default='corr', show_default=True,
              type=str,
              help='Objective(s), comma separated: corr, ic-bank, ic-exact.')
@click.pass_context
@job
def maximize(ctx, **kwargs):
    """Select seed sets with lazy greedy and write traces and timings."""


@main.command()
@graph_options
@click.option('--seeds', '-s', required=True, type=str,
              help='Seed set as original node ids, e.g. "3 17 42".')
@click.pass_context
@job
def coupling(ctx, **kwargs):
    """Integrate the adversarial coupling of a seed set exactly."""


@main.command()
@graph_options
@sample_options
@click.option('--k', '-k', default=1, type=int, show_default=True,
              help='Seed set size.')
@click.option('--mode', '-m', default='exact', show_default=True,
              type=click.Choice(['exact', 'greedy']),
              help='Exhaustive optima or lazy greedy surrogates.')
@click.option('--evaluator', '-e', default='ic-exact', show_default=True,
              type=click.Choice(['ic-exact', 'ic-bank']),
              help='Independent cascade evaluator for greedy mode.')
@click.pass_context
@job
def poc(ctx, **kwargs):
    """Compute the price of correlations and the correlation gap."""


@main.command()
@graph_options
@sample_options
@click.option('--k', '-k', required=True, type=int,
              help='Seed set size.')
@click.option('--dataset', '-d', default=None, type=str,
              help='Dataset label for the output table.')
@click.option('--models', default=None, type=str,
              help='Space separated probability models. Defaults to '
              '"unif01 trivalency wcascade".')
@click.option('--evaluator', '-e', default='ic-bank', show_default=True,
              type=click.Choice(['ic-bank', 'ic-exact']),
              help='Independent cascade evaluator.')
@click.pass_context
@job
def table2(ctx, **kwargs):
    """Tabulate seed set properties over probability models."""


@main.command()
@graph_options
@sample_options
@click.option('--k', '-k', required=True, type=int,
              help='Seed set size.')
@click.option('--p-grid', required=True, type=str,
              help='Comma separated identical edge probabilities.')
@click.option('--evaluator', '-e', default='ic-bank', show_default=True,
              type=click.Choice(['ic-bank', 'ic-exact']),
              help='Independent cascade evaluator.')
@click.pass_context
@job
def sweep(ctx, **kwargs):
    """Expected influence of both greedy seed sets against an identical
    edge probability."""


@main.command()
@graph_options
@click.pass_context
@job
def gen(ctx, **kwargs):
    """Write a graph (e.g. a generated instance) as a graph csv."""


@main.command()
@click.option('--config', '-c', required=True,
              type=click.Path(exists=True),
              help='Path to .csv config file with one row per job and '
              'columns named after the run config fields (command, graph '
              'and out_dir required).')
@click.option('-v', '--verbose', is_flag=True,
              help='Flag to turn on debug logging. Default is not verbose.')
@click.pass_context
def batch(ctx, config, verbose):
    """Run multiple crim jobs from a csv config."""
    ctx.ensure_object(dict)

    if verbose:
        init_logger('crim', log_level='DEBUG')
    else:
        init_logger('crim', log_level='INFO')

    for fpath in Experiment.run_config(config):
        click.echo(fpath)


if __name__ == '__main__':
    try:
        main(obj={})
    except Exception as e:
        msg = 'Error running crim cli!'
        logger.exception(msg)
        raise RuntimeError(msg) from e
