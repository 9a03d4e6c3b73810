# -*- coding: utf-8 -*-
"""
Correlation Robust Influence Maximization
"""
import os


CRIM_DIR = os.path.dirname(os.path.realpath(__file__))
DATA_DIR = os.path.join(os.path.dirname(CRIM_DIR), 'data')
TEST_DATA_DIR = os.path.join(os.path.dirname(CRIM_DIR), 'tests', 'data')

from crim.graph import DirectedGraph, ProbabilityModel  # noqa: E402
from crim.robust import RobustInfluence  # noqa: E402
from crim.adversary import Adversary  # noqa: E402
from crim.ic import IndependentCascade, SampleBank  # noqa: E402
from crim.maximize import Maximizer, make_evaluator  # noqa: E402
from crim.analysis import CorrelationAnalysis, Instances  # noqa: E402
from crim.experiment import Experiment, RunConfig  # noqa: E402
from crim.version import __version__  # noqa: E402
