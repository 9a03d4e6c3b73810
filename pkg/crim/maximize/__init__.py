# -*- coding: utf-8 -*-
"""
Seed set maximization
"""
from .maximize import (Maximizer, GreedyTrace, InfluenceEvaluator,
                       CorrEvaluator, IcExactEvaluator, IcBankEvaluator,
                       make_evaluator)
