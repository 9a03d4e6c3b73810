# -*- coding: utf-8 -*-
"""
Price of correlations and misspecification analysis
"""
from .analysis import CorrelationAnalysis, Instances, PocReport
