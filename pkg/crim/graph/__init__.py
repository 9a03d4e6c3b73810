# -*- coding: utf-8 -*-
"""
Directed graph and edge probability models
"""
from .graph import DirectedGraph, ProbabilityModel, SeedSetStats
