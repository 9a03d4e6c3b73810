# -*- coding: utf-8 -*-
"""
Adversarial coupling of edge activations
"""
from .adversary import Adversary, CouplingDraw, BreakpointPartition
