# -*- coding: utf-8 -*-
"""
Independent cascade influence estimation
"""
from .ic import (IndependentCascade, ExactIcOracle, SampleBank,
                 LiveEdgeSample, IcEstimate)
