# -*- coding: utf-8 -*-
"""
Correlation robust influence evaluation
"""
from .robust import RobustInfluence, InfluenceProfile, PathSet
