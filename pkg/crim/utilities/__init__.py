# -*- coding: utf-8 -*-
"""
crim utilities
"""
