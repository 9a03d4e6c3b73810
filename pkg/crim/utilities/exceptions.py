# -*- coding: utf-8 -*-
"""
Custom exceptions for crim
"""


class CrimError(Exception):
    """Base class for all crim errors."""


class ParseError(CrimError, ValueError):
    """Malformed input data, e.g. a bad edge-list line or model string."""

    def __init__(self, msg, line_number=None):
        """
        Parameters
        ----------
        msg : str
            Error message.
        line_number : int | None
            1-based line number of the offending input line, if known.
        """
        super().__init__(msg)
        self.line_number = line_number


class DomainError(CrimError, ValueError):
    """Valid data that violates an operation precondition."""


class BudgetRefusalError(CrimError, RuntimeError):
    """Refusal to start work that would exceed a configured budget."""
