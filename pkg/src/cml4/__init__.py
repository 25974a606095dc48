"""Exact invariant-set verification for four globally coupled doubling maps."""

__version__ = "0.1.0"
