"""Exact and asymptotic analysis of balanced two-color urns with subtraction."""

__version__ = "0.1.0"
