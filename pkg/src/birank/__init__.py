"""Ranks and rational points of bielliptic genus-2 and genus-3 families."""

__version__ = "0.1.0"
