"""Robust sparse mean estimation on a sum-of-squares pseudoexpectation engine."""

__version__ = "0.1.0"
