"""Separable permutations: exact counts, exact-uniform sampling and their infinite limit."""

__version__ = "0.1.0"
