"""Exact quadratic-form, Milnor-Witt K-theory and Gersten complex computations."""

__version__ = "0.1.0"
