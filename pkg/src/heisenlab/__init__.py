"""Numerical toolkit for singular measures on the Heisenberg group."""

__version__ = "0.1.0"
