"""Finite-scale sofic entropy toolkit."""
__version__ = "0.1.0"
