"""Preferential attachment with edge-steps: simulation and Monte-Carlo checks."""

__version__ = "0.1.0"
