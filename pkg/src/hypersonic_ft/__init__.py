"""Riemann solvers and wave-front tracking for hypersonic flow past a wedge."""

__version__ = "0.1.0"
