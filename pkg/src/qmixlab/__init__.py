"""Numerical laboratory for the explicit kernels, weights and bounds behind
quantum mixing on hyperbolic surfaces."""

__version__ = "0.1.0"
