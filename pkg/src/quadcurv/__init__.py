"""Numerical laboratory for quadratic curvature functionals on model manifolds."""

__version__ = "0.1.0"
