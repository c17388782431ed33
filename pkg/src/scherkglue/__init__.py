"""Numerical construction of four-ended minimal surfaces by gluing
Scherk towers to catenoidal ends, with the linear solvers and the
fixed-point perturbation that drive the mean curvature down."""

__version__ = "0.1.0"
