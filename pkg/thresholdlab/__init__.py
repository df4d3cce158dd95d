"""Threshold perturbation analysis for cylindrical waveguide operators."""

__version__ = "0.1.0"
