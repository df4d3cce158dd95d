"""Finite-difference verification of emerging eigenvalues."""
