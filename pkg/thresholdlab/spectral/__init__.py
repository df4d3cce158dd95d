"""Potentials, quadrature, threshold matrices and pole asymptotics."""
