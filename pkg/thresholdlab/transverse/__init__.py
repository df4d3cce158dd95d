"""Transverse cross-section models and threshold grouping."""

from .base import TransverseModel, group_thresholds
from .manufactured import ManufacturedModel, build_manufactured_spectrum, load_mode_table
from .oscillator import OscillatorModel, build_oscillator_spectrum, hermite_function, hermite_polynomial
from .strip import StripModel, build_strip_spectrum

__all__ = [
    "ManufacturedModel",
    "OscillatorModel",
    "StripModel",
    "TransverseModel",
    "build_manufactured_spectrum",
    "build_oscillator_spectrum",
    "build_strip_spectrum",
    "group_thresholds",
    "hermite_function",
    "hermite_polynomial",
    "load_mode_table",
]
