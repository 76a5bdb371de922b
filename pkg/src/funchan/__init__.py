"""Quantum channels generated from functions on finite sets.

Builds Kraus sets from a function on Z_N and a partition of Z_N into
disjoint sets, simulates the circuits that realize them, and analyzes the
spectra of their Liouville matrices.
"""

__version__ = "0.1.0"
