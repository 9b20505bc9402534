"""Rigorous computations on the Markov and Lagrange spectra."""

__version__ = "0.1.0"
