"""Mimetic SBP finite-difference exterior calculus and a divergence-free 2D TE Maxwell solver."""

__version__ = "0.1.0"
