"""Finite-dimensional Lie algebras of Cartan type over F_p, and a simplicity criterion."""

__version__ = "0.1.0"
