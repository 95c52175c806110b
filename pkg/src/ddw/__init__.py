"""Covariant Hamiltonian (De Donder-Weyl) analysis of first-order Lagrangian field theories."""

__version__ = "0.1.0"
