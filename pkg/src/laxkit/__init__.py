"""Lax pairs, r-matrices and conserved charges for classical integrable systems."""

__version__ = "0.1.0"
