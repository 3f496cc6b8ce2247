"""Exact symbolic toolkit for Jacobi, Dirac-Jacobi and contact structures on coordinate charts."""

__version__ = "0.1.0"
