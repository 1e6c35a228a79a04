"""Exact truncated generating series for Taubes and Ruan-Tian curve counts."""

__version__ = "0.1.0"
