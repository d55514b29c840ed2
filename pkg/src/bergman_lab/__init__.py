"""Numerical laboratory for Bergman spaces and proper holomorphic maps."""

__version__ = "0.1.0"
