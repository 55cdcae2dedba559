"""Numerical toolkit for NNSC fill-ins of Bartnik data."""

__version__ = "0.1.0"
