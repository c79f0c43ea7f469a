"""Verification toolkit for the classical and supersymmetric Gaussian fluid flow equations."""

__version__ = "0.1.0"
