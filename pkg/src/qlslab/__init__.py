"""Pseudo-spectral laboratory for quasilinear Schrödinger equations."""

__version__ = "0.1.0"
