"""Exact Dirac spectra and wavefunctions in a homogeneous magnetic field on S^3."""

__version__ = "0.1.0"
