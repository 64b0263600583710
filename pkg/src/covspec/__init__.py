"""Covering, shift and rescaled covering spectra.

Exact spectra of flat tori and metric graphs, slipping tests on graph
towers, and numerical rescaled lengths of warped cylinders, surfaces of
revolution, cones and the flat Moebius band.
"""
from .exact import PiRational, format_exact
from .spaces_core import SpecValue, Spectrum, lattice_covering_spectrum

__version__ = "0.1.0"

__all__ = ["PiRational", "format_exact", "SpecValue", "Spectrum", "lattice_covering_spectrum", "__version__"]
