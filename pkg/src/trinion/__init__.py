"""Exact and numerical tools for unipotent SL(3) representations of the thrice-punctured sphere.

Modules
-------
exact       rational and Gaussian-rational scalars, 3x3 matrices
surface     the Lawton cubic surface and its rational parameterization
betti       unipotent pairs, character map, normal forms
integral    integral representations and integer points on the surface
higgs       residues of parabolic Higgs fields
tzitzeica   finite-difference solver for the Tzitzeica equation on a disk
cone        Monge-Ampere cone metric and semi-flat assembly
checks      acceptance checks
"""
from . import betti, cone, exact, higgs, integral, surface, tzitzeica
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"
