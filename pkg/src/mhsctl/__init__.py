"""Exact computations with limit mixed Hodge structures, nilpotent orbits,
their Koszul cohomology and a deformation of a four-dimensional orbit."""
from __future__ import annotations

from .linalg import Matrix, Subspace
from .mhs import DecreasingFiltration, IncreasingFiltration, MixedHodgeStructure, Pairing, Verdict
from .orbits import MixedNilpotentOrbit, NilpotentOrbit
from .scalars import I, ONE, ZERO, GaussScalar, ParamElement, ParamRing

__all__ = [
    "GaussScalar",
    "I",
    "ONE",
    "ZERO",
    "ParamRing",
    "ParamElement",
    "Matrix",
    "Subspace",
    "IncreasingFiltration",
    "DecreasingFiltration",
    "MixedHodgeStructure",
    "Pairing",
    "Verdict",
    "NilpotentOrbit",
    "MixedNilpotentOrbit",
]

__version__ = "0.1.0"
