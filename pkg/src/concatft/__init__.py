"""Fault-tolerance verification for a Steane-over-RM15 concatenated code."""

from .algebra import BitMatrix, BitVector, Pauli
from .codes import ConcatLayout, CssCode, build_rm15, build_steane, concatenate, validate

__all__ = [
    "BitMatrix",
    "BitVector",
    "ConcatLayout",
    "CssCode",
    "Pauli",
    "build_rm15",
    "build_steane",
    "concatenate",
    "validate",
]
__version__ = "0.1.0"
