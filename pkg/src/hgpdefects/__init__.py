"""Hypergraph product codes with punctures, wormholes and code deformation."""

from .f2core import BitMatrix
from .fgraph import FactorGraph, NodeSet, from_alist, repetition_code, to_alist
from .hgp import HgpCode, build, logical_count, parameters
from .pauli import SymplecticOp

__all__ = [
    "BitMatrix",
    "FactorGraph",
    "NodeSet",
    "from_alist",
    "to_alist",
    "repetition_code",
    "HgpCode",
    "build",
    "logical_count",
    "parameters",
    "SymplecticOp",
]
