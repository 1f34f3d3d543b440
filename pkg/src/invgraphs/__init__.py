"""Inverse graphs over involutive alphabets: covers, quotients, PDAs, end-cones and transducers."""

from .alphabet import InvolutiveAlphabet
from .errors import (
    AlphabetError,
    FormatError,
    GrammarError,
    GraphError,
    InvGraphError,
    MachineError,
    TruncationError,
)
from .graph import InverseGraph, RootedGraph, Walk, accepts, validate
from .kernels import BACKEND

__all__ = [
    "AlphabetError",
    "BACKEND",
    "FormatError",
    "GrammarError",
    "GraphError",
    "InvGraphError",
    "InverseGraph",
    "InvolutiveAlphabet",
    "MachineError",
    "RootedGraph",
    "TruncationError",
    "Walk",
    "accepts",
    "validate",
]
