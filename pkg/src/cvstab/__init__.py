"""Stabilizer-tableau simulation of GKP and rotation-symmetric bosonic circuits.

Encoded qudit inputs are reinterpreted in a larger qudit dimension d2 so
that rational displacements, shears, Kerr and cross-Kerr gates become
Clifford operations, which a qudit tableau then simulates exactly.
"""

from .circuit import CvCircuit, Primitive
from .dsl import parse, parse_file
from .encoding import EmbeddingParams, encode_basis_state, encode_product_state
from .errors import (
    AliasingError,
    ContradictionError,
    CvStabError,
    GateNotAdmitted,
    MethodTwoInputViolation,
    NonCliffordGate,
    NotProductError,
    ParseError,
    RingMismatchError,
    SqueezingInsufficient,
    TruncationError,
)
from .pipeline import compile_circuit, run, verify
from .program import CliffordProgram, execute, outcome_table, sample
from .tableau import PauliPhaseRing, PauliWord, Tableau, canonicalize, new_zero_state, states_equal

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "CliffordProgram",
    "ContradictionError",
    "CvCircuit",
    "CvStabError",
    "EmbeddingParams",
    "GateNotAdmitted",
    "MethodTwoInputViolation",
    "NonCliffordGate",
    "NotProductError",
    "ParseError",
    "PauliPhaseRing",
    "PauliWord",
    "Primitive",
    "RingMismatchError",
    "SqueezingInsufficient",
    "Tableau",
    "TruncationError",
    "canonicalize",
    "compile_circuit",
    "encode_basis_state",
    "encode_product_state",
    "execute",
    "new_zero_state",
    "outcome_table",
    "parse",
    "parse_file",
    "run",
    "sample",
    "states_equal",
    "verify",
]
