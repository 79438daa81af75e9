"""Gate-level quantum-walk circuits on symmetric graphs, checked against arc-space walk operators."""

from ._kernels import BACKEND
from .circuit import (
    Circuit,
    DimensionCapError,
    GateCounts,
    circuit_unitary,
    compose,
    gate_counts,
    run,
)
from .families import Encoding, FamilySpec, build_family, oracle
from .sim import Gate, Register, StateVector, apply_gate, new_basis_state, node_distribution
from .walk import Graph, WalkOperator, simulate_walk, walk_unitary

__all__ = [
    "BACKEND",
    "Circuit",
    "DimensionCapError",
    "Encoding",
    "FamilySpec",
    "Gate",
    "GateCounts",
    "Graph",
    "Register",
    "StateVector",
    "WalkOperator",
    "apply_gate",
    "build_family",
    "circuit_unitary",
    "compose",
    "gate_counts",
    "new_basis_state",
    "node_distribution",
    "oracle",
    "run",
    "simulate_walk",
    "walk_unitary",
]
