"""Exact-simulation laboratory for hardware-efficient VQE ansatz diagnostics."""

__version__ = "0.1.0"

from .ansatz import (
    CASCADE,
    QUCCSD,
    RY_FULL,
    RY_LINEAR,
    AnsatzSpec,
    build_ansatz,
    build_excitations,
    build_quccsd,
    circuit_cost,
)
from .fci import SectorSpec, fci_ground
from .fcidump import parse_fcidump, write_fcidump
from .fermion import FermionOperator, IntegralSet, encode_problem, map_to_qubits
from .firstq import build_csf_basis, pad, project_hamiltonian, trim
from .pauli import PauliTerm, QubitOperator, from_matrix
from .statevector import Circuit, StateVector, apply_circuit, init_reference
from .vqe import GeometryPoint, ScanConfig, detect_cusps, minimize, scan_curve

__all__ = [
    "__version__",
    "CASCADE", "QUCCSD", "RY_FULL", "RY_LINEAR",
    "AnsatzSpec", "build_ansatz", "build_excitations", "build_quccsd",
    "circuit_cost",
    "SectorSpec", "fci_ground",
    "parse_fcidump", "write_fcidump",
    "FermionOperator", "IntegralSet", "encode_problem", "map_to_qubits",
    "build_csf_basis", "pad", "project_hamiltonian", "trim",
    "PauliTerm", "QubitOperator", "from_matrix",
    "Circuit", "StateVector", "apply_circuit", "init_reference",
    "GeometryPoint", "ScanConfig", "detect_cusps", "minimize", "scan_curve",
]
