"""Exact noiseless statevector simulation.

Conventions, frozen repo-wide:
* qubit 0 is the least-significant bit of the amplitude index;
* RY/RX apply exp(-i theta sigma / 2);
* PAULI_EVOLUTION applies exp(-i angle * c * sigma / 2) where c is the
  (real) coefficient of the gate's PauliTerm;
* global phase is unspecified and untested.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .pauli import DimensionError, PauliTerm, QubitOperator

RY = "RY"
RX = "RX"
CNOT = "CNOT"
PAULI_EVOLUTION = "EVO"


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    parameter_slot: int | None = None
    fixed_angle: float | None = None
    pauli: PauliTerm | None = None

    def __post_init__(self):
        if self.parameter_slot is not None and self.fixed_angle is not None:
            raise ValueError("parameter_slot and fixed_angle are mutually exclusive")
        if self.kind == PAULI_EVOLUTION:
            if self.pauli is None:
                raise ValueError("EVO gate requires a PauliTerm")
            if abs(self.pauli.coefficient.imag) > 1e-14:
                raise ValueError("EVO coefficient must be real for a unitary gate")


@dataclass
class Circuit:
    n_q: int
    gates: list[Gate] = field(default_factory=list)
    n_theta: int = 0

    def validate(self) -> None:
        for g in self.gates:
            if g.parameter_slot is not None and not (0 <= g.parameter_slot < self.n_theta):
                raise ValueError(f"parameter slot {g.parameter_slot} out of range")
            for q in g.qubits:
                if not (0 <= q < self.n_q):
                    raise ValueError(f"qubit index {q} out of range")

    def ry(self, qubit: int, slot: int | None = None, angle: float | None = None) -> "Circuit":
        self.gates.append(Gate(RY, (qubit,), slot, angle))
        return self

    def rx(self, qubit: int, slot: int | None = None, angle: float | None = None) -> "Circuit":
        self.gates.append(Gate(RX, (qubit,), slot, angle))
        return self

    def cnot(self, control: int, target: int) -> "Circuit":
        self.gates.append(Gate(CNOT, (control, target)))
        return self

    def evolution(self, pauli: PauliTerm, slot: int | None = None,
                  angle: float | None = None) -> "Circuit":
        support = tuple(k for k in range(self.n_q) if (pauli.x | pauli.z) >> k & 1)
        self.gates.append(Gate(PAULI_EVOLUTION, support, slot, angle, pauli))
        return self

    # -- text serialization (round-trip exact) -------------------------

    def to_text(self) -> str:
        lines = [f"CIRCUIT {self.n_q} {self.n_theta}"]
        for g in self.gates:
            ang = "_" if g.parameter_slot is not None else repr(float(g.fixed_angle or 0.0))
            slot = g.parameter_slot if g.parameter_slot is not None else "_"
            if g.kind == CNOT:
                lines.append(f"CNOT {g.qubits[0]} {g.qubits[1]}")
            elif g.kind in (RY, RX):
                lines.append(f"{g.kind} {g.qubits[0]} {slot} {ang}")
            else:
                c = g.pauli.coefficient.real
                lines.append(f"EVO {c!r} {g.pauli.string} {slot} {ang}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        _, n_q_s, n_theta_s = lines[0].split()
        circ = cls(int(n_q_s), [], int(n_theta_s))
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] == "CNOT":
                circ.cnot(int(parts[1]), int(parts[2]))
                continue
            if parts[0] in (RY, RX):
                qubit = int(parts[1])
                slot = None if parts[2] == "_" else int(parts[2])
                ang = None if parts[3] == "_" else float(parts[3])
                circ.gates.append(Gate(parts[0], (qubit,), slot, ang))
            else:
                coeff = float(parts[1])
                term = PauliTerm.from_string(coeff, parts[2])
                slot = None if parts[3] == "_" else int(parts[3])
                ang = None if parts[4] == "_" else float(parts[4])
                circ.evolution(term, slot, ang)
        return circ


class StateVector:
    """Complex amplitude array of length 2^n_q."""

    __slots__ = ("n_q", "amplitudes")

    def __init__(self, n_q: int, amplitudes: np.ndarray | None = None):
        self.n_q = n_q
        if amplitudes is None:
            amplitudes = np.zeros(1 << n_q, dtype=np.complex128)
            amplitudes[0] = 1.0
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if self.amplitudes.size != 1 << n_q:
            raise DimensionError("amplitude length is not 2^n_q")

    def copy(self) -> "StateVector":
        return StateVector(self.n_q, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2

    def dump(self) -> bytes:
        """Little-endian interleaved re/im doubles (debug aid)."""
        return self.amplitudes.astype("<c16").tobytes()


def init_reference(n_q: int, bitstring: str) -> StateVector:
    """Basis state |x>; bitstring character k is the value of qubit k."""
    if len(bitstring) != n_q:
        raise DimensionError("bitstring length does not match qubit count")
    index = 0
    for k, ch in enumerate(bitstring):
        if ch == "1":
            index |= 1 << k
        elif ch != "0":
            raise ValueError(f"invalid bit {ch!r}")
    amps = np.zeros(1 << n_q, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n_q, amps)


def _angle(gate: Gate, theta: np.ndarray) -> float:
    if gate.parameter_slot is not None:
        return float(theta[gate.parameter_slot])
    return float(gate.fixed_angle or 0.0)


def _apply_gate(amp: np.ndarray, gate: Gate, theta: np.ndarray, sign: float = 1.0) -> None:
    if gate.kind == RY:
        kernels.apply_ry(amp, gate.qubits[0], sign * _angle(gate, theta))
    elif gate.kind == RX:
        kernels.apply_rx(amp, gate.qubits[0], sign * _angle(gate, theta))
    elif gate.kind == CNOT:
        kernels.apply_cnot(amp, gate.qubits[0], gate.qubits[1])
    elif gate.kind == PAULI_EVOLUTION:
        phi = sign * _angle(gate, theta) * gate.pauli.coefficient.real
        kernels.apply_pauli_exp(amp, gate.pauli.x, gate.pauli.z, phi)
    else:
        raise ValueError(f"unknown gate kind {gate.kind!r}")


def apply_circuit(state: StateVector, circuit: Circuit, theta) -> StateVector:
    theta = np.asarray(theta, dtype=float)
    if theta.size != circuit.n_theta:
        raise DimensionError(
            f"expected {circuit.n_theta} parameters, got {theta.size}"
        )
    if state.n_q != circuit.n_q:
        raise DimensionError("state/circuit qubit counts differ")
    amp = state.amplitudes.copy()
    for gate in circuit.gates:
        _apply_gate(amp, gate, theta)
    return StateVector(circuit.n_q, amp)


def expectation(state: StateVector, op: QubitOperator, imag_tol: float = 1e-10) -> float:
    if op.n_q != state.n_q:
        raise DimensionError("operator/state qubit counts differ")
    if not op.is_hermitian(1e-10):
        raise ValueError("expectation requires a Hermitian operator")
    xs, zs, coeffs = kernels.pack_operator(op)
    val = kernels.expectation(state.amplitudes, xs, zs, coeffs)
    if abs(val.imag) > imag_tol:
        raise ValueError(f"imaginary residue {val.imag:g} exceeds tolerance")
    return float(val.real)


def apply_operator(state: StateVector, op: QubitOperator) -> StateVector:
    xs, zs, coeffs = kernels.pack_operator(op)
    return StateVector(state.n_q, kernels.apply_operator(state.amplitudes, xs, zs, coeffs))


def gradient(circuit: Circuit, theta, op: QubitOperator,
             reference: StateVector) -> np.ndarray:
    """Analytic dE/dtheta by reverse-sweep (adjoint) differentiation.

    E(theta) = <psi|op|psi> with |psi> = U(theta)|reference>.  Gates sharing
    a parameter slot accumulate via the product rule.
    """
    theta = np.asarray(theta, dtype=float)
    psi = apply_circuit(reference, circuit, theta)
    xs, zs, coeffs = kernels.pack_operator(op)
    phi = kernels.apply_operator(psi.amplitudes, xs, zs, coeffs)
    amp = psi.amplitudes.copy()
    grad = np.zeros(circuit.n_theta, dtype=float)
    for gate in reversed(circuit.gates):
        if gate.parameter_slot is not None:
            if gate.kind == RY:
                x, z, c = 1 << gate.qubits[0], 1 << gate.qubits[0], 1.0
                # sigma(x,z) with x=z=bit is Y
            elif gate.kind == RX:
                x, z, c = 1 << gate.qubits[0], 0, 1.0
            elif gate.kind == PAULI_EVOLUTION:
                x, z, c = gate.pauli.x, gate.pauli.z, gate.pauli.coefficient.real
            else:
                raise ValueError(f"gate kind {gate.kind!r} cannot carry a parameter")
            dpsi = (-0.5j * c) * kernels.apply_pauli(amp, x, z)
            grad[gate.parameter_slot] += 2.0 * np.real(np.vdot(phi, dpsi))
        # undo the gate on both vectors
        _apply_gate(amp, gate, theta, sign=-1.0)
        _apply_gate(phi, gate, theta, sign=-1.0)
    return grad
