"""Statevector simulator: gates vs. dense unitaries, gradients vs. finite
differences and the parameter-shift rule, backend parity."""

import numpy as np
import pytest
import scipy.linalg

from vqelab import kernels
from vqelab.pauli import PauliTerm, QubitOperator
from vqelab.statevector import (
    Circuit, apply_circuit, apply_operator, expectation, gradient,
    init_reference,
)

from conftest import random_hermitian


def random_circuit(n_q: int, n_theta: int, rng, n_gates: int = 30) -> Circuit:
    """Mixed RY/RX/CNOT/Pauli-evolution circuit with shared parameter slots."""
    circ = Circuit(n_q, [], n_theta)
    for _ in range(n_gates):
        kind = rng.integers(0, 4)
        q = int(rng.integers(0, n_q))
        slot = int(rng.integers(0, n_theta))
        if kind == 0:
            circ.ry(q, slot=slot)
        elif kind == 1:
            circ.rx(q, slot=slot)
        elif kind == 2 and n_q > 1:
            q2 = int(rng.integers(0, n_q))
            if q2 != q:
                circ.cnot(q, q2)
        else:
            label = "".join(rng.choice(list("IXYZ"), size=n_q))
            if set(label) == {"I"}:
                label = "Z" + label[1:]
            circ.evolution(PauliTerm.from_string(float(rng.uniform(0.5, 2.0)),
                                                 label), slot=slot)
    return circ


def random_observable(n_q: int, rng) -> QubitOperator:
    op = QubitOperator(n_q)
    for _ in range(4):
        label = "".join(rng.choice(list("IXYZ"), size=n_q))
        op = op + QubitOperator.from_strings(n_q, [(float(rng.normal()), label)])
    return op


def fd_gradient(circuit, theta, op, ref, h=1e-5):
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    for k in range(theta.size):
        tp, tm = theta.copy(), theta.copy()
        tp[k] += h
        tm[k] -= h
        ep = expectation(apply_circuit(ref, circuit, tp), op)
        em = expectation(apply_circuit(ref, circuit, tm), op)
        grad[k] = (ep - em) / (2.0 * h)
    return grad


def shift_gradient(circuit, theta, op, ref):
    """Parameter-shift rule, applied gate by gate via the chain rule."""
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    for gi, gate in enumerate(circuit.gates):
        if gate.parameter_slot is None:
            continue
        scale = 1.0
        if gate.kind == "EVO":
            scale = gate.pauli.coefficient.real
        for sign in (1.0, -1.0):
            shifted = theta.copy()
            # shift this single gate by altering a cloned circuit's fixed angle
            clone = Circuit(circuit.n_q, list(circuit.gates), circuit.n_theta)
            g = clone.gates[gi]
            from vqelab.statevector import Gate
            clone.gates[gi] = Gate(g.kind, g.qubits, None,
                                   theta[gate.parameter_slot]
                                   + sign * np.pi / (2.0 * scale), g.pauli)
            e = expectation(apply_circuit(ref, clone, shifted), op)
            grad[gate.parameter_slot] += sign * scale * e / 2.0
    return grad


class TestGates:
    def test_init_reference(self):
        s = init_reference(3, "101")
        assert s.amplitudes[0b101] == 1.0
        assert s.norm() == pytest.approx(1.0)

    def test_ry_dense(self):
        th = 0.7
        circ = Circuit(1, [], 1).ry(0, slot=0)
        out = apply_circuit(init_reference(1, "0"), circ, [th])
        want = np.array([np.cos(th / 2), np.sin(th / 2)])
        assert np.abs(out.amplitudes - want).max() < 1e-14

    def test_rx_dense(self):
        th = 1.2
        circ = Circuit(1, [], 1).rx(0, slot=0)
        out = apply_circuit(init_reference(1, "0"), circ, [th])
        want = np.array([np.cos(th / 2), -1j * np.sin(th / 2)])
        assert np.abs(out.amplitudes - want).max() < 1e-14

    def test_cnot(self):
        circ = Circuit(2, [], 0).rx(0, angle=np.pi).cnot(0, 1)
        out = apply_circuit(init_reference(2, "00"), circ, [])
        assert abs(abs(out.amplitudes[0b11]) - 1.0) < 1e-14

    def test_evolution_vs_expm(self):
        rng = np.random.default_rng(5)
        pauli = PauliTerm.from_string(0.8, "XZY")
        circ = Circuit(3, [], 1).evolution(pauli, slot=0)
        th = 0.9
        psi0 = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi0 /= np.linalg.norm(psi0)
        from vqelab.statevector import StateVector
        out = apply_circuit(StateVector(3, psi0.copy()), circ, [th])
        mat = QubitOperator.from_terms(3, [pauli]).to_matrix()
        want = scipy.linalg.expm(-0.5j * th * mat) @ psi0
        assert np.abs(out.amplitudes - want).max() < 1e-12

    def test_apply_operator_matches_dense(self):
        rng = np.random.default_rng(6)
        op = random_observable(3, rng)
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        from vqelab.statevector import StateVector
        got = apply_operator(StateVector(3, psi.copy()), op).amplitudes
        want = op.to_matrix() @ psi
        assert np.abs(got - want).max() < 1e-12

    def test_expectation_matches_dense(self):
        rng = np.random.default_rng(7)
        op = random_observable(2, rng)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        from vqelab.statevector import StateVector
        got = expectation(StateVector(2, psi.copy()), op)
        want = np.real(psi.conj() @ op.to_matrix() @ psi)
        assert got == pytest.approx(want, abs=1e-12)


class TestGradient:
    @pytest.mark.parametrize("seed", range(5))
    def test_adjoint_vs_fd(self, seed):
        rng = np.random.default_rng(200 + seed)
        n_q = int(rng.integers(2, 5))
        n_theta = int(rng.integers(3, 9))
        circ = random_circuit(n_q, n_theta, rng)
        op = random_observable(n_q, rng)
        ref = init_reference(n_q, "0" * n_q)
        theta = rng.uniform(-np.pi, np.pi, n_theta)
        g_adj = gradient(circ, theta, op, ref)
        g_fd = fd_gradient(circ, theta, op, ref)
        assert np.abs(g_adj - g_fd).max() < 1e-6

    @pytest.mark.parametrize("seed", range(3))
    def test_adjoint_vs_parameter_shift(self, seed):
        rng = np.random.default_rng(300 + seed)
        n_q = 3
        circ = random_circuit(n_q, 6, rng, n_gates=15)
        op = random_observable(n_q, rng)
        ref = init_reference(n_q, "0" * n_q)
        theta = rng.uniform(-np.pi, np.pi, 6)
        g_adj = gradient(circ, theta, op, ref)
        g_ps = shift_gradient(circ, theta, op, ref)
        assert np.abs(g_adj - g_ps).max() < 1e-9


class TestCircuitText:
    def test_roundtrip(self):
        rng = np.random.default_rng(8)
        circ = random_circuit(3, 4, rng, n_gates=12)
        again = Circuit.from_text(circ.to_text())
        assert again.to_text() == circ.to_text()
        theta = rng.uniform(-1, 1, 4)
        ref = init_reference(3, "000")
        a = apply_circuit(ref, circ, theta).amplitudes
        b = apply_circuit(ref, again, theta).amplitudes
        assert np.abs(a - b).max() == 0.0


class TestBackends:
    def test_numpy_and_active_backend_agree(self):
        rng = np.random.default_rng(9)
        psi = rng.normal(size=16) + 1j * rng.normal(size=16)
        op = random_observable(4, rng)
        xs, zs, cs = kernels.pack_operator(op)
        a = kernels.apply_operator(psi.copy(), xs, zs, cs)
        b = kernels._np_apply_operator(psi.copy(), xs, zs, cs)
        assert np.abs(a - b).max() < 1e-13
        ea = kernels.expectation(psi.copy(), xs, zs, cs)
        eb = kernels._np_expectation(psi.copy(), xs, zs, cs)
        assert ea == pytest.approx(eb, abs=1e-12)
