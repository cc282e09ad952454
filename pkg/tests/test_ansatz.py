"""Ansatz construction: circuit layouts, cost accounting, coupled-cluster
generators checked against dense exponentials and symmetry operators."""

import numpy as np
import pytest
import scipy.linalg

from vqelab.ansatz import (
    CASCADE, DOUBLES_THEN_SINGLES, QUCCSD, RESTRICTED, RY_FULL, RY_LINEAR,
    SUZUKI2, TROTTER1, UNRESTRICTED, AnsatzSpec, build_ansatz, build_cascade,
    build_excitations, build_quccsd, build_ry, circuit_cost,
    reference_prep_circuit, warm_start_extend,
)
from vqelab.fcidump import parse_fcidump
from vqelab.fermion import (
    build_auxiliary_operators, build_molecular_hamiltonian, encode_problem,
    map_to_qubits, occupation_bits,
)
from vqelab.pauli import QubitOperator
from vqelab.statevector import StateVector, apply_circuit, expectation, init_reference

from conftest import fixture_geometries, load_ints, random_integrals
from test_fermion import dense_fermion


def quccsd_state_dense(ints, theta, spec):
    """Oracle: per-step, per-term dense Pauli exponentials in circuit order."""
    circuit = build_quccsd(ints, spec)
    n_q = circuit.n_q
    psi = np.zeros(1 << n_q, dtype=complex)
    psi[occupation_bits(ints.m, ints.n_alpha, ints.n_beta)] = 1.0
    for gate in circuit.gates:
        if gate.kind == "EVO":
            mat = QubitOperator.from_terms(
                n_q, [gate.pauli.with_coefficient(1.0)
                      if hasattr(gate.pauli, "with_coefficient")
                      else gate.pauli]).to_matrix()
            # gate applies exp(-i * angle * c * P / 2)
            c = gate.pauli.coefficient.real
            mat = mat / gate.pauli.coefficient  # unit-coefficient Pauli matrix
            psi = scipy.linalg.expm(-0.5j * theta[gate.parameter_slot] * c * mat) @ psi
        else:
            raise AssertionError("q-UCCSD circuits contain only evolutions")
    return psi


class TestHardwareEfficient:
    def test_ry_linear_layout(self):
        circ = build_ry(4, 3, "linear")
        assert circ.n_theta == 4 * (3 + 1)
        kinds = [g.kind for g in circ.gates]
        assert kinds.count("CNOT") == 3 * 3
        assert kinds.count("RY") == 16

    def test_ry_full_layout(self):
        circ = build_ry(4, 2, "full")
        kinds = [g.kind for g in circ.gates]
        assert kinds.count("CNOT") == 2 * 6  # C(4,2) per layer

    def test_cascade_layout(self):
        circ = build_cascade(4, 2)
        kinds = [g.kind for g in circ.gates]
        assert circ.n_theta == 4 + 2 * 2 * 4
        assert kinds.count("CNOT") == 2 * 2 * 3

    @pytest.mark.parametrize("n_q,n_l", [(2, 1), (3, 2), (5, 3)])
    def test_cascade_identity_at_zero(self, n_q, n_l):
        circ = build_cascade(n_q, n_l)
        ref = init_reference(n_q, "0" * n_q)
        out = apply_circuit(ref, circ, np.zeros(circ.n_theta))
        assert out.fidelity(ref) == pytest.approx(1.0, abs=1e-12)

    def test_reference_prep(self):
        circ = reference_prep_circuit(4, 0b0101)
        out = apply_circuit(init_reference(4, "0000"), circ, [])
        assert abs(abs(out.amplitudes[0b0101]) - 1.0) < 1e-12

    def test_build_ansatz_rejects_quccsd(self):
        with pytest.raises(ValueError):
            build_ansatz(QUCCSD, 4, 2)


class TestCostTable:
    # rows frozen from the second-quantization resource table
    # (n_theta exact for all families; n_g2 exact for linear and cascade)
    @pytest.mark.parametrize("molecule,family,n_l,n_theta,n_g2", [
        ("H2O", RY_LINEAR, 8, 54, 40),
        ("H2O", CASCADE, 4, 54, 40),
        ("LiH", RY_FULL, 3, 16, None),
        ("LiH", RY_LINEAR, 3, 16, 9),
        ("LiH", CASCADE, 2, 20, 12),
    ])
    def test_reference_rows(self, molecule, family, n_l, n_theta, n_g2):
        ints = load_ints(molecule, 1)
        taper = molecule == "H2O"
        enc = encode_problem(ints, "parity", True, taper)
        circ = build_ansatz(family, enc.n_q, n_l)
        prep = reference_prep_circuit(enc.n_q, enc.hf_bits)
        rep = circuit_cost(circ, enc.hamiltonian, prep, n_l)
        assert rep.n_theta == n_theta
        assert rep.n_g1 == n_theta
        if n_g2 is not None:
            assert rep.n_g2 == n_g2

    def test_depth_is_asap(self):
        # one CNOT on (0,1) and one on (2,3) schedule in the same moment
        from vqelab.statevector import Circuit
        circ = Circuit(4, [], 0).cnot(0, 1).cnot(2, 3)
        rep = circuit_cost(circ)
        assert rep.d == 1

    def test_pauli_terms_counted(self):
        ints = load_ints("LiH", 1)
        enc = encode_problem(ints, "parity", True, False)
        circ = build_ansatz(RY_LINEAR, enc.n_q, 1)
        rep = circuit_cost(circ, enc.hamiltonian, None, 1)
        assert rep.n_p == len(enc.hamiltonian.term_list())


class TestExcitations:
    def test_restricted_count_m3(self, toy_m3):
        exc = build_excitations(toy_m3, RESTRICTED, "SINGLES_THEN_DOUBLES")
        assert exc.n_amplitudes == 5  # 2 singles + 3 pair doubles

    def test_unrestricted_count_m3(self, toy_m3):
        exc = build_excitations(toy_m3, UNRESTRICTED, "SINGLES_THEN_DOUBLES")
        assert exc.n_amplitudes == 8

    @pytest.mark.parametrize("flavor", [RESTRICTED, UNRESTRICTED])
    def test_generators_commute_with_number_and_sz(self, toy_m3, flavor):
        n_f, sz_f, s2_f = build_auxiliary_operators(toy_m3.m)
        n_mat = dense_fermion(n_f)
        sz_mat = dense_fermion(sz_f)
        exc = build_excitations(toy_m3, flavor, "SINGLES_THEN_DOUBLES")
        for gen in exc.generators:
            g = dense_fermion(gen)
            assert np.abs(g @ n_mat - n_mat @ g).max() < 1e-12
            assert np.abs(g @ sz_mat - sz_mat @ g).max() < 1e-12

    def test_restricted_generators_commute_with_s2(self, toy_m3):
        _n, _sz, s2_f = build_auxiliary_operators(toy_m3.m)
        s2_mat = dense_fermion(s2_f)
        exc = build_excitations(toy_m3, RESTRICTED, "SINGLES_THEN_DOUBLES")
        for gen in exc.generators:
            g = dense_fermion(gen)
            assert np.abs(g @ s2_mat - s2_mat @ g).max() < 1e-12

    def test_ordering(self, toy_m3):
        sd = build_excitations(toy_m3, RESTRICTED, "SINGLES_THEN_DOUBLES")
        ds = build_excitations(toy_m3, RESTRICTED, DOUBLES_THEN_SINGLES)
        assert sd.labels[0][0] == "s" and sd.labels[-1][0] == "d"
        assert ds.labels[0][0] == "d" and ds.labels[-1][0] == "s"
        assert sorted(map(str, sd.labels)) == sorted(map(str, ds.labels))


class TestQuccsdCircuit:
    def test_circuit_matches_term_ordered_exponentials(self, toy_m3):
        spec = AnsatzSpec(QUCCSD, 1)
        circ = build_quccsd(toy_m3, spec)
        rng = np.random.default_rng(21)
        theta = rng.uniform(-0.3, 0.3, circ.n_theta)
        ref = init_reference(circ.n_q, format(
            occupation_bits(toy_m3.m, 1, 1), f"0{circ.n_q}b")[::-1])
        got = apply_circuit(ref, circ, theta).amplitudes
        want = quccsd_state_dense(toy_m3, theta, spec)
        assert np.abs(got - want).max() < 1e-12

    def test_trotter1_exact_at_m2(self, toy_m2):
        # every sub-term of every 2-orbital restricted generator commutes,
        # so one Trotter step equals the exact exponential
        spec = AnsatzSpec(QUCCSD, 1)
        circ = build_quccsd(toy_m2, spec)
        exc = build_excitations(toy_m2, RESTRICTED, "SINGLES_THEN_DOUBLES")
        rng = np.random.default_rng(22)
        theta = rng.uniform(-0.5, 0.5, circ.n_theta)
        ref = init_reference(circ.n_q, format(
            occupation_bits(2, 1, 1), f"0{circ.n_q}b")[::-1])
        got = apply_circuit(ref, circ, theta).amplitudes
        want = ref.amplitudes.copy()
        for t, g in zip(theta, exc.generators):
            anti = dense_fermion(g) - dense_fermion(g.dagger())
            want = scipy.linalg.expm(t * anti) @ want
        assert np.abs(got - want).max() < 1e-10

    def test_suzuki2_slots(self, toy_m3):
        t1 = build_quccsd(toy_m3, AnsatzSpec(QUCCSD, 2, product_formula=TROTTER1))
        s2 = build_quccsd(toy_m3, AnsatzSpec(QUCCSD, 2, product_formula=SUZUKI2))
        assert t1.n_theta == s2.n_theta == 2 * 5
        assert len(s2.gates) == 2 * len(t1.gates)

    def test_reaches_fci_m2(self, toy_m2):
        from vqelab.fci import fci_ground
        from vqelab.vqe import minimize
        enc = encode_problem(toy_m2, "jordan_wigner")
        circ = build_quccsd(toy_m2, AnsatzSpec(QUCCSD, 1))
        ref = init_reference(circ.n_q, enc.hf_bitstring())
        res = minimize(circ, enc.hamiltonian, np.zeros(circ.n_theta), ref)
        assert res.e_vqe == pytest.approx(fci_ground(toy_m2).energy, abs=1e-9)


class TestWarmStartExtend:
    def test_cascade_energy_preserved(self, toy_m2):
        enc = encode_problem(toy_m2, "parity", True, False)
        rng = np.random.default_rng(23)
        c1 = build_cascade(enc.n_q, 1)
        theta1 = rng.uniform(-1, 1, c1.n_theta)
        c2 = build_cascade(enc.n_q, 2)
        theta2 = warm_start_extend(theta1, CASCADE, n_q=enc.n_q)
        assert theta2.size == c2.n_theta
        ref = init_reference(enc.n_q, enc.hf_bitstring())
        e1 = expectation(apply_circuit(ref, c1, theta1), enc.hamiltonian)
        e2 = expectation(apply_circuit(ref, c2, theta2), enc.hamiltonian)
        assert e2 == pytest.approx(e1, abs=1e-12)

    def test_quccsd_energy_preserved(self, toy_m2):
        enc = encode_problem(toy_m2, "jordan_wigner")
        rng = np.random.default_rng(24)
        c1 = build_quccsd(toy_m2, AnsatzSpec(QUCCSD, 1))
        theta1 = rng.uniform(-0.4, 0.4, c1.n_theta)
        c2 = build_quccsd(toy_m2, AnsatzSpec(QUCCSD, 2))
        theta2 = warm_start_extend(theta1, QUCCSD, n_amplitudes=2)
        ref = init_reference(c1.n_q, enc.hf_bitstring())
        e1 = expectation(apply_circuit(ref, c1, theta1), enc.hamiltonian)
        e2 = expectation(apply_circuit(ref, c2, theta2), enc.hamiltonian)
        assert e2 == pytest.approx(e1, abs=1e-12)
