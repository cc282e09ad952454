"""Determinant CI: enumeration counts, Slater-Condon matrix vs. dense
qubit-space construction, spin classification, fixture reference energies."""

import math

import numpy as np
import pytest
import scipy.linalg

from vqelab.fci import (
    SectorSpec, build_matrices, enumerate_determinants, fci_ground,
    solve_ground,
)
from vqelab.fermion import build_molecular_hamiltonian, map_to_qubits

from conftest import fixture_geometries, load_ints, random_integrals


def dense_sector(ints):
    """Sector block of the dense Jordan-Wigner Hamiltonian (oracle)."""
    q = map_to_qubits(build_molecular_hamiltonian(ints), "jordan_wigner")
    full = q.to_matrix()
    m = ints.m
    idx = []
    for s in range(1 << (2 * m)):
        na = bin(s & ((1 << m) - 1)).count("1")
        nb = bin(s >> m).count("1")
        if na == ints.n_alpha and nb == ints.n_beta:
            idx.append(s)
    return full[np.ix_(idx, idx)]


class TestEnumeration:
    @pytest.mark.parametrize("m,na,nb", [(2, 1, 1), (3, 1, 1), (3, 2, 1), (5, 3, 3)])
    def test_counts(self, m, na, nb):
        ints = random_integrals(m, na, nb, seed=m * 10 + na)
        dets = enumerate_determinants(ints, SectorSpec(na, nb))
        assert len(dets) == math.comb(m, na) * math.comb(m, nb)

    def test_irrep_filter(self):
        ints = load_ints("H2O", 1)  # active irreps (3, 1, 2, 1, 3)
        total = math.comb(5, 3) ** 2
        by_irrep = [len(enumerate_determinants(
            ints, SectorSpec(ints.n_alpha, ints.n_beta, irrep=k)))
            for k in (1, 2, 3, 4)]
        assert 0 < by_irrep[0] < total
        assert sum(by_irrep) == total


class TestSlaterCondon:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_spectrum_matches_dense_jw(self, seed):
        ints = random_integrals(3, 1, 1, seed=400 + seed)
        dets = enumerate_determinants(ints, SectorSpec(1, 1))
        h_mat, _s2 = build_matrices(dets, ints)
        want = np.sort(scipy.linalg.eigvalsh(dense_sector(ints)))
        got = np.sort(scipy.linalg.eigvalsh(h_mat))
        assert np.abs(got - want).max() < 1e-10

    def test_s2_eigenvalues(self):
        ints = random_integrals(2, 1, 1, seed=410)
        dets = enumerate_determinants(ints, SectorSpec(1, 1))
        _h, s2 = build_matrices(dets, ints)
        vals = np.sort(scipy.linalg.eigvalsh(s2))
        assert np.abs(vals - np.array([0.0, 0.0, 0.0, 2.0])).max() < 1e-12

    def test_s2_commutes_with_h(self):
        ints = random_integrals(3, 2, 1, seed=420)
        dets = enumerate_determinants(ints, SectorSpec(2, 1))
        h_mat, s2 = build_matrices(dets, ints)
        assert np.abs(h_mat @ s2 - s2 @ h_mat).max() < 1e-10


class TestGroundState:
    def test_spin_tiebreak(self):
        # degenerate block: ground picked by lowest <S^2>
        ints = random_integrals(2, 1, 1, seed=430)
        dets = enumerate_determinants(ints, SectorSpec(1, 1))
        h_mat, s2 = build_matrices(dets, ints)
        g = solve_ground(h_mat, s2, n_electrons=2, spin_z=0.0)
        assert g.energy == pytest.approx(scipy.linalg.eigvalsh(h_mat)[0], abs=1e-12)

    @pytest.mark.parametrize("molecule", ["LiH", "H2O"])
    def test_fixture_reference_energies(self, molecule):
        # metadata energies come from an independent brute-force construction
        for geom in fixture_geometries(molecule):
            from vqelab.fcidump import parse_fcidump
            ints = parse_fcidump(geom["path"])
            g = fci_ground(ints)
            assert g.energy == pytest.approx(geom["e_fci_active"], abs=1e-8)
            assert g.number == pytest.approx(ints.n_alpha + ints.n_beta, abs=1e-10)
            assert abs(g.spin_sq) < 1e-8  # closed-shell singlets throughout

    def test_sector_override(self):
        ints = load_ints("LiH", 1)
        triplet = fci_ground(ints, SectorSpec(2, 0))
        singlet = fci_ground(ints)
        assert triplet.energy > singlet.energy
        assert triplet.spin_z == pytest.approx(1.0, abs=1e-10)
