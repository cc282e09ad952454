"""Exact diagonalization oracle over Slater determinants.

Determinants are pairs of occupation bitmasks over M spatial orbitals.
Phase conventions match the blocked spin-orbital ordering of
:mod:`vqelab.fermion` (alpha modes 0..M-1 before beta modes M..2M-1),
so matrices built here agree with dense Jordan-Wigner realizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .fermion import IntegralSet

DENSE_CUTOFF = 4096


@dataclass(frozen=True, order=True)
class Determinant:
    alpha_occ: int
    beta_occ: int

    def spin_orbital_bits(self, m: int) -> int:
        return self.alpha_occ | (self.beta_occ << m)


@dataclass
class SectorSpec:
    n_alpha: int
    n_beta: int
    irrep: int = 1


def _irrep_product(occ: int, irreps: list[int]) -> int:
    """XOR product of irrep labels (Molpro convention: label-1 is a bitmask)."""
    acc = 0
    k = occ
    while k:
        b = k & (-k)
        acc ^= irreps[b.bit_length() - 1] - 1
        k ^= b
    return acc + 1


def determinant_irrep(det: Determinant, irreps: list[int]) -> int:
    a = _irrep_product(det.alpha_occ, irreps) - 1
    b = _irrep_product(det.beta_occ, irreps) - 1
    return (a ^ b) + 1


def enumerate_determinants(ints: IntegralSet, sector: SectorSpec) -> list[Determinant]:
    """All determinants in the (N_alpha, N_beta, irrep) sector, sorted."""
    m = ints.m
    if sector.n_alpha > m or sector.n_beta > m:
        raise ValueError("electron count exceeds orbital count")
    irreps = ints.orbital_irreps
    if sector.irrep < 1 or sector.irrep > 8:
        raise ValueError(f"unknown irrep label {sector.irrep}")
    alphas = [sum(1 << i for i in occ) for occ in combinations(range(m), sector.n_alpha)]
    betas = [sum(1 << i for i in occ) for occ in combinations(range(m), sector.n_beta)]
    dets = [
        Determinant(a, b)
        for a in alphas
        for b in betas
        if determinant_irrep(Determinant(a, b), irreps) == sector.irrep
    ]
    return sorted(dets)


# ---------------------------------------------------------------------------
# Slater-Condon rules
# ---------------------------------------------------------------------------


def _occ_list(mask: int) -> list[int]:
    out = []
    while mask:
        b = mask & (-mask)
        out.append(b.bit_length() - 1)
        mask ^= b
    return out


def _excitation_sign(bits: int, hole: int, particle: int) -> int:
    """Sign of a_particle^+ a_hole applied to occupation bitmask `bits`."""
    lo, hi = (hole, particle) if hole < particle else (particle, hole)
    between = bits & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1 if between.bit_count() & 1 else 1


def _spin_orbital_integrals(ints: IntegralSet) -> tuple[np.ndarray, np.ndarray]:
    """(h_so, <PQ||RS>) over 2M spin orbitals in blocked ordering."""
    m = ints.m
    n = 2 * m
    h_so = np.zeros((n, n))
    h_so[:m, :m] = ints.h
    h_so[m:, m:] = ints.h
    # <PQ|RS> = (pr|qs) with spin deltas sigma_P=sigma_R, sigma_Q=sigma_S
    g = np.zeros((n, n, n, n))
    pr = ints.eri.transpose(0, 2, 1, 3)  # pr[p,q,r,s] = (pr|qs) -> <pq|rs>
    for s1 in (0, 1):
        for s2 in (0, 1):
            sl1 = slice(s1 * m, s1 * m + m)
            sl2 = slice(s2 * m, s2 * m + m)
            g[sl1, sl2, sl1, sl2] = pr
    anti = g - g.transpose(0, 1, 3, 2)
    return h_so, anti


def build_matrices(
    dets: list[Determinant], ints: IntegralSet
) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonian and S^2 matrices in the determinant basis."""
    if not dets:
        raise ValueError("determinant list is empty")
    m = ints.m
    h_so, anti = _spin_orbital_integrals(ints)
    n = len(dets)
    bits = [d.spin_orbital_bits(m) for d in dets]
    index = {b: i for i, b in enumerate(bits)}
    h_mat = np.zeros((n, n))

    for i, bi in enumerate(bits):
        occ = _occ_list(bi)
        # diagonal
        diag = ints.e0 + sum(h_so[k, k] for k in occ)
        for a_i, k in enumerate(occ):
            for l in occ[a_i + 1 :]:
                diag += anti[k, l, k, l]
        h_mat[i, i] = diag
        # single excitations k -> l
        for k in occ:
            for l in range(2 * m):
                if (bi >> l) & 1 or (k < m) != (l < m):
                    continue
                bj = bi ^ (1 << k) ^ (1 << l)
                j = index.get(bj)
                if j is None or j < i:
                    continue
                sign = _excitation_sign(bi, k, l)
                val = h_so[k, l] + sum(anti[k, o, l, o] for o in occ if o != k)
                h_mat[i, j] += sign * val
                h_mat[j, i] += sign * val
        # double excitations (k1,k2) -> (l1,l2)
        for a_i, k1 in enumerate(occ):
            for k2 in occ[a_i + 1 :]:
                for l1 in range(2 * m):
                    if (bi >> l1) & 1:
                        continue
                    for l2 in range(l1 + 1, 2 * m):
                        if (bi >> l2) & 1:
                            continue
                        # spin conservation per spin channel
                        na_removed = (k1 < m) + (k2 < m)
                        na_added = (l1 < m) + (l2 < m)
                        if na_removed != na_added:
                            continue
                        bj = bi ^ (1 << k1) ^ (1 << k2) ^ (1 << l1) ^ (1 << l2)
                        j = index.get(bj)
                        if j is None or j < i:
                            continue
                        sign = _double_excitation_sign(bi, k1, k2, l1, l2)
                        val = sign * anti[k1, k2, l1, l2]
                        h_mat[i, j] += val
                        h_mat[j, i] += val

    s2_mat = _build_s2(dets, m, index)
    return h_mat, s2_mat


def _double_excitation_sign(bits: int, k1: int, k2: int, l1: int, l2: int) -> int:
    """Sign of a_l2^+ a_l1^+ a_k2 a_k1 mapping <bits| to the excited det.

    Computed by sequentially annihilating k1, k2 then creating l1, l2 with
    bitmask parity phases; matches <D_i|...|D_j> with the pair convention
    k1<k2, l1<l2 of the Slater-Condon double rule.
    """
    sign = 1
    b = bits
    for k in (k1, k2):
        below = b & ((1 << k) - 1)
        if below.bit_count() & 1:
            sign = -sign
        b ^= 1 << k
    for l in (l2, l1):
        below = b & ((1 << l) - 1)
        if below.bit_count() & 1:
            sign = -sign
        b ^= 1 << l
    return sign


def _build_s2(dets: list[Determinant], m: int, index: dict[int, int]) -> np.ndarray:
    """S^2 = S- S+ + S_z (S_z + 1) applied directly to determinants."""
    n = len(dets)
    s2 = np.zeros((n, n))
    for i, det in enumerate(dets):
        na = det.alpha_occ.bit_count()
        nb = det.beta_occ.bit_count()
        sz = 0.5 * (na - nb)
        s2[i, i] += sz * (sz + 1.0)
        bi = det.spin_orbital_bits(m)
        # S+ = sum_q a+_{q alpha} a_{q beta}; S- = sum_p a+_{p beta} a_{p alpha}
        for q in range(m):
            if not (det.beta_occ >> q) & 1:
                continue
            b1 = bi
            sign1 = 1
            # annihilate q beta
            kb = q + m
            if (b1 & ((1 << kb) - 1)).bit_count() & 1:
                sign1 = -sign1
            b1 ^= 1 << kb
            # create q alpha
            if (b1 >> q) & 1:
                continue
            if (b1 & ((1 << q) - 1)).bit_count() & 1:
                sign1 = -sign1
            b1 ^= 1 << q
            for p in range(m):
                b2 = b1
                sign2 = sign1
                # annihilate p alpha
                if not (b2 >> p) & 1:
                    continue
                if (b2 & ((1 << p) - 1)).bit_count() & 1:
                    sign2 = -sign2
                b2 ^= 1 << p
                # create p beta
                pb = p + m
                if (b2 >> pb) & 1:
                    continue
                if (b2 & ((1 << pb) - 1)).bit_count() & 1:
                    sign2 = -sign2
                b2 ^= 1 << pb
                j = index.get(b2)
                if j is not None:
                    s2[j, i] += sign2
    return s2


@dataclass
class GroundState:
    energy: float
    number: float
    spin_z: float
    spin_sq: float
    vector: np.ndarray


def solve_ground(
    h_mat: np.ndarray,
    s2_mat: np.ndarray,
    n_electrons: float,
    spin_z: float,
    degeneracy_tol: float = 1e-9,
) -> GroundState:
    """Lowest eigenpair; ties broken by the lowest <S^2> in the degenerate span.

    Particle number and S_z are sector constants in this basis and are
    passed through for reporting.
    """
    n = h_mat.shape[0]
    if n <= DENSE_CUTOFF:
        vals, vecs = scipy.linalg.eigh(h_mat)
    else:
        vals, vecs = scipy.sparse.linalg.eigsh(h_mat, k=6, which="SA")
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    e0 = vals[0]
    degenerate = np.where(vals <= e0 + degeneracy_tol)[0]
    if degenerate.size > 1:
        sub = vecs[:, degenerate]
        s2_sub = sub.T @ s2_mat @ sub
        s2_sub = 0.5 * (s2_sub + s2_sub.T)
        sv, sw = scipy.linalg.eigh(s2_sub)
        vec = sub @ sw[:, 0]
    else:
        vec = vecs[:, 0]
    vec = np.asarray(vec, dtype=float)
    vec /= np.linalg.norm(vec)
    s2_val = float(vec @ s2_mat @ vec)
    return GroundState(
        energy=float(vec @ h_mat @ vec),
        number=float(n_electrons),
        spin_z=float(spin_z),
        spin_sq=s2_val,
        vector=vec,
    )


def fci_ground(ints: IntegralSet, sector: SectorSpec | None = None) -> GroundState:
    """Convenience wrapper: enumerate, build, solve for one integral set."""
    if sector is None:
        sector = SectorSpec(ints.n_alpha, ints.n_beta)
    dets = enumerate_determinants(ints, sector)
    h_mat, s2_mat = build_matrices(dets, ints)
    n_e = sector.n_alpha + sector.n_beta + ints.n_frozen
    sz = 0.5 * (sector.n_alpha - sector.n_beta)
    return solve_ground(h_mat, s2_mat, n_e, sz)
