#!/usr/bin/env python3
"""Generate bundled FCIDUMP fixtures from scratch.

Self-contained electronic-structure pipeline (independent of the package
under test, except for the FCIDUMP writer): STO-3G integrals via
McMurchie-Davidson recursion, restricted Hartree-Fock with DIIS,
frozen-core active-space reduction, and a brute-force full-CI reference
energy computed by applying the second-quantized Hamiltonian directly to
occupation bitstrings.

Outputs FCIDUMP files plus a metadata.json per molecule under fixtures/.
"""

from __future__ import annotations

import json
import math
import os
import sys

import numpy as np
import scipy.linalg
import scipy.special

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
from vqelab.fcidump import write_fcidump  # noqa: E402
from vqelab.fermion import IntegralSet  # noqa: E402

ANGSTROM = 1.8897259886

# STO-3G: primitive exponents for unit Slater zeta, and contraction
# coefficients over normalized primitives.
STO3G_1S_EXP = np.array([2.227660584, 0.405771156, 0.109818026])
STO3G_1S_COEF = np.array([0.154328967, 0.535328142, 0.444634542])
STO3G_2SP_EXP = np.array([0.994203122, 0.231031243, 0.075138624])
STO3G_2S_COEF = np.array([-0.099967229, 0.399512826, 0.700115469])
STO3G_2P_COEF = np.array([0.155916275, 0.607683719, 0.391957393])

# Slater exponents (zeta) per element and shell
ZETA = {
    "H": {"1s": 1.24},
    "Li": {"1s": 2.69, "2sp": 0.80},
    "O": {"1s": 7.66, "2sp": 2.25},
}
CHARGE = {"H": 1, "Li": 3, "O": 8}


class Shell:
    """One contracted Cartesian Gaussian."""

    def __init__(self, center, lmn, exps, coefs):
        self.center = np.asarray(center, dtype=float)
        self.lmn = tuple(lmn)
        self.exps = np.asarray(exps, dtype=float)
        l = sum(lmn)
        norms = (2.0 * self.exps / np.pi) ** 0.75 * (4.0 * self.exps) ** (l / 2.0)
        dfact = 1.0
        for comp in lmn:
            for k in range(2 * comp - 1, 0, -2):
                dfact *= k
        norms /= math.sqrt(dfact)
        self.coefs = np.asarray(coefs, dtype=float) * norms
        # contracted normalization
        self.coefs /= math.sqrt(_overlap(self, self))


def build_basis(atoms):
    """atoms: list of (symbol, xyz in bohr). Returns shells and AO labels."""
    shells, labels = [], []
    for ai, (sym, xyz) in enumerate(atoms):
        z1 = ZETA[sym]["1s"]
        shells.append(Shell(xyz, (0, 0, 0), STO3G_1S_EXP * z1**2, STO3G_1S_COEF))
        labels.append((ai, sym, "1s"))
        if "2sp" in ZETA[sym]:
            z2 = ZETA[sym]["2sp"]
            exps = STO3G_2SP_EXP * z2**2
            shells.append(Shell(xyz, (0, 0, 0), exps, STO3G_2S_COEF))
            labels.append((ai, sym, "2s"))
            for axis, name in ((0, "2px"), (1, "2py"), (2, "2pz")):
                lmn = [0, 0, 0]
                lmn[axis] = 1
                shells.append(Shell(xyz, tuple(lmn), exps, STO3G_2P_COEF))
                labels.append((ai, sym, name))
    return shells, labels


# --- McMurchie-Davidson primitives -----------------------------------------


def _hermite_e(i, j, t, q_dist, a, b):
    p = a + b
    mu = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-mu * q_dist * q_dist)
    if j == 0:
        return (
            _hermite_e(i - 1, j, t - 1, q_dist, a, b) / (2 * p)
            - mu * q_dist / a * _hermite_e(i - 1, j, t, q_dist, a, b)
            + (t + 1) * _hermite_e(i - 1, j, t + 1, q_dist, a, b)
        )
    return (
        _hermite_e(i, j - 1, t - 1, q_dist, a, b) / (2 * p)
        + mu * q_dist / b * _hermite_e(i, j - 1, t, q_dist, a, b)
        + (t + 1) * _hermite_e(i, j - 1, t + 1, q_dist, a, b)
    )


def _boys(n, x):
    if x < 1e-12:
        return 1.0 / (2 * n + 1)
    return scipy.special.gammainc(n + 0.5, x) * scipy.special.gamma(n + 0.5) \
        / (2.0 * x ** (n + 0.5))


def _hermite_r(t, u, v, n, p, pc, memo=None):
    if memo is None:
        memo = {}
    key = (t, u, v, n)
    if key in memo:
        return memo[key]
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        val = (-2.0 * p) ** n * _boys(n, p * float(pc @ pc))
    elif t > 0:
        val = (t - 1) * _hermite_r(t - 2, u, v, n + 1, p, pc, memo) \
            + pc[0] * _hermite_r(t - 1, u, v, n + 1, p, pc, memo)
    elif u > 0:
        val = (u - 1) * _hermite_r(t, u - 2, v, n + 1, p, pc, memo) \
            + pc[1] * _hermite_r(t, u - 1, v, n + 1, p, pc, memo)
    else:
        val = (v - 1) * _hermite_r(t, u, v - 2, n + 1, p, pc, memo) \
            + pc[2] * _hermite_r(t, u, v - 1, n + 1, p, pc, memo)
    memo[key] = val
    return val


def _prim_overlap(a, lmn1, ra, b, lmn2, rb):
    p = a + b
    pref = (math.pi / p) ** 1.5
    val = pref
    for ax in range(3):
        val *= _hermite_e(lmn1[ax], lmn2[ax], 0, ra[ax] - rb[ax], a, b)
    return val


def _overlap(sh1, sh2):
    total = 0.0
    for a, ca in zip(sh1.exps, sh1.coefs):
        for b, cb in zip(sh2.exps, sh2.coefs):
            total += ca * cb * _prim_overlap(a, sh1.lmn, sh1.center, b, sh2.lmn, sh2.center)
    return total


def _prim_kinetic(a, lmn1, ra, b, lmn2, rb):
    def s1d(ax, di, dj):
        i = lmn1[ax] + di
        j = lmn2[ax] + dj
        if i < 0 or j < 0:
            return 0.0
        return _hermite_e(i, j, 0, ra[ax] - rb[ax], a, b) * math.sqrt(math.pi / (a + b))

    def k1d(ax):
        j = lmn2[ax]
        term = b * (2 * j + 1) * s1d(ax, 0, 0)
        term -= 2.0 * b * b * s1d(ax, 0, 2)
        if j >= 2:
            term -= 0.5 * j * (j - 1) * s1d(ax, 0, -2)
        return term

    sx, sy, sz = s1d(0, 0, 0), s1d(1, 0, 0), s1d(2, 0, 0)
    return k1d(0) * sy * sz + sx * k1d(1) * sz + sx * sy * k1d(2)


def _prim_nuclear(a, lmn1, ra, b, lmn2, rb, rc):
    p = a + b
    centroid = (a * ra + b * rb) / p
    pc = centroid - rc
    memo = {}
    total = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        ex = _hermite_e(lmn1[0], lmn2[0], t, ra[0] - rb[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            ey = _hermite_e(lmn1[1], lmn2[1], u, ra[1] - rb[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                ez = _hermite_e(lmn1[2], lmn2[2], v, ra[2] - rb[2], a, b)
                total += ex * ey * ez * _hermite_r(t, u, v, 0, p, pc, memo)
    return 2.0 * math.pi / p * total


def _prim_eri(a, lmn1, ra, b, lmn2, rb, c, lmn3, rc, d, lmn4, rd):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq = rp - rq
    memo = {}

    def es(l1, l2, ax, ga, gb, r1, r2, t):
        return _hermite_e(l1[ax], l2[ax], t, r1[ax] - r2[ax], ga, gb)

    total = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        e1x = es(lmn1, lmn2, 0, a, b, ra, rb, t)
        for u in range(lmn1[1] + lmn2[1] + 1):
            e1y = es(lmn1, lmn2, 1, a, b, ra, rb, u)
            for v in range(lmn1[2] + lmn2[2] + 1):
                e1z = es(lmn1, lmn2, 2, a, b, ra, rb, v)
                bra = e1x * e1y * e1z
                if bra == 0.0:
                    continue
                for tau in range(lmn3[0] + lmn4[0] + 1):
                    e2x = es(lmn3, lmn4, 0, c, d, rc, rd, tau)
                    for nu in range(lmn3[1] + lmn4[1] + 1):
                        e2y = es(lmn3, lmn4, 1, c, d, rc, rd, nu)
                        for phi in range(lmn3[2] + lmn4[2] + 1):
                            e2z = es(lmn3, lmn4, 2, c, d, rc, rd, phi)
                            ket = e2x * e2y * e2z
                            if ket == 0.0:
                                continue
                            sign = (-1.0) ** (tau + nu + phi)
                            total += bra * ket * sign * _hermite_r(
                                t + tau, u + nu, v + phi, 0, alpha, pq, memo
                            )
    return total * 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))


def integrals(shells, atoms):
    n = len(shells)
    s_mat = np.zeros((n, n))
    t_mat = np.zeros((n, n))
    v_mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s_val = _overlap(shells[i], shells[j])
            t_val = 0.0
            v_val = 0.0
            for a, ca in zip(shells[i].exps, shells[i].coefs):
                for b, cb in zip(shells[j].exps, shells[j].coefs):
                    t_val += ca * cb * _prim_kinetic(
                        a, shells[i].lmn, shells[i].center,
                        b, shells[j].lmn, shells[j].center)
                    for sym, xyz in atoms:
                        v_val -= CHARGE[sym] * ca * cb * _prim_nuclear(
                            a, shells[i].lmn, shells[i].center,
                            b, shells[j].lmn, shells[j].center,
                            np.asarray(xyz, dtype=float))
            s_mat[i, j] = s_mat[j, i] = s_val
            t_mat[i, j] = t_mat[j, i] = t_val
            v_mat[i, j] = v_mat[j, i] = v_val
    eri = np.zeros((n, n, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for pi, (i, j) in enumerate(pairs):
        for k, l in pairs[: pi + 1]:
            val = 0.0
            for a, ca in zip(shells[i].exps, shells[i].coefs):
                for b, cb in zip(shells[j].exps, shells[j].coefs):
                    for c, cc in zip(shells[k].exps, shells[k].coefs):
                        for d, cd in zip(shells[l].exps, shells[l].coefs):
                            val += ca * cb * cc * cd * _prim_eri(
                                a, shells[i].lmn, shells[i].center,
                                b, shells[j].lmn, shells[j].center,
                                c, shells[k].lmn, shells[k].center,
                                d, shells[l].lmn, shells[l].center)
            for (x, y) in ((i, j), (j, i)):
                for (z, w) in ((k, l), (l, k)):
                    eri[x, y, z, w] = val
                    eri[z, w, x, y] = val
    return s_mat, t_mat, v_mat, eri


def nuclear_repulsion(atoms):
    e = 0.0
    for i, (si, ri) in enumerate(atoms):
        for j, (sj, rj) in enumerate(atoms[:i]):
            e += CHARGE[si] * CHARGE[sj] / np.linalg.norm(
                np.asarray(ri) - np.asarray(rj))
    return e


def rhf(s_mat, h_core, eri, n_occ, e_nuc, max_iter=200, tol=1e-11):
    """Closed-shell SCF with DIIS; returns (energy, mo_coeffs, mo_energies)."""
    x = scipy.linalg.fractional_matrix_power(s_mat, -0.5).real
    f = h_core.copy()
    dm = None
    errs, focks = [], []
    energy = 0.0
    for _it in range(max_iter):
        fp = x @ f @ x
        eps, cp = scipy.linalg.eigh(fp)
        c = x @ cp
        occ = c[:, :n_occ]
        dm_new = 2.0 * occ @ occ.T
        j = np.einsum("pqrs,rs->pq", eri, dm_new)
        k = np.einsum("prqs,rs->pq", eri, dm_new)
        f_new = h_core + j - 0.5 * k
        e_new = 0.5 * np.sum(dm_new * (h_core + f_new)) + e_nuc
        err = f_new @ dm_new @ s_mat - s_mat @ dm_new @ f_new
        errs.append(err)
        focks.append(f_new)
        if len(errs) > 8:
            errs.pop(0)
            focks.pop(0)
        converged = dm is not None and np.abs(dm_new - dm).max() < tol
        dm, energy = dm_new, e_new
        if converged:
            return energy, c, eps
        if len(errs) >= 2:
            m = len(errs)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for i in range(m):
                for jj in range(m):
                    b[i, jj] = np.sum(errs[i] * errs[jj])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(b, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, focks))
            except np.linalg.LinAlgError:
                f = f_new
        else:
            f = f_new
    raise RuntimeError("SCF failed to converge")


def mo_integrals(h_core, eri, c):
    h_mo = c.T @ h_core @ c
    eri_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)
    return h_mo, eri_mo


def freeze_core(h_mo, eri_mo, e_nuc, frozen, active):
    e_core = e_nuc
    for i in frozen:
        e_core += 2.0 * h_mo[i, i]
        for j in frozen:
            e_core += 2.0 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i]
    idx = np.asarray(active)
    h_eff = h_mo[np.ix_(idx, idx)].copy()
    for a_i, p in enumerate(active):
        for b_i, q in enumerate(active):
            for i in frozen:
                h_eff[a_i, b_i] += 2.0 * eri_mo[p, q, i, i] - eri_mo[p, i, i, q]
    eri_act = eri_mo[np.ix_(idx, idx, idx, idx)].copy()
    return e_core, h_eff, eri_act


# --- independent brute-force FCI over occupation bitstrings -----------------


def brute_force_fci(e0, h, eri, n_alpha, n_beta):
    """Ground energy by dense diagonalization in the full Fock space.

    The Hamiltonian acts directly on occupation-number bitstrings
    (alpha block = modes 0..M-1), an implementation deliberately separate
    from any Slater-Condon machinery.
    """
    m = h.shape[0]
    n_so = 2 * m
    dim = 1 << n_so

    def apply_ops(ket_states, ops):
        # ops: sequence of (mode, dagger) applied right-to-left
        out = {}
        for state, amp in ket_states.items():
            cur = {state: amp}
            for mode, dag in reversed(ops):
                nxt = {}
                for st, a_ in cur.items():
                    occ = (st >> mode) & 1
                    if dag == occ:
                        continue
                    sign = -1.0 if bin(st & ((1 << mode) - 1)).count("1") % 2 else 1.0
                    nxt[st ^ (1 << mode)] = a_ * sign
                cur = nxt
            for st, a_ in cur.items():
                out[st] = out.get(st, 0.0) + a_
        return out

    sector = [s for s in range(dim)
              if bin(s & ((1 << m) - 1)).count("1") == n_alpha
              and bin(s >> m).count("1") == n_beta]
    pos = {s: i for i, s in enumerate(sector)}
    n_det = len(sector)
    h_mat = np.zeros((n_det, n_det))
    for col, st in enumerate(sector):
        acc = {st: e0}
        for p in range(m):
            for q in range(m):
                if abs(h[p, q]) < 1e-14:
                    continue
                for sp in (0, 1):
                    res = apply_ops({st: h[p, q]},
                                    [(p + sp * m, True), (q + sp * m, False)])
                    for s2, a_ in res.items():
                        acc[s2] = acc.get(s2, 0.0) + a_
        for p in range(m):
            for q in range(m):
                for r in range(m):
                    for s in range(m):
                        val = eri[p, r, q, s]
                        if abs(val) < 1e-14:
                            continue
                        for sp in (0, 1):
                            for tp in (0, 1):
                                res = apply_ops(
                                    {st: 0.5 * val},
                                    [(p + sp * m, True), (q + tp * m, True),
                                     (s + tp * m, False), (r + sp * m, False)])
                                for s2, a_ in res.items():
                                    acc[s2] = acc.get(s2, 0.0) + a_
        for s2, a_ in acc.items():
            if abs(a_) > 1e-14:
                h_mat[pos[s2], col] += a_
    return float(scipy.linalg.eigh(h_mat, eigvals_only=True)[0])


# --- molecule drivers --------------------------------------------------------


def lih_fixture(r_angstrom):
    r = r_angstrom * ANGSTROM
    atoms = [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))]
    shells, labels = build_basis(atoms)
    s_mat, t_mat, v_mat, eri = integrals(shells, atoms)
    h_core = t_mat + v_mat
    e_nuc = nuclear_repulsion(atoms)
    e_scf, c, _eps = rhf(s_mat, h_core, eri, 2, e_nuc)
    h_mo, eri_mo = mo_integrals(h_core, eri, c)
    # sigma orbitals carry no 2px/2py weight; active space = sigma valence
    px_py = [k for k, lab in enumerate(labels) if lab[2] in ("2px", "2py")]
    sigma = [p for p in range(len(labels))
             if np.abs(c[px_py, p]).max() < 1e-6]
    frozen = [sigma[0]]
    active = sigma[1:]
    e_core, h_eff, eri_act = freeze_core(h_mo, eri_mo, e_nuc, frozen, active)
    ints = IntegralSet(e0=e_core, h=h_eff, eri=eri_act, m=len(active),
                       n_alpha=1, n_beta=1, n_frozen=len(frozen),
                       orbital_irreps=[1] * len(active))
    e_fci = brute_force_fci(e_core, h_eff, eri_act, 1, 1)
    return ints, e_scf, e_fci


def h2o_fixture(r_angstrom, angle_deg=104.5):
    r = r_angstrom * ANGSTROM
    half = math.radians(angle_deg) / 2.0
    atoms = [
        ("O", (0.0, 0.0, 0.0)),
        ("H", (0.0, r * math.sin(half), r * math.cos(half))),
        ("H", (0.0, -r * math.sin(half), r * math.cos(half))),
    ]
    shells, labels = build_basis(atoms)
    s_mat, t_mat, v_mat, eri = integrals(shells, atoms)
    h_core = t_mat + v_mat
    e_nuc = nuclear_repulsion(atoms)
    e_scf, c, _eps = rhf(s_mat, h_core, eri, 5, e_nuc)
    h_mo, eri_mo = mo_integrals(h_core, eri, c)
    frozen = [0, 1]
    active = [2, 3, 4, 5, 6]
    e_core, h_eff, eri_act = freeze_core(h_mo, eri_mo, e_nuc, frozen, active)
    irreps = _c2v_irreps(c, labels, active)
    ints = IntegralSet(e0=e_core, h=h_eff, eri=eri_act, m=len(active),
                       n_alpha=3, n_beta=3, n_frozen=len(frozen),
                       orbital_irreps=irreps)
    e_fci = brute_force_fci(e_core, h_eff, eri_act, 3, 3)
    return ints, e_scf, e_fci


def _c2v_irreps(c, labels, active):
    """A1=1, B1=2 (x-antisymmetric), B2=3 (y-antisymmetric), A2=4.

    Molecule lies in the yz plane with the C2 axis along z; characters are
    read from MO coefficients under sigma_v(yz): x -> -x and
    sigma_v'(xz): y -> -y with the two hydrogens swapping.
    """
    n = len(labels)
    perm_yz = np.zeros((n, n))  # x -> -x: flips 2px, keeps atoms
    perm_xz = np.zeros((n, n))  # y -> -y: flips 2py, swaps H atoms
    h_atoms = sorted({lab[0] for lab in labels if lab[1] == "H"})
    swap = {h_atoms[0]: h_atoms[1], h_atoms[1]: h_atoms[0]} if len(h_atoms) == 2 else {}
    for k, (ai, _sym, name) in enumerate(labels):
        perm_yz[k, k] = -1.0 if name == "2px" else 1.0
        target_atom = swap.get(ai, ai)
        k2 = next(idx for idx, lab in enumerate(labels)
                  if lab[0] == target_atom and lab[2] == name)
        perm_xz[k2, k] = -1.0 if name == "2py" else 1.0
    irreps = []
    for p in active:
        vec = c[:, p]
        chi_yz = _character(perm_yz @ vec, vec)
        chi_xz = _character(perm_xz @ vec, vec)
        if chi_yz > 0 and chi_xz > 0:
            irreps.append(1)  # a1
        elif chi_yz < 0 and chi_xz > 0:
            irreps.append(2)  # b1
        elif chi_yz > 0 and chi_xz < 0:
            irreps.append(3)  # b2
        else:
            irreps.append(4)  # a2
    return irreps


def _character(transformed, vec):
    sign = float(np.sign(transformed @ vec))
    if abs(np.abs(transformed @ vec) / (vec @ vec) - 1.0) > 1e-6:
        raise RuntimeError("orbital is not a symmetry eigenfunction")
    return sign


LIH_CURVE = [1.3, 1.6, 1.9, 2.2, 2.5, 2.8, 3.1, 3.4, 3.7]
H2O_CURVE = [0.80, 0.958, 1.10, 1.40, 1.80, 2.20, 2.60]


def main():
    out_root = os.path.join(os.path.dirname(__file__), "..", "fixtures")
    for mol, curve, maker in (
        ("LiH", LIH_CURVE, lih_fixture),
        ("H2O", H2O_CURVE, h2o_fixture),
    ):
        mol_dir = os.path.join(out_root, mol)
        os.makedirs(mol_dir, exist_ok=True)
        meta = {"molecule": mol, "basis": "STO-3G", "geometries": []}
        for r in curve:
            try:
                ints, e_scf, e_fci = maker(r)
            except RuntimeError as exc:
                print(f"{mol} R={r}: skipped ({exc})")
                continue
            fname = f"{mol.lower()}_r{r:.3f}.fcidump"
            write_fcidump(ints, os.path.join(mol_dir, fname))
            meta["geometries"].append({
                "r": r,
                "fcidump": fname,
                "e_scf": e_scf,
                "e_fci_active": e_fci,
                "m": ints.m,
                "n_alpha": ints.n_alpha,
                "n_beta": ints.n_beta,
                "n_frozen": ints.n_frozen,
                "orbsym": ints.orbital_irreps,
            })
            print(f"{mol} R={r:.3f}  E_SCF={e_scf:.8f}  E_FCI={e_fci:.8f}  M={ints.m}")
        with open(os.path.join(mol_dir, "metadata.json"), "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


if __name__ == "__main__":
    main()
