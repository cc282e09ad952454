"""Second-quantized operators and fermion-to-qubit encodings.

Spin-orbital convention: spatial orbital p with spin sigma (0 = alpha/up,
1 = beta/down) is mode p + sigma*M, i.e. the alpha block occupies modes
0..M-1 and the beta block modes M..2M-1.  Mode k maps to qubit k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliTerm, QubitOperator

# a fermionic term is a tuple of (mode, dagger) pairs, applied right-to-left
LadderSeq = tuple[tuple[int, bool], ...]


class ValidationError(ValueError):
    """Input data violates a structural invariant."""


class SymmetryError(RuntimeError):
    """Operator is incompatible with the requested symmetry reduction."""


@dataclass
class IntegralSet:
    """Active-space molecular integrals in chemists' notation.

    e0 carries the nuclear repulsion plus any frozen-core energy; h and eri
    are the (effective) one- and two-body coefficients over the M active
    spatial orbitals; eri[p,r,q,s] = (pr|qs).
    """

    e0: float
    h: np.ndarray
    eri: np.ndarray
    m: int
    n_alpha: int
    n_beta: int
    n_frozen: int = 0
    orbital_irreps: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.eri = np.asarray(self.eri, dtype=float)
        if not self.orbital_irreps:
            self.orbital_irreps = [1] * self.m

    def validate(self, tol: float = 1e-10) -> None:
        if self.h.shape != (self.m, self.m):
            raise ValidationError("one-body shape mismatch")
        if self.eri.shape != (self.m,) * 4:
            raise ValidationError("two-body shape mismatch")
        if np.max(np.abs(self.h - self.h.T)) > tol:
            raise ValidationError("one-body coefficients not symmetric")
        e = self.eri
        for perm in (
            e.transpose(1, 0, 2, 3),
            e.transpose(0, 1, 3, 2),
            e.transpose(2, 3, 0, 1),
        ):
            if np.max(np.abs(e - perm)) > tol:
                raise ValidationError("two-body coefficients lack 8-fold symmetry")


@dataclass
class SymmetrySector:
    """Parity eigenvalues (-1)^{N_up} and (-1)^{N_down}; tapering sector."""

    parity_up: int = 1
    parity_down: int = 1
    z2_eigenvalues: list[int] = field(default_factory=list)

    def __post_init__(self):
        for v in (self.parity_up, self.parity_down, *self.z2_eigenvalues):
            if v not in (1, -1):
                raise ValidationError("sector eigenvalues must be +/-1")

    @classmethod
    def for_counts(cls, n_alpha: int, n_beta: int) -> "SymmetrySector":
        return cls(
            parity_up=1 if n_alpha % 2 == 0 else -1,
            parity_down=1 if n_beta % 2 == 0 else -1,
        )


class FermionOperator:
    """Linear combination of products of creation/annihilation operators."""

    __slots__ = ("n_modes", "terms")

    def __init__(self, n_modes: int, terms: dict[LadderSeq, complex] | None = None):
        self.n_modes = n_modes
        self.terms: dict[LadderSeq, complex] = dict(terms) if terms else {}

    def add_term(self, ops: LadderSeq, coefficient: complex) -> None:
        if abs(coefficient) < 1e-14:
            return
        self.terms[ops] = self.terms.get(ops, 0.0) + coefficient

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        out = FermionOperator(self.n_modes, self.terms)
        for ops, c in other.terms.items():
            out.terms[ops] = out.terms.get(ops, 0.0) + c
        return out

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            out = FermionOperator(self.n_modes)
            for ops1, c1 in self.terms.items():
                for ops2, c2 in other.terms.items():
                    out.add_term(ops1 + ops2, c1 * c2)
            return out
        return FermionOperator(
            self.n_modes, {ops: c * other for ops, c in self.terms.items()}
        )

    __rmul__ = __mul__

    def dagger(self) -> "FermionOperator":
        out = FermionOperator(self.n_modes)
        for ops, c in self.terms.items():
            rev = tuple((mode, not dag) for mode, dag in reversed(ops))
            out.add_term(rev, c.conjugate())
        return out

    def __repr__(self) -> str:
        return f"FermionOperator(n_modes={self.n_modes}, n_terms={len(self.terms)})"


def spin_orbital(p: int, sigma: int, m: int) -> int:
    return p + sigma * m


def build_molecular_hamiltonian(ints: IntegralSet) -> FermionOperator:
    """E0 + sum h_pq a+_ps a_qs + 1/2 sum (pr|qs) a+_ps a+_qt a_st a_rs."""
    ints.validate()
    m = ints.m
    op = FermionOperator(2 * m)
    if ints.e0 != 0.0:
        op.add_term((), ints.e0)
    for p in range(m):
        for q in range(m):
            c = ints.h[p, q]
            if abs(c) < 1e-14:
                continue
            for s in (0, 1):
                op.add_term(
                    ((spin_orbital(p, s, m), True), (spin_orbital(q, s, m), False)), c
                )
    for p in range(m):
        for r in range(m):
            for q in range(m):
                for s in range(m):
                    c = 0.5 * ints.eri[p, r, q, s]
                    if abs(c) < 1e-14:
                        continue
                    for sg in (0, 1):
                        for tu in (0, 1):
                            op.add_term(
                                (
                                    (spin_orbital(p, sg, m), True),
                                    (spin_orbital(q, tu, m), True),
                                    (spin_orbital(s, tu, m), False),
                                    (spin_orbital(r, sg, m), False),
                                ),
                                c,
                            )
    return op


def build_auxiliary_operators(
    m: int, n_frozen: int = 0
) -> tuple[FermionOperator, FermionOperator, FermionOperator]:
    """Number, spin-z, and total-spin operators over M active orbitals.

    S^2 is built as S- S+ + S_z (S_z + 1) with S_z = (N_up - N_down) / 2.
    """
    if m < 1:
        raise ValidationError("need at least one orbital")
    n_op = FermionOperator(2 * m)
    if n_frozen:
        n_op.add_term((), float(n_frozen))
    sz = FermionOperator(2 * m)
    for p in range(m):
        for s in (0, 1):
            mode = spin_orbital(p, s, m)
            n_op.add_term(((mode, True), (mode, False)), 1.0)
            sz.add_term(((mode, True), (mode, False)), 0.5 if s == 0 else -0.5)
    s_minus = FermionOperator(2 * m)
    s_plus = FermionOperator(2 * m)
    for p in range(m):
        s_minus.add_term(((spin_orbital(p, 1, m), True), (spin_orbital(p, 0, m), False)), 1.0)
        s_plus.add_term(((spin_orbital(p, 0, m), True), (spin_orbital(p, 1, m), False)), 1.0)
    one = FermionOperator(2 * m, {(): 1.0})
    s2 = s_minus * s_plus + sz * (sz + one)
    return n_op, sz, s2


# ---------------------------------------------------------------------------
# qubit mappings
# ---------------------------------------------------------------------------


def _jw_ladder(mode: int, dagger: bool, n_q: int) -> QubitOperator:
    below = (1 << mode) - 1
    bit = 1 << mode
    sgn = -0.5j if dagger else 0.5j
    return QubitOperator.from_terms(
        n_q,
        [
            PauliTerm(n_q, bit, below, 0.5),         # X_j Z_{<j}
            PauliTerm(n_q, bit, bit | below, sgn),   # -+ i/2 Y_j Z_{<j}
        ],
    )


def _parity_ladder(mode: int, dagger: bool, n_q: int) -> QubitOperator:
    """a(+)_j = [prod_{k>=j} X_k] (Z_{j-1} -+ Z_j)/2 in the parity basis."""
    flip = ((1 << n_q) - 1) & ~((1 << mode) - 1)  # X on qubits >= mode
    xop = QubitOperator.from_terms(n_q, [PauliTerm(n_q, flip, 0, 1.0)])
    if mode == 0:
        left = QubitOperator.identity(n_q, 0.5)
    else:
        left = QubitOperator.from_terms(n_q, [PauliTerm(n_q, 0, 1 << (mode - 1), 0.5)])
    right = QubitOperator.from_terms(
        n_q, [PauliTerm(n_q, 0, 1 << mode, 0.5 if dagger else -0.5)]
    )
    return xop * (left + right)


_LADDERS = {"jordan_wigner": _jw_ladder, "parity": _parity_ladder}


def map_to_qubits(
    f: FermionOperator, mapping: str = "jordan_wigner", tol: float = 1e-12
) -> QubitOperator:
    if mapping not in _LADDERS:
        raise ValueError(f"unsupported mapping {mapping!r}")
    ladder = _LADDERS[mapping]
    n_q = f.n_modes
    cache: dict[tuple[int, bool], QubitOperator] = {}
    total = QubitOperator.zero(n_q)
    for ops, c in f.terms.items():
        prod = QubitOperator.identity(n_q, c)
        for mode, dag in ops:
            key = (mode, dag)
            if key not in cache:
                cache[key] = ladder(mode, dag, n_q)
            prod = prod * cache[key]
        total = total + prod
    return total.simplify(tol)


def occupation_bits(m: int, n_alpha: int, n_beta: int) -> int:
    """Hartree-Fock occupation bitmask over 2M modes (lowest orbitals filled)."""
    bits = 0
    for p in range(n_alpha):
        bits |= 1 << p
    for p in range(n_beta):
        bits |= 1 << (m + p)
    return bits


def parity_bits(bits: int, n_modes: int) -> int:
    """Occupation bitmask -> parity-basis bitmask (prefix XOR)."""
    out = 0
    acc = 0
    for k in range(n_modes):
        acc ^= (bits >> k) & 1
        out |= acc << k
    return out


def _drop_bits(mask: int, positions: list[int]) -> int:
    """Remove the given bit positions, compacting the remaining bits."""
    out = 0
    shift = 0
    for k in range(mask.bit_length() + 1):
        if k in positions:
            continue
        out |= ((mask >> k) & 1) << shift
        shift += 1
    return out


def two_qubit_reduction(q: QubitOperator, sector: SymmetrySector) -> QubitOperator:
    """Remove the spin-up and total parity qubits of a parity-mapped operator.

    With blocked spin ordering, qubit M-1 carries (-1)^{N_up} and qubit
    2M-1 carries (-1)^{N_up + N_down}; both must appear only as I or Z.
    """
    if q.n_q % 2 != 0 or q.n_q < 2:
        raise ValidationError("parity-mapped operator must act on 2M qubits")
    m = q.n_q // 2
    q_up, q_tot = m - 1, 2 * m - 1
    e_up = sector.parity_up
    e_tot = sector.parity_up * sector.parity_down
    positions = [q_up, q_tot]
    out: dict[tuple[int, int], complex] = {}
    for (x, z), c in q.terms.items():
        if (x >> q_up) & 1 or (x >> q_tot) & 1:
            raise SymmetryError("operator does not conserve the parity qubits")
        if (z >> q_up) & 1:
            c = c * e_up
        if (z >> q_tot) & 1:
            c = c * e_tot
        key = (_drop_bits(x, positions), _drop_bits(z, positions))
        out[key] = out.get(key, 0.0) + c
    return QubitOperator(q.n_q - 2, out).simplify()


# ---------------------------------------------------------------------------
# Z2 tapering
# ---------------------------------------------------------------------------


def _gf2_rref(rows: list[int]) -> list[tuple[int, int]]:
    """Fully reduced GF(2) row echelon form as (pivot bit, row) pairs.

    Pivot = highest set bit; no row contains another row's pivot, so
    pivots are unique to their rows.  Deterministic for sorted input.
    """
    basis: list[tuple[int, int]] = []
    for v in rows:
        for p, b in basis:
            if (v >> p) & 1:
                v ^= b
        if v == 0:
            continue
        p = v.bit_length() - 1
        basis = [(pp, bb ^ v if (bb >> p) & 1 else bb) for pp, bb in basis]
        basis.append((p, v))
    return sorted(basis)


def find_z2_symmetries(q: QubitOperator) -> list[tuple[PauliTerm, int]]:
    """Independent Z-type Pauli symmetries of q with their pivot qubits.

    A Z-string Z^g commutes with every term iff g lies in the GF(2) kernel
    of the stacked term x-masks.  The kernel basis is row-reduced with
    deterministic pivoting; each generator's pivot qubit is returned.
    """
    n = q.n_q
    constraint = _gf2_rref(sorted({x for (x, _z) in q.terms}))
    pivot_cols = {p for p, _row in constraint}
    free_cols = [k for k in range(n) if k not in pivot_cols]
    basis: list[int] = []
    for fc in free_cols:
        g = 1 << fc
        # each reduced row's non-pivot bits touch only free columns
        for col, row in constraint:
            if ((row ^ (1 << col)) & g).bit_count() & 1:
                g |= 1 << col
        basis.append(g)
    result = []
    for col, g in _gf2_rref(sorted(basis)):
        result.append((PauliTerm(n, 0, g, 1.0), col))
    return result


def sector_eigenvalues(
    generators: list[tuple[PauliTerm, int]], bitstring: int
) -> list[int]:
    """Eigenvalue of each Z-string generator on a computational basis state."""
    return [
        1 - 2 * ((gen.z & bitstring).bit_count() & 1) for gen, _pivot in generators
    ]


def taper(
    q: QubitOperator,
    generators: list[tuple[PauliTerm, int]],
    eigenvalues: list[int],
    tol: float = 1e-12,
) -> QubitOperator:
    """Project q onto the Z2 sector given by the generator eigenvalues.

    Each generator tau with pivot qubit p is rotated by the Clifford
    U = (X_p + tau)/sqrt(2); qubit p then carries only I or X and is
    replaced by its sector eigenvalue.
    """
    if len(generators) != len(eigenvalues):
        raise ValidationError("one eigenvalue per generator required")
    n = q.n_q
    work = q
    pivots = []
    for (gen, pivot), _eig in zip(generators, eigenvalues):
        if gen.n_q != n:
            raise ValidationError("generator qubit count mismatch")
        u = QubitOperator.from_terms(
            n,
            [
                PauliTerm(n, 1 << pivot, 0, 1.0 / np.sqrt(2.0)),
                PauliTerm(n, gen.x, gen.z, gen.coefficient / np.sqrt(2.0)),
            ],
        )
        work = (u * work * u).simplify(tol)
        pivots.append(pivot)
    out: dict[tuple[int, int], complex] = {}
    for (x, z), c in work.terms.items():
        for pivot, eig in zip(pivots, eigenvalues):
            if (z >> pivot) & 1:
                raise SymmetryError("residual Z on tapered qubit")
            if (x >> pivot) & 1:
                c = c * eig
        key = (_drop_bits(x, pivots), _drop_bits(z, pivots))
        out[key] = out.get(key, 0.0) + c
    return QubitOperator(n - len(pivots), out).simplify(tol)


# ---------------------------------------------------------------------------
# end-to-end encoding chain
# ---------------------------------------------------------------------------


@dataclass
class EncodedProblem:
    """A molecular problem pushed through one mapping chain."""

    n_q: int
    hamiltonian: QubitOperator
    number: QubitOperator
    spin_z: QubitOperator
    spin_sq: QubitOperator
    hf_bits: int
    mapping: str
    reduced: bool
    tapered: bool
    generators: list[tuple[PauliTerm, int]] = field(default_factory=list)
    z2_eigenvalues: list[int] = field(default_factory=list)
    aux_tapered: bool = True

    def hf_bitstring(self) -> str:
        return "".join(str((self.hf_bits >> k) & 1) for k in range(self.n_q))


def encode_problem(
    ints: IntegralSet,
    mapping: str = "jordan_wigner",
    two_qubit_reduce: bool = False,
    taper_qubits: bool = False,
) -> EncodedProblem:
    """Map Hamiltonian and auxiliary operators through a full chain.

    The tapering sector is the one containing the Hartree-Fock bitstring.
    """
    if two_qubit_reduce and mapping != "parity":
        raise ValidationError("two-qubit reduction requires the parity mapping")
    m = ints.m
    h_f = build_molecular_hamiltonian(ints)
    n_f, sz_f, s2_f = build_auxiliary_operators(m, ints.n_frozen)
    ops = [map_to_qubits(f, mapping) for f in (h_f, n_f, sz_f, s2_f)]
    bits = occupation_bits(m, ints.n_alpha, ints.n_beta)
    if mapping == "parity":
        bits = parity_bits(bits, 2 * m)
    reduced = False
    if two_qubit_reduce:
        sector = SymmetrySector.for_counts(ints.n_alpha, ints.n_beta)
        ops = [two_qubit_reduction(op, sector) for op in ops]
        bits = _drop_bits(bits, [m - 1, 2 * m - 1])
        reduced = True
    generators: list[tuple[PauliTerm, int]] = []
    eigs: list[int] = []
    aux_tapered = True
    tapered = False
    if taper_qubits:
        generators = find_z2_symmetries(ops[0])
        if generators:
            eigs = sector_eigenvalues(generators, bits)
            hq = taper(ops[0], generators, eigs)
            aux = []
            for op in ops[1:]:
                try:
                    aux.append(taper(op, generators, eigs))
                except SymmetryError:
                    aux_tapered = False
                    aux.append(op)
            ops = [hq] + aux
            bits = _drop_bits(bits, [p for _g, p in generators])
            tapered = True
    return EncodedProblem(
        n_q=ops[0].n_q,
        hamiltonian=ops[0],
        number=ops[1],
        spin_z=ops[2],
        spin_sq=ops[3],
        hf_bits=bits,
        mapping=mapping,
        reduced=reduced,
        tapered=tapered,
        generators=generators,
        z2_eigenvalues=eigs,
        aux_tapered=aux_tapered,
    )


# ---------------------------------------------------------------------------
# active-space selection
# ---------------------------------------------------------------------------


def active_space(
    ints: IntegralSet, frozen: list[int], active: list[int]
) -> IntegralSet:
    """Fold frozen closed-shell orbitals into e0/h and restrict to active ones.

    Orbitals in neither list are discarded; they must be unoccupied in the
    reference (an exact restriction for virtuals).
    """
    frozen = sorted(frozen)
    active = sorted(active)
    if set(frozen) & set(active):
        raise ValidationError("frozen and active orbitals overlap")
    if ints.n_alpha != ints.n_beta:
        raise ValidationError("frozen-core folding assumes a closed-shell reference")
    e = ints.eri
    e0 = ints.e0
    for i in frozen:
        e0 += 2.0 * ints.h[i, i]
        for j in frozen:
            e0 += 2.0 * e[i, i, j, j] - e[i, j, j, i]
    na = len(active)
    h_eff = np.zeros((na, na))
    for a_idx, p in enumerate(active):
        for b_idx, q in enumerate(active):
            v = ints.h[p, q]
            for i in frozen:
                v += 2.0 * e[p, q, i, i] - e[p, i, i, q]
            h_eff[a_idx, b_idx] = v
    eri_eff = e[np.ix_(active, active, active, active)]
    n_active_e = ints.n_alpha - len(frozen)
    if n_active_e < 0:
        raise ValidationError("more frozen orbitals than occupied orbitals")
    return IntegralSet(
        e0=e0,
        h=h_eff,
        eri=eri_eff,
        m=na,
        n_alpha=n_active_e,
        n_beta=n_active_e,
        n_frozen=2 * len(frozen) + ints.n_frozen,
        orbital_irreps=[ints.orbital_irreps[p] for p in active],
    )
