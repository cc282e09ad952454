"""Parametrized circuit families and circuit cost accounting.

Families: Y-rotation layers with linear or full CNOT connectivity, the
cascade (identity-at-zero) variant, and Trotterized unitary
coupled-cluster with singles and doubles (restricted or unrestricted).

Frozen conventions (any consistent choice works; these are documented for
reproducibility):
* full-connectivity CNOT pairs are {(i,j): i<j} in lexicographic order,
  control on the lower index;
* cascade ladder C applies CNOT(0,1), CNOT(1,2), ... in that order;
* coupled-cluster excitation blocks are sorted by occupied-then-virtual
  indices; Pauli sub-terms of one generator in lexicographic string order;
* each Trotter step carries its own parameter slots, so appending a step
  at zero leaves the prepared state unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fermion import FermionOperator, IntegralSet, map_to_qubits, spin_orbital
from .pauli import PauliTerm, QubitOperator
from .statevector import CNOT, PAULI_EVOLUTION, RX, RY, Circuit, Gate

RY_LINEAR = "RY_LINEAR"
RY_FULL = "RY_FULL"
CASCADE = "CASCADE"
QUCCSD = "QUCCSD"

RESTRICTED = "RESTRICTED"
UNRESTRICTED = "UNRESTRICTED"
TROTTER1 = "TROTTER1"
SUZUKI2 = "SUZUKI2"
SINGLES_THEN_DOUBLES = "SINGLES_THEN_DOUBLES"
DOUBLES_THEN_SINGLES = "DOUBLES_THEN_SINGLES"


@dataclass
class AnsatzSpec:
    family: str
    n_l: int
    quccsd_flavor: str = RESTRICTED
    product_formula: str = TROTTER1
    ordering: str = SINGLES_THEN_DOUBLES

    def __post_init__(self):
        if self.family == QUCCSD and self.n_l < 1:
            raise ValueError("QUCCSD needs at least one Trotter step")
        if self.family != QUCCSD and self.n_l < 0:
            raise ValueError("layer count must be non-negative")


@dataclass
class CostReport:
    n_q: int
    n_l: int
    d: int
    d_with_prep: int
    n_theta: int
    n_g1: int
    n_g2: int
    n_p: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


# ---------------------------------------------------------------------------
# hardware-efficient families
# ---------------------------------------------------------------------------


def _connectivity(n_q: int, kind: str) -> list[tuple[int, int]]:
    if kind == "linear":
        return [(i, i + 1) for i in range(n_q - 1)]
    if kind == "full":
        return [(i, j) for i in range(n_q) for j in range(i + 1, n_q)]
    raise ValueError(f"unknown connectivity {kind!r}")


def build_ry(n_q: int, n_l: int, connectivity: str = "linear") -> Circuit:
    """Initial RY layer, then n_l x [entangling layer; RY layer]."""
    if n_q < 2:
        raise ValueError("need at least two qubits")
    pairs = _connectivity(n_q, connectivity)
    circ = Circuit(n_q, [], n_q * (n_l + 1))
    slot = 0
    for q in range(n_q):
        circ.ry(q, slot=slot)
        slot += 1
    for _layer in range(n_l):
        for c, t in pairs:
            circ.cnot(c, t)
        for q in range(n_q):
            circ.ry(q, slot=slot)
            slot += 1
    circ.validate()
    return circ


def build_cascade(n_q: int, n_l: int) -> Circuit:
    """Initial RY layer, then n_l x [C; RY; C-dagger; RY]; identity at zero."""
    if n_q < 2:
        raise ValueError("need at least two qubits")
    ladder = [(i, i + 1) for i in range(n_q - 1)]
    circ = Circuit(n_q, [], n_q * (2 * n_l + 1))
    slot = 0
    for q in range(n_q):
        circ.ry(q, slot=slot)
        slot += 1
    for _layer in range(n_l):
        for c, t in ladder:
            circ.cnot(c, t)
        for q in range(n_q):
            circ.ry(q, slot=slot)
            slot += 1
        for c, t in reversed(ladder):
            circ.cnot(c, t)
        for q in range(n_q):
            circ.ry(q, slot=slot)
            slot += 1
    circ.validate()
    return circ


def reference_prep_circuit(n_q: int, bits: int) -> Circuit:
    """RX(pi) on every set bit, preparing a basis state from |0...0>."""
    circ = Circuit(n_q, [], 0)
    for q in range(n_q):
        if (bits >> q) & 1:
            circ.rx(q, angle=float(np.pi))
    return circ


# ---------------------------------------------------------------------------
# q-UCCSD
# ---------------------------------------------------------------------------


@dataclass
class ExcitationList:
    """Independent cluster amplitudes and their fermionic generators."""

    labels: list[tuple]
    generators: list[FermionOperator]
    flavor: str

    @property
    def n_amplitudes(self) -> int:
        return len(self.generators)


def _single_op(i: int, a: int, sigma: int, m: int) -> FermionOperator:
    op = FermionOperator(2 * m)
    op.add_term(((spin_orbital(a, sigma, m), True), (spin_orbital(i, sigma, m), False)), 1.0)
    return op


def _double_op(i, si, j, sj, a, sa, b, sb, m, coeff=1.0) -> FermionOperator:
    op = FermionOperator(2 * m)
    op.add_term(
        (
            (spin_orbital(a, sa, m), True),
            (spin_orbital(b, sb, m), True),
            (spin_orbital(j, sj, m), False),
            (spin_orbital(i, si, m), False),
        ),
        coeff,
    )
    return op


def _restricted_double_generator(
    pair1: tuple[int, int], pair2: tuple[int, int], n_occ: int, m: int
) -> FermionOperator:
    """Spin-adapted double-excitation generator for one independent amplitude.

    The independent amplitude lives on the unordered pair {(i,a),(j,b)};
    the full antisymmetric spin-orbital tensor is reconstructed from the
    closed-shell relations tying the six non-vanishing spin combinations,
    then contracted as sum_{A<B, I<J} t^{AB}_{IJ} a+_A a+_B a_J a_I.
    """
    (i, a), (j, b) = pair1, pair2
    n_virt = m - n_occ
    tt = np.zeros((n_virt, n_virt, n_occ, n_occ))
    tt[a - n_occ, b - n_occ, i, j] = 1.0
    tt[b - n_occ, a - n_occ, j, i] = 1.0

    def t_tilde(aa, bb, ii, jj):
        return tt[aa - n_occ, bb - n_occ, ii, jj]

    def amp(A, B, I, J):
        (aa, sa), (bb, sb) = A, B
        (ii, si), (jj, sj) = I, J
        if sa == sb == si == sj:
            return t_tilde(aa, bb, ii, jj) - t_tilde(aa, bb, jj, ii)
        if sa != sb and si != sj:
            if sa == si and sb == sj:
                return t_tilde(aa, bb, ii, jj)
            if sa == sj and sb == si:
                return -t_tilde(aa, bb, jj, ii)
        return 0.0

    virt_so = [(v, s) for s in (0, 1) for v in range(n_occ, m)]
    occ_so = [(o, s) for s in (0, 1) for o in range(n_occ)]
    op = FermionOperator(2 * m)
    for x1 in range(len(virt_so)):
        for x2 in range(x1 + 1, len(virt_so)):
            for y1 in range(len(occ_so)):
                for y2 in range(y1 + 1, len(occ_so)):
                    A, B = virt_so[x1], virt_so[x2]
                    I, J = occ_so[y1], occ_so[y2]
                    c = amp(A, B, I, J)
                    if abs(c) < 1e-14:
                        continue
                    op = op + _double_op(
                        I[0], I[1], J[0], J[1], A[0], A[1], B[0], B[1], m, c
                    )
    return op


def build_excitations(ints: IntegralSet, flavor: str,
                      ordering: str = SINGLES_THEN_DOUBLES) -> ExcitationList:
    m = ints.m
    if ints.n_alpha != ints.n_beta:
        raise ValueError("coupled-cluster reference must be closed shell")
    n_occ = ints.n_alpha
    occ = range(n_occ)
    virt = range(n_occ, m)
    singles: list[tuple] = []
    s_gens: list[FermionOperator] = []
    doubles: list[tuple] = []
    d_gens: list[FermionOperator] = []
    if flavor == RESTRICTED:
        for i in occ:
            for a in virt:
                singles.append(("s", i, a))
                s_gens.append(_single_op(i, a, 0, m) + _single_op(i, a, 1, m))
        pairs = [(i, a) for i in occ for a in virt]
        for p1 in range(len(pairs)):
            for p2 in range(p1, len(pairs)):
                doubles.append(("d", pairs[p1], pairs[p2]))
                d_gens.append(
                    _restricted_double_generator(pairs[p1], pairs[p2], n_occ, m)
                )
    elif flavor == UNRESTRICTED:
        for i in occ:
            for a in virt:
                for s in (0, 1):
                    singles.append(("s", i, a, s))
                    s_gens.append(_single_op(i, a, s, m))
        for s in (0, 1):
            for i in occ:
                for j in occ:
                    if j <= i:
                        continue
                    for a in virt:
                        for b in virt:
                            if b <= a:
                                continue
                            doubles.append(("d", i, j, a, b, s, s))
                            d_gens.append(_double_op(i, s, j, s, a, s, b, s, m))
        for i in occ:
            for j in occ:
                for a in virt:
                    for b in virt:
                        doubles.append(("d", i, j, a, b, 0, 1))
                        d_gens.append(_double_op(i, 0, j, 1, a, 0, b, 1, m))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    if ordering == SINGLES_THEN_DOUBLES:
        labels, gens = singles + doubles, s_gens + d_gens
    elif ordering == DOUBLES_THEN_SINGLES:
        labels, gens = doubles + singles, d_gens + s_gens
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    return ExcitationList(labels, gens, flavor)


def _generator_paulis(gen: FermionOperator) -> list[PauliTerm]:
    """JW decomposition of gen - gen^dagger = sum_k i b_k sigma_k.

    Returned as unit-coefficient-style PauliTerms carrying c_k = -2 b_k, so
    exp(theta (gen - gen+)) = prod_k exp(-i theta c_k sigma_k / 2) term-wise.
    Lexicographic string order.
    """
    anti = map_to_qubits(gen + (-1.0) * gen.dagger(), "jordan_wigner")
    terms = []
    for t in anti.term_list():
        if abs(t.coefficient.real) > 1e-12:
            raise ValueError("anti-Hermitian generator must map to imaginary coefficients")
        terms.append(PauliTerm(t.n_q, t.x, t.z, -2.0 * t.coefficient.imag))
    return terms


def build_quccsd(ints: IntegralSet, spec: AnsatzSpec,
                 excitations: ExcitationList | None = None) -> Circuit:
    """Trotterized coupled-cluster circuit on 2M Jordan-Wigner qubits.

    Parameter slot (step, mu) holds the per-step amplitude of generator mu;
    a state with total amplitude t for n_l steps uses theta[step, mu] = t/n_l.
    """
    if spec.family != QUCCSD:
        raise ValueError("spec.family must be QUCCSD")
    exc = excitations or build_excitations(ints, spec.quccsd_flavor, spec.ordering)
    n_q = 2 * ints.m
    n_amp = exc.n_amplitudes
    circ = Circuit(n_q, [], spec.n_l * n_amp)
    pauli_lists = [_generator_paulis(g) for g in exc.generators]
    for step in range(spec.n_l):
        base = step * n_amp
        if spec.product_formula == TROTTER1:
            for mu, plist in enumerate(pauli_lists):
                for term in plist:
                    circ.evolution(term, slot=base + mu)
        elif spec.product_formula == SUZUKI2:
            halves = [
                [PauliTerm(t.n_q, t.x, t.z, 0.5 * t.coefficient) for t in plist]
                for plist in pauli_lists
            ]
            for mu, plist in enumerate(halves):
                for term in plist:
                    circ.evolution(term, slot=base + mu)
            for mu in range(n_amp - 1, -1, -1):
                for term in reversed(halves[mu]):
                    circ.evolution(term, slot=base + mu)
        else:
            raise ValueError(f"unknown product formula {spec.product_formula!r}")
    circ.validate()
    return circ


# ---------------------------------------------------------------------------
# warm start and cost
# ---------------------------------------------------------------------------


def warm_start_extend(theta, family: str, n_q: int | None = None,
                      n_amplitudes: int | None = None) -> np.ndarray:
    """Parameters for n_l+1 layers that reuse an n_l-layer optimum.

    For CASCADE and QUCCSD the appended zeros leave the energy exactly
    unchanged (the new layer acts as the identity).  For the RY families
    the appended zero layer follows an entangling layer, so the energy
    generally changes; the extension is still returned for warm starts.
    """
    theta = np.asarray(theta, dtype=float)
    if family in (RY_LINEAR, RY_FULL):
        if n_q is None:
            raise ValueError("RY extension needs n_q")
        return np.concatenate([theta, np.zeros(n_q)])
    if family == CASCADE:
        if n_q is None:
            raise ValueError("cascade extension needs n_q")
        return np.concatenate([theta, np.zeros(2 * n_q)])
    if family == QUCCSD:
        if n_amplitudes is None:
            raise ValueError("QUCCSD extension needs the amplitude count")
        return np.concatenate([theta, np.zeros(n_amplitudes)])
    raise ValueError(f"unknown family {family!r}")


def circuit_cost(circuit: Circuit, hamiltonian: QubitOperator | None = None,
                 prep: Circuit | None = None, n_l: int = 0) -> CostReport:
    """Gate counts and ASAP depth (all-to-all connectivity, no SWAPs).

    Pauli-evolution gates count as single-qubit when their support is one
    qubit, two-qubit otherwise.  Depth is reported both for the bare
    circuit and with the reference-preparation gates prepended.
    """

    def tally(gates: list[Gate], levels: list[int]) -> tuple[int, int]:
        g1 = g2 = 0
        for g in gates:
            if g.kind in (RY, RX) or (g.kind == PAULI_EVOLUTION and len(g.qubits) <= 1):
                g1 += 1
            else:
                g2 += 1
            qs = g.qubits if g.qubits else tuple(range(len(levels)))
            depth = max((levels[q] for q in qs), default=0) + 1
            for q in qs:
                levels[q] = depth
        return g1, g2

    levels = [0] * circuit.n_q
    n_g1, n_g2 = tally(circuit.gates, levels)
    d = max(levels, default=0)
    levels = [0] * circuit.n_q
    if prep is not None:
        tally(prep.gates, levels)
    tally(circuit.gates, levels)
    d_with_prep = max(levels, default=0)
    return CostReport(
        n_q=circuit.n_q,
        n_l=n_l,
        d=d,
        d_with_prep=d_with_prep,
        n_theta=circuit.n_theta,
        n_g1=n_g1,
        n_g2=n_g2,
        n_p=hamiltonian.simplify().n_terms if hamiltonian is not None else 0,
    )


def build_ansatz(family: str, n_q: int, n_l: int) -> Circuit:
    """Dispatch for the hardware-efficient families."""
    if family == RY_LINEAR:
        return build_ry(n_q, n_l, "linear")
    if family == RY_FULL:
        return build_ry(n_q, n_l, "full")
    if family == CASCADE:
        return build_cascade(n_q, n_l)
    raise ValueError(f"unknown hardware-efficient family {family!r}")
