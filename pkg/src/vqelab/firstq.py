"""First-quantization encoding over configuration state functions.

The spin-adapted (singlet) eigenvectors of the determinant-basis S^2
matrix span the physical subspace.  The Hamiltonian projected into that
span is a dense K x K matrix, reduced to qubit form either by trimming
(discarding weakly-occupied basis functions) or by padding (embedding
into 2^n_q dimensions with a high-energy unphysical block plus a
projector that tracks leakage out of the physical subspace).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .kernels import apply_operator as _kernel_apply, pack_operator
from .pauli import QubitOperator, from_matrix
from .statevector import StateVector

DEFAULT_PADDING_ENERGY = 1.0e4
SINGLET_TOL = 1e-8
NORM_FLOOR = 1e-12


class SubspaceError(ValueError):
    """No usable physical subspace (no singlets, or degenerate projection)."""


class PaddingError(ValueError):
    """Padding energy too close to the physical spectrum."""


@dataclass
class CsfBasis:
    """Orthonormal singlet configuration state functions over determinants.

    coefficients has shape (n_c, K): column mu is CSF phi_mu expanded in
    the determinant basis.  Ordering is deterministic: ascending diagonal
    energy <phi_mu|H|phi_mu>, lexicographic tiebreak, sign fixed by the
    largest-magnitude entry.
    """

    coefficients: np.ndarray
    spin_eigenvalues: np.ndarray

    @property
    def k(self) -> int:
        return self.coefficients.shape[1]

    @property
    def n_c(self) -> int:
        return self.coefficients.shape[0]

    @property
    def n_q(self) -> int:
        return max(1, math.ceil(math.log2(self.k)))

    def validate(self) -> None:
        c = self.coefficients
        if np.abs(c.T @ c - np.eye(self.k)).max() > 1e-10:
            raise SubspaceError("basis columns are not orthonormal")
        if np.abs(self.spin_eigenvalues).max() > SINGLET_TOL:
            raise SubspaceError("a retained basis function is not a singlet")


@dataclass
class PaddedProblem:
    """Qubit embedding J = diag(H~, lambda I) with projector Pi = diag(1, 0)."""

    j_op: QubitOperator
    pi_op: QubitOperator
    padding_energy: float
    k: int
    n_q: int


def build_csf_basis(h_mat: np.ndarray, s2_mat: np.ndarray) -> CsfBasis:
    """Singlet eigenvectors of S^2, orthonormalized and deterministically ordered.

    Eigensolvers return arbitrary bases inside the (highly degenerate)
    zero-eigenvalue subspace, so the block is re-fixed by column-pivoted QR
    before the energy sort.
    """
    s2_mat = np.asarray(s2_mat, dtype=float)
    vals, vecs = scipy.linalg.eigh(s2_mat)
    mask = np.abs(vals) <= SINGLET_TOL
    if not mask.any():
        raise SubspaceError("sector contains no singlet states")
    block = vecs[:, mask]
    q, _r, _piv = scipy.linalg.qr(block, mode="economic", pivoting=True)
    diag = np.einsum("im,ij,jm->m", q, h_mat, q)
    keys = [
        (round(diag[m], 10), tuple(np.round(q[:, m], 10)))
        for m in range(q.shape[1])
    ]
    order = sorted(range(q.shape[1]), key=lambda m: keys[m])
    q = q[:, order]
    for m in range(q.shape[1]):
        pivot = np.argmax(np.abs(q[:, m]))
        if q[pivot, m] < 0:
            q[:, m] = -q[:, m]
    spins = np.array([float(q[:, m] @ s2_mat @ q[:, m]) for m in range(q.shape[1])])
    basis = CsfBasis(q, spins)
    basis.validate()
    return basis


def project_hamiltonian(h_mat: np.ndarray, basis: CsfBasis) -> np.ndarray:
    basis.validate()
    c = basis.coefficients
    h_tilde = c.T @ np.asarray(h_mat, dtype=float) @ c
    return 0.5 * (h_tilde + h_tilde.T)


@dataclass
class TrimResult:
    matrix: np.ndarray
    kept: list[int]
    energy_error: float


def trim(h_tilde: np.ndarray, n_q: int | None = None) -> TrimResult:
    """Keep the 2^(n_q-1) basis functions dominating the ground state.

    The retained indices are those with the largest |c_mu| in the ground
    eigenvector; the energy error (trimmed minus untrimmed ground energy)
    is non-negative by eigenvalue interlacing.
    """
    h_tilde = np.asarray(h_tilde, dtype=float)
    k = h_tilde.shape[0]
    if n_q is None:
        n_q = max(1, math.ceil(math.log2(k)))
    if k & (k - 1) == 0:
        return TrimResult(h_tilde.copy(), list(range(k)), 0.0)
    target = 1 << (n_q - 1)
    if not (target < k < (1 << n_q)):
        raise ValueError(f"K={k} outside the trimmable range for n_q={n_q}")
    vals, vecs = scipy.linalg.eigh(h_tilde)
    ground = vecs[:, 0]
    kept = sorted(np.argsort(-np.abs(ground))[:target].tolist())
    sub = h_tilde[np.ix_(kept, kept)]
    error = float(scipy.linalg.eigh(sub, eigvals_only=True)[0] - vals[0])
    return TrimResult(sub, kept, error)


def pad(h_tilde: np.ndarray, padding_energy: float = DEFAULT_PADDING_ENERGY,
        matrix_tol: float = 1e-12) -> PaddedProblem:
    h_tilde = np.asarray(h_tilde, dtype=float)
    k = h_tilde.shape[0]
    n_q = max(1, math.ceil(math.log2(k)))
    top = float(scipy.linalg.eigh(h_tilde, eigvals_only=True)[-1])
    if padding_energy <= top + 1.0:
        raise PaddingError(
            f"padding energy {padding_energy} is within 1 hartree of the "
            f"spectral maximum {top}"
        )
    dim = 1 << n_q
    j_mat = np.eye(dim) * padding_energy
    j_mat[:k, :k] = h_tilde
    pi_mat = np.zeros((dim, dim))
    pi_mat[:k, :k] = np.eye(k)
    j_op = from_matrix(j_mat, n_q, drop_tol=matrix_tol)
    pi_op = from_matrix(pi_mat, n_q, drop_tol=matrix_tol)
    return PaddedProblem(j_op, pi_op, padding_energy, k, n_q)


VAP = "VAP"
PAV = "PAV"


def projected_objective(state: StateVector, problem: PaddedProblem,
                        mode: str = VAP) -> tuple[float, float]:
    """Optimization objective and physical norm P = <Pi>.

    VAP: the projected Rayleigh quotient <Pi J Pi> / <Pi> is optimized.
    PAV: the raw <J> is optimized; the physical energy is still read out
    with :func:`projected_energy` afterwards.
    """
    psi = state.amplitudes
    phi = _kernel_apply(psi, *pack_operator(problem.pi_op))
    p = float(np.real(np.vdot(psi, phi)))
    if mode == VAP:
        if p < NORM_FLOOR:
            raise SubspaceError(
                "state lies (numerically) entirely outside the physical subspace"
            )
        jphi = _kernel_apply(phi, *pack_operator(problem.j_op))
        return float(np.real(np.vdot(phi, jphi))) / p, p
    if mode == PAV:
        jpsi = _kernel_apply(psi, *pack_operator(problem.j_op))
        return float(np.real(np.vdot(psi, jpsi))), p
    raise ValueError(f"unknown mode {mode!r}")


def projected_energy(state: StateVector, problem: PaddedProblem) -> tuple[float, float]:
    """Physical energy <Pi J Pi>/<Pi> and norm P, for reporting in either mode."""
    return projected_objective(state, problem, VAP)


def export_csf_basis(basis: CsfBasis) -> str:
    """Plain-text column-major dump with a (K, n_c) header line."""
    lines = [f"CSF {basis.k} {basis.n_c}"]
    for m in range(basis.k):
        lines.extend(repr(float(v)) for v in basis.coefficients[:, m])
    return "\n".join(lines) + "\n"


def import_csf_basis(text: str, spin_eigenvalues: np.ndarray | None = None) -> CsfBasis:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    _tag, k_s, n_c_s = lines[0].split()
    k, n_c = int(k_s), int(n_c_s)
    flat = np.array([float(v) for v in lines[1:]])
    if flat.size != k * n_c:
        raise ValueError("CSF payload size mismatch")
    coeffs = flat.reshape(k, n_c).T
    if spin_eigenvalues is None:
        spin_eigenvalues = np.zeros(k)
    return CsfBasis(coeffs, np.asarray(spin_eigenvalues, dtype=float))
