"""Statevector gate kernels.

Two interchangeable backends:

* numba ``@njit`` kernels (default when numba imports cleanly), and
* pure-numpy vectorized fallbacks.

Set the environment variable ``VQELAB_NUMBA=0`` before import to force the
numpy path; ``vqelab.kernels.BACKEND`` records which one is active.
Amplitude index convention: qubit k is bit k of the index.
"""

from __future__ import annotations

import os

import numpy as np

_want_numba = os.environ.get("VQELAB_NUMBA", "1") != "0"

if _want_numba:
    try:
        from numba import njit

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        BACKEND = "numpy"
else:
    BACKEND = "numpy"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _np_apply_ry(amp: np.ndarray, qubit: int, theta: float) -> None:
    bit = 1 << qubit
    idx = np.arange(amp.size)
    lo = idx[(idx & bit) == 0]
    hi = lo | bit
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    a = amp[lo].copy()
    b = amp[hi]
    amp[lo] = c * a - s * b
    amp[hi] = s * a + c * b


def _np_apply_rx(amp: np.ndarray, qubit: int, theta: float) -> None:
    bit = 1 << qubit
    idx = np.arange(amp.size)
    lo = idx[(idx & bit) == 0]
    hi = lo | bit
    c = np.cos(theta / 2.0)
    s = -1j * np.sin(theta / 2.0)
    a = amp[lo].copy()
    b = amp[hi]
    amp[lo] = c * a + s * b
    amp[hi] = s * a + c * b


def _np_apply_cnot(amp: np.ndarray, control: int, target: int) -> None:
    cbit = 1 << control
    tbit = 1 << target
    idx = np.arange(amp.size)
    lo = idx[((idx & cbit) != 0) & ((idx & tbit) == 0)]
    hi = lo | tbit
    amp[lo], amp[hi] = amp[hi].copy(), amp[lo].copy()


def _np_apply_pauli(amp: np.ndarray, x: int, z: int) -> np.ndarray:
    """Return sigma(x, z) @ amp for the Hermitian string sigma."""
    idx = np.arange(amp.size)
    yph = 1j ** ((x & z).bit_count() % 4)
    signs = 1.0 - 2.0 * (np.bitwise_count((idx ^ x) & z) & 1)
    return yph * signs * amp[idx ^ x]


def _np_apply_pauli_exp(amp: np.ndarray, x: int, z: int, theta: float) -> None:
    """In-place exp(-i theta sigma / 2) using sigma^2 = I."""
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    sig = _np_apply_pauli(amp, x, z)
    amp *= c
    amp -= 1j * s * sig


def _np_expectation(
    amp: np.ndarray, xs: np.ndarray, zs: np.ndarray, coeffs: np.ndarray
) -> complex:
    """<amp| sum_i coeffs[i] sigma(xs[i], zs[i]) |amp>; coeffs include i^|x&z|."""
    idx = np.arange(amp.size)
    conj = amp.conj()
    total = 0.0 + 0.0j
    for x, z, c in zip(xs, zs, coeffs):
        signs = 1.0 - 2.0 * (np.bitwise_count((idx ^ int(x)) & int(z)) & 1)
        total += c * np.dot(conj, signs * amp[idx ^ int(x)])
    return complex(total)


def _np_apply_operator(
    amp: np.ndarray, xs: np.ndarray, zs: np.ndarray, coeffs: np.ndarray
) -> np.ndarray:
    idx = np.arange(amp.size)
    out = np.zeros_like(amp)
    for x, z, c in zip(xs, zs, coeffs):
        signs = 1.0 - 2.0 * (np.bitwise_count((idx ^ int(x)) & int(z)) & 1)
        out += c * signs * amp[idx ^ int(x)]
    return out


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if BACKEND == "numba":

    @njit(cache=True, inline="always")
    def _parity(v):
        v ^= v >> 32
        v ^= v >> 16
        v ^= v >> 8
        v ^= v >> 4
        v ^= v >> 2
        v ^= v >> 1
        return v & 1

    @njit(cache=True)
    def _nb_apply_ry(amp, qubit, theta):
        bit = 1 << qubit
        c = np.cos(theta / 2.0)
        s = np.sin(theta / 2.0)
        n = amp.size
        for j in range(n):
            if j & bit == 0:
                k = j | bit
                a = amp[j]
                b = amp[k]
                amp[j] = c * a - s * b
                amp[k] = s * a + c * b

    @njit(cache=True)
    def _nb_apply_rx(amp, qubit, theta):
        bit = 1 << qubit
        c = np.cos(theta / 2.0)
        s = -1j * np.sin(theta / 2.0)
        n = amp.size
        for j in range(n):
            if j & bit == 0:
                k = j | bit
                a = amp[j]
                b = amp[k]
                amp[j] = c * a + s * b
                amp[k] = s * a + c * b

    @njit(cache=True)
    def _nb_apply_cnot(amp, control, target):
        cbit = 1 << control
        tbit = 1 << target
        n = amp.size
        for j in range(n):
            if (j & cbit) != 0 and (j & tbit) == 0:
                k = j | tbit
                tmp = amp[j]
                amp[j] = amp[k]
                amp[k] = tmp

    @njit(cache=True)
    def _nb_apply_pauli(amp, x, z, yph):
        n = amp.size
        out = np.empty_like(amp)
        for j in range(n):
            sgn = 1.0 - 2.0 * _parity((j ^ x) & z)
            out[j] = yph * sgn * amp[j ^ x]
        return out

    @njit(cache=True)
    def _nb_apply_pauli_exp(amp, x, z, yph, theta):
        c = np.cos(theta / 2.0)
        ms = -1j * np.sin(theta / 2.0) * yph
        n = amp.size
        if x == 0:
            for j in range(n):
                sgn = 1.0 - 2.0 * _parity(j & z)
                amp[j] = (c + ms * sgn) * amp[j]
        else:
            pivot = x & (-x)
            for j in range(n):
                if j & pivot == 0:
                    k = j ^ x
                    sj = 1.0 - 2.0 * _parity(k & z)
                    sk = 1.0 - 2.0 * _parity(j & z)
                    a = amp[j]
                    b = amp[k]
                    amp[j] = c * a + ms * sj * b
                    amp[k] = c * b + ms * sk * a

    @njit(cache=True)
    def _nb_expectation(amp, xs, zs, coeffs):
        n = amp.size
        total = 0.0 + 0.0j
        for t in range(xs.size):
            x = xs[t]
            z = zs[t]
            acc = 0.0 + 0.0j
            for j in range(n):
                sgn = 1.0 - 2.0 * _parity((j ^ x) & z)
                acc += np.conj(amp[j]) * sgn * amp[j ^ x]
            total += coeffs[t] * acc
        return total

    @njit(cache=True)
    def _nb_apply_operator(amp, xs, zs, coeffs):
        n = amp.size
        out = np.zeros_like(amp)
        for t in range(xs.size):
            x = xs[t]
            z = zs[t]
            c = coeffs[t]
            for j in range(n):
                sgn = 1.0 - 2.0 * _parity((j ^ x) & z)
                out[j] += c * sgn * amp[j ^ x]
        return out

    apply_ry = _nb_apply_ry
    apply_rx = _nb_apply_rx
    apply_cnot = _nb_apply_cnot

    def apply_pauli(amp, x, z):
        yph = 1j ** ((x & z).bit_count() % 4)
        return _nb_apply_pauli(amp, np.int64(x), np.int64(z), yph)

    def apply_pauli_exp(amp, x, z, theta):
        yph = 1j ** ((x & z).bit_count() % 4)
        _nb_apply_pauli_exp(amp, np.int64(x), np.int64(z), yph, theta)

    def expectation(amp, xs, zs, coeffs):
        return complex(_nb_expectation(amp, xs, zs, coeffs))

    apply_operator = _nb_apply_operator

else:
    apply_ry = _np_apply_ry
    apply_rx = _np_apply_rx
    apply_cnot = _np_apply_cnot
    apply_pauli = _np_apply_pauli
    apply_pauli_exp = _np_apply_pauli_exp
    expectation = _np_expectation
    apply_operator = _np_apply_operator


def pack_operator(op) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten a QubitOperator into (xs, zs, coeffs) arrays for the kernels.

    The i^|x&z| phase of each string is folded into the coefficient, so the
    kernels only track (-1)^{z.j} signs and index flips.
    """
    n = op.n_terms
    xs = np.empty(n, dtype=np.int64)
    zs = np.empty(n, dtype=np.int64)
    coeffs = np.empty(n, dtype=np.complex128)
    for i, ((x, z), c) in enumerate(sorted(op.terms.items())):
        xs[i] = x
        zs[i] = z
        coeffs[i] = c * 1j ** ((x & z).bit_count() % 4)
    return xs, zs, coeffs
