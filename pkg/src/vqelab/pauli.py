"""Exact algebra of Pauli-string linear combinations.

Pauli strings are stored symplectically as two integer bitmasks (x, z):
qubit k carries X if bit k of x is set, Z if bit k of z is set, Y if both.
The string corresponds to the Hermitian operator

    sigma(x, z) = i^{popcount(x & z)} X^x Z^z

which reproduces the usual I/X/Y/Z tensor (Y = i X Z).  Qubit 0 is the
least-significant bit of the amplitude index, everywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_XZ_TO_CHAR = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}

DEFAULT_MATRIX_CAP = 14
DEFAULT_TOL = 1e-12


class DimensionError(ValueError):
    """Operands act on incompatible qubit counts."""


class ResourceError(RuntimeError):
    """A dense realization would exceed the configured qubit cap."""


def string_to_masks(label: str) -> tuple[int, int]:
    """Convert an I/X/Y/Z string (index k = qubit k) to (x, z) bitmasks."""
    x = z = 0
    for k, ch in enumerate(label):
        try:
            xb, zb = _CHAR_TO_XZ[ch]
        except KeyError:
            raise ValueError(f"invalid Pauli character {ch!r} in {label!r}") from None
        x |= xb << k
        z |= zb << k
    return x, z


def masks_to_string(x: int, z: int, n_q: int) -> str:
    return "".join(_XZ_TO_CHAR[((x >> k) & 1, (z >> k) & 1)] for k in range(n_q))


@dataclass(frozen=True)
class PauliTerm:
    """A single weighted Pauli string on n_q qubits."""

    n_q: int
    x: int
    z: int
    coefficient: complex

    @classmethod
    def from_string(cls, coefficient: complex, label: str) -> "PauliTerm":
        x, z = string_to_masks(label)
        return cls(len(label), x, z, complex(coefficient))

    @property
    def string(self) -> str:
        return masks_to_string(self.x, self.z, self.n_q)

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return (self.x | self.z).bit_count()

    def __mul__(self, other: "PauliTerm") -> "PauliTerm":
        return mul_pauli(self, other)


def mul_pauli(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Product of two Pauli terms with the exact global phase.

    sigma(x1,z1) sigma(x2,z2) = i^p sigma(x1^x2, z1^z2) with
    p = |x1&z1| + |x2&z2| - |x3&z3| + 2|z1&x2|  (mod 4).
    """
    if a.n_q != b.n_q:
        raise DimensionError(f"qubit counts differ: {a.n_q} != {b.n_q}")
    x3 = a.x ^ b.x
    z3 = a.z ^ b.z
    p = (
        (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (a.z & b.x).bit_count()
    ) % 4
    return PauliTerm(a.n_q, x3, z3, a.coefficient * b.coefficient * _I_POW[p])


class QubitOperator:
    """Weighted sum of Pauli strings, keyed by (x, z) masks.

    Instances are treated as immutable after construction; all arithmetic
    returns new operators.
    """

    __slots__ = ("n_q", "terms")

    def __init__(self, n_q: int, terms: dict[tuple[int, int], complex] | None = None):
        self.n_q = n_q
        self.terms: dict[tuple[int, int], complex] = dict(terms) if terms else {}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n_q: int) -> "QubitOperator":
        return cls(n_q)

    @classmethod
    def identity(cls, n_q: int, coefficient: complex = 1.0) -> "QubitOperator":
        return cls(n_q, {(0, 0): complex(coefficient)})

    @classmethod
    def from_terms(cls, n_q: int, terms: list[PauliTerm]) -> "QubitOperator":
        op = cls(n_q)
        for t in terms:
            if t.n_q != n_q:
                raise DimensionError("term length does not match operator qubit count")
            key = (t.x, t.z)
            op.terms[key] = op.terms.get(key, 0.0) + t.coefficient
        return op

    @classmethod
    def from_strings(cls, n_q: int, pairs: list[tuple[complex, str]]) -> "QubitOperator":
        return cls.from_terms(n_q, [PauliTerm.from_string(c, s) for c, s in pairs])

    def term_list(self) -> list[PauliTerm]:
        return [PauliTerm(self.n_q, x, z, c) for (x, z), c in sorted(self.terms.items())]

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    # -- algebra ------------------------------------------------------

    def __add__(self, other: "QubitOperator") -> "QubitOperator":
        if self.n_q != other.n_q:
            raise DimensionError("qubit counts differ")
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0.0) + c
        return QubitOperator(self.n_q, out)

    def __sub__(self, other: "QubitOperator") -> "QubitOperator":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, QubitOperator):
            if self.n_q != other.n_q:
                raise DimensionError("qubit counts differ")
            out: dict[tuple[int, int], complex] = {}
            for (x1, z1), c1 in self.terms.items():
                px1z1 = (x1 & z1).bit_count()
                for (x2, z2), c2 in other.terms.items():
                    x3 = x1 ^ x2
                    z3 = z1 ^ z2
                    p = (
                        px1z1
                        + (x2 & z2).bit_count()
                        - (x3 & z3).bit_count()
                        + 2 * (z1 & x2).bit_count()
                    ) % 4
                    key = (x3, z3)
                    out[key] = out.get(key, 0.0) + c1 * c2 * _I_POW[p]
            return QubitOperator(self.n_q, out)
        return QubitOperator(self.n_q, {k: c * other for k, c in self.terms.items()})

    __rmul__ = __mul__

    def dagger(self) -> "QubitOperator":
        return QubitOperator(self.n_q, {k: c.conjugate() for k, c in self.terms.items()})

    def simplify(self, tol: float = DEFAULT_TOL) -> "QubitOperator":
        """Drop terms with |coefficient| <= tol (like terms are already merged)."""
        if tol < 0:
            raise ValueError("tol must be >= 0")
        return QubitOperator(
            self.n_q, {k: c for k, c in self.terms.items() if abs(c) > tol}
        )

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def norm(self) -> float:
        """Sum of absolute coefficients."""
        return sum(abs(c) for c in self.terms.values())

    # -- dense realization --------------------------------------------

    def to_matrix(self, cap: int = DEFAULT_MATRIX_CAP) -> np.ndarray:
        if self.n_q > cap:
            raise ResourceError(f"dense matrix for n_q={self.n_q} exceeds cap {cap}")
        dim = 1 << self.n_q
        m = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim)
        for (x, z), c in self.terms.items():
            phase = _I_POW[(x & z).bit_count() % 4]
            signs = 1.0 - 2.0 * (np.bitwise_count(cols & z) & 1)
            m[cols ^ x, cols] += c * phase * signs
        return m

    # -- serialization ------------------------------------------------

    def to_text(self) -> str:
        """One term per line: coefficient<TAB>pauli-string, bit-exact."""
        lines = []
        for (x, z), c in sorted(self.terms.items()):
            coeff = repr(c.real) if c.imag == 0.0 else repr(complex(c))
            lines.append(f"{coeff}\t{masks_to_string(x, z, self.n_q)}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n_q: int | None = None) -> "QubitOperator":
        pairs = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            coeff_s, label = line.split("\t")
            pairs.append((complex(coeff_s), label))
        if n_q is None:
            if not pairs:
                raise ValueError("cannot infer qubit count from empty text")
            n_q = len(pairs[0][1])
        return cls.from_strings(n_q, pairs)

    def __repr__(self) -> str:
        return f"QubitOperator(n_q={self.n_q}, n_terms={self.n_terms})"


def commutator(a: QubitOperator, b: QubitOperator, tol: float = DEFAULT_TOL) -> QubitOperator:
    """[a, b] = ab - ba, simplified."""
    if a.n_q != b.n_q:
        raise DimensionError("qubit counts differ")
    return (a * b - b * a).simplify(tol)


def from_matrix(
    m: np.ndarray, n_q: int, hermitian_tol: float = 1e-10, drop_tol: float = DEFAULT_TOL
) -> QubitOperator:
    """Hilbert-Schmidt expansion of a Hermitian matrix into Pauli strings.

    Coefficients are Tr[sigma m] / 2^n_q; traces are evaluated without
    materializing the Pauli matrices.
    """
    dim = 1 << n_q
    m = np.asarray(m, dtype=complex)
    if m.shape != (dim, dim):
        raise DimensionError(f"expected shape {(dim, dim)}, got {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > hermitian_tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    cols = np.arange(dim)
    terms: dict[tuple[int, int], complex] = {}
    inv = 1.0 / dim
    for x in range(dim):
        mx = m[cols, cols ^ x]
        for z in range(dim):
            phase = _I_POW[(x & z).bit_count() % 4]
            signs = 1.0 - 2.0 * (np.bitwise_count(cols & z) & 1)
            c = phase * np.dot(signs, mx) * inv
            if abs(c) > drop_tol:
                terms[(x, z)] = c
    return QubitOperator(n_q, terms)
