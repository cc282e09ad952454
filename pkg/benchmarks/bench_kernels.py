#!/usr/bin/env python3
"""Benchmark the numba statevector kernels against the pure-numpy fallbacks.

The active backend is chosen at import time via the ``VQELAB_NUMBA``
environment variable; when numba is active this script times both the
compiled kernels and the ``_np_*`` reference implementations in one
process and reports the speedup.  Run with ``VQELAB_NUMBA=0`` to confirm
the numpy path alone.

Usage:  python3 benchmarks/bench_kernels.py [--qubits 10 12 14] [--repeats 5]
"""

import argparse
import timeit

import numpy as np

from vqelab import kernels
from vqelab.pauli import PauliTerm, QubitOperator


def random_state(n_q: int, rng) -> np.ndarray:
    amp = rng.normal(size=1 << n_q) + 1j * rng.normal(size=1 << n_q)
    return amp / np.linalg.norm(amp)


def random_operator(n_q: int, n_terms: int, rng) -> QubitOperator:
    mask = (1 << n_q) - 1
    terms = []
    for _ in range(n_terms):
        x = int(rng.integers(0, mask + 1))
        z = int(rng.integers(0, mask + 1))
        phase = (-1j) ** ((x & z).bit_count() % 4)  # keep each string Hermitian
        terms.append(PauliTerm(n_q, x, z, float(rng.normal()) * phase))
    return QubitOperator.from_terms(n_q, terms)


def bench(fn, repeats: int) -> float:
    fn()  # warm-up (includes any JIT compilation)
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, nargs="+", default=[10, 12, 14])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--terms", type=int, default=50,
                        help="Pauli terms in the expectation operator")
    args = parser.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    rng = np.random.default_rng(0)
    header = f"{'kernel':<16}{'n_q':>4}{'active (ms)':>14}{'numpy (ms)':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for n_q in args.qubits:
        amp = random_state(n_q, rng)
        op = random_operator(n_q, args.terms, rng)
        xs, zs, coeffs = kernels.pack_operator(op)
        x_str = int(xs[1]) if xs.size > 1 else 1
        z_str = int(zs[1]) if zs.size > 1 else 0

        cases = [
            ("apply_ry",
             lambda: kernels.apply_ry(amp.copy(), n_q // 2, 0.3),
             lambda: kernels._np_apply_ry(amp.copy(), n_q // 2, 0.3)),
            ("apply_cnot",
             lambda: kernels.apply_cnot(amp.copy(), 0, n_q - 1),
             lambda: kernels._np_apply_cnot(amp.copy(), 0, n_q - 1)),
            ("apply_pauli_exp",
             lambda: kernels.apply_pauli_exp(amp.copy(), x_str, z_str, 0.2),
             lambda: kernels._np_apply_pauli_exp(amp.copy(), x_str, z_str, 0.2)),
            ("expectation",
             lambda: kernels.expectation(amp, xs, zs, coeffs),
             lambda: kernels._np_expectation(amp, xs, zs, coeffs)),
        ]
        for name, active, reference in cases:
            t_active = bench(active, args.repeats)
            t_numpy = bench(reference, args.repeats)
            speedup = t_numpy / t_active if t_active > 0 else float("inf")
            print(f"{name:<16}{n_q:>4}{t_active * 1e3:>14.3f}"
                  f"{t_numpy * 1e3:>14.3f}{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
