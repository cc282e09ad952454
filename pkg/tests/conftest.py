"""Shared test fixtures: bundled FCIDUMP data and synthetic integral sets."""

from __future__ import annotations

import json
import os

import numpy as np
import pytest

from vqelab.fcidump import parse_fcidump
from vqelab.fermion import IntegralSet

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_geometries(molecule: str) -> list[dict]:
    with open(os.path.join(FIXTURES, molecule, "metadata.json")) as fh:
        meta = json.load(fh)
    out = []
    for g in meta["geometries"]:
        entry = dict(g)
        entry["path"] = os.path.join(FIXTURES, molecule, g["fcidump"])
        out.append(entry)
    return out


def load_ints(molecule: str, index: int = 0) -> IntegralSet:
    return parse_fcidump(fixture_geometries(molecule)[index]["path"])


def random_integrals(m: int, n_alpha: int, n_beta: int, seed: int,
                     scale: float = 0.2) -> IntegralSet:
    """Random symmetric one-body plus 8-fold-symmetric two-body coefficients."""
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(m, m))
    h = (h + h.T) / 2.0
    t = scale * rng.normal(size=(m, m, m, m))
    eri = np.zeros_like(t)
    for perm in ((0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
                 (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0)):
        eri += t.transpose(perm)
    eri /= 8.0
    ints = IntegralSet(e0=float(rng.normal()), h=h, eri=eri, m=m,
                       n_alpha=n_alpha, n_beta=n_beta)
    ints.validate()
    return ints


def random_hermitian(n: int, rng) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2.0


@pytest.fixture
def lih_ints():
    return load_ints("LiH", 1)  # R = 1.6, near equilibrium


@pytest.fixture
def h2o_ints():
    return load_ints("H2O", 1)  # R = 0.958, near equilibrium


@pytest.fixture
def toy_m2():
    return random_integrals(2, 1, 1, seed=11)


@pytest.fixture
def toy_m3():
    return random_integrals(3, 1, 1, seed=12)
