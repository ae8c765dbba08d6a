"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from switchsec import LinearMode, Matrix, SwitchingSystem, load_bundled


def numpy_rank(rows) -> int:
    """Independent rank oracle: numpy SVD on a float copy."""
    arr = np.array([[float(x) for x in r] for r in rows], dtype=float)
    if arr.size == 0:
        return 0
    return int(np.linalg.matrix_rank(arr))


def frac_matrix(rows) -> Matrix:
    return Matrix([[Fraction(x) for x in r] for r in rows])


def random_matrix(rng: random.Random, rows: int, cols: int, span: int = 3) -> Matrix:
    return Matrix([[Fraction(rng.randint(-span, span)) for _ in range(cols)]
                   for _ in range(rows)], shape=(rows, cols))


def random_mode(rng: random.Random, n: int, m: int, p: int, label) -> LinearMode:
    return LinearMode(label, random_matrix(rng, n, n), random_matrix(rng, n, m),
                      random_matrix(rng, p, n))


def random_pair_system(rng: random.Random, n: int, m: int, p: int,
                       sigma: int = 0, rho: int = 0) -> SwitchingSystem:
    return SwitchingSystem(
        (random_mode(rng, n, m, p, 1), random_mode(rng, n, m, p, 2)),
        sigma=sigma, rho=rho, dwell=2 * n)


@pytest.fixture(scope="session")
def boost() -> SwitchingSystem:
    return load_bundled("boost")


@pytest.fixture(scope="session")
def demo_actuated() -> SwitchingSystem:
    return load_bundled("demo_actuated")
