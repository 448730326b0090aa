"""
Shared fixtures: small Fock spaces, canonical Phi families and the bundled run configs.
"""

from pathlib import Path

import numpy as np
import pytest

from app.models.dsf import FermionicQuadratic, QFermionSquare
from app.models.fock import ModeSpec
from app.services.fock import build_space
from app.services.phi import PhiFamily, generate_family, one_hot_family, random_family

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

SQRT_HALF = 1.0 / np.sqrt(2.0)


def matrix(entries, shape=(2, 2)) -> np.ndarray:
    """Dense Phi from {(mu, nu): value} with 1-based indices."""
    phi = np.zeros(shape, dtype=complex)
    for (mu, nu), value in entries.items():
        phi[mu - 1, nu - 1] = value
    return phi


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def fermionic_space_2():
    """q = 1, two a-modes and two b-modes."""
    return build_space(ModeSpec(d_a=2, d_b=2, q=1.0))


@pytest.fixture
def fermionic_space_4():
    """q = 1, four a-modes and four b-modes (dim 256)."""
    return build_space(ModeSpec(d_a=4, d_b=4, q=1.0))


@pytest.fixture
def block_family_m2() -> PhiFamily:
    """Two rank-2 blocks rotated by seeded Haar unitaries: f = 1."""
    return random_family(4, 4, m=2, n_modes=2, seed=7)


@pytest.fixture
def unitary_phi() -> np.ndarray:
    """I / sqrt(2): the nondegenerate d = 2 solution with f = 1."""
    return np.eye(2, dtype=complex) * SQRT_HALF


@pytest.fixture
def elementary_family() -> PhiFamily:
    """e11 and e22 at q = 1: m = 1, f = 2."""
    return generate_family(2, 2, m=1, n_modes=2)


@pytest.fixture
def qspace_05():
    """q = 0.5, 2 + 2 modes, cutoff 5."""
    return build_space(ModeSpec(d_a=2, d_b=2, q=0.5, cutoff=5))


@pytest.fixture
def one_hot_05() -> PhiFamily:
    return one_hot_family(2, 2, [(0, 0), (1, 1)], q=0.5)


@pytest.fixture
def bad_row_phi() -> np.ndarray:
    """(e11 + e12) / sqrt(2): not realizable for q < 1."""
    return matrix({(1, 1): SQRT_HALF, (1, 2): SQRT_HALF})


@pytest.fixture
def diagonal_phi() -> np.ndarray:
    """(e11 + e22) / sqrt(2)."""
    return matrix({(1, 1): SQRT_HALF, (2, 2): SQRT_HALF})


@pytest.fixture
def quadratic_m2() -> FermionicQuadratic:
    return FermionicQuadratic(m=2)


@pytest.fixture
def square_05() -> QFermionSquare:
    return QFermionSquare(q=0.5)
