import numpy as np
import pytest

from nobroadcast.linalg import dagger
from nobroadcast.states import random_unitary, validate_density

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + dagger(g))


def random_psd(n, rng, rank=None):
    g = rng.standard_normal((n, rank or n)) + 1j * rng.standard_normal((n, rank or n))
    return g @ dagger(g)


def random_commuting_pair(n, rng):
    v = random_unitary(n, rng)
    l0, l1 = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    return (validate_density(v @ np.diag(l0) @ dagger(v)),
            validate_density(v @ np.diag(l1) @ dagger(v)))


def random_povm(n, k, rng):
    """k-outcome POVM: E_j = S^{-1/2} A_j S^{-1/2} with A_j random positive, S their sum."""
    parts = [random_psd(n, rng, rank=n if j == 0 else int(rng.integers(1, n + 1))) for j in range(k)]
    s = sum(parts)
    w, v = np.linalg.eigh(s)
    s_inv_half = v @ np.diag(w ** -0.5) @ dagger(v)
    elems = [s_inv_half @ a @ s_inv_half for a in parts]
    return [0.5 * (e + dagger(e)) for e in elems]
