import numpy as np
import pytest

from qdecoupling.states import make_rng


@pytest.fixture
def rng():
    return make_rng(20240817)


def random_herm(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


def commuting_pair(d, rng):
    """Two random densities diagonal in a common Haar basis, plus the weights."""
    from qdecoupling.states import haar_unitary

    u = haar_unitary(d, rng)
    p = rng.dirichlet(np.ones(d))
    q = rng.dirichlet(np.ones(d))
    rho = (u * p) @ u.conj().T
    sig = (u * q) @ u.conj().T
    return rho, sig, p, q
