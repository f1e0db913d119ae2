import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def state_with_spectrum(eigenvalues, basis):
    basis = np.asarray(basis, dtype=complex)
    return basis @ np.diag(eigenvalues) @ basis.conj().T
