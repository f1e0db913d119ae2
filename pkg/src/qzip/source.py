"""I.i.d. quantum sources, effective (diagonalised) sources and condensation rates.

A *basis* is a unitary whose columns are the computational basis vectors
written in a fixed reference frame. The effective source seen by a
permutation-based condenser running in that basis is the diagonal of
``basis^dagger rho basis``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    ATOL_STATE,
    DimensionError,
    as_density_matrix,
    as_pure_state,
    as_unitary,
    eigendecomposition,
    shannon_entropy,
)


@dataclass(frozen=True)
class SignalEnsemble:
    """Pure signal states with prior probabilities."""

    states: np.ndarray  # shape (m, d); row i is |sigma_i>
    probs: np.ndarray

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states, dtype=complex))
        probs = np.asarray(self.probs, dtype=float)
        if states.shape[0] == 0:
            raise ValueError("ensemble must contain at least one state")
        if probs.shape != (states.shape[0],):
            raise DimensionError(f"{states.shape[0]} states but {probs.shape} probabilities")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > ATOL_STATE:
            raise ValueError("probabilities must be non-negative and sum to 1")
        for psi in states:
            as_pure_state(psi)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @classmethod
    def from_spectrum(cls, eigenvalues, basis) -> "SignalEnsemble":
        """Ensemble of the eigenvectors of a density matrix, weighted by its eigenvalues."""
        basis = as_unitary(basis)
        return cls(basis.T.copy(), np.asarray(eigenvalues, dtype=float))


@dataclass(frozen=True)
class EffectiveSource:
    basis: np.ndarray
    mu: np.ndarray


def density_matrix(ens: SignalEnsemble) -> np.ndarray:
    """rho = sum_i p_i |sigma_i><sigma_i|."""
    s = ens.states
    return np.einsum("i,ij,ik->jk", ens.probs, s, s.conj())


def _check_pair(rho, basis):
    rho = as_density_matrix(rho)
    basis = as_unitary(basis)
    if basis.shape != rho.shape:
        raise DimensionError(f"basis {basis.shape} vs density matrix {rho.shape}")
    return rho, basis


def effective_source(rho, basis) -> EffectiveSource:
    """Diagonal of rho in the computational frame given by `basis`."""
    rho, basis = _check_pair(rho, basis)
    mu = np.real(np.einsum("ji,jk,ki->i", basis.conj(), rho, basis))
    mu = np.clip(mu, 0.0, None)
    return EffectiveSource(basis=basis, mu=mu / mu.sum())


def condensation_rate(rho, basis) -> float:
    """Asymptotic condensation rate (bits/signal) when working in `basis`."""
    return shannon_entropy(effective_source(rho, basis).mu)


def transition_matrix(u) -> np.ndarray:
    """|U_ij|^2, the doubly stochastic matrix induced by a unitary."""
    u = np.asarray(u)
    return np.abs(u) ** 2


def mismatch_unitary(rho, basis) -> np.ndarray:
    """U with U_ij = <e_j|lambda_i>, for eigenvectors in descending eigenvalue order."""
    rho, basis = _check_pair(rho, basis)
    _, evecs = eigendecomposition(rho)
    return (basis.conj().T @ evecs).T


def mismatch_entropy(u, rho) -> float:
    """H(U, rho): entropy of mu_j = sum_i |U_ij|^2 lambda_i.

    Eigenvalues are taken in descending order, so row i of `u` pairs with the
    i-th largest eigenvalue. ``mismatch_entropy(mismatch_unitary(rho, B), rho)``
    equals ``condensation_rate(rho, B)``.
    """
    u = as_unitary(u)
    lam, _ = eigendecomposition(as_density_matrix(rho))
    if u.shape[0] != lam.shape[0]:
        raise DimensionError(f"unitary {u.shape} vs {lam.shape[0]} eigenvalues")
    mu = lam @ transition_matrix(u)
    return shannon_entropy(mu / mu.sum())


def sample_block(mu, n: int, seed) -> np.ndarray:
    """n i.i.d. symbol indices drawn from `mu`; deterministic in `seed`."""
    if n < 1:
        raise ValueError("block length must be positive")
    mu = np.asarray(mu, dtype=float)
    rng = np.random.default_rng(seed)
    return sample_with_uniforms(mu, rng.random(n))


def sample_with_uniforms(mu, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling: symbol j where the uniform falls in the j-th cell.

    Sharing `uniforms` between two distributions couples the draws, which is
    how one block is re-read in several candidate bases.
    """
    cdf = np.cumsum(np.asarray(mu, dtype=float))
    if cdf.shape[0] == 2:
        return (uniforms >= cdf[0]).astype(np.uint8)
    cdf[-1] = np.inf
    return np.searchsorted(cdf, uniforms, side="right").astype(np.uint8)


def symbols_to_bits(symbols, d: int) -> np.ndarray:
    """Fixed-width binary pre-coding of d-ary symbols, MSB first."""
    symbols = np.asarray(symbols, dtype=np.int64)
    if d == 2:
        return symbols.astype(np.uint8)
    width = max(1, int(np.ceil(np.log2(d))))
    shifts = np.arange(width - 1, -1, -1)
    return ((symbols[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def bits_to_symbols(bits, d: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    if d == 2:
        return bits.astype(np.uint8)
    width = max(1, int(np.ceil(np.log2(d))))
    if bits.size % width:
        raise ValueError("bit count is not a multiple of the symbol width")
    weights = 1 << np.arange(width - 1, -1, -1)
    return (bits.reshape(-1, width) @ weights).astype(np.uint8)


def qubit_basis(theta: float, phi: float = 0.0) -> np.ndarray:
    """Qubit basis whose first vector is cos(theta)|0> + e^{i phi} sin(theta)|1>.

    phi = 0 gives the real rotation by theta.
    """
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    return np.array([[c, -s * np.conj(e)], [e * s, c]], dtype=complex)
