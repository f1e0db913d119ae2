"""Dense linear algebra and information measures for small quantum systems.

States are plain numpy arrays: a pure state is a 1-d complex vector, a
density matrix a 2-d Hermitian array. All entropies are in bits.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

ATOL_STATE = 1e-12
ATOL_PSD = 1e-9
# eigenvalues below this are numerical noise when taking square roots
_SQRT_CUTOFF = 1e-14


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


class NotPSDError(ValueError):
    """Matrix has an eigenvalue below the PSD tolerance."""


def as_pure_state(psi, atol: float = ATOL_STATE) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise DimensionError(f"pure state must be a vector, got shape {psi.shape}")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > atol:
        raise ValueError(f"pure state not normalized (squared norm {norm!r})")
    return psi


def as_density_matrix(rho, atol: float = ATOL_STATE) -> np.ndarray:
    """Validate `rho` as a density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol:
        raise ValueError(f"density matrix trace {np.trace(rho).real!r} != 1")
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < -ATOL_PSD:
        raise NotPSDError(f"density matrix has eigenvalue {evals[0]!r}")
    return rho


def is_unitary(u, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0))


def as_unitary(u, atol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, atol):
        raise ValueError("matrix is not unitary")
    return u


def projector(psi) -> np.ndarray:
    """Return |psi><psi|."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def _psd_eigh(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    herm = 0.5 * (rho + rho.conj().T)
    evals, evecs = np.linalg.eigh(herm)
    if evals[0] < -ATOL_PSD:
        raise NotPSDError(f"eigenvalue {evals[0]!r} below -{ATOL_PSD}")
    return np.clip(evals, 0.0, None), evecs


def sqrtm_psd(rho) -> np.ndarray:
    """Square root of a PSD matrix via its eigendecomposition."""
    evals, evecs = _psd_eigh(np.asarray(rho, dtype=complex))
    roots = np.where(evals > _SQRT_CUTOFF, np.sqrt(evals), 0.0)
    return (evecs * roots) @ evecs.conj().T


def fidelity_pure_mixed(psi, rho) -> float:
    """Fidelity <psi|rho|psi> between a pure state and a density matrix."""
    psi = np.asarray(psi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (psi.shape[0], psi.shape[0]):
        raise DimensionError(f"state of dim {psi.shape[0]} vs matrix {rho.shape}")
    value = np.vdot(psi, rho @ psi)
    if abs(value.imag) > ATOL_STATE:
        raise ValueError(f"<psi|rho|psi> has imaginary part {value.imag!r}")
    return float(value.real)


def fidelity_general(rho, omega) -> float:
    """Fidelity (tr sqrt(sqrt(omega) rho sqrt(omega)))**2 of two mixed states.

    Evaluated as the squared nuclear norm of sqrt(rho) @ sqrt(omega), which is
    the same quantity but is symmetric by construction and keeps rank-deficient
    inputs from amplifying round-off through a second square root.
    """
    rho = np.asarray(rho, dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    if rho.shape != omega.shape or rho.ndim != 2:
        raise DimensionError(f"shapes {rho.shape} and {omega.shape} differ")
    prod = sqrtm_psd(rho) @ sqrtm_psd(omega)
    nuclear = np.linalg.svd(prod, compute_uv=False).sum()
    return float(min(nuclear**2, 1.0))


def shannon_entropy(probs) -> float:
    """Shannon entropy in bits; zero-probability terms contribute nothing."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1:
        raise DimensionError("probability vector must be 1-d")
    if np.any(p < -ATOL_STATE) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("not a probability distribution")
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)) + 0.0)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -tr rho log2 rho."""
    evals, _ = _psd_eigh(np.asarray(rho, dtype=complex))
    evals = np.clip(evals, 0.0, 1.0)
    return shannon_entropy(evals / evals.sum())


def tensor_product(*ops) -> np.ndarray:
    """Kronecker product of vectors or matrices, left to right."""
    if not ops:
        raise ValueError("need at least one operand")
    arrays = [np.asarray(op) for op in ops]
    if len({a.ndim for a in arrays}) != 1:
        raise DimensionError("cannot mix vectors and matrices")
    return reduce(np.kron, arrays)


def partial_trace(state, dims: Sequence[int], traced) -> np.ndarray:
    """Trace out subsystem(s) `traced` of a state on a product space.

    Args:
        state: state vector or density matrix on the space ``dims[0] x dims[1] x ...``.
        dims: local dimensions.
        traced: index, or iterable of indices, of subsystems to remove.

    Returns:
        Reduced density matrix on the remaining subsystems, in order.
    """
    dims = [int(x) for x in dims]
    total = int(np.prod(dims))
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        if state.shape[0] != total:
            raise DimensionError(f"vector of length {state.shape[0]} vs dims {dims}")
        state = np.outer(state, state.conj())
    if state.shape != (total, total):
        raise DimensionError(f"matrix of shape {state.shape} vs dims {dims}")
    traced = {int(traced)} if np.isscalar(traced) else {int(i) for i in traced}
    if not traced <= set(range(len(dims))):
        raise DimensionError(f"subsystems {sorted(traced)} out of range")

    nsys = len(dims)
    tensor = state.reshape(dims + dims)
    # contract traced bra/ket indices pairwise, highest index first
    for i in sorted(traced, reverse=True):
        cur = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=i, axis2=i + cur)
    kept = [dims[i] for i in range(nsys) if i not in traced]
    dim = int(np.prod(kept)) if kept else 1
    return tensor.reshape(dim, dim)


def _canonical_phase(vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size == 0:
        return vec
    lead = vec[nz[0]]
    return vec * (abs(lead) / lead)


def eigendecomposition(rho) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvector matrix of a density matrix.

    Eigenvectors are phase-fixed so their first non-negligible component is
    real and positive. Degenerate eigenvalues (within 1e-12) are ordered by
    the lexicographic order of the (real, imag) parts of their eigenvectors.
    """
    evals, evecs = _psd_eigh(np.asarray(rho, dtype=complex))
    evals = np.clip(evals, 0.0, 1.0)
    evecs = np.column_stack([_canonical_phase(evecs[:, j]) for j in range(evecs.shape[1])])

    def sort_key(j):
        v = evecs[:, j]
        # rounding keeps the tie-break stable against 1e-15 noise
        return (-round(evals[j], 12),) + tuple(np.round(np.column_stack([v.real, v.imag]).ravel(), 9))

    order = sorted(range(len(evals)), key=sort_key)
    return evals[order], evecs[:, order]


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random density matrix (optionally of reduced rank)."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)
