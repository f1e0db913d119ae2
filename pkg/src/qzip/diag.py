"""Duplication operator and the pseudo-commutation check for permutation circuits.

A register of `positions` signals, each of dimension `dim`, is indexed by
the integer whose base-`dim` digits (most significant first) are the
per-position basis labels. The duplication operator adds register A into
register B digit by digit, modulo `dim`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import DimensionError, partial_trace, random_pure_state, random_unitary

MAX_REGISTER_DIM = 4096


@dataclass(frozen=True)
class DuplicationOp:
    dim: int
    positions: int

    def __post_init__(self):
        if self.dim < 2 or self.positions < 1:
            raise ValueError("need dim >= 2 and positions >= 1")

    @property
    def size(self) -> int:
        return self.dim**self.positions

    def _digits(self) -> np.ndarray:
        idx = np.arange(self.size)
        powers = self.dim ** np.arange(self.positions - 1, -1, -1)
        return (idx[:, None] // powers) % self.dim

    def table(self, inverse: bool = False) -> np.ndarray:
        """Basis map on the joint register: index a*size + b -> a*size + (b +/- a)."""
        digits = self._digits()
        powers = self.dim ** np.arange(self.positions - 1, -1, -1)
        sign = -1 if inverse else 1
        shifted = (digits[None, :, :] + sign * digits[:, None, :]) % self.dim
        b_new = shifted @ powers
        a = np.arange(self.size)[:, None]
        return (a * self.size + b_new).ravel()

    def matrix(self, inverse: bool = False) -> np.ndarray:
        size = self.size**2
        out = np.zeros((size, size))
        out[self.table(inverse), np.arange(size)] = 1.0
        return out

    def apply(self, joint: np.ndarray, inverse: bool = False) -> np.ndarray:
        """Apply to a joint state vector of length size**2."""
        joint = np.asarray(joint, dtype=complex)
        if joint.shape != (self.size**2,):
            raise DimensionError(f"joint state has shape {joint.shape}, want ({self.size**2},)")
        out = np.empty_like(joint)
        out[self.table(inverse)] = joint
        return out


def with_blank_ancilla(psi) -> np.ndarray:
    """|psi>|0...0> as a joint vector."""
    psi = np.asarray(psi, dtype=complex)
    joint = np.zeros(psi.shape[0] ** 2, dtype=complex)
    joint[:: psi.shape[0]] = psi
    return joint


def apply_duplication(psi, ancilla, dim: int = 2) -> np.ndarray:
    """Duplicate `psi` into an all-zero ancilla: sum a_I |I>|0> -> sum a_I |I>|I>."""
    psi = np.asarray(psi, dtype=complex)
    ancilla = np.asarray(ancilla, dtype=complex)
    if ancilla.shape != psi.shape:
        raise DimensionError("ancilla must match the signal register")
    zero = np.zeros_like(ancilla)
    zero[0] = 1.0
    if not np.allclose(ancilla, zero, atol=1e-12):
        raise ValueError("ancilla is not in the all-zero basis state")
    positions = _positions(psi.shape[0], dim)
    return DuplicationOp(dim, positions).apply(with_blank_ancilla(psi))


def _positions(size: int, dim: int) -> int:
    positions = int(round(np.log(size) / np.log(dim)))
    if dim**positions != size:
        raise DimensionError(f"register size {size} is not a power of {dim}")
    return positions


def permutation_matrix(table) -> np.ndarray:
    """Unitary sending |i> to |table[i]>."""
    table = np.asarray(table, dtype=np.int64)
    if sorted(table.tolist()) != list(range(table.shape[0])):
        raise ValueError("table is not a permutation")
    out = np.zeros((table.shape[0], table.shape[0]))
    out[table, np.arange(table.shape[0])] = 1.0
    return out


def _as_circuit(circuit) -> np.ndarray:
    c = np.asarray(circuit)
    if c.ndim == 1:
        return permutation_matrix(c)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DimensionError(f"circuit must be a permutation table or square matrix, got {c.shape}")
    return c.astype(complex)


def theorem1_residual(circuit, psi, dim: int = 2) -> float:
    """|| D^-1 (C x C) D |psi>|0> - (C x I)|psi>|0> ||.

    `circuit` is a permutation table or a unitary matrix on the signal register.
    """
    c = _as_circuit(circuit)
    psi = np.asarray(psi, dtype=complex)
    size = psi.shape[0]
    if size > MAX_REGISTER_DIM:
        raise DimensionError(f"register dimension {size} exceeds {MAX_REGISTER_DIM}")
    if c.shape != (size, size):
        raise DimensionError(f"circuit {c.shape} vs state of length {size}")
    op = DuplicationOp(dim, _positions(size, dim))

    joint = op.apply(with_blank_ancilla(psi))
    # (C x C) acting on the vectorised |a>|b> amplitudes M[a, b] is C M C^T
    m = joint.reshape(size, size)
    joint = (c @ m @ c.T).ravel()
    lhs = op.apply(joint, inverse=True)
    rhs = with_blank_ancilla(c @ psi)
    return float(np.linalg.norm(lhs - rhs))


def phase_counterexample_check(alpha: float) -> float:
    """Residual for C = X diag(1, e^{i alpha}) on |+>|0>; equals sqrt(2)|sin(alpha/2)|."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    c = x @ np.diag([1.0, np.exp(1j * alpha)])
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    return theorem1_residual(c, plus)


def distance_from_monomial(u) -> float:
    """Frobenius distance from `u` to the nearest phased permutation matrix."""
    u = np.asarray(u, dtype=complex)
    rows, cols = linear_sum_assignment(-np.abs(u))
    nearest = np.zeros_like(u)
    nearest[rows, cols] = np.exp(1j * np.angle(u[rows, cols]))
    return float(np.linalg.norm(u - nearest))


def duplicated_density_matrix(rho, dim: int | None = None) -> np.ndarray:
    """D (rho x |0><0|) D^dagger; `dim` defaults to a single signal."""
    rho = np.asarray(rho, dtype=complex)
    size = rho.shape[0]
    dim = size if dim is None else dim
    op = DuplicationOp(dim, _positions(size, dim))
    zero = np.zeros((size, size))
    zero[0, 0] = 1.0
    d = op.matrix()
    return d @ np.kron(rho, zero) @ d.T


def reduced_after_duplication(rho, basis=None) -> np.ndarray:
    """State addressed by a computer that sees only one half of the duplication.

    `rho` is first written in the computational frame `basis` (identity by
    default); a single signal of any dimension is duplicated.
    """
    rho = np.asarray(rho, dtype=complex)
    if basis is not None:
        basis = np.asarray(basis, dtype=complex)
        rho = basis.conj().T @ rho @ basis
    d = rho.shape[0]
    return partial_trace(duplicated_density_matrix(rho), [d, d], 1)


@dataclass(frozen=True)
class Theorem1Report:
    dim: int
    positions: int
    trials: int
    states_per_circuit: int
    max_residual_permutations: float
    min_residual_counterexamples: float
    hadamard_residual: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def run_theorem1(dim: int, positions: int, trials: int, seed, states_per_circuit: int = 10,
                 counterexamples: int | None = None, reject_within: float = 1e-6) -> Theorem1Report:
    """Forward check on random permutations and converse check on random unitaries.

    For each random non-permutation unitary the largest residual over the
    sampled states is recorded; the report gives the smallest of these.
    """
    rng = np.random.default_rng(seed)
    size = dim**positions
    max_perm = 0.0
    for _ in range(trials):
        table = rng.permutation(size)
        for _ in range(states_per_circuit):
            max_perm = max(max_perm, theorem1_residual(table, random_pure_state(size, rng), dim))

    counterexamples = trials if counterexamples is None else counterexamples
    min_counter = np.inf
    done = 0
    while done < counterexamples:
        u = random_unitary(size, rng)
        if distance_from_monomial(u) < reject_within:
            continue
        worst = max(theorem1_residual(u, random_pure_state(size, rng), dim)
                    for _ in range(states_per_circuit))
        min_counter = min(min_counter, worst)
        done += 1

    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    h_res = theorem1_residual(hadamard, np.array([1.0, 0.0]))
    return Theorem1Report(dim, positions, trials, states_per_circuit,
                          float(max_perm), float(min_counter), h_res)
