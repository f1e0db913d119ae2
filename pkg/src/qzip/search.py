"""Finite mesh over qubit bases and minimum-rate basis selection.

Condensation rates depend on a basis only through the rays it contains, so
bases are compared up to column phases and column order. For a qubit that
quotient is the Bloch sphere with antipodes identified; the mesh is a set of
latitude rings on the upper hemisphere. Two bases whose first vectors sit
at Bloch angle g apart are ``2 sqrt(1 - cos(g/2))`` apart in the reduced
Frobenius metric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import permutations

import numpy as np

from .linalg import shannon_entropy
from .lz import codeword_length, data_length
from .source import qubit_basis, sample_with_uniforms, symbols_to_bits
from .truncation import BlockModel, SmearConfig, simulate_truncation


@dataclass(frozen=True)
class UnitaryMesh:
    points: np.ndarray  # (N, 2, 2)
    angles: np.ndarray  # (N, 2) as (theta, phi) of qubit_basis
    spacing: float

    def __len__(self) -> int:
        return int(self.points.shape[0])


def phase_reduced_distance(u, v) -> float:
    """min over column phases and column orders of ||u - v P D||_F."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    overlaps = np.abs(v.conj().T @ u)  # overlaps[i, j] = |<v_i|u_j>|
    d = u.shape[0]
    best = max(sum(overlaps[p[j], j] for j in range(d)) for p in permutations(range(d)))
    return float(np.sqrt(max(2.0 * (d - best), 0.0)))


def bloch_angle_for_distance(delta: float) -> float:
    """Bloch-sphere angle between qubit bases at reduced distance `delta`."""
    c = 1.0 - delta**2 / 4.0
    return float(2.0 * np.arccos(np.clip(c, -1.0, 1.0)))


def reduce_basis(u) -> tuple[float, float]:
    """(theta, phi) of the mesh parametrisation describing the same pair of rays."""
    u = np.asarray(u, dtype=complex)
    col = u[:, 0] if abs(u[0, 0]) >= abs(u[0, 1]) else u[:, 1]
    col = col * np.exp(-1j * np.angle(col[0]))
    theta = float(np.arctan2(abs(col[1]), col[0].real))
    phi = float(np.angle(col[1]) % (2 * np.pi)) if abs(col[1]) > 1e-15 else 0.0
    return theta, phi


def build_mesh(d: int, delta: float) -> UnitaryMesh:
    """Mesh whose reduced-distance covering radius is at most `delta`.

    Ring r sits at Bloch polar angle r*h with h <= g (g the Bloch angle for
    `delta`); a ring carries enough points that a target within h/2 in
    latitude is within g - h/2 along the ring. Size grows like 1/delta**2.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if d != 2:
        raise NotImplementedError("meshes are only constructed for qubits")
    g = bloch_angle_for_distance(delta) if delta < 2.0 else np.pi
    if g >= np.pi / 2:
        return UnitaryMesh(np.eye(2, dtype=complex)[None], np.zeros((1, 2)), float(delta))

    rings = int(np.ceil((np.pi / 2) / g))
    h = (np.pi / 2) / rings
    angles = [(0.0, 0.0)]
    for r in range(1, rings + 1):
        polar = r * h
        reach = np.sin(min(polar + h / 2, np.pi / 2))
        count = int(np.ceil(np.pi * reach / (g - h / 2)))
        for j in range(count):
            angles.append((polar / 2, 2 * np.pi * j / count))
    angles = np.array(angles)
    points = np.array([qubit_basis(t, p) for t, p in angles])
    return UnitaryMesh(points, angles, float(delta))


def mesh_distances(mesh: UnitaryMesh, u) -> np.ndarray:
    """Reduced distance from `u` to every qubit mesh point."""
    u = np.asarray(u, dtype=complex)
    first = mesh.points[:, :, 0]
    overlap = np.maximum(np.abs(first.conj() @ u[:, 0]), np.abs(first.conj() @ u[:, 1]))
    return np.sqrt(np.maximum(4.0 * (1.0 - overlap), 0.0))


def effective_distributions(rho, mesh: UnitaryMesh) -> np.ndarray:
    """mu for every mesh basis: diagonal of V^dagger rho V, shape (N, d)."""
    rho = np.asarray(rho, dtype=complex)
    mu = np.real(np.einsum("nji,jk,nki->ni", mesh.points.conj(), rho, mesh.points))
    mu = np.clip(mu, 0.0, None)
    return mu / mu.sum(axis=1, keepdims=True)


def rate_table(rho, mesh: UnitaryMesh) -> np.ndarray:
    """Asymptotic condensation rate for every mesh basis."""
    return np.array([shannon_entropy(mu) for mu in effective_distributions(rho, mesh)])


def entropy_gap_bound(delta: float, grid: int = 20001) -> float:
    """Worst-case H - S over qubit states when some mesh basis is within `delta`.

    A basis whose first vector sits at Bloch angle g from the eigenbasis mixes
    the spectrum (l, 1 - l) with weight c = cos(g/2)**2; the gap grows with g,
    so the worst case is at the covering radius, maximised over l.
    """
    g = min(bloch_angle_for_distance(delta), np.pi / 2)
    c = np.cos(g / 2) ** 2
    lam = np.linspace(0.5, 1.0, grid)

    def h(p):
        p = np.clip(p, 1e-300, 1.0)
        q = np.clip(1.0 - p, 1e-300, 1.0)
        return -(p * np.log2(p) + q * np.log2(q))

    return float(np.max(h(lam * c + (1 - lam) * (1 - c)) - h(lam)))


def entropy_modulus(delta: float) -> float:
    """Calibrated entropy gap for mesh spacing `delta`, from the shipped table."""
    table = json.loads(resources.files("qzip.data").joinpath("entropy_modulus.json").read_text())
    for row in table["rows"]:
        if abs(row["delta"] - delta) < 1e-12:
            return float(row["entropy_modulus"])
    raise KeyError(f"no calibrated entropy modulus for delta={delta}")


@dataclass
class SearchResult:
    best_index: int
    best_rate: float
    entropy_estimate: float
    basis_estimate: np.ndarray | None
    rate_table: list[tuple[int, float]]
    mode: str = "analytic"
    uncertainty: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        angles = reduce_basis(self.basis_estimate) if self.basis_estimate is not None else None
        return {
            "mode": self.mode,
            "best_index": self.best_index,
            "best_rate": self.best_rate,
            "entropy_estimate": self.entropy_estimate,
            "basis_estimate": list(angles) if angles else None,
            "rate_table": [[i, r] for i, r in self.rate_table],
            "uncertainty": self.uncertainty,
        }


def select_basis(rates, mesh: UnitaryMesh | None = None) -> SearchResult:
    """Minimum-rate entry; ties go to the lowest index."""
    rates = np.asarray(rates, dtype=float)
    if rates.size == 0:
        raise ValueError("empty rate table")
    best = int(np.argmin(rates))
    return SearchResult(
        best_index=best,
        best_rate=float(rates[best]),
        entropy_estimate=float(rates[best]),
        basis_estimate=None if mesh is None else mesh.points[best],
        rate_table=[(i, float(r)) for i, r in enumerate(rates)],
    )


def analytic_search(rho, mesh: UnitaryMesh) -> SearchResult:
    return select_basis(rate_table(rho, mesh), mesh)


def empirical_search(rho, mesh: UnitaryMesh, n: int, config: SmearConfig, trials: int, seed) -> SearchResult:
    """Estimate each mesh basis's rate from the measured boundary of condensed blocks.

    Each trial draws one block of uniforms and reads it in every candidate
    basis (inverse-CDF sampling against that basis's effective source), so
    candidates are compared on the same block. The block is LZ-condensed and
    the data/blank boundary located with the smeared-measurement procedure;
    the estimate for the basis is the interval midpoint over n.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    mus = effective_distributions(rho, mesh)
    d = mus.shape[1]
    width = 1 if d == 2 else int(np.ceil(np.log2(d)))
    nbits = n * width
    if config.n != nbits:
        raise ValueError(f"smear config is for {config.n} bits, blocks have {nbits}")

    entropy = np.random.SeedSequence(seed).entropy
    est = np.empty((len(mesh), trials))
    fid = np.empty((len(mesh), trials))
    errors = np.zeros(len(mesh), np.int64)
    for t in range(trials):
        block_rng = np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(0, t)))
        uniforms = block_rng.random(n)
        for i, mu in enumerate(mus):
            bits = symbols_to_bits(sample_with_uniforms(mu, uniforms), d)
            k = data_length(nbits, codeword_length(bits))
            trunc_seed = np.random.SeedSequence(entropy, spawn_key=(1, i, t))
            run = simulate_truncation(BlockModel(nbits, k), config, 1, trunc_seed)
            est[i, t] = 0.5 * (run.lo[0] + run.hi[0]) / n
            fid[i, t] = run.fidelity[0]
            errors[i] += int(run.error[0])

    means = est.mean(axis=1)
    stderr = est.std(axis=1, ddof=1) / np.sqrt(trials) if trials > 1 else np.full(len(mesh), np.nan)
    result = select_basis(means, mesh)
    best = result.best_index
    per_pass = 1.0 - 2.0 / config.Y
    result.mode = "empirical"
    result.uncertainty = {
        "boundary_width_per_signal": (config.L + config.Y) / n,
        "two_Y_over_n": 2 * config.Y / n,
        "stderr": float(stderr[best]),
        "trials": trials,
        "asymptotic_rate_of_best": shannon_entropy(mus[best]),
        "lz_redundancy": float(means[best] - shannon_entropy(mus[best])),
        "truncation_errors_at_best": int(errors[best]),
        "mean_fidelity_at_best": float(fid[best].mean()),
        "per_pass_fidelity_bound": per_pass,
        "all_passes_fidelity_bound": max(per_pass, 0.0) ** len(mesh),
    }
    return result
