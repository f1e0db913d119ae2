import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rotation, state_with_spectrum
from qzip.linalg import random_unitary, von_neumann_entropy
from qzip.search import (
    analytic_search,
    bloch_angle_for_distance,
    build_mesh,
    empirical_search,
    entropy_gap_bound,
    entropy_modulus,
    mesh_distances,
    phase_reduced_distance,
    rate_table,
    reduce_basis,
    select_basis,
)
from qzip.source import qubit_basis
from qzip.truncation import SmearConfig

PI8 = rotation(np.pi / 8)
S_09 = 0.4689955935892812


def brute_force_distance(u, v, grid=3600):
    """Nearest phase/permutation reduction of v, by grid search over the two column phases."""
    best = np.inf
    phases = np.exp(1j * np.linspace(0, 2 * np.pi, grid, endpoint=False))
    for perm in ([0, 1], [1, 0]):
        w = v[:, perm]
        # phases separate by column, so each column is optimised on its own
        cost = sum(np.min(np.linalg.norm(u[:, [j]] - np.outer(w[:, j], phases), axis=0) ** 2) for j in range(2))
        best = min(best, cost)
    return np.sqrt(best)


class TestDistance:
    def test_invariant_under_phases_and_order(self, rng):
        u = random_unitary(2, rng)
        v = u[:, ::-1] * np.exp(1j * np.array([0.4, -2.0]))
        assert phase_reduced_distance(u, v) < 1e-7

    def test_against_brute_force(self, rng):
        for _ in range(10):
            u, v = random_unitary(2, rng), random_unitary(2, rng)
            exact, grid = phase_reduced_distance(u, v), brute_force_distance(u, v)
            assert exact <= grid + 1e-12
            assert grid - exact < 1e-4

    def test_mesh_distance_agrees(self, rng):
        mesh = build_mesh(2, 0.3)
        u = random_unitary(2, rng)
        direct = [phase_reduced_distance(u, p) for p in mesh.points]
        assert np.allclose(mesh_distances(mesh, u), direct, atol=1e-7)

    def test_reduce_basis_round_trip(self, rng):
        for _ in range(20):
            u = random_unitary(2, rng)
            assert phase_reduced_distance(qubit_basis(*reduce_basis(u)), u) < 1e-7

    def test_bloch_angle(self):
        # reduced distance delta <-> first-vector overlap cos(g/2) = 1 - delta^2/4
        assert bloch_angle_for_distance(0.0) == 0.0
        assert bloch_angle_for_distance(2.0) == pytest.approx(np.pi)


class TestMesh:
    def test_large_delta_is_identity(self):
        mesh = build_mesh(2, 2.5)
        assert len(mesh) == 1 and np.allclose(mesh.points[0], np.eye(2))

    @pytest.mark.parametrize("delta, size", [(0.3, 49), (0.1, 364), (0.05, 1350)])
    def test_sizes(self, delta, size):
        assert len(build_mesh(2, delta)) == size

    def test_size_scales_inverse_square(self):
        sizes = [len(build_mesh(2, d)) for d in (0.2, 0.1, 0.05)]
        assert 3 < sizes[1] / sizes[0] < 5 and 3 < sizes[2] / sizes[1] < 5

    def test_contains_point_near_pi8(self):
        assert mesh_distances(build_mesh(2, 0.1), PI8).min() <= 0.1

    @pytest.mark.parametrize("delta", [0.3, 0.1, 0.05])
    def test_covering_probe(self, delta, rng):
        mesh = build_mesh(2, delta)
        worst = max(mesh_distances(mesh, random_unitary(2, rng)).min() for _ in range(1000))
        assert worst <= delta

    def test_invalid(self):
        with pytest.raises(ValueError):
            build_mesh(2, 0.0)
        with pytest.raises(NotImplementedError):
            build_mesh(3, 0.1)


class TestRateTable:
    def test_maximally_mixed(self):
        assert np.allclose(rate_table(np.eye(2) / 2, build_mesh(2, 0.3)), 1.0)

    def test_diagonal_source(self):
        rates = rate_table(np.diag([0.8, 0.2]), build_mesh(2, 0.1))
        assert rates.min() == pytest.approx(von_neumann_entropy(np.diag([0.8, 0.2])), abs=1e-12)

    def test_pi8_source(self):
        rho = state_with_spectrum([0.9, 0.1], PI8)
        mesh = build_mesh(2, 0.05)
        brute = min(von_neumann_entropy(np.diag(np.real(np.diag(v.conj().T @ rho @ v)))) for v in mesh.points)
        rates = rate_table(rho, mesh)
        assert rates.min() == pytest.approx(brute, abs=1e-12)
        assert S_09 <= rates.min() <= S_09 + entropy_gap_bound(0.05)

    def test_gap_within_calibrated_modulus(self, rng):
        mesh = build_mesh(2, 0.05)
        bound = entropy_modulus(0.05)
        for _ in range(500):
            lam = rng.uniform(0.505, 1.0)
            rho = state_with_spectrum([lam, 1 - lam], random_unitary(2, rng))
            gap = rate_table(rho, mesh).min() - von_neumann_entropy(rho)
            assert -1e-12 <= gap <= bound

    def test_modulus_table(self):
        assert entropy_modulus(0.05) == pytest.approx(entropy_gap_bound(0.05))
        with pytest.raises(KeyError):
            entropy_modulus(0.07)


class TestSelect:
    def test_single(self):
        assert select_basis([0.3]).best_index == 0

    def test_tie_goes_low(self):
        assert select_basis([0.5, 0.2, 0.2, 0.9]).best_index == 1

    def test_empty(self):
        with pytest.raises(ValueError):
            select_basis([])

    @given(st.lists(st.floats(0, 2), min_size=1, max_size=30), st.floats(1e-3, 1e3))
    @settings(max_examples=100, deadline=None)
    def test_scale_invariant(self, rates, scale):
        assert select_basis(rates).best_index == select_basis(np.array(rates) * scale).best_index

    def test_analytic_estimate_near_truth(self):
        rho = state_with_spectrum([0.9, 0.1], PI8)
        mesh = build_mesh(2, 0.05)
        res = analytic_search(rho, mesh)
        assert phase_reduced_distance(res.basis_estimate, PI8) <= 0.05
        assert res.entropy_estimate == res.best_rate == min(r for _, r in res.rate_table)


class TestEmpirical:
    def test_diagonal_source_single_basis(self):
        rho = np.diag([0.9, 0.1])
        n = 2**16
        res = empirical_search(rho, build_mesh(2, 3.0), n, SmearConfig(16, n), 3, seed=1)
        redundancy = res.uncertainty["lz_redundancy"]
        assert 0 < redundancy < 0.25
        assert abs(res.entropy_estimate - S_09 - redundancy) < 1e-12
        assert res.uncertainty["boundary_width_per_signal"] == 33 / n

    def test_pure_source(self):
        n = 2**18
        res = empirical_search(np.diag([1.0, 0.0]), build_mesh(2, 3.0), n, SmearConfig(32, n), 2, seed=2)
        assert res.best_rate <= 0.1

    def test_not_below_analytic(self):
        rho = state_with_spectrum([0.85, 0.15], rotation(0.3))
        mesh = build_mesh(2, 0.3)
        n = 2**14
        res = empirical_search(rho, mesh, n, SmearConfig(8, n), 3, seed=3)
        analytic = rate_table(rho, mesh)[res.best_index]
        assert res.best_rate >= analytic - 2 * res.uncertainty["stderr"]

    def test_deterministic(self):
        rho = np.diag([0.7, 0.3])
        mesh = build_mesh(2, 0.3)
        a = empirical_search(rho, mesh, 4096, SmearConfig(4, 4096), 2, seed=9)
        b = empirical_search(rho, mesh, 4096, SmearConfig(4, 4096), 2, seed=9)
        assert a.to_dict() == b.to_dict()

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            empirical_search(np.eye(2) / 2, build_mesh(2, 3.0), 100, SmearConfig(4, 99), 1, 0)
