import numpy as np
import pytest

from qzip.diag import (
    DimensionError,
    DuplicationOp,
    apply_duplication,
    distance_from_monomial,
    duplicated_density_matrix,
    phase_counterexample_check,
    reduced_after_duplication,
    run_theorem1,
    theorem1_residual,
    with_blank_ancilla,
)
from qzip.linalg import partial_trace, random_density_matrix, random_pure_state, random_unitary
from qzip.source import effective_source

HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


class TestDuplication:
    def test_basis_copy(self):
        out = apply_duplication(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        assert np.allclose(out, np.kron([0, 1], [0, 1]))

    def test_superposition_entangles(self):
        a, b = 0.6, 0.8j
        out = apply_duplication(np.array([a, b]), np.array([1.0, 0.0]))
        assert np.allclose(out, a * np.kron([1, 0], [1, 0]) + b * np.kron([0, 1], [0, 1]))

    def test_reduced_state_is_diagonal(self):
        a, b = 0.6, 0.8j
        out = apply_duplication(np.array([a, b]), np.array([1.0, 0.0]))
        for traced in (0, 1):
            assert np.allclose(partial_trace(out, [2, 2], traced), np.diag([0.36, 0.64]), atol=1e-12)

    def test_rejects_nonblank_ancilla(self):
        with pytest.raises(ValueError):
            apply_duplication(np.array([1.0, 0.0]), np.array([0.0, 1.0]))

    @pytest.mark.parametrize("dim, positions", [(2, 1), (2, 3), (3, 2), (4, 1)])
    def test_unitary_and_inverse(self, dim, positions):
        op = DuplicationOp(dim, positions)
        m = op.matrix()
        assert np.allclose(m.T @ m, np.eye(m.shape[0]))
        assert np.allclose(op.matrix(inverse=True) @ m, np.eye(m.shape[0]))

    def test_digitwise_addition_mod_d(self):
        op = DuplicationOp(3, 2)
        # |a=(1,2)>|b=(2,2)> -> |a>|b+a mod 3> = |(1,2)>|(0,1)>
        a, b = 1 * 3 + 2, 2 * 3 + 2
        assert op.table()[a * 9 + b] == a * 9 + (0 * 3 + 1)

    def test_multi_position_copy(self, rng):
        psi = random_pure_state(8, rng)
        out = apply_duplication(psi, np.eye(8)[0])
        expected = sum(psi[i] * np.kron(np.eye(8)[i], np.eye(8)[i]) for i in range(8))
        assert np.allclose(out, expected)

    def test_blank_ancilla_layout(self):
        assert np.allclose(with_blank_ancilla(np.array([0.6, 0.8])), [0.6, 0, 0.8, 0])


class TestTheorem1:
    def test_identity(self, rng):
        assert theorem1_residual(np.arange(4), random_pure_state(4, rng)) == 0.0

    def test_random_permutation_64(self, rng):
        for _ in range(5):
            table = rng.permutation(64)
            assert theorem1_residual(table, random_pure_state(64, rng)) <= 1e-10

    def test_hadamard(self):
        # C|0> = |+>, duplicate-and-undo leaves |+>|+> vs |+>|0>; hand value sqrt(2 - sqrt 2)
        assert theorem1_residual(HADAMARD, np.array([1.0, 0.0])) == pytest.approx(np.sqrt(2 - np.sqrt(2)), abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, np.pi / 2, np.pi, 2.5])
    def test_phase_counterexample(self, alpha):
        # X diag(1, e^{ia}) on |+>: hand value sqrt(2) |sin(a/2)|
        assert phase_counterexample_check(alpha) == pytest.approx(np.sqrt(2) * abs(np.sin(alpha / 2)), abs=1e-12)

    def test_phase_counterexample_thresholds(self):
        assert phase_counterexample_check(0.0) < 1e-12
        assert phase_counterexample_check(np.pi) > 0.5
        assert phase_counterexample_check(np.pi / 2) > 0

    def test_qutrit_permutations(self, rng):
        for _ in range(10):
            assert theorem1_residual(rng.permutation(9), random_pure_state(9, rng), dim=3) <= 1e-10

    def test_converse_on_random_unitaries(self, rng):
        for _ in range(50):
            u = random_unitary(4, rng)
            assert distance_from_monomial(u) > 1e-6
            worst = max(theorem1_residual(u, random_pure_state(4, rng)) for _ in range(10))
            assert worst > 1e-3

    def test_dimension_errors(self, rng):
        with pytest.raises(DimensionError):
            theorem1_residual(np.arange(4), random_pure_state(8, rng))
        with pytest.raises(DimensionError):
            theorem1_residual(np.arange(8192), np.eye(8192)[0])
        with pytest.raises(ValueError):
            theorem1_residual(np.array([0, 0, 1, 2]), np.eye(4)[0])

    def test_report(self):
        rep = run_theorem1(2, 3, 20, seed=4)
        assert rep.max_residual_permutations <= 1e-10
        assert rep.min_residual_counterexamples > 1e-3
        assert rep.hadamard_residual == pytest.approx(np.sqrt(2 - np.sqrt(2)), abs=1e-12)
        assert run_theorem1(2, 3, 20, seed=4) == rep


def test_distance_from_monomial():
    phased = np.array([[0, 1j], [np.exp(0.3j), 0]])
    assert distance_from_monomial(phased) < 1e-12
    assert distance_from_monomial(HADAMARD) > 0.5


class TestCrossModule:
    @pytest.mark.parametrize("d", [2, 3])
    def test_duplicated_trace_is_effective_source(self, d, rng):
        for _ in range(20):
            rho = random_density_matrix(d, rng)
            basis = random_unitary(d, rng)
            reduced = reduced_after_duplication(rho, basis)
            assert np.allclose(reduced, np.diag(effective_source(rho, basis).mu), atol=1e-10)

    def test_duplicated_state_trace(self, rng):
        rho = random_density_matrix(2, rng)
        assert np.trace(duplicated_density_matrix(rho)) == pytest.approx(1.0)
