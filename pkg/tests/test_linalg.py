import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qzip.linalg import (
    DimensionError,
    NotPSDError,
    as_density_matrix,
    eigendecomposition,
    fidelity_general,
    fidelity_pure_mixed,
    partial_trace,
    projector,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    shannon_entropy,
    tensor_product,
    von_neumann_entropy,
)

KET0 = np.array([1.0, 0.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
# -(0.9 log2 0.9 + 0.1 log2 0.1), evaluated independently with math.log2
H_09 = 0.4689955935892812


class TestFidelityPureMixed:
    def test_maximally_mixed(self):
        assert fidelity_pure_mixed(KET0, np.eye(2) / 2) == pytest.approx(0.5, abs=1e-15)

    def test_own_projector(self, rng):
        psi = random_pure_state(3, rng)
        assert fidelity_pure_mixed(psi, projector(psi)) == pytest.approx(1.0, abs=1e-12)

    def test_plus_against_diagonal(self):
        # <+|diag(0.9, 0.1)|+> = (0.9 + 0.1) / 2
        assert fidelity_pure_mixed(PLUS, np.diag([0.9, 0.1])) == pytest.approx(0.5, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            fidelity_pure_mixed(KET0, np.eye(3) / 3)


class TestFidelityGeneral:
    def test_identity_case(self, rng):
        rho = random_density_matrix(3, rng)
        assert fidelity_general(rho, rho) == pytest.approx(1.0, abs=1e-10)

    def test_mixed_against_pure(self):
        assert fidelity_general(np.eye(2) / 2, projector(KET0)) == pytest.approx(0.5, abs=1e-12)

    def test_commuting_closed_form(self):
        # (sum_i sqrt(p_i q_i))^2 = (sqrt(.09) + sqrt(.09))^2
        value = fidelity_general(np.diag([0.9, 0.1]), np.diag([0.1, 0.9]))
        assert value == pytest.approx(0.36, abs=1e-12)

    def test_rejects_non_psd(self):
        with pytest.raises(NotPSDError):
            fidelity_general(np.diag([1.1, -0.1]), np.eye(2) / 2)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_symmetric(self, d, rng):
        for _ in range(200 // 3 + 1):
            rho, omega = random_density_matrix(d, rng), random_density_matrix(d, rng)
            assert abs(fidelity_general(rho, omega) - fidelity_general(omega, rho)) < 1e-9

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_agrees_with_pure_formula(self, d, rng):
        for _ in range(20):
            psi = random_pure_state(d, rng)
            rho = random_density_matrix(d, rng)
            assert abs(fidelity_general(projector(psi), rho) - fidelity_pure_mixed(psi, rho)) < 1e-10

    def test_unit_fidelity_iff_equal(self, rng):
        for _ in range(50):
            rho = random_density_matrix(2, rng)
            u = random_unitary(2, rng)
            omega = u @ rho @ u.conj().T
            close = np.linalg.norm(rho - omega) < 1e-8
            assert (fidelity_general(rho, omega) > 1 - 1e-12) == close
            assert fidelity_general(rho, rho) > 1 - 1e-12


class TestEntropy:
    @pytest.mark.parametrize("probs, expected", [((1, 0), 0.0), ((0.5, 0.5), 1.0), ((0.9, 0.1), H_09)])
    def test_shannon(self, probs, expected):
        assert shannon_entropy(probs) == pytest.approx(expected, abs=1e-12)

    def test_von_neumann_values(self, rng):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)
        assert von_neumann_entropy(projector(random_pure_state(4, rng))) == pytest.approx(0.0, abs=1e-9)
        assert von_neumann_entropy(np.diag([0.9, 0.1])) == pytest.approx(H_09, abs=1e-12)

    def test_rejects_bad_distribution(self):
        with pytest.raises(ValueError):
            shannon_entropy([0.7, 0.7])

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_unitary_invariance_and_range(self, d, rng):
        for _ in range(20):
            rho = random_density_matrix(d, rng)
            u = random_unitary(d, rng)
            s = von_neumann_entropy(rho)
            assert 0 <= s <= np.log2(d) + 1e-12
            assert abs(von_neumann_entropy(u @ rho @ u.conj().T) - s) < 1e-9

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=8).filter(lambda x: sum(x) > 1e-3))
    @settings(max_examples=100, deadline=None)
    def test_shannon_bounds(self, weights):
        p = np.array(weights) / sum(weights)
        h = shannon_entropy(p)
        assert -1e-12 <= h <= np.log2(len(p)) + 1e-12


class TestTensorAndTrace:
    def test_trace_of_product_state(self):
        rho = partial_trace(tensor_product(projector(KET0), projector(KET0)), [2, 2], 1)
        assert np.allclose(rho, projector(KET0), atol=1e-15)

    def test_correlated_vector_gives_diagonal(self):
        a = np.array([0.6, 0.0, 0.8j])
        psi = sum(a[i] * np.kron(np.eye(3)[i], np.eye(3)[i]) for i in range(3))
        assert np.allclose(partial_trace(psi, [3, 3], 1), np.diag(np.abs(a) ** 2), atol=1e-12)

    @pytest.mark.parametrize("da, db", [(2, 2), (2, 3), (3, 4)])
    def test_recovers_factor(self, da, db, rng):
        ra, rb = random_density_matrix(da, rng), random_density_matrix(db, rng)
        joint = tensor_product(ra, rb)
        assert np.allclose(partial_trace(joint, [da, db], 1), ra, atol=1e-10)
        assert np.allclose(partial_trace(joint, [da, db], 0), rb, atol=1e-10)
        assert abs(np.trace(partial_trace(joint, [da, db], 1)) - 1) < 1e-12

    def test_three_parties(self, rng):
        ops = [random_density_matrix(2, rng) for _ in range(3)]
        joint = tensor_product(*ops)
        assert np.allclose(partial_trace(joint, [2, 2, 2], [0, 2]), ops[1], atol=1e-10)

    def test_dimension_errors(self):
        with pytest.raises(DimensionError):
            partial_trace(np.eye(4) / 4, [2, 3], 1)
        with pytest.raises(DimensionError):
            partial_trace(np.eye(4) / 4, [2, 2], 2)
        with pytest.raises(DimensionError):
            tensor_product(KET0, np.eye(2))


class TestEigendecomposition:
    def test_sorted_descending(self):
        evals, _ = eigendecomposition(np.diag([0.1, 0.9]))
        assert np.allclose(evals, [0.9, 0.1])

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_reconstructs(self, d, rng):
        rho = random_density_matrix(d, rng)
        evals, vecs = eigendecomposition(rho)
        assert np.allclose(vecs @ np.diag(evals) @ vecs.conj().T, rho, atol=1e-10)
        assert np.all(np.diff(evals) <= 0)

    def test_degenerate_ties_are_deterministic(self):
        first = eigendecomposition(np.eye(3) / 3)
        second = eigendecomposition(np.eye(3) / 3)
        assert np.array_equal(first[1], second[1])


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        as_density_matrix(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        as_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(DimensionError):
        as_density_matrix(np.ones(3))
