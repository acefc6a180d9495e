import numpy as np
import pytest
from numpy.testing import assert_allclose

import config
from blockpos import (
    INCONCLUSIVE,
    NO,
    YES,
    YES_HEURISTIC,
    is_block_positive,
    product_expectation,
    product_expectation_max,
    product_expectation_min,
    product_vector_in_subspace,
    reduced_range_check,
    zero_pattern_check,
)
from conftest import bell, operator_of, random_hermitian
from errors import NoConvergedRestart
from linalg import BipartiteOperator, eig_hermitian, eigvals, partial_transpose
from states import tiles_upb_state
from witness import sample_dew

RESTARTS = 12


def _bell_pt(m=2):
    vector = np.eye(m).ravel() / np.sqrt(m)
    return partial_transpose(operator_of(vector, m, m))


def _choi_witness():
    # Choi matrix of Choi's positive map: neither W nor W^G is PSD, so the optimizer decides.
    w = np.zeros((9, 9))
    for i in range(3):
        w[4 * i, 4 * i] = 1.0
        w[3 * i + (i + 1) % 3, 3 * i + (i + 1) % 3] = 2.0
        for j in range(3):
            if i != j:
                w[4 * i, 4 * j] = -1.0
    return BipartiteOperator(3, 3, w)


class TestProductExpectation:
    def test_identity(self):
        best = product_expectation_min(BipartiteOperator(2, 3, np.eye(6)), RESTARTS)
        assert_allclose(best.value, 1.0)
        assert_allclose(product_expectation_max(BipartiteOperator(2, 3, np.eye(6)), RESTARTS).value, 1.0)

    def test_bell_pt_min_is_zero(self):
        best = product_expectation_min(_bell_pt(), RESTARTS)
        assert_allclose(best.value, 0.0, atol=1e-9)
        assert best.restarts_converged >= 1

    @pytest.mark.parametrize("m", [2, 3])
    def test_bell_pt_max_is_largest_schmidt_square(self, m):
        assert_allclose(product_expectation_max(_bell_pt(m), RESTARTS).value, 1 / m, atol=1e-9)

    def test_diagonal(self):
        w = BipartiteOperator(2, 2, np.diag([0.5, 2.0, 3.0, 4.0]))
        assert_allclose(product_expectation_min(w, RESTARTS).value, 0.5)
        assert_allclose(product_expectation_max(w, RESTARTS).value, 4.0)

    def test_reported_vectors_give_value(self, rng):
        g = rng.standard_normal((6, 6))
        w = BipartiteOperator(2, 3, g + g.T)
        best = product_expectation_min(w, RESTARTS, seed=3)
        assert_allclose(product_expectation(w, best.vec_a, best.vec_b), best.value)
        assert_allclose(np.linalg.norm(best.vec_a), 1.0)
        assert_allclose(np.linalg.norm(best.vec_b), 1.0)

    def test_seeded(self, rng):
        g = rng.standard_normal((9, 9))
        w = BipartiteOperator(3, 3, g + g.T)
        first = product_expectation_min(w, RESTARTS, seed=5)
        second = product_expectation_min(w, RESTARTS, seed=5)
        assert first.value == second.value
        assert first.restart_values == second.restart_values

    def test_history_monotone(self, rng):
        w = BipartiteOperator(3, 3, random_hermitian(rng, 9))
        lowest = product_expectation_min(w, RESTARTS)
        assert np.all(np.diff(lowest.history) <= 1e-12)
        highest = product_expectation_max(w, RESTARTS)
        assert np.all(np.diff(highest.history) >= -1e-12)

    def test_between_extreme_eigenvalues(self, rng):
        for _ in range(5):
            w = BipartiteOperator(2, 3, random_hermitian(rng, 6))
            values = eigvals(w)
            lowest = product_expectation_min(w, RESTARTS).value
            highest = product_expectation_max(w, RESTARTS).value
            assert values[-1] - 1e-12 <= lowest <= highest <= values[0] + 1e-12

    def test_no_worse_than_grid(self, rng):
        w = BipartiteOperator(2, 2, random_hermitian(rng, 4))
        theta, phi = np.meshgrid(np.linspace(0, np.pi, 10), np.linspace(0, 2 * np.pi, 10, endpoint=False))
        grid = np.stack([np.cos(theta / 2).ravel(), (np.exp(1j * phi) * np.sin(theta / 2)).ravel()], axis=1)
        blocks = w.matrix.reshape(2, 2, 2, 2)
        values = np.einsum("pi,qj,ijkl,pk,ql->pq", grid.conj(), grid.conj(), blocks, grid, grid).real
        assert values.size == 10_000
        assert product_expectation_min(w, 32).value <= values.min() + 1e-6
        assert product_expectation_max(w, 32).value >= values.max() - 1e-6

    def test_partial_transpose_symmetry(self, rng):
        w = BipartiteOperator(2, 2, random_hermitian(rng, 4))
        direct = product_expectation_min(w, 32).value
        transposed = product_expectation_min(partial_transpose(w), 32).value
        assert_allclose(direct, transposed, atol=1e-8)


class TestBlockPositivity:
    def test_negative_identity(self):
        verdict = is_block_positive(BipartiteOperator(2, 2, -np.eye(4)), RESTARTS)
        assert verdict.status == NO
        assert_allclose(verdict.counterexample[2], -1.0)

    def test_psd(self):
        verdict = is_block_positive(operator_of(bell(), 2, 2), RESTARTS)
        assert (verdict.status, verdict.method) == (YES, "psd")

    def test_decomposable_witness(self):
        verdict = is_block_positive(_bell_pt(), RESTARTS)
        assert verdict.status == YES_HEURISTIC

    def test_negated_witness(self):
        w = _bell_pt()
        verdict = is_block_positive(w.with_matrix(-w.matrix), RESTARTS)
        assert verdict.status == NO
        assert_allclose(verdict.counterexample[2], -0.5, atol=1e-9)

    def test_choi_map_witness(self):
        verdict = is_block_positive(_choi_witness(), 48)
        assert verdict.status in (YES_HEURISTIC, INCONCLUSIVE)
        assert verdict.method == "seesaw"
        assert verdict.optimum is not None
        assert verdict.optimum.value >= -1e-9

    def test_unconverged_counterexample_kept(self, monkeypatch):
        monkeypatch.setattr(config, "SEESAW_MAX_ITER", 1)
        monkeypatch.setattr(config, "SEESAW_CONVERGENCE", 0.0)
        w = BipartiteOperator(2, 2, -np.eye(4))
        with pytest.raises(NoConvergedRestart) as caught:
            product_expectation_min(w, RESTARTS)
        assert caught.value.best.restarts_converged == 0
        assert_allclose(caught.value.best.value, -1.0)

        verdict = is_block_positive(w, RESTARTS)
        assert verdict.status == NO
        assert verdict.budget["converged"] == 0
        assert_allclose(verdict.counterexample[2], -1.0)

    def test_unconverged_nonnegative_is_inconclusive(self, monkeypatch):
        monkeypatch.setattr(config, "SEESAW_MAX_ITER", 1)
        monkeypatch.setattr(config, "SEESAW_CONVERGENCE", 0.0)
        verdict = is_block_positive(_choi_witness(), RESTARTS)
        assert verdict.status == INCONCLUSIVE
        assert verdict.optimum.value >= -1e-9


class TestSubspace:
    def test_product_line(self):
        basis = np.eye(4)[:, :2]
        found = product_vector_in_subspace(basis, 2, 2, RESTARTS)
        assert found is not None
        a, b = found
        vector = np.kron(a, b)
        assert_allclose(np.linalg.norm(basis @ basis.T @ vector), 1.0, atol=1e-6)

    def test_entangled_line(self):
        assert product_vector_in_subspace(bell()[:, None], 2, 2, RESTARTS) is None

    def test_upb_range_has_no_product_vector(self):
        spectrum = eig_hermitian(tiles_upb_state())
        basis = spectrum.vectors[:, spectrum.values > 1e-9]
        assert basis.shape[1] == 4
        assert product_vector_in_subspace(basis, 3, 3, RESTARTS) is None


class TestZeroPatterns:
    def test_sampled_dew(self):
        w = sample_dew(3, 3, 0.3, 9, 2, seed=1)
        assert zero_pattern_check(w.op) == []

    def test_vanishing_block(self):
        w = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.eye(2)]])
        violations = zero_pattern_check(BipartiteOperator(2, 2, w))
        assert len(violations) == 1
        assert "(1,2)" in violations[0]

    def test_zero(self):
        assert zero_pattern_check(BipartiteOperator(2, 3, np.zeros((6, 6)))) == []


def test_reduced_range():
    holds, residual = reduced_range_check(operator_of(bell(), 2, 2))
    assert holds
    assert_allclose(residual, 0.0, atol=1e-9)
    vector = np.zeros(6)
    vector[0] = 1.0
    assert reduced_range_check(operator_of(vector, 2, 3))[0]
