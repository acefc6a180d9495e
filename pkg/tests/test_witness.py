import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

import config
from conftest import bell, operator_of
from errors import (
    BadParam,
    BadParams,
    EpsilonVanishes,
    FullRank,
    IsPPT,
    NotPPT,
    OptFailed,
    OrthogonalityFail,
    ProductState,
    TraceViolation,
)
from linalg import BipartiteOperator, eigvals, frobenius_sq, partial_transpose
from states import (
    gamma,
    gamma_prime,
    max_entangled,
    max_entangled_rank,
    projector,
    pure_from_schmidt,
    rho_b,
    tiles_upb_state,
    tiles_upb_vectors,
    upb_projector,
)
from witness import (
    ATTAINED,
    DEW,
    FAIL,
    MIRROR_PSD,
    NDEW,
    NOT_APPLICABLE,
    PASS,
    FamilyParams,
    Witness,
    antisymmetric_witness,
    blend_toward_pure,
    boost_witness,
    detect_npt,
    expectation,
    local_filter_to_max_entangled,
    mirror,
    ndew_from_edge,
    nearest_pure_pt_witness,
    phi_mixture_witness,
    pure_pt_witness,
    sample_dew,
    shift_witness,
    spectral_report,
    w_family,
)

RESTARTS = 12


def _bell_witness(m=2, n=2):
    return pure_pt_witness(max_entangled_rank(2, m, n))


class TestFamily:
    def test_identity_part_is_not_a_witness(self):
        report = spectral_report(w_family(FamilyParams(1, 0, 0, 0, 2, 2)))
        assert not report.is_ew
        assert report.verdicts["is_ew"] == FAIL

    def test_bell_pt(self):
        w = w_family(FamilyParams(0, 1, 0, 0, 2, 2))
        assert_allclose(eigvals(w.op), [0.5, 0.5, 0.5, -0.5], atol=1e-12)
        report = spectral_report(w)
        assert_allclose([report.lambda1, report.lambda_min, report.negativity, report.fro_sq], [0.5, -0.5, 0.5, 1.0], atol=1e-12)
        assert report.failures == []
        assert report.verdicts["lambda_min_range"] == ATTAINED
        assert report.verdicts["fro_sq_range"] == ATTAINED
        assert report.verdicts["negativity_cap"] == ATTAINED

    def test_half_mixture(self):
        w = w_family(FamilyParams(0.5, 0.5, 0, 0, 3, 3))
        assert_allclose(w.op.trace(), 1.0)
        assert_allclose(eigvals(w.op), [0.3125] * 3 + [0.0625] * 5 + [-0.25], atol=1e-12)
        assert w.class_tag == DEW

    @pytest.mark.parametrize("b", [0.1, 0.5, 1.0])
    def test_spectrum_formula(self, b):
        w = w_family(FamilyParams(1 - b, b, 0, 0, 3, 3))
        expected = [(1 - b) / 8 + b / 2] * 3 + [(1 - b) / 8] * 5 + [-b / 2]
        assert_allclose(eigvals(w.op), expected, atol=1e-10)

    def test_params_checked(self):
        with pytest.raises(BadParams):
            FamilyParams(0.5, 0.6, 0, 0, 2, 2)
        with pytest.raises(BadParams):
            FamilyParams(1, 0, 0, 0, 3, 2)


class TestPurePt:
    def test_qutrit(self):
        report = spectral_report(pure_pt_witness(max_entangled(3, 3)))
        assert_allclose(report.lambdas, [1 / 3] * 6 + [-1 / 3] * 3, atol=1e-12)
        assert_allclose(report.negativity, 1.0)
        assert report.verdicts["three_smallest"] == ATTAINED

    def test_qubit_tail(self):
        psi = pure_from_schmidt([0.92388, 0.382683], 2, 2, normalize=True)
        values = eigvals(pure_pt_witness(psi).op)
        assert_allclose(values[2:].sum(), -1 / (2 + 2 * math.sqrt(2)), atol=1e-6)

    def test_product_state(self):
        with pytest.raises(ProductState):
            pure_pt_witness(pure_from_schmidt([1.0], 2, 2))

    def test_antisymmetric(self):
        w = antisymmetric_witness(3)
        assert_allclose(eigvals(w.op), [1 / 3] * 6 + [-1 / 3] * 3, atol=1e-12)

    def test_phi_mixture(self):
        w = phi_mixture_witness(2, 4, [0.5, 0.5])
        assert_allclose(w.op.trace(), 1.0)
        assert_allclose(spectral_report(w).negativity, 0.5, atol=1e-12)
        with pytest.raises(BadParams):
            phi_mixture_witness(2, 4, [0.2, 0.2, 0.6])

    def test_purity_one(self):
        w = pure_pt_witness(pure_from_schmidt([0.8, 0.6], 2, 3))
        assert_allclose(frobenius_sq(w.op), 1.0, atol=1e-10)
        nearest, distance = nearest_pure_pt_witness(w)
        assert distance < 1e-9
        assert_allclose(nearest.op.matrix, w.op.matrix, atol=1e-9)

    def test_near_pure_dew_is_near_pure_pt(self):
        psi = pure_from_schmidt([0.8, 0.6], 2, 3)
        corner = np.zeros(6)
        corner[2] = 1.0
        eta = 1e-7
        mixed = (1 - eta) * projector(psi).matrix + eta * np.outer(corner, corner)
        w = Witness(partial_transpose(BipartiteOperator(2, 3, mixed)), DEW)
        assert frobenius_sq(w.op) > 1 - 1e-6
        nearest, distance = nearest_pure_pt_witness(w)
        assert distance < 1e-3
        assert_allclose(nearest.op.matrix, pure_pt_witness(psi).op.matrix, atol=1e-6)

    def test_nearest_of_product_witness(self):
        corner = np.zeros(4)
        corner[0] = 1.0
        with pytest.raises(ProductState):
            nearest_pure_pt_witness(Witness(operator_of(corner, 2, 2), DEW))


class TestSampling:
    def test_rejects_pure_p(self):
        with pytest.raises(BadParams):
            sample_dew(2, 3, 1.0, 1, 1)

    def test_pure_q(self):
        w = sample_dew(3, 3, 0.0, 1, 1, seed=9)
        assert_allclose(w.op.trace(), 1.0)
        assert_allclose(frobenius_sq(w.op), 1.0, atol=1e-12)

    def test_seeded(self):
        first, second = sample_dew(2, 4, 0.3, 2, 1, seed=4), sample_dew(2, 4, 0.3, 2, 1, seed=4)
        assert np.array_equal(first.op.matrix, second.op.matrix)

    @pytest.mark.parametrize("m,n", [(2, 3), (3, 3), (3, 4)])
    def test_reports_pass(self, m, n):
        reports = [spectral_report(sample_dew(m, n, 0.2, m * n, 1, seed=seed)) for seed in range(20)]
        witnesses = [report for report in reports if report.is_ew]
        assert witnesses
        for report in witnesses:
            assert report.failures == []


class TestSpectralReport:
    def test_psd_input(self):
        report = spectral_report(Witness(BipartiteOperator(2, 2, np.eye(4) / 4)))
        assert not report.is_ew
        assert all(v == NOT_APPLICABLE for k, v in report.verdicts.items() if k != "is_ew")

    def test_qubit_rows_only_for_qubits(self):
        report = spectral_report(_bell_witness(3, 3))
        assert report.verdicts["qubit_pair_sum"] == NOT_APPLICABLE
        assert report.verdicts["two_smallest"] == PASS

    def test_unnormalized_rejected(self):
        with pytest.raises(TraceViolation):
            Witness(BipartiteOperator(2, 2, np.eye(4)))


def test_expectation():
    w = _bell_witness()
    assert_allclose(expectation(w.op, operator_of(bell(), 2, 2)), 0.5)


class TestMirror:
    def test_maximally_mixed(self):
        result = mirror(Witness(BipartiteOperator(2, 3, np.eye(6) / 6)), RESTARTS)
        assert_allclose(result.mu, 1 / 6)
        assert_allclose(result.w_m.matrix, np.zeros((6, 6)), atol=1e-12)
        assert result.verdict == MIRROR_PSD

    def test_bell_pt(self):
        result = mirror(_bell_witness(), RESTARTS)
        assert_allclose(result.mu, 0.5, atol=1e-9)
        assert result.verdict == MIRROR_PSD

    def test_remark_witness(self):
        vector = np.array([1.0, 0, 0, 1.0])
        corner = np.diag([1.0, 0, 0, 0])
        matrix = partial_transpose(BipartiteOperator(2, 2, np.outer(vector, vector) / 3)).matrix + corner / 3
        result = mirror(Witness(BipartiteOperator(2, 2, matrix)), RESTARTS)
        assert_allclose(result.mu, 2 / 3, atol=1e-8)
        assert eigvals(result.w_m)[-1] >= -1e-10
        assert_allclose(result.w_m.matrix, result.mu * np.eye(4) - matrix)


class TestLocalFilter:
    def test_bell(self):
        psi = pure_from_schmidt([math.sqrt(2) / 2] * 2, 2, 2)
        filters = local_filter_to_max_entangled(psi)
        assert filters.residual(psi) <= 1e-9

    def test_unequal_coefficients(self):
        psi = pure_from_schmidt([0.8, 0.6], 2, 2)
        filters = local_filter_to_max_entangled(psi)
        assert filters.residual(psi) <= 1e-9
        assert_allclose(np.abs(filters.a), np.diag([0.8, 0.6]) * math.sqrt(2), atol=1e-12)
        assert_allclose(np.abs(filters.b), np.eye(2), atol=1e-12)

    def test_rank_deficient_in_larger_space(self):
        psi = pure_from_schmidt([0.8, 0.6], 3, 4)
        filters = local_filter_to_max_entangled(psi)
        assert filters.residual(psi) <= 1e-9
        assert abs(np.linalg.det(filters.a)) > 0.1


class TestEdgeWitness:
    def test_full_rank(self):
        with pytest.raises(FullRank):
            ndew_from_edge(BipartiteOperator(3, 3, np.eye(9) / 9), restarts=RESTARTS)

    def test_not_ppt(self):
        with pytest.raises(NotPPT):
            ndew_from_edge(operator_of(bell(3, 3), 3, 3), restarts=RESTARTS)

    def test_rho_b(self):
        sigma = rho_b(0.9)
        w = ndew_from_edge(sigma, restarts=config.EDGE_RESTARTS)
        assert w.class_tag == NDEW
        assert_allclose(w.op.trace(), 1.0)
        assert expectation(w.op, sigma) < -1e-9
        assert w.ndew.epsilon_estimate > config.EPSILON_FLOOR
        assert w.ndew.delta <= w.ndew.epsilon_estimate / 2
        assert spectral_report(w).is_ew

    def test_too_few_agreeing_restarts(self):
        assert config.EPSILON_MIN_RESTARTS > RESTARTS
        with pytest.raises(OptFailed):
            ndew_from_edge(rho_b(0.9), restarts=RESTARTS)

    def test_upb_subset_leaves_product_vector(self):
        partial = upb_projector(tiles_upb_vectors()[:4])
        with pytest.raises(EpsilonVanishes):
            ndew_from_edge(tiles_upb_state(), projectors=(partial, partial), restarts=config.EDGE_RESTARTS)


class TestModifiers:
    def _detecting(self):
        corner = np.zeros(4)
        corner[1] = 1.0
        return Witness(_bell_witness().op, DEW, ("bell",), detected=operator_of(corner, 2, 2))

    def test_boost_zero_is_identity(self):
        w = self._detecting()
        assert boost_witness(w, max_entangled(2, 2), 0) is w

    def test_boost_needs_orthogonality(self):
        w = replace(self._detecting(), detected=operator_of(np.eye(4)[0], 2, 2))
        with pytest.raises(OrthogonalityFail):
            boost_witness(w, max_entangled(2, 2), 1.0)

    def test_boost_needs_detected_state(self):
        with pytest.raises(OrthogonalityFail):
            boost_witness(_bell_witness(), max_entangled(2, 2), 1.0)

    def test_boost_keeps_trace(self):
        w = boost_witness(self._detecting(), max_entangled(2, 2), 3.0)
        assert_allclose(w.op.trace(), 1.0)
        assert_allclose(w.op.matrix, _bell_witness().op.matrix)
        with pytest.raises(BadParam):
            boost_witness(self._detecting(), max_entangled(2, 2), -1.0)

    def test_shift(self):
        w = _bell_witness()
        shifted = shift_witness(w, 0.1)
        assert_allclose(shifted.op.trace(), 1.0)
        assert_allclose(eigvals(shifted.op), (eigvals(w.op) + 0.1) / 1.4)
        assert shifted.provenance[-1] == "shift_witness(eps=0.1)"

    def test_blend(self):
        w = _bell_witness()
        target = np.zeros(4)
        target[0] = 1.0
        blended = blend_toward_pure(w, target, 0.5)
        assert_allclose(blended.op.trace(), 1.0)
        assert blended.class_tag == DEW
        with pytest.raises(BadParam):
            blend_toward_pure(w, target, 1.0)


class TestDetection:
    def test_ppt_rejected(self):
        with pytest.raises(IsPPT):
            detect_npt(gamma(), RESTARTS)

    def test_small_dimensions_rejected(self):
        with pytest.raises(BadParam):
            detect_npt(operator_of(bell(2, 3), 2, 3), RESTARTS)

    def test_bell_in_qutrits(self):
        rho = projector(max_entangled_rank(2, 3, 3))
        certificate = detect_npt(rho, config.EDGE_RESTARTS)
        assert certificate.expectation < -1e-9
        assert certificate.branch == "schmidt2"
        assert certificate.schmidt_rank == 2
        assert_allclose(certificate.witness.op.trace(), 1.0)
        assert_allclose(expectation(certificate.witness.op, rho), certificate.expectation)

    @pytest.mark.slow
    def test_max_entangled_qutrits(self):
        # the most negative eigenvectors of the swap are antisymmetric, hence Schmidt rank 2
        certificate = detect_npt(projector(max_entangled(3, 3)), config.EDGE_RESTARTS)
        assert certificate.expectation < -1e-9
        assert certificate.branch == "schmidt2"
        assert certificate.schmidt_rank == 2

    @pytest.mark.slow
    def test_antisymmetric_werner_state(self):
        swap = np.eye(9).reshape(3, 3, 3, 3).transpose(0, 1, 3, 2).reshape(9, 9)
        rho = BipartiteOperator(3, 3, (np.eye(9) - swap) / 6)
        certificate = detect_npt(rho, config.EDGE_RESTARTS)
        assert certificate.branch == "schmidt3"
        assert certificate.schmidt_rank == 3
        assert certificate.expectation < -1e-9
        assert_allclose(expectation(certificate.witness.op, rho), certificate.expectation)

    @pytest.mark.slow
    def test_qubit_qudit(self):
        certificate = detect_npt(projector(max_entangled(2, 4)), config.EDGE_RESTARTS)
        assert certificate.expectation < -1e-9
        assert certificate.branch == "qubit"


@pytest.mark.slow
def test_boost_approaches_max_entangled_spectrum():
    w = ndew_from_edge(gamma_prime(), restarts=config.EDGE_RESTARTS)
    negativities = [spectral_report(boost_witness(w, max_entangled(3, 3), t)).negativity for t in (1.0, 10.0, 1000.0)]
    assert negativities[0] < negativities[1] < negativities[2]
    assert_allclose(negativities[-1], 1.0, atol=1e-2)
