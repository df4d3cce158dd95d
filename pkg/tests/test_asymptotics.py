import math
from fractions import Fraction

import numpy as np
import pytest

from thresholdlab.core.errors import InvalidArgumentError
from thresholdlab.core.types import BoxPotential, PerturbationPair
from thresholdlab.core.utils import loglog_slope
from thresholdlab.spectral.asymptotics import (
    CASE_FRACTIONAL,
    CASE_Q_DEGENERATE,
    CASE_Q_ZERO,
    CASE_REGULAR,
    compute_Q_r_gamma,
    decompose_M1,
    lambda_series_coefficients,
    match_refined,
    matrix_pole_refine,
    pole_expansions,
    pt_sign_condition,
    q_polynomial,
    radiating_coupling,
    square_well_kappa,
    threshold_poles,
)
from thresholdlab.spectral.classify import classify_poles
from thresholdlab.spectral.linalg import multiset_distance
from thresholdlab.spectral.overlaps import threshold_matrices
from thresholdlab.transverse import build_strip_spectrum
from thresholdlab.transverse.base import group_at

BOX = PerturbationPair(v1=BoxPotential(amplitude=-1.0, x1_range=(0.0, math.pi), x2_range=(-1.0, 1.0)))
JORDAN = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def _poles(m1, m2, tau=1):
    clusters = decompose_M1(m1)
    qdata = [compute_Q_r_gamma(clusters, m1, m2, i) for i in range(len(clusters))]
    return clusters, qdata, pole_expansions(clusters, qdata, tau)


def test_q_polynomial_matches_derivative_of_determinant():
    rng = np.random.default_rng(7)
    m1 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    m2 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    z0 = 0.3 + 0.2j
    h = 1e-6
    eye = np.eye(3)
    central = (np.linalg.det(z0 * eye - m1 + h * m2) - np.linalg.det(z0 * eye - m1 - h * m2)) / (2 * h)
    assert q_polynomial(m1, m2)(z0) == pytest.approx(central, rel=1e-6)


def test_q_polynomial_of_diagonal_m1():
    m1 = np.diag([1.0, 3.0])
    m2 = np.array([[2.0, 5.0], [7.0, -1.0]])
    # (z - 3) * 2 + (z - 1) * (-1) = z - 5
    np.testing.assert_allclose(q_polynomial(m1, m2).coef[:2], [-5.0, 1.0], atol=1e-12)


def test_simple_cluster_gives_second_order_correction():
    clusters, qdata, poles = _poles(np.array([[1.0]]), np.array([[2.0 / 3.0]]))
    assert len(clusters) == 1
    np.testing.assert_allclose(clusters[0].eigenvector, [1.0])
    assert qdata[0].r == 0
    assert qdata[0].gamma == pytest.approx(2.0 / 3.0)
    (pole,) = poles
    assert pole.case == CASE_FRACTIONAL
    assert pole.correction_exponent == 2
    assert pole.remainder_order == 3
    assert pole.evaluate(0.1) == pytest.approx(0.1 - 2.0 / 3.0 * 0.01)


def test_jordan_block_branches_as_three_halves_power():
    m2 = np.array([[0.0, 0.0], [1.0, 0.0]])
    clusters, qdata, poles = _poles(JORDAN, m2)
    assert [c.multiplicity for c in clusters] == [2]
    assert qdata[0].r == 0
    assert qdata[0].gamma == pytest.approx(1.0)
    assert [p.case for p in poles] == [CASE_FRACTIONAL, CASE_FRACTIONAL]
    corrections = sorted((p.correction for p in poles), key=lambda c: c.imag)
    assert corrections[0] == pytest.approx(-1j)
    assert corrections[1] == pytest.approx(1j)
    assert poles[0].correction_exponent == Fraction(3, 2)
    assert poles[0].remainder_order == 2
    eps = 1e-4
    refined = matrix_pole_refine(JORDAN, m2, eps)
    series = np.array([p.evaluate(eps) for p in poles])
    assert multiset_distance(series, refined) < 1e-14


def test_fractional_remainder_slope():
    m2 = np.array([[0.3, 0.1], [1.0, 0.2]])
    _, _, poles = _poles(JORDAN, m2)
    eps_values = [1e-6, 1e-5, 1e-4]
    gaps = []
    for eps in eps_values:
        refined = match_refined(poles, matrix_pole_refine(JORDAN, m2, eps), eps)
        gaps.append(abs(refined[0] - poles[0].evaluate(eps)))
    assert loglog_slope(eps_values, gaps) == pytest.approx(2.0, abs=0.05)


def test_simple_poles_remainder_slope():
    rng = np.random.default_rng(3)
    m1 = np.diag([1.0, 2.0]).astype(complex)
    m2 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    _, qdata, poles = _poles(m1, m2)
    assert qdata[0].gamma == pytest.approx(m2[0, 0])
    assert qdata[1].gamma == pytest.approx(m2[1, 1])
    eps_values = [1e-4, 2e-4, 4e-4, 8e-4]
    gaps = []
    for eps in eps_values:
        refined = match_refined(poles, matrix_pole_refine(m1, m2, eps), eps)
        gaps.append(abs(refined[0] - poles[0].evaluate(eps)))
    assert loglog_slope(eps_values, gaps) == pytest.approx(3.0, abs=0.05)


def test_identically_zero_q():
    m2 = np.diag([1.0, -1.0])
    _, qdata, poles = _poles(np.zeros((2, 2)), m2)
    assert qdata[0].identically_zero
    assert [p.case for p in poles] == [CASE_Q_ZERO, CASE_Q_ZERO]
    assert poles[0].remainder_order == 2
    assert poles[0].correction is None


def test_double_cluster_with_simple_q_root_is_regular():
    m2 = np.array([[1.0, 0.5], [0.2, 2.0]])
    _, qdata, poles = _poles(np.zeros((2, 2)), m2)
    assert qdata[0].r == 1
    assert qdata[0].gamma == pytest.approx(3.0)
    assert [p.case for p in poles] == [CASE_REGULAR, CASE_REGULAR]
    assert poles[0].remainder_order == 2


def test_q_vanishing_to_cluster_order_is_degenerate():
    m1 = np.diag([0.0, 1.0])
    m2 = np.diag([0.0, 1.0])
    clusters, qdata, poles = _poles(m1, m2)
    assert clusters[0].mu == pytest.approx(0.0)
    assert not qdata[0].identically_zero
    assert qdata[0].r is None
    assert poles[0].case == CASE_Q_DEGENERATE
    assert poles[0].remainder_order == 2


def test_durand_kerner_path_agrees_with_qr():
    m1 = np.array([[1.0, 0.2], [0.1, 2.0]])
    qr = [c.mu for c in decompose_M1(m1)]
    dk = [c.mu for c in decompose_M1(m1, method="durand-kerner")]
    np.testing.assert_allclose(qr, dk, atol=1e-12)
    with pytest.raises(InvalidArgumentError):
        decompose_M1(np.eye(5), method="durand-kerner")
    with pytest.raises(InvalidArgumentError):
        decompose_M1(np.eye(9))


def test_pole_expansions_validate_branch():
    clusters, qdata, _ = _poles(np.array([[1.0]]), np.array([[1.0]]))
    with pytest.raises(InvalidArgumentError):
        pole_expansions(clusters, qdata, 0)


def test_lambda_series_includes_cross_term():
    _, _, (pole,) = _poles(np.array([[2.0]]), np.array([[0.5]]))
    terms = dict(lambda_series_coefficients(pole, 1.0))
    assert terms[Fraction(0)] == pytest.approx(1.0)
    assert terms[Fraction(2)] == pytest.approx(-4.0)
    assert terms[Fraction(3)] == pytest.approx(2.0)
    assert terms[Fraction(4)] == pytest.approx(-0.25)


def test_square_well_kappa_weak_coupling():
    for eps in (0.01, 0.02, 0.04):
        kappa = square_well_kappa(eps, 1.0)
        assert kappa == pytest.approx(eps - 2.0 / 3.0 * eps**2, abs=2 * eps**3)
    assert square_well_kappa(0.01, 1.0) == pytest.approx(0.01, rel=0.01)
    with pytest.raises(InvalidArgumentError):
        square_well_kappa(4.0, 1.0)


def test_box_prediction_tracks_square_well():
    spectrum = build_strip_spectrum(8)
    group = group_at(spectrum, 1)
    matrices = threshold_matrices(spectrum, group, BOX, jmax=8)
    _, poles = threshold_poles(matrices)
    assert list(poles) == [1]
    (pole,) = poles[1]
    for eps in (0.01, 0.02, 0.04):
        assert pole.evaluate(eps) == pytest.approx(square_well_kappa(eps, 1.0), abs=eps**3)


def test_embedded_threshold_sign_condition(pt_embedded_pair):
    spectrum = build_strip_spectrum(8)
    group = group_at(spectrum, 2)
    kappa = math.sqrt(3.0)
    overlap = -(32.0 / (5.0 * math.pi)) * math.sin(kappa * math.pi)
    expected = -(overlap**2) / kappa
    value = pt_sign_condition(spectrum, group, pt_embedded_pair.v1)
    assert value == pytest.approx(expected, rel=1e-8)
    assert value < 0

    matrices = threshold_matrices(spectrum, group, pt_embedded_pair, jmax=8)
    assert matrices.m2[1][0, 0].imag == pytest.approx(-value / 4.0, rel=1e-8)

    clusters, poles = threshold_poles(matrices)
    assert clusters[0].mu == pytest.approx(64.0 / (15.0 * math.pi), abs=1e-8)
    for tau in (1, -1):
        predictions = classify_poles(poles[tau], group.value, is_bottom=False)
        assert [p.kind for p in predictions] == ["eigenvalue"]


def test_radiating_coupling_of_embedded_threshold(pt_embedded_pair):
    spectrum = build_strip_spectrum(8)
    group = group_at(spectrum, 2)
    coupling = radiating_coupling(spectrum, group, pt_embedded_pair.v1, np.array([1.0]))
    assert coupling.channels == (1,)
    assert coupling.any_nonzero
    # purely imaginary odd profile: the two far-field directions differ by sign
    assert coupling.plus[0] == pytest.approx(-coupling.minus[0], abs=1e-12)


def test_coupling_and_sign_condition_need_internal_threshold(pt_bottom_pair):
    spectrum = build_strip_spectrum(8)
    bottom = group_at(spectrum, 1)
    with pytest.raises(InvalidArgumentError):
        radiating_coupling(spectrum, bottom, pt_bottom_pair.v1, np.array([1.0]))
    with pytest.raises(InvalidArgumentError):
        pt_sign_condition(spectrum, bottom, pt_bottom_pair.v1)
    internal = group_at(spectrum, 2)
    with pytest.raises(InvalidArgumentError):
        radiating_coupling(spectrum, internal, pt_bottom_pair.v1, np.array([0.0]))
