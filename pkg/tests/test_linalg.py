import numpy as np
import pytest

from thresholdlab.core.errors import InvalidArgumentError, NumericalFailureError
from thresholdlab.spectral.linalg import (
    characteristic_roots,
    cluster_values,
    durand_kerner,
    inverse_iteration,
    match_values,
    multiset_distance,
    qr_eigenvalues,
)


def test_qr_and_durand_kerner_agree_on_random_matrices():
    rng = np.random.default_rng(11)
    for _ in range(5):
        matrix = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert multiset_distance(qr_eigenvalues(matrix), characteristic_roots(matrix)) < 1e-9


def test_durand_kerner_recovers_integer_roots():
    roots = durand_kerner([1.0, -6.0, 11.0, -6.0])
    np.testing.assert_allclose(np.sort(roots.real), [1.0, 2.0, 3.0], atol=1e-12)
    np.testing.assert_allclose(roots.imag, 0.0, atol=1e-12)


def test_durand_kerner_strips_leading_zeros():
    roots = durand_kerner([0.0, 2.0, -4.0])
    np.testing.assert_allclose(roots, [2.0])
    with pytest.raises(InvalidArgumentError):
        durand_kerner([0.0, 0.0])


def test_qr_eigenvalues_input_checks():
    with pytest.raises(InvalidArgumentError):
        qr_eigenvalues(np.ones((2, 3)))
    with pytest.raises(NumericalFailureError):
        qr_eigenvalues(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_cluster_values_chains_close_values():
    clusters = cluster_values(np.array([2.0, 1.0, 1.0 + 1e-12]), tol=1e-9)
    assert [sorted(c.tolist()) for c in clusters] == [[1, 2], [0]]
    assert cluster_values(np.array([]), tol=1.0) == []


def test_inverse_iteration_normalizes_phase():
    matrix = np.diag([1.0, 2.0, 3.0]).astype(complex)
    vector = inverse_iteration(matrix, 2.0)
    np.testing.assert_allclose(vector, [0.0, 1.0, 0.0], atol=1e-9)


def test_match_values_pairs_nearest():
    reference = np.array([1.0, 2.0, 3.0j])
    candidates = np.array([3.1j, 0.9, 2.05])
    np.testing.assert_allclose(match_values(reference, candidates), [0.9, 2.05, 3.1j])


def test_multiset_distance_requires_equal_sizes():
    assert multiset_distance(np.array([1.0, 2.0]), np.array([2.0, 1.0])) == 0.0
    with pytest.raises(InvalidArgumentError):
        multiset_distance(np.array([1.0]), np.array([1.0, 2.0]))
