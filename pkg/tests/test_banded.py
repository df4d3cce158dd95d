import numpy as np
import pytest
from scipy import sparse

from thresholdlab.core.errors import InvalidArgumentError, NumericalFailureError
from thresholdlab.solvers.banded import BandedLU, to_lapack_band
from thresholdlab.solvers.eigensolver import SHIFT_PERTURBATION, factorize_shifted
from thresholdlab.solvers.grid import build_quasi_grid
from thresholdlab.solvers.operator import DiscreteOperator


def _banded(n=400, kl=5, seed=0):
    rng = np.random.default_rng(seed)
    diagonals = [rng.normal(size=n - abs(k)) + 1j * rng.normal(size=n - abs(k)) for k in range(-kl, kl + 1)]
    matrix = sparse.diags(diagonals, list(range(-kl, kl + 1)), format="csr")
    return matrix + sparse.identity(n, format="csr") * (4.0 * kl)


def test_band_storage_layout():
    matrix = np.array([[1.0, 2.0, 0.0], [3.0, 4.0, 5.0], [0.0, 6.0, 7.0]])
    ab = to_lapack_band(matrix, 1, 1)
    assert ab.shape == (4, 3)
    assert ab[2, 0] == 1.0
    assert ab[1, 1] == 2.0
    assert ab[3, 0] == 3.0
    with pytest.raises(InvalidArgumentError):
        to_lapack_band(np.triu(np.ones((4, 4))), 1, 1)


def test_banded_solve_matches_dense():
    matrix = _banded()
    rng = np.random.default_rng(1)
    rhs = rng.normal(size=400) + 1j * rng.normal(size=400)
    x = BandedLU(matrix, 5, 5).solve(rhs)
    np.testing.assert_allclose(matrix @ x, rhs, atol=1e-10)
    np.testing.assert_allclose(x, np.linalg.solve(matrix.toarray(), rhs), atol=1e-10)


def test_banded_solve_keeps_block_shape():
    matrix = _banded(n=120, kl=3)
    rhs = np.ones((120, 3), dtype=complex)
    x = BandedLU(matrix, 3, 3).solve(rhs)
    assert x.shape == (120, 3)
    np.testing.assert_allclose(matrix @ x, rhs, atol=1e-10)


def test_singular_matrix_is_reported():
    matrix = sparse.diags([np.arange(5, dtype=float)], [0], format="csr")
    with pytest.raises(NumericalFailureError):
        BandedLU(matrix, 1, 1)


def test_singular_shift_is_perturbed():
    grid = build_quasi_grid(16, 16, 0.5, 0.1)
    matrix = sparse.diags(np.arange(1.0, grid.size + 1.0), 0, format="csr").astype(complex)
    operator = DiscreteOperator(matrix=matrix, grid=grid, eps=0.0)
    lu, shift = factorize_shifted(operator, 5.0)
    assert shift == 5.0 + SHIFT_PERTURBATION
    rhs = np.ones(grid.size, dtype=complex)
    np.testing.assert_allclose((matrix - shift * sparse.identity(grid.size)) @ lu.solve(rhs), rhs, atol=1e-8)
