import math

import numpy as np
import pytest

from thresholdlab.core.errors import DomainError, GridQualityError, InvalidArgumentError
from thresholdlab.core.types import BoxPotential, PerturbationPair, TrigSeriesPotential
from thresholdlab.solvers.grid import build_quasi_grid, step_ratios, stretched_points
from thresholdlab.solvers.operator import (
    assemble_operator,
    axial_operator,
    axial_second_difference,
    axial_stiffness,
)
from thresholdlab.spectral.linalg import multiset_distance
from thresholdlab.transverse import ManufacturedModel, StripModel


def _small_grid(far_bc="dirichlet"):
    return build_quasi_grid(16, 400, 12.0, 2.0, far_bc=far_bc, support_halfwidth=math.pi)


def test_stretched_points_are_exactly_odd():
    x = stretched_points(101, 12.0, 2.0)
    assert np.array_equal(x, -x[::-1])
    assert x[0] == pytest.approx(-12.0)
    assert x[50] == 0.0


def test_small_sigma_approaches_uniform():
    np.testing.assert_allclose(stretched_points(11, 1.0, 1e-4), np.linspace(-1.0, 1.0, 11), atol=1e-8)


def test_dirichlet_grid_excludes_end_points():
    grid = _small_grid()
    assert grid.n1 == 16
    assert grid.n2 == 400
    assert grid.size == 6400
    assert abs(grid.x2_nodes).max() < 12.0
    assert grid.axial_points[0] == pytest.approx(-12.0)
    assert step_ratios(grid.axial_points).max() < 1.25


def test_neumann_grid_keeps_end_points_and_half_cells():
    grid = _small_grid("neumann")
    assert grid.x2_nodes[-1] == pytest.approx(12.0)
    assert grid.cell_weights.sum() == pytest.approx(24.0)


def test_grid_validation():
    with pytest.raises(InvalidArgumentError):
        build_quasi_grid(8, 400, 12.0, 2.0)
    with pytest.raises(DomainError):
        build_quasi_grid(16, 400, 12.0, 2.0, support_halfwidth=20.0)
    with pytest.raises(GridQualityError):
        build_quasi_grid(16, 16, 100.0, 2.0)
    with pytest.raises(InvalidArgumentError):
        build_quasi_grid(16, 400, 12.0, 2.0, far_bc="periodic")


def test_second_difference_exact_on_quadratics():
    grid = _small_grid()
    x = grid.x2_nodes
    values = axial_second_difference(grid) @ (x * x)
    np.testing.assert_allclose(values[1:-1], -2.0, rtol=1e-8)


def test_neumann_stiffness_annihilates_constants():
    grid = _small_grid("neumann")
    np.testing.assert_allclose(axial_stiffness(grid) @ np.ones(grid.n2), 0.0, atol=1e-12)


def test_axial_operator_is_symmetric():
    matrix = axial_operator(_small_grid()).toarray()
    np.testing.assert_allclose(matrix, matrix.T, rtol=1e-13, atol=1e-12)


def test_real_potential_gives_hermitian_operator():
    grid = _small_grid()
    pair = PerturbationPair(v1=BoxPotential(amplitude=-1.0, x1_range=(0.0, math.pi), x2_range=(-1.0, 1.0)))
    operator = assemble_operator(StripModel(), pair, 0.3, grid, 8)
    assert operator.dimension == grid.size
    assert operator.bandwidth == 16
    difference = operator.matrix - operator.matrix.conj().T
    assert abs(difference).max() < 1e-12


def test_pt_potential_commutes_with_reflection_up_to_conjugation(pt_bottom_pair):
    grid = _small_grid()
    operator = assemble_operator(StripModel(), pt_bottom_pair, 0.4, grid, 8)
    index = np.arange(grid.size).reshape(grid.n2, grid.n1)
    mirror = index[::-1].ravel()
    reflected = operator.matrix[mirror][:, mirror]
    assert abs(reflected - operator.matrix.conj()).max() < 1e-12


def test_pt_spectrum_closed_under_conjugation(pt_bottom_pair):
    grid = build_quasi_grid(16, 80, 4.0, 0.5, support_halfwidth=math.pi, min_cells_per_unit=4.0)
    operator = assemble_operator(StripModel(), pt_bottom_pair, 0.5, grid, 8)
    values = np.linalg.eigvals(operator.matrix.toarray())
    scale = np.abs(values).max()
    assert multiset_distance(values, np.conj(values)) < 1e-6 * scale


def test_support_outside_domain_rejected():
    grid = build_quasi_grid(16, 400, 12.0, 2.0)
    wide = PerturbationPair(v1=TrigSeriesPotential(a=(1.0,), support_halfwidth=15.0))
    with pytest.raises(DomainError):
        assemble_operator(StripModel(), wide, 0.1, grid, 8)


def test_manufactured_model_has_no_operator(configs_dir, pt_bottom_pair):
    model = ManufacturedModel(configs_dir / "degenerate_modes.csv", [1.0, 4.0, 4.0])
    with pytest.raises(DomainError):
        assemble_operator(model, pt_bottom_pair, 0.1, _small_grid(), 3)
