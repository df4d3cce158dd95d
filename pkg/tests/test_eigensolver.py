import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import sparse

from thresholdlab.core.config import SolverConfig
from thresholdlab.core.errors import InvalidArgumentError
from thresholdlab.core.types import (
    AbsenceReport,
    BoxPotential,
    EigenResult,
    PerturbationPair,
    PoleExpansion,
    SpectralPrediction,
    TrigSeriesPotential,
)
from thresholdlab.solvers.eigensolver import solve_near, tail_fraction
from thresholdlab.solvers.emergent import (
    acceptance_window,
    choose_far_bc,
    direct_operator,
    find_emergent_state,
    in_continuum,
    localization_report,
    threshold_shift,
    verify_absence,
)
from thresholdlab.solvers.grid import build_quasi_grid
from thresholdlab.solvers.operator import DiscreteOperator, assemble_operator
from thresholdlab.spectral.asymptotics import square_well_kappa
from thresholdlab.transverse import StripModel, build_strip_spectrum
from thresholdlab.transverse.base import group_at

WELL = PerturbationPair(v1=BoxPotential(amplitude=-1.0, x1_range=(0.0, math.pi), x2_range=(-1.0, 1.0)))
SOLVER = SolverConfig(n1=16, n2=400, x0=40.0, sigma=3.0, far_bc="dirichlet", tol=1e-6, count=1)


def _bottom_group():
    return group_at(build_strip_spectrum(4), 1)


def _well_prediction(lam_shift=0.0, mu=1.0, kind="eigenvalue"):
    # k = eps - 2/3 eps^2 for the x1-independent well of depth 1 on |x2| <= 1
    pole = PoleExpansion(
        tau=1,
        cluster=1,
        branch=1,
        mu=mu,
        q=1,
        remainder_order=Fraction(3),
        correction=-2.0 / 3.0,
        correction_exponent=Fraction(2),
    )
    return SpectralPrediction(kind=kind, pole=pole, threshold=1.0 + lam_shift, justification="sign of Re mu")


def test_unperturbed_spectrum_is_real_and_above_threshold():
    grid = build_quasi_grid(16, 400, 12.0, 2.0, support_halfwidth=math.pi)
    pair = PerturbationPair(v1=TrigSeriesPotential(a=(1.0,)))
    operator = assemble_operator(StripModel(), pair, 0.0, grid, 8)
    results = solve_near(operator, 0.9, count=4, tol=1e-5)
    floor = StripModel().discrete_threshold(1, 16, 8)
    assert len(results) >= 1
    for result in results:
        assert abs(result.lam.imag) < 1e-8
        assert result.lam.real > floor - 1e-9
        assert result.residual <= 1e-5
    distances = [abs(r.raw_lam - 0.9) for r in results]
    assert distances == sorted(distances)


def test_solve_near_rejects_empty_request():
    grid = build_quasi_grid(16, 400, 12.0, 2.0)
    operator = DiscreteOperator(matrix=sparse.identity(grid.size, format="csr", dtype=complex), grid=grid, eps=0.0)
    with pytest.raises(InvalidArgumentError):
        solve_near(operator, 0.5, count=0)


def test_tail_fraction_of_constant_on_near_uniform_grid():
    grid = build_quasi_grid(16, 400, 12.0, 1e-4, far_bc="neumann")
    operator = DiscreteOperator(matrix=sparse.identity(grid.size, format="csr"), grid=grid, eps=0.0)
    assert tail_fraction(np.ones(grid.size), operator) == pytest.approx(0.2, abs=0.01)


def test_localization_report_recovers_decay_rate():
    grid = build_quasi_grid(16, 400, 20.0, 2.0)
    axial = np.exp(-np.abs(grid.x2_nodes)) * np.sqrt(grid.cell_weights)
    vector = np.outer(axial, np.sin(grid.x1_nodes)).ravel()
    result = EigenResult(lam=0.5, eigenvector=vector, residual=0.0, tail_mass=0.0)
    report = localization_report(result, grid)
    assert report["decay_rate_estimate"] == pytest.approx(1.0, rel=1e-6)
    assert report["tail_mass"] == 0.0


def test_far_boundary_choice():
    auto = SolverConfig()
    assert choose_far_bc(0.1, auto) == "neumann"
    assert choose_far_bc(0.3, auto) == "dirichlet"
    assert choose_far_bc(0.1, SolverConfig(far_bc="dirichlet")) == "dirichlet"


def test_acceptance_window_has_floor():
    assert acceptance_window(0.1) == pytest.approx(0.01)
    assert acceptance_window(1e-3) == pytest.approx(1e-6)


def test_strip_threshold_shift_is_small_and_positive():
    shift = threshold_shift(StripModel(), _bottom_group(), 16, 8)
    h = math.pi / 17
    assert 0.0 < shift < h * h / 12.0 + 1e-12


def test_direct_operator_uses_configured_grid():
    operator = direct_operator(StripModel(), WELL, 0.3, 8, SOLVER)
    assert operator.grid.far_bc == "dirichlet"
    assert operator.dimension == 16 * 400


def test_bound_state_of_square_well_found():
    eps = 0.3
    outcome = find_emergent_state(StripModel(), WELL, eps, _bottom_group(), _well_prediction(), SOLVER, m=8)
    assert isinstance(outcome, EigenResult)
    exact = 1.0 - square_well_kappa(eps, 1.0) ** 2
    assert outcome.lam.real < 1.0
    assert outcome.lam.real == pytest.approx(exact, abs=2e-2)
    assert abs(outcome.lam.imag) < 1e-8
    assert outcome.tail_mass < 0.05
    assert outcome.lam == pytest.approx(outcome.raw_lam + outcome.threshold_shift)


def test_far_prediction_yields_absence_report():
    outcome = find_emergent_state(
        StripModel(), WELL, 0.3, _bottom_group(), _well_prediction(), SOLVER, m=8, target=0.5
    )
    assert isinstance(outcome, AbsenceReport)
    assert outcome.window == pytest.approx(acceptance_window(0.3))
    assert outcome.candidates
    assert "misses" in outcome.reason


@pytest.mark.parametrize("eps", [0.08, 0.2, 0.3])
def test_repulsive_well_has_no_bound_state(eps):
    barrier = PerturbationPair(
        v1=BoxPotential(amplitude=1.0, x1_range=(0.0, math.pi), x2_range=(-1.0, 1.0))
    )
    prediction = _well_prediction(mu=-1.0, kind="resonance")
    outcome = verify_absence(StripModel(), barrier, eps, _bottom_group(), prediction, SOLVER, m=8)
    assert isinstance(outcome, AbsenceReport)
    assert outcome.candidates
    assert all(lam.real > 1.0 - 1e-6 for lam in outcome.candidates)
    assert "continuum" in outcome.reason
    assert outcome.window == pytest.approx(acceptance_window(eps))


def test_continuum_only_above_bottom_threshold():
    spectrum = build_strip_spectrum(4)
    bottom, second = group_at(spectrum, 1), group_at(spectrum, 2)
    assert in_continuum(1.0006, bottom, 1e-9)
    assert in_continuum(1.0 - 1e-12, bottom, 1e-9)
    assert not in_continuum(0.999, bottom, 1e-9)
    assert not in_continuum(4.0006 + 0.01j, second, 1e-9)


@pytest.mark.parametrize(
    "changes",
    [{"n1": 32, "n2": 800}, {"x0": 60.0, "n2": 600}],
    ids=["refined-grid", "longer-domain"],
)
def test_bound_state_stable_under_grid_changes(changes):
    eps = 0.3
    base = find_emergent_state(StripModel(), WELL, eps, _bottom_group(), _well_prediction(), SOLVER, m=8)
    solver = SOLVER.model_copy(update=changes)
    moved = find_emergent_state(StripModel(), WELL, eps, _bottom_group(), _well_prediction(), solver, m=8)
    assert isinstance(base, EigenResult)
    assert isinstance(moved, EigenResult)
    assert abs(moved.lam - base.lam) < 1e-2
