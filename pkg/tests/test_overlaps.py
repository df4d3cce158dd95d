import math

import numpy as np
import pytest

from thresholdlab.core.errors import InvalidArgumentError
from thresholdlab.core.types import BoxPotential, PerturbationPair
from thresholdlab.spectral.overlaps import (
    axial_kernel,
    axial_profiles,
    build_M1,
    build_M2,
    mode_matrix_element,
    threshold_matrices,
)
from thresholdlab.transverse import build_strip_spectrum
from thresholdlab.transverse.base import group_at

BOX = PerturbationPair(v1=BoxPotential(amplitude=-1.0, x1_range=(0.0, math.pi), x2_range=(-1.0, 1.0)))


def _setup(p, m=8):
    spectrum = build_strip_spectrum(m)
    return spectrum, group_at(spectrum, p)


def test_m1_bottom_threshold_trig_potential(pt_bottom_pair):
    spectrum, group = _setup(1)
    m1 = build_M1(spectrum, group, pt_bottom_pair.v1)
    assert m1.shape == (1, 1)
    assert m1[0, 0] == pytest.approx(16.0 / (15.0 * math.pi), abs=1e-8)


def test_m1_second_threshold_trig_potential(pt_embedded_pair):
    spectrum, group = _setup(2)
    m1 = build_M1(spectrum, group, pt_embedded_pair.v1)
    assert m1[0, 0] == pytest.approx(64.0 / (15.0 * math.pi), abs=1e-8)


def test_box_potential_matrices():
    spectrum, group = _setup(1)
    m1 = build_M1(spectrum, group, BOX.v1)
    m2, tail = build_M2(spectrum, group, BOX, tau=1, jmax=8)
    assert m1[0, 0] == pytest.approx(1.0, abs=1e-10)
    assert m2[0, 0] == pytest.approx(2.0 / 3.0, abs=1e-8)
    assert tail < 1e-8


def test_second_potential_enters_m2_overlap():
    spectrum, group = _setup(1)
    v2 = BoxPotential(amplitude=2.0, x1_range=(0.0, math.pi), x2_range=(-1.0, 1.0))
    pair = PerturbationPair(v1=BOX.v1, v2=v2)
    m2, _ = build_M2(spectrum, group, pair, tau=1, jmax=8)
    # 1/2 * (2 * 2) from V2 plus the 2/3 from the Green term
    assert m2[0, 0] == pytest.approx(2.0 + 2.0 / 3.0, abs=1e-8)


def test_axial_profile_of_x1_independent_box():
    spectrum, group = _setup(1)
    profiles = axial_profiles(spectrum, group, BOX.v1, jmax=8)
    assert len(profiles) == 8
    np.testing.assert_allclose(profiles[0].values, -1.0, atol=1e-12)
    np.testing.assert_allclose(profiles[3].values, 0.0, atol=1e-12)
    with pytest.raises(InvalidArgumentError):
        axial_profiles(spectrum, group, BOX.v1, jmax=4)


def test_pt_potential_gives_real_m1_and_conjugate_branches(pt_embedded_pair):
    spectrum, group = _setup(2)
    matrices = threshold_matrices(spectrum, group, pt_embedded_pair, jmax=4)
    assert abs(matrices.m1[0, 0].imag) < 1e-12
    np.testing.assert_allclose(matrices.m2[1], np.conj(matrices.m2[-1]), atol=1e-10)


def test_bottom_threshold_reuses_one_m2():
    spectrum, group = _setup(1)
    matrices = threshold_matrices(spectrum, group, BOX, jmax=8)
    assert matrices.m2[1] is matrices.m2[-1]


def test_kernel_regimes_relative_to_threshold():
    _, group = _setup(2)
    below = axial_kernel(1, 1.0, group, 1)
    at = axial_kernel(2, 4.0, group, 1)
    above = axial_kernel(3, 9.0, group, -1)
    assert (below.regime, at.regime, above.regime) == ("oscillatory", "linear", "decaying")
    assert below.kappa == pytest.approx(math.sqrt(3.0))
    assert above.kappa == pytest.approx(math.sqrt(5.0))
    assert below(np.array([0.0]))[0] == pytest.approx(1j / (2 * math.sqrt(3.0)))
    assert at(np.array([2.0]))[0] == pytest.approx(-1.0)
    with pytest.raises(InvalidArgumentError):
        axial_kernel(1, 1.0, group, 0)


def test_oscillatory_kernel_conjugates_between_branches():
    _, group = _setup(3)
    d = np.linspace(0.0, 5.0, 11)
    plus = axial_kernel(1, 1.0, group, 1)(d)
    minus = axial_kernel(1, 1.0, group, -1)(d)
    np.testing.assert_allclose(plus, np.conj(minus))


def test_tail_unbounded_when_no_decaying_mode_kept():
    spectrum, group = _setup(1)
    _, tail = build_M2(spectrum, group, BOX, tau=1, jmax=1)
    assert math.isinf(tail)


def test_jmax_must_reach_threshold(pt_embedded_pair):
    spectrum, group = _setup(3)
    with pytest.raises(InvalidArgumentError):
        build_M2(spectrum, group, pt_embedded_pair, tau=1, jmax=2)


def test_matrix_element_of_missing_potential_is_zero():
    spectrum, _ = _setup(1)
    assert mode_matrix_element(spectrum.mode(1), spectrum.mode(1), None, spectrum) == 0j


@pytest.mark.parametrize("p, pair_name", [(1, "pt_bottom_pair"), (2, "pt_embedded_pair")])
def test_doubling_jmax_stays_within_tail_estimate(p, pair_name, request):
    pair = request.getfixturevalue(pair_name)
    spectrum, group = _setup(p, m=128)
    coarse = threshold_matrices(spectrum, group, pair, jmax=64)
    fine = threshold_matrices(spectrum, group, pair, jmax=128)
    for tau in (1, -1):
        change = float(np.abs(fine.m2[tau] - coarse.m2[tau]).max())
        assert change <= coarse.tail_estimate[tau] + 1e-12, tau
