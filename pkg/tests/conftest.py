from pathlib import Path

import pytest

from thresholdlab.core.types import PerturbationPair, TrigSeriesPotential

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS


@pytest.fixture
def pt_bottom_pair() -> PerturbationPair:
    return PerturbationPair(v1=TrigSeriesPotential(a=(1.0, 0.0, 4.0), b=(0.5,)))


@pytest.fixture
def pt_embedded_pair() -> PerturbationPair:
    return PerturbationPair(v1=TrigSeriesPotential(a=(1.0,), b=(0.0, 3.0)))
