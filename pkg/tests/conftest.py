"""Fixtures for testing."""

from pathlib import Path

import pytest

from holderlab.ensembles import random_hermitian, random_unitary
from holderlab.models import ExperimentConfig

FIXTURES = Path(__file__).parent / "fixtures"

# three dyadic scales keep experiment runs short while still allowing a regression
SHORT_SCALES = (2.0**-4, 2.0**-6, 2.0**-8)


@pytest.fixture
def fixtures_path() -> Path:
    return FIXTURES


@pytest.fixture
def hermitian_pair():
    """Return a reproducible pair of 6x6 Hermitian matrices with small spectra."""
    return random_hermitian(6, 0.3, seed=(11, 1)), random_hermitian(6, 0.3, seed=(11, 2))


@pytest.fixture
def unitary():
    return random_unitary(4, seed=5)


@pytest.fixture
def small_config():
    """Build a fast configuration for any experiment."""

    def factory(experiment_id: str, **overrides) -> ExperimentConfig:
        values = {
            "dims": (2, 3),
            "trials_per_dim": 2,
            "perturbation_scales": SHORT_SCALES,
            "adversarial_steps": 1,
        }
        values.update(overrides)
        return ExperimentConfig(experiment_id=experiment_id, **values)

    return factory
