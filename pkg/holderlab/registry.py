"""Registry of experiments and their descriptions."""

from __future__ import annotations

from functools import lru_cache
import logging
from pathlib import Path
from typing import Any

import yaml

from .const import EXPERIMENT_IDS, EXPERIMENT_PREFIX
from .exceptions import ParameterError
from .experiments import EXPERIMENT_CLASSES, Experiment
from .models import ExperimentConfig, ExperimentReport

_LOGGER = logging.getLogger(__name__)

DESCRIPTIONS_FILE = Path(__file__).parent / "experiments.yaml"


def canonical_id(experiment_id: str) -> str:
    """Strip the optional ``experiment_`` prefix and check the id is known."""
    name = experiment_id.removeprefix(EXPERIMENT_PREFIX)
    if name not in EXPERIMENT_CLASSES:
        raise ParameterError(f"Unknown experiment {experiment_id!r}")
    return name


def build_experiment(config: ExperimentConfig) -> Experiment:
    return EXPERIMENT_CLASSES[canonical_id(config.experiment_id)](config)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ExperimentReport:
    """Build and run one experiment."""
    return build_experiment(config).run(jobs)


@lru_cache(maxsize=1)
def experiment_descriptions() -> dict[str, dict[str, Any]]:
    """Return the descriptor of every registered experiment."""
    with DESCRIPTIONS_FILE.open(encoding="utf-8") as handle:
        descriptors = yaml.safe_load(handle) or {}
    missing = set(EXPERIMENT_CLASSES) - set(descriptors)
    if missing:
        _LOGGER.warning("Experiments without descriptors: %s", ", ".join(sorted(missing)))
    return {
        experiment_id: descriptors.get(experiment_id, {"description": EXPERIMENT_IDS[experiment_id]})
        for experiment_id in EXPERIMENT_CLASSES
    }
