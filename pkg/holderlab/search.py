"""Derivative-free adversarial search for the constants of the inequalities."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field, replace
import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from .const import SEARCH_COORDINATES_PER_SWEEP, SEARCH_INITIAL_STEP, SEARCH_STREAM
from .ensembles import Seed, make_rng
from .exceptions import HolderLabError
from .models import ConstantEstimate, ExperimentConfig, TrialResult

if TYPE_CHECKING:
    from .experiments import Experiment

_LOGGER = logging.getLogger(__name__)


@dataclass
class SearchResult:
    value: float
    point: np.ndarray
    trace: list[tuple[int, float]] = field(default_factory=list)
    moves: list[tuple[int, float]] = field(default_factory=list)


def _safe(objective: Callable[[np.ndarray], float]) -> Callable[[np.ndarray], float]:
    def wrapped(point: np.ndarray) -> float:
        try:
            value = float(objective(point))
        except HolderLabError as err:
            _LOGGER.debug("Search candidate rejected: %s", err)
            return -math.inf
        return value if math.isfinite(value) else -math.inf

    return wrapped


def hill_climb(
    objective: Callable[[np.ndarray], float],
    start: np.ndarray,
    steps: int,
    seed: Seed,
    initial_step: float = SEARCH_INITIAL_STEP,
    coordinates_per_sweep: int = SEARCH_COORDINATES_PER_SWEEP,
) -> SearchResult:
    """Maximize ``objective`` by coordinate moves of ±step.

    Each sweep tries up to ``coordinates_per_sweep`` randomly chosen
    coordinates and keeps the first improving move per coordinate. Every
    coordinate has its own step, halved whenever neither move improves. The
    best value never decreases.
    """
    objective = _safe(objective)
    rng = make_rng(seed)
    point = np.array(start, dtype=float)
    best = objective(point)
    result = SearchResult(best, point, trace=[(0, best)])
    steps_by_coordinate = np.full(point.size, float(initial_step))
    count = min(coordinates_per_sweep, point.size)
    for sweep in range(1, steps + 1):
        for coordinate in rng.choice(point.size, size=count, replace=False):
            step = steps_by_coordinate[coordinate]
            for delta in (step, -step):
                candidate = point.copy()
                candidate[coordinate] += delta
                value = objective(candidate)
                if value > best:
                    point, best = candidate, value
                    result.moves.append((int(coordinate), float(delta)))
                    break
            else:
                steps_by_coordinate[coordinate] = step / 2
        result.trace.append((sweep, best))
    result.value, result.point = best, point
    _LOGGER.debug("Search finished at %.6g after %s sweeps, %s moves", best, steps, len(result.moves))
    return result


def refine_witness(experiment: Experiment, trial: TrialResult, steps: int) -> ConstantEstimate:
    """Start a hill climb from the witness of ``trial`` and return the best ratio found."""
    dim, scale, group = trial.dim, trial.effective_scale, trial.group
    start = experiment.draw(make_rng(trial.witness_seed), dim)

    def objective(params: np.ndarray) -> float:
        outcomes = experiment.evaluate(params, dim, scale, groups=[group])
        outcome = next(o for o in outcomes if o.group == group)
        if not outcome.rhs > 0:
            return -math.inf
        return outcome.lhs / outcome.rhs

    search = hill_climb(objective, start, steps, seed=(SEARCH_STREAM, *trial.witness_seed))
    trace = [(0, trial.ratio)] + [
        (sweep, max(value, trial.ratio)) for sweep, value in search.trace[1:]
    ]
    return ConstantEstimate(
        value=max(trial.ratio, search.value),
        witness={
            "key": list(trial.witness_seed),
            "dim": dim,
            "scale": scale,
            "group": group,
            "moves": [[coordinate, delta] for coordinate, delta in search.moves],
        },
        search_trace=trace,
    )


def best_trial(results: list[TrialResult]) -> TrialResult | None:
    """Return the first trial attaining the largest ratio."""
    best = None
    for result in results:
        if best is None or result.ratio > best.ratio:
            best = result
    return best


def adversarial_search(
    experiment_id: str, start_config: ExperimentConfig, steps: int | None = None, jobs: int = 1
) -> ConstantEstimate:
    """Run the random trials of an experiment and climb from the best one."""
    from .coordinator import TrialCoordinator
    from .registry import build_experiment

    config = replace(start_config, experiment_id=experiment_id)
    if steps is not None:
        config = replace(config, adversarial_steps=steps)
    experiment = build_experiment(config)
    batch = TrialCoordinator(experiment, jobs).run()
    trial = best_trial(batch.results)
    if trial is None:
        return ConstantEstimate()
    return refine_witness(experiment, trial, config.adversarial_steps)
