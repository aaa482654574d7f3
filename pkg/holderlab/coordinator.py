"""Trial scheduling, retries and aggregation for experiments."""

from __future__ import annotations

from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math
from typing import TYPE_CHECKING

from .const import MAX_RESAMPLE_ATTEMPTS
from .ensembles import make_rng
from .exceptions import DomainError, InputError, NumericError, ParameterError, ScaleTooLarge
from .models import CellStatistics, ExperimentReport, SkippedTrial, TrialKey, TrialResult
from .statistics import summarize

if TYPE_CHECKING:
    from .experiments import Experiment

_LOGGER = logging.getLogger(__name__)


@dataclass
class TrialBatch:
    """Results and skips of every trial of an experiment, in key order."""

    results: list[TrialResult] = field(default_factory=list)
    skips: list[SkippedTrial] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.results) + len(self.skips)


class TrialCoordinator:
    """Class to run the trials of one experiment and fold them into a report."""

    def __init__(self, experiment: Experiment, jobs: int = 1) -> None:
        """Initialize the trial coordinator."""
        self.experiment = experiment
        self.config = experiment.config
        self.jobs = max(1, int(jobs))
        self._max_attempts = MAX_RESAMPLE_ATTEMPTS
        _LOGGER.debug(
            "Initialized coordinator for %s with %s dims, %s scales, %s workers",
            self.config.experiment_id,
            len(self.config.dims),
            len(experiment.scales),
            self.jobs,
        )

    def trial_keys(self) -> list[TrialKey]:
        """Return every (seed, dim, scale index, trial) key in canonical order."""
        return [
            (self.config.seed, dim, scale_index, trial)
            for dim in self.config.dims
            for scale_index in range(len(self.experiment.scales))
            for trial in range(self.config.trials_per_dim)
        ]

    def run(self) -> TrialBatch:
        """Run all trials; the batch does not depend on the number of workers."""
        keys = self.trial_keys()
        if self.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as executor:
                outputs = list(executor.map(self.run_trial, keys))
        else:
            outputs = [self.run_trial(key) for key in keys]
        batch = TrialBatch()
        for results, skips in outputs:
            batch.results.extend(results)
            batch.skips.extend(skips)
        return batch

    def run_trial(self, key: TrialKey) -> tuple[list[TrialResult], list[SkippedTrial]]:
        """Draw the witness of ``key`` and evaluate it for every group."""
        _, dim, scale_index, _ = key
        scale = self.experiment.scales[scale_index]
        groups = self.experiment.groups(dim)
        params = self.experiment.draw(make_rng(key), dim)
        try:
            outcomes, actual_scale = self._evaluate_with_retry(params, dim, scale)
        except (NumericError, DomainError, InputError, ParameterError, ScaleTooLarge) as err:
            _LOGGER.debug("Skipping trial %s: %s", key, err)
            reason = type(err).__name__
            return [], [SkippedTrial(dim, scale, key, reason, group) for group in groups]

        results, skips = [], []
        for outcome in outcomes:
            lhs, rhs = outcome.lhs, outcome.rhs
            if not (math.isfinite(lhs) and math.isfinite(rhs)) or lhs < 0:
                skips.append(SkippedTrial(dim, scale, key, "NonFinite", outcome.group))
                continue
            if rhs <= 0:
                skips.append(SkippedTrial(dim, scale, key, "DegenerateDenominator", outcome.group))
                continue
            results.append(
                TrialResult(
                    dim=dim,
                    scale=scale,
                    ratio=lhs / rhs,
                    lhs_norm=lhs,
                    rhs_value=rhs,
                    witness_seed=key,
                    group=outcome.group,
                    actual_scale=None if actual_scale == scale else actual_scale,
                    checks=dict(outcome.checks),
                )
            )
        return results, skips

    def _evaluate_with_retry(self, params, dim: int, scale: float):
        """Evaluate a witness, halving the scale while it is too large."""
        current = scale
        for attempt in range(self._max_attempts):
            try:
                return self.experiment.evaluate(params, dim, current), current
            except ScaleTooLarge as err:
                if attempt + 1 >= self._max_attempts:
                    raise
                _LOGGER.info(
                    "%s at scale %.3g, retrying at %.3g (attempt %s/%s)",
                    err,
                    current,
                    current / 2,
                    attempt + 1,
                    self._max_attempts,
                )
                current /= 2
        raise ScaleTooLarge(f"Scale still too large after {self._max_attempts} attempts")

    def aggregate(self, batch: TrialBatch, report: ExperimentReport) -> None:
        """Fill the statistics and skip counts of ``report`` from ``batch``."""
        by_cell: dict[tuple[int, float], list[TrialResult]] = defaultdict(list)
        for result in batch.results:
            by_cell[(result.dim, result.scale)].append(result)

        report.cells = []
        for dim in self.config.dims:
            for scale in self.experiment.scales:
                members = by_cell.get((dim, scale), [])
                summary = summarize(result.ratio for result in members)
                report.cells.append(
                    CellStatistics(
                        dim=dim,
                        scale=scale,
                        count=summary["count"],
                        max_ratio=summary["max"],
                        mean_ratio=summary["mean"],
                        q50_ratio=summary["q50"],
                        q95_ratio=summary["q95"],
                        lhs_max=max((r.lhs_norm for r in members), default=math.nan),
                    )
                )
        report.per_dim = {
            str(dim): summarize(r.ratio for r in batch.results if r.dim == dim)
            for dim in self.config.dims
        }
        report.per_scale = {
            repr(scale): summarize(r.ratio for r in batch.results if r.scale == scale)
            for scale in self.experiment.scales
        }
        reasons = Counter(skip.reason for skip in batch.skips)
        total = batch.total
        report.trials = total
        report.skips = {
            "count": len(batch.skips),
            "total": total,
            "rate": len(batch.skips) / total if total else 0.0,
            "reasons": dict(sorted(reasons.items())),
        }
