"""Configuration, trial and report records of the experiment harness."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from datetime import datetime
import math
from typing import Any

from .const import (
    DEFAULT_ADVERSARIAL_STEPS,
    DEFAULT_DIMS,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DOI_TOL,
    GROWTH_TOL,
    MODE_INTERPOLATING,
    REPORT_SCHEMA_VERSION,
    SETTING_UNITARY,
    SKIP_TOL,
)

TrialKey = tuple[int, int, int, int]


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds of the verdicts; ``slope_tol`` None means the experiment default."""

    slope_tol: float | None = None
    growth_tol: float = GROWTH_TOL
    skip_tol: float = SKIP_TOL
    doi_tol: float = DOI_TOL


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run."""

    experiment_id: str
    dims: tuple[int, ...] = DEFAULT_DIMS
    trials_per_dim: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    function_id: str | None = None
    alpha: float | None = None
    sigma: float | None = None
    levels: int | None = None
    coefficients: tuple[tuple[int, complex], ...] | None = None
    n: int | None = None
    p: float | None = None
    sigmas: tuple[float, ...] | None = None
    degrees: tuple[int, ...] | None = None
    ranks: tuple[int | str, ...] | None = None
    mode: str = MODE_INTERPOLATING
    setting: str = SETTING_UNITARY
    modulus_id: str | None = None
    beta: float | None = None
    weak_hypothesis: bool = False
    fejer_degree: int | None = None
    spectrum_radius: float | None = None
    spectral_gap: float | None = None
    interval: tuple[float, float] | None = None
    perturbation_scales: tuple[float, ...] | None = None
    adversarial_steps: int = DEFAULT_ADVERSARIAL_STEPS
    tolerances: Tolerances = field(default_factory=Tolerances)

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-ready echo of the configuration."""
        data = asdict(self)
        if self.coefficients is not None:
            data["coefficients"] = [
                [k, [c.real, c.imag]] for k, c in self.coefficients
            ]
        for key in ("dims", "sigmas", "degrees", "ranks", "interval", "perturbation_scales"):
            if data[key] is not None:
                data[key] = list(data[key])
        return data


@dataclass(frozen=True)
class Outcome:
    """Left- and right-hand side of one inequality instance."""

    lhs: float
    rhs: float
    group: str | None = None
    checks: dict[str, float] = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


@dataclass(frozen=True)
class TrialResult:
    """One evaluated trial; ``ratio = lhs_norm / rhs_value`` with ``rhs_value > 0``."""

    dim: int
    scale: float
    ratio: float
    lhs_norm: float
    rhs_value: float
    witness_seed: TrialKey
    group: str | None = None
    actual_scale: float | None = None
    checks: dict[str, float] = field(default_factory=dict)

    @property
    def effective_scale(self) -> float:
        return self.scale if self.actual_scale is None else self.actual_scale


@dataclass(frozen=True)
class SkippedTrial:
    dim: int
    scale: float
    witness_seed: TrialKey
    reason: str
    group: str | None = None


@dataclass
class ConstantEstimate:
    """Largest observed ratio, the witness attaining it and the search trace."""

    value: float = 0.0
    witness: dict[str, Any] = field(default_factory=dict)
    search_trace: list[tuple[int, float]] = field(default_factory=list)

    def as_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "witness": self.witness,
            "search_trace": [[step, value] for step, value in self.search_trace],
        }


@dataclass
class CellStatistics:
    """Ratio statistics of one (dim, scale) cell."""

    dim: int
    scale: float
    count: int = 0
    max_ratio: float = math.nan
    mean_ratio: float = math.nan
    q50_ratio: float = math.nan
    q95_ratio: float = math.nan
    lhs_max: float = math.nan

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class ExperimentReport:
    """Aggregated results and verdicts of one experiment."""

    experiment_id: str
    config: dict[str, Any]
    cells: list[CellStatistics] = field(default_factory=list)
    per_dim: dict[str, dict[str, float]] = field(default_factory=dict)
    per_scale: dict[str, dict[str, float]] = field(default_factory=dict)
    slope: float | None = None
    stderr: float | None = None
    constant_estimate: ConstantEstimate = field(default_factory=ConstantEstimate)
    verdicts: dict[str, bool | None] = field(default_factory=dict)
    skips: dict[str, Any] = field(default_factory=dict)
    trials: int = 0
    flags: list[str] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """True unless a verdict evaluated to False; None means not evaluated."""
        return all(verdict is None or bool(verdict) for verdict in self.verdicts.values())

    def as_dict(self) -> dict[str, Any]:
        return {
            "experiment_id": self.experiment_id,
            "config": self.config,
            "statistics": {
                "cells": [cell.as_dict() for cell in self.cells],
                "per_dim": self.per_dim,
                "per_scale": self.per_scale,
            },
            "slope": self.slope,
            "stderr": self.stderr,
            "constant_estimate": self.constant_estimate.as_dict(),
            "verdicts": self.verdicts,
            "skips": self.skips,
            "trials": self.trials,
            "flags": self.flags,
            "notes": self.notes,
            "extra": self.extra,
            "passed": self.passed,
        }


@dataclass
class RunManifest:
    """Everything one invocation ran: tool version, configuration digest, seed and reports."""

    version: str
    config_digest: str
    seed: int
    started: datetime
    finished: datetime | None = None
    configs: list[ExperimentConfig] = field(default_factory=list)
    reports: list[ExperimentReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    def as_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "schema_version": REPORT_SCHEMA_VERSION,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "started": self.started.isoformat(),
            "finished": self.finished.isoformat() if self.finished else None,
            "configs": [config.as_dict() for config in self.configs],
            "reports": [report.as_dict() for report in self.reports],
            "passed": self.passed,
        }
