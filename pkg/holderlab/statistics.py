"""Scaling-exponent regression and ratio summaries."""

from __future__ import annotations

from collections.abc import Iterable
import logging
import math
from typing import NamedTuple

import numpy as np
from scipy import stats

from .exceptions import ParameterError

_LOGGER = logging.getLogger(__name__)


class Regression(NamedTuple):
    slope: float
    stderr: float
    intercept: float


def exponent_regression(points: Iterable[tuple[float, float]]) -> Regression:
    """Least-squares slope of log(value) against log(scale) with its standard error."""
    points = list(points)
    if len(points) < 3:
        raise ParameterError(f"Regression needs at least 3 points, got {len(points)}")
    scales = np.array([scale for scale, _ in points], dtype=float)
    values = np.array([value for _, value in points], dtype=float)
    if np.any(~(scales > 0)) or np.any(~(values > 0)):
        raise ParameterError("Regression points must have positive scales and values")
    if np.unique(scales).size < 2:
        raise ParameterError("Regression needs at least two distinct scales")
    fit = stats.linregress(np.log(scales), np.log(values))
    stderr = float(fit.stderr)
    # an exact line can leave round-off in the residuals
    if not math.isfinite(stderr) or stderr < 1e-13:
        stderr = 0.0
    return Regression(float(fit.slope), stderr, float(fit.intercept))


def summarize(ratios: Iterable[float]) -> dict[str, float]:
    """Return count, max, mean and the 50% and 95% quantiles of ``ratios``."""
    values = np.asarray(list(ratios), dtype=float)
    if values.size == 0:
        return {"count": 0, "max": math.nan, "mean": math.nan, "q50": math.nan, "q95": math.nan}
    return {
        "count": int(values.size),
        "max": float(np.max(values)),
        "mean": float(np.mean(values)),
        "q50": float(np.quantile(values, 0.5)),
        "q95": float(np.quantile(values, 0.95)),
    }


def growth_factor(largest_dim_max: float, smallest_dim_max: float) -> float:
    """Return the ratio of maxima between the largest and the smallest dimension."""
    if smallest_dim_max > 0:
        return largest_dim_max / smallest_dim_max
    return 1.0 if largest_dim_max <= 1e-12 else math.inf
