"""Moduli of continuity, their validation and the ω* transform."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
import logging
import math
from typing import Any

import numpy as np
from scipy import integrate

from .const import MODULUS_SLACK, OMEGA_STAR_ACCURACY
from .exceptions import NumericError, ParameterError
from .functions import CIRCLE, FunctionSpec, SeminormGrid, default_grid

_LOGGER = logging.getLogger(__name__)

TAIL_BOUNDED = "bounded"
TAIL_POWER = "power"


@dataclass(frozen=True)
class Tail:
    """Exact law of ω beyond ``start``: a constant bound or constant·t^exponent."""

    kind: str
    start: float
    bound: float | None = None
    constant: float | None = None
    exponent: float | None = None

    def __post_init__(self) -> None:
        if self.kind == TAIL_BOUNDED:
            if self.bound is None or self.bound < 0:
                raise ParameterError("A bounded tail needs a nonnegative bound")
        elif self.kind == TAIL_POWER:
            if self.constant is None or self.exponent is None:
                raise ParameterError("A power tail needs a constant and an exponent")
        else:
            raise ParameterError(f"Unknown tail kind {self.kind!r}")
        if not self.start > 0:
            raise ParameterError(f"Tail start must be positive, got {self.start}")

    @property
    def divergent(self) -> bool:
        return self.kind == TAIL_POWER and self.exponent >= 1

    def integral(self, start: float) -> float:
        """Return ∫_start^∞ ω(t)/t² dt for start >= self.start."""
        if self.kind == TAIL_BOUNDED:
            return self.bound / start
        beta = self.exponent
        return self.constant * start ** (beta - 1) / (1 - beta)


@dataclass(frozen=True, eq=False)
class Modulus:
    """A modulus of continuity ω with declared tail behaviour."""

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    tail: Tail
    parameters: Mapping[str, Any] = field(default_factory=dict)

    def __call__(self, t: Any) -> np.ndarray:
        return np.asarray(self.evaluate(np.asarray(t, dtype=float)), dtype=float)


def omega_star(omega: Modulus, x: float) -> float:
    """Return ω*(x) = x ∫_x^∞ ω(t)/t² dt.

    The integral is computed by adaptive quadrature up to the start T of the
    declared tail and in closed form beyond it.
    """
    if not x > 0:
        raise ParameterError(f"omega_star needs x > 0, got {x}")
    tail = omega.tail
    if tail.divergent:
        raise ParameterError(
            f"{omega.name}: tail exponent {tail.exponent} makes omega_star diverge"
        )
    split = max(x, tail.start)
    body, error = 0.0, 0.0
    if split > x:
        # substitute t = e^u so that the quadrature sees ω(e^u)·e^{−u} on a short range
        body, error = integrate.quad(
            lambda u: float(omega(math.exp(u))) * math.exp(-u),
            math.log(x),
            math.log(split),
            epsabs=1e-14,
            epsrel=1e-12,
            limit=200,
        )
    if x * error > OMEGA_STAR_ACCURACY:
        raise NumericError(
            f"omega_star quadrature error {x * error:.3e} exceeds {OMEGA_STAR_ACCURACY}",
            residual=x * error,
        )
    return x * (body + tail.integral(split))


@dataclass(frozen=True)
class Violation:
    kind: str
    x: float
    y: float
    excess: float


@dataclass
class ModulusReport:
    """Violations found on a validation grid; empty means accepted."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)


def validate_modulus(omega: Modulus, grid: Any, slack: float = MODULUS_SLACK) -> ModulusReport:
    """Check ω(0)=0, monotonicity and subadditivity on a finite grid of [0, T]."""
    points = np.unique(np.asarray(grid, dtype=float))
    if points.size == 0 or points[0] < 0:
        raise ParameterError("Validation grid must be a nonempty subset of [0, ∞)")
    report = ModulusReport()
    origin = float(omega(0.0))
    if abs(origin) > slack:
        report.violations.append(Violation("origin", 0.0, 0.0, abs(origin)))
    values = omega(points)
    drops = values[:-1] - values[1:]
    for index in np.flatnonzero(drops > slack):
        report.violations.append(
            Violation("monotonicity", float(points[index]), float(points[index + 1]), float(drops[index]))
        )
    x, y = np.meshgrid(points, points, indexing="ij")
    upper = np.triu(np.ones(x.shape, dtype=bool))
    excess = omega(x + y) - omega(x) - omega(y)
    for i, j in zip(*np.nonzero((excess > slack) & upper)):
        report.violations.append(
            Violation("subadditivity", float(points[i]), float(points[j]), float(excess[i, j]))
        )
    if report.violations:
        _LOGGER.debug("%s: %d modulus violations", omega.name, len(report.violations))
    return report


def modulus_norm_estimate(
    f: FunctionSpec, omega: Modulus, grid: SeminormGrid | None = None
) -> float:
    """Estimate sup |f(ζ) − f(τ)| / ω(|ζ − τ|) on a grid.

    On the circle the distance is the chordal one, |e^{iθ} − e^{iφ}|.
    """
    grid = grid or default_grid(f)
    points = grid.points()
    high = grid.interval[1]
    best = 0.0
    for step in grid.steps():
        usable = points if f.domain == CIRCLE else points[points + step <= high]
        if usable.size == 0:
            continue
        distance = 2 * math.sin(step / 2) if f.domain == CIRCLE else step
        scale = float(omega(distance))
        if scale <= 0:
            continue
        difference = np.abs(f(usable + step) - f(usable))
        best = max(best, float(np.max(difference)) / scale)
    return best


def power(beta: float = 0.5) -> Modulus:
    """t^β, a valid modulus for 0 < β <= 1."""
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    return Modulus(
        name="power",
        evaluate=lambda t: np.abs(t) ** beta,
        tail=Tail(TAIL_POWER, start=1.0, constant=1.0, exponent=beta),
        parameters={"beta": beta},
    )


def capped_linear() -> Modulus:
    """min(t, 1), the modulus of bounded Lipschitz functions."""
    return Modulus(
        name="capped_linear",
        evaluate=lambda t: np.minimum(t, 1.0),
        tail=Tail(TAIL_BOUNDED, start=1.0, bound=1.0),
    )


def log_lipschitz() -> Modulus:
    """t(1 + ln(1/t)) on (0, 1], constant 1 beyond."""

    def evaluate(t: np.ndarray) -> np.ndarray:
        inside = (t > 0) & (t < 1)
        safe = np.where(inside, t, 1.0)
        return np.where(inside, safe * (1 - np.log(safe)), np.where(t >= 1, 1.0, 0.0))

    return Modulus(
        name="log_lipschitz",
        evaluate=evaluate,
        tail=Tail(TAIL_BOUNDED, start=1.0, bound=1.0),
    )


def square() -> Modulus:
    """t², which is not subadditive and fails validation."""
    return Modulus(
        name="square",
        evaluate=lambda t: t**2,
        tail=Tail(TAIL_POWER, start=1.0, constant=1.0, exponent=2.0),
    )


def zero() -> Modulus:
    return Modulus(
        name="zero",
        evaluate=lambda t: np.zeros_like(t),
        tail=Tail(TAIL_BOUNDED, start=1.0, bound=0.0),
    )


MODULI: dict[str, Callable[..., Modulus]] = {
    "power": power,
    "capped_linear": capped_linear,
    "log_lipschitz": log_lipschitz,
    "square": square,
    "zero": zero,
}


def build_modulus(modulus_id: str, beta: float | None = None) -> Modulus:
    try:
        factory = MODULI[modulus_id]
    except KeyError as err:
        raise ParameterError(f"Unknown modulus {modulus_id!r}") from err
    if modulus_id == "power" and beta is not None:
        return factory(beta)
    return factory()
