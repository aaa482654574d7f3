"""Scalar test functions, their class metadata and Hölder-Zygmund seminorms."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
import inspect
import logging
import math
import threading
from typing import Any

import numpy as np

from .const import (
    CIRCLE_INTERVAL,
    SEMINORM_GRID_STEP,
    SEMINORM_T_MAX,
    SEMINORM_T_MIN,
    SUP_NORM_SAMPLES,
    WINDOW_INNER,
    WINDOW_OUTER,
)
from .exceptions import DomainError, ParameterError

_LOGGER = logging.getLogger(__name__)

LINE = "line"
CIRCLE = "circle"

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """An evaluable scalar function together with its smoothness class.

    Line functions are evaluated on real points inside ``interval``; circle
    functions take angles and are 2π-periodic. ``class_order`` n and
    ``class_exponent`` α describe membership in Λ_α with n−1 <= α < n.
    """

    name: str
    domain: str
    evaluate: Evaluator
    class_order: int
    class_exponent: float
    derivative: Evaluator | None = None
    analytic: bool = False
    declared_seminorm: float | None = None
    sup_norm_hint: float | None = None
    interval: tuple[float, float] = CIRCLE_INTERVAL
    singular_points: tuple[float, ...] = ()
    coefficients: Mapping[int, complex] | None = None
    polynomial_degree: int | None = None
    resolution: float | None = None
    smooth: bool = False
    parameters: Mapping[str, Any] = field(default_factory=dict)
    notes: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.domain not in (LINE, CIRCLE):
            raise ParameterError(f"Unknown function domain {self.domain!r}")
        n, alpha = self.class_order, self.class_exponent
        if n < 1 or not n - 1 <= alpha < n or alpha <= 0:
            raise ParameterError(
                f"{self.name}: class exponent {alpha} does not fit order {n}"
            )
        if self.analytic and self.domain != CIRCLE:
            raise ParameterError(f"{self.name}: only circle functions can be analytic")
        low, high = self.interval
        if not low < high:
            raise ParameterError(f"{self.name}: empty working interval {self.interval}")

    @property
    def key(self) -> tuple[str, tuple[tuple[str, Any], ...]]:
        """Hashable identity used to cache seminorm estimates."""
        return (self.name, tuple(sorted(self.parameters.items())))

    def check_domain(self, points: np.ndarray) -> None:
        if self.domain != LINE:
            return
        low, high = self.interval
        outside = (points < low) | (points > high) | ~np.isfinite(points)
        if np.any(outside):
            offending = tuple(float(value) for value in np.ravel(points[outside])[:8])
            raise DomainError(
                f"{self.name} evaluated outside its working interval [{low:g}, {high:g}]",
                values=offending,
            )

    def __call__(self, points: Any) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        self.check_domain(points)
        return np.asarray(self.evaluate(points), dtype=complex)

    def derivative_at(self, points: Any) -> np.ndarray | None:
        """Return f' at ``points``, with non-finite values replaced by NaN."""
        if self.derivative is None:
            return None
        points = np.asarray(points, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(self.derivative(points), dtype=complex)
        return np.where(np.isfinite(values), values, np.nan)

    def is_real(self, values: np.ndarray) -> bool:
        return bool(np.all(np.asarray(values).imag == 0))


@dataclass(frozen=True)
class SeminormGrid:
    """Evaluation grid for difference seminorms: points on ``interval`` and dyadic steps."""

    interval: tuple[float, float]
    step: float = SEMINORM_GRID_STEP
    t_min: float = SEMINORM_T_MIN
    t_max: float = SEMINORM_T_MAX

    def __post_init__(self) -> None:
        low, high = self.interval
        if not low < high or not self.step > 0:
            raise ParameterError(f"Invalid seminorm grid {self.interval} step {self.step}")
        if not 0 < self.t_min <= self.t_max:
            raise ParameterError(f"Invalid step range [{self.t_min}, {self.t_max}]")

    def points(self) -> np.ndarray:
        low, high = self.interval
        count = max(1, round((high - low) / self.step))
        # fractions k/m of a dyadic refinement reproduce the coarse points exactly
        return low + (high - low) * (np.arange(count + 1) / count)

    def steps(self) -> np.ndarray:
        first = math.ceil(-math.log2(self.t_max))
        last = math.floor(-math.log2(self.t_min))
        return np.array([2.0**-k for k in range(first, last + 1)])


def default_grid(f: FunctionSpec) -> SeminormGrid:
    return SeminormGrid(CIRCLE_INTERVAL if f.domain == CIRCLE else f.interval)


def finite_difference(f: FunctionSpec, points: np.ndarray, step: float, order: int) -> np.ndarray:
    """Return Σ_k (−1)^{n−k} C(n,k) f(x + k·step) at every point x."""
    total = np.zeros(points.shape, dtype=complex)
    for k in range(order + 1):
        total += (-1) ** (order - k) * math.comb(order, k) * f(points + k * step)
    return total


def seminorm_estimate(f: FunctionSpec, grid: SeminormGrid | None = None) -> float:
    """Estimate the Λ_α seminorm of ``f`` from n-th differences on a grid.

    The result is a maximum over finitely many differences and therefore a
    lower bound of the true seminorm.
    """
    grid = grid or default_grid(f)
    n, alpha = f.class_order, f.class_exponent
    if f.polynomial_degree is not None and f.polynomial_degree < n:
        return 0.0
    points = grid.points()
    high = grid.interval[1]
    if f.domain == LINE:
        low, top = f.interval
        if grid.interval[0] < low or high > top:
            raise DomainError(
                f"Seminorm grid {grid.interval} leaves the working interval of {f.name}",
                values=grid.interval,
            )
    best = 0.0
    for step in grid.steps():
        if f.domain == LINE:
            usable = points[points + n * step <= high]
            if usable.size == 0:
                continue
        else:
            usable = points
        difference = finite_difference(f, usable, step, n)
        best = max(best, float(np.max(np.abs(difference))) / step**alpha)
    return best


_SEMINORM_CACHE: dict[Any, float] = {}
_SEMINORM_LOCK = threading.Lock()


def normalization(f: FunctionSpec) -> tuple[float, str]:
    """Return the seminorm used to normalize ratios and where it came from."""
    if f.declared_seminorm is not None:
        return float(f.declared_seminorm), "declared"
    with _SEMINORM_LOCK:
        cached = _SEMINORM_CACHE.get(f.key)
    if cached is None:
        cached = seminorm_estimate(f)
        _LOGGER.debug("Estimated seminorm of %s: %.6g", f.name, cached)
        with _SEMINORM_LOCK:
            _SEMINORM_CACHE[f.key] = cached
    return cached, "estimated"


def circle_samples(count: int) -> np.ndarray:
    return -math.pi + 2 * math.pi * (np.arange(count) / count)


def sup_norm(f: FunctionSpec, samples: int = SUP_NORM_SAMPLES) -> float:
    """Return the declared sup norm, else the maximum of |f| on a uniform grid."""
    if f.sup_norm_hint is not None:
        return float(f.sup_norm_hint)
    if f.domain == CIRCLE:
        points = circle_samples(samples)
    else:
        points = np.linspace(*f.interval, samples)
    return float(np.max(np.abs(f(points))))


def _normalize_coefficients(coefficients: Any) -> dict[int, complex]:
    if isinstance(coefficients, Mapping):
        items: Iterable[tuple[Any, Any]] = coefficients.items()
    else:
        items = coefficients
    normalized: dict[int, complex] = {}
    for frequency, value in items:
        if isinstance(value, (list, tuple)):
            value = complex(value[0], value[1])
        normalized[int(frequency)] = normalized.get(int(frequency), 0) + complex(value)
    if not normalized:
        raise ParameterError("A trigonometric polynomial needs at least one coefficient")
    return normalized


def _order_for(alpha: float) -> int:
    if not alpha > 0:
        raise ParameterError(f"Exponent must be positive, got {alpha}")
    return math.floor(alpha) + 1


def _trig_evaluator(coefficients: Mapping[int, complex]) -> tuple[Evaluator, Evaluator]:
    frequencies = np.array(sorted(coefficients), dtype=float)
    values = np.array([coefficients[int(k)] for k in frequencies], dtype=complex)

    def evaluate(theta: np.ndarray) -> np.ndarray:
        result = np.zeros(theta.shape, dtype=complex)
        for k, c in zip(frequencies, values):
            result += c * np.exp(1j * k * theta)
        return result

    def derivative(theta: np.ndarray) -> np.ndarray:
        result = np.zeros(theta.shape, dtype=complex)
        for k, c in zip(frequencies, values):
            result += 1j * k * c * np.exp(1j * k * theta)
        return result

    return evaluate, derivative


def _hashable(coefficients: Mapping[int, complex]) -> tuple[tuple[int, complex], ...]:
    return tuple(sorted(coefficients.items()))


def power_alpha(alpha: float = 0.5, radius: float = 4.0) -> FunctionSpec:
    """|x|^α on [−radius, radius]; the seminorm is exactly 1 when α < 1."""
    order = _order_for(alpha)

    def derivative(x: np.ndarray) -> np.ndarray:
        return alpha * np.sign(x) * np.abs(x) ** (alpha - 1)

    return FunctionSpec(
        name="power_alpha",
        domain=LINE,
        evaluate=lambda x: np.abs(x) ** alpha,
        derivative=derivative,
        class_order=order,
        class_exponent=alpha,
        declared_seminorm=1.0 if alpha < 1 else None,
        sup_norm_hint=radius**alpha,
        interval=(-radius, radius),
        singular_points=(0.0,),
        parameters={"alpha": alpha, "radius": radius},
    )


def sin_sigma(sigma: float = 1.0, radius: float = 64.0, alpha: float = 0.5) -> FunctionSpec:
    """sin(σx), entire of exponential type σ."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    return FunctionSpec(
        name="sin_sigma",
        domain=LINE,
        evaluate=lambda x: np.sin(sigma * x),
        derivative=lambda x: sigma * np.cos(sigma * x),
        class_order=_order_for(alpha),
        class_exponent=alpha,
        sup_norm_hint=1.0,
        interval=(-radius, radius),
        smooth=True,
        parameters={"sigma": sigma, "radius": radius, "alpha": alpha},
    )


def _bump(s: np.ndarray) -> np.ndarray:
    positive = s > 0
    return np.where(positive, np.exp(-1.0 / np.where(positive, s, 1.0)), 0.0)


def smooth_window(x: np.ndarray) -> np.ndarray:
    """C^∞ cutoff equal to 1 on [−1, 1] and 0 outside [−2, 2]."""
    r = np.abs(x)
    inner = _bump(WINDOW_OUTER - r)
    outer = _bump(r - WINDOW_INNER)
    return inner / (inner + outer)


def xloglx(radius: float = 4.0) -> FunctionSpec:
    """x·log|x| times a smooth window, a Zygmund function that is not Lipschitz."""

    def evaluate(x: np.ndarray) -> np.ndarray:
        r = np.abs(x)
        core = x * np.log(np.where(r > 0, r, 1.0))
        return core * smooth_window(x)

    return FunctionSpec(
        name="xloglx",
        domain=LINE,
        evaluate=evaluate,
        class_order=2,
        class_exponent=1.0,
        interval=(-radius, radius),
        singular_points=(0.0,),
        parameters={"radius": radius},
        notes={
            "window": "exp(-1/(2-|x|)) / (exp(-1/(2-|x|)) + exp(-1/(|x|-1))), "
            "1 on [-1, 1], 0 outside [-2, 2]"
        },
    )


def trig_poly(coefficients: Any = None, alpha: float = 0.5) -> FunctionSpec:
    """Σ c_k e^{ikθ}; analytic when every frequency is nonnegative."""
    coefficients = _normalize_coefficients(coefficients if coefficients is not None else {1: 1})
    evaluate, derivative = _trig_evaluator(coefficients)
    return FunctionSpec(
        name="trig_poly",
        domain=CIRCLE,
        evaluate=evaluate,
        derivative=derivative,
        class_order=_order_for(alpha),
        class_exponent=alpha,
        analytic=all(k >= 0 for k in coefficients),
        sup_norm_hint=(
            float(sum(abs(c) for c in coefficients.values()))
            if len(coefficients) == 1
            else None
        ),
        coefficients=coefficients,
        smooth=True,
        parameters={"coefficients": _hashable(coefficients), "alpha": alpha},
    )


def lacunary(alpha: float = 0.5, levels: int = 8) -> FunctionSpec:
    """Σ_{j<=J} 2^{−jα} e^{i2^jθ}, an analytic Λ_α witness resolved down to 2^{−J}."""
    if int(levels) != levels or levels < 0:
        raise ParameterError(f"levels must be a nonnegative integer, got {levels}")
    levels = int(levels)
    coefficients = {2**j: 2.0 ** (-j * alpha) + 0j for j in range(levels + 1)}
    evaluate, derivative = _trig_evaluator(coefficients)
    return FunctionSpec(
        name="lacunary",
        domain=CIRCLE,
        evaluate=evaluate,
        derivative=derivative,
        class_order=_order_for(alpha),
        class_exponent=alpha,
        analytic=True,
        sup_norm_hint=float(sum(c.real for c in coefficients.values())),
        coefficients=coefficients,
        resolution=2.0**-levels,
        parameters={"alpha": alpha, "levels": levels},
    )


def polynomial(
    coefficients: Any = (0.0, 1.0), radius: float = 64.0, alpha: float = 0.5, name: str = "polynomial"
) -> FunctionSpec:
    """Σ c_k x^k on [−radius, radius], coefficients in increasing degree."""
    dense = np.array([complex(c) for c in coefficients], dtype=complex)
    nonzero = np.flatnonzero(dense)
    degree = int(nonzero[-1]) if nonzero.size else 0
    dense = dense[: degree + 1]
    derivative_coefficients = np.polynomial.polynomial.polyder(dense) if degree else np.zeros(1)
    real = bool(np.all(dense.imag == 0))
    if real:
        dense = dense.real
        derivative_coefficients = np.real(derivative_coefficients)
    return FunctionSpec(
        name=name,
        domain=LINE,
        evaluate=lambda x: np.polynomial.polynomial.polyval(x, dense),
        derivative=lambda x: np.polynomial.polynomial.polyval(x, derivative_coefficients),
        class_order=_order_for(alpha),
        class_exponent=alpha,
        interval=(-radius, radius),
        polynomial_degree=degree,
        smooth=True,
        parameters={"coefficients": tuple(complex(c) for c in dense), "radius": radius, "alpha": alpha},
    )


def identity(radius: float = 64.0, alpha: float = 0.5) -> FunctionSpec:
    return polynomial((0.0, 1.0), radius, alpha, name="identity")


def square(radius: float = 64.0, alpha: float = 0.5) -> FunctionSpec:
    return polynomial((0.0, 0.0, 1.0), radius, alpha, name="square")


def cube(radius: float = 64.0, alpha: float = 0.5) -> FunctionSpec:
    return polynomial((0.0, 0.0, 0.0, 1.0), radius, alpha, name="cube")


def exp_i(k: float = 1.0, radius: float = 1024.0) -> FunctionSpec:
    """x ↦ e^{ikx}, used to exponentiate Hermitian matrices."""
    return FunctionSpec(
        name="exp_i",
        domain=LINE,
        evaluate=lambda x: np.exp(1j * k * x),
        derivative=lambda x: 1j * k * np.exp(1j * k * x),
        class_order=1,
        class_exponent=0.5,
        sup_norm_hint=1.0,
        interval=(-radius, radius),
        smooth=True,
        parameters={"k": k, "radius": radius},
    )


def abs_sin() -> FunctionSpec:
    """|sin θ|, Lipschitz on the circle and hence in the Zygmund class."""
    return FunctionSpec(
        name="abs_sin",
        domain=CIRCLE,
        evaluate=lambda theta: np.abs(np.sin(theta)),
        class_order=2,
        class_exponent=1.0,
        sup_norm_hint=1.0,
        singular_points=(0.0, math.pi),
    )


CATALOG: dict[str, Callable[..., FunctionSpec]] = {
    "power_alpha": power_alpha,
    "sin_sigma": sin_sigma,
    "xloglx": xloglx,
    "trig_poly": trig_poly,
    "lacunary": lacunary,
    "polynomial": polynomial,
    "identity": identity,
    "square": square,
    "cube": cube,
    "exp_i": exp_i,
    "abs_sin": abs_sin,
}


def catalog() -> dict[str, Callable[..., FunctionSpec]]:
    """Return the named function factories."""
    return dict(CATALOG)


def build_function(function_id: str, **params: Any) -> FunctionSpec:
    """Build a catalog function, ignoring parameters its factory does not take."""
    try:
        factory = CATALOG[function_id]
    except KeyError as err:
        raise ParameterError(f"Unknown function {function_id!r}") from err
    accepted = inspect.signature(factory).parameters
    kwargs = {key: value for key, value in params.items() if key in accepted and value is not None}
    return factory(**kwargs)


def fourier_coefficients(f: FunctionSpec, degree: int) -> dict[int, complex]:
    """Return c_k for |k| <= degree, sampled by FFT when f carries none."""
    if f.coefficients is not None:
        return {k: c for k, c in f.coefficients.items() if abs(k) <= degree}
    count = max(64, 4 * (degree + 1))
    values = f(circle_samples(count))
    # samples start at −π, which multiplies c_k by (−1)^k
    spectrum = np.fft.fft(values) / count
    coefficients = {}
    for k in range(-degree, degree + 1):
        c = spectrum[k % count] * (-1) ** (k % 2)
        if k < 0 and f.analytic:
            continue
        coefficients[k] = complex(c)
    return coefficients


def fejer_mean(f: FunctionSpec, degree: int) -> FunctionSpec:
    """Return the Fejér mean σ_N f = Σ_{|k|<=N} (1 − |k|/(N+1)) c_k e^{ikθ}."""
    if f.domain != CIRCLE:
        raise ParameterError("Fejér means are defined for circle functions")
    if int(degree) != degree or degree < 0:
        raise ParameterError(f"Fejér degree must be a nonnegative integer, got {degree}")
    degree = int(degree)
    weighted = {
        k: c * (1 - abs(k) / (degree + 1))
        for k, c in fourier_coefficients(f, degree).items()
        if abs(k) <= degree
    }
    weighted = {k: c for k, c in weighted.items() if c != 0} or {0: 0j}
    evaluate, derivative = _trig_evaluator(weighted)
    return FunctionSpec(
        name=f"fejer_{f.name}",
        domain=CIRCLE,
        evaluate=evaluate,
        derivative=derivative,
        class_order=f.class_order,
        class_exponent=f.class_exponent,
        analytic=all(k >= 0 for k in weighted),
        coefficients=weighted,
        resolution=f.resolution,
        smooth=True,
        parameters={"source": f.key, "degree": degree},
    )


def fejer_sup_error(f: FunctionSpec, g: FunctionSpec, samples: int | None = None) -> float:
    """Return max |f − g| on a circle grid fine enough for the highest frequency."""
    if samples is None:
        frequencies = [abs(k) for k in (f.coefficients or {})] or [0]
        samples = min(2**20, max(SUP_NORM_SAMPLES, 8 * max(frequencies)))
    theta = circle_samples(samples)
    return float(np.max(np.abs(f(theta) - g(theta))))
