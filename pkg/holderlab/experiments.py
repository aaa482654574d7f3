"""One experiment class per operator inequality.

Every experiment draws a Gaussian parameter vector per trial, maps it onto a
witness (a pair of operators, or an operator and a perturbation) and measures
the left- and right-hand side of its inequality. Base operators carry the
singular point of the test function in their spectrum and perturbations are
positive, so the extremal scaling of the inequality is visible at matrix
scale.
"""

from __future__ import annotations

from functools import cached_property
import logging
import math
from typing import Any, ClassVar

import numpy as np

from .calculus import (
    apply_hermitian,
    apply_unitary,
    contraction_differences,
    delta_n,
    doi_first_difference,
    expm_hermitian,
    unitary_multiplicative_differences,
)
from .const import (
    BERNSTEIN_SPECTRUM_RADIUS,
    DEFAULT_DEGREES,
    DEFAULT_RANKS,
    DEFAULT_SCALES,
    DEFAULT_SIGMAS,
    DEFAULT_SPECTRAL_GAP,
    DEFAULT_SPECTRUM_RADIUS,
    FINEST_SCALE,
    MODE_LITERAL,
    PLANTED_COMPLEMENT_SHARE,
    SETTING_SELFADJOINT,
    SETTING_UNITARY,
    SLOPE_TOL_FIRST_ORDER,
    SLOPE_TOL_HIGHER_ORDER,
    SPECTRUM_POSITIVE,
    SPECTRUM_SIGNED,
)
from .coordinator import TrialBatch, TrialCoordinator
from .ensembles import (
    ParameterLayout,
    hermitian_from_params,
    hermitian_layout,
    perturbation_from_params,
    unitary_from_params,
)
from .exceptions import NumericError, ParameterError, ScaleTooLarge
from .functions import (
    CIRCLE,
    LINE,
    FunctionSpec,
    build_function,
    fejer_mean,
    fejer_sup_error,
    normalization,
    sup_norm,
    trig_poly,
)
from .linalg import (
    NormKind,
    adjoint,
    complex_gaussian,
    operator_norm,
    schatten_norm,
    symmetrize,
    unitary_from_gaussian,
    weak_schatten_norm,
)
from .models import ExperimentConfig, ExperimentReport, Outcome, TrialResult
from .modulus import Modulus, build_modulus, modulus_norm_estimate, omega_star
from .search import best_trial, refine_witness
from .statistics import exponent_regression, growth_factor

_LOGGER = logging.getLogger(__name__)

SLOPE_LHS = "lhs"
SLOPE_RATIO = "ratio"

RULE_TWO_SIDED = "two_sided"
RULE_NO_GROWTH = "no_growth"

FLAG_DEGENERATE = "degenerate_witness"
FLAG_ANNIHILATED = "annihilated_witness"
FLAG_COARSE = "coarse_resolution"
FLAG_INSUFFICIENT = "insufficient_scales"

# circle witnesses resolve scales down to 2^-(J - ceil(WITNESS_MARGIN / alpha))
WITNESS_MARGIN = 4.5
COARSE_SCALES = (2.0**-1, 2.0**-2, 2.0**-3)


class Experiment:
    """Base class of the inequality experiments."""

    experiment_id: ClassVar[str] = ""
    domain: ClassVar[str] = LINE
    default_function: ClassVar[dict[str, Any]] = {"function_id": "power_alpha"}
    slope_target: ClassVar[str | None] = SLOPE_LHS
    slope_rule: ClassVar[str] = RULE_TWO_SIDED
    default_slope_tol: ClassVar[float] = SLOPE_TOL_FIRST_ORDER
    # how many multiples of the largest scale the perturbed spectra may travel
    reach: ClassVar[int] = 1

    def __init__(self, config: ExperimentConfig) -> None:
        """Initialize the experiment and validate its parameters."""
        self.config = config
        self.flags: list[str] = []
        self.notes: dict[str, Any] = {}
        self._layouts: dict[int, ParameterLayout] = {}
        self.function = self.build_function()
        self.scales = self.resolve_scales()
        self.validate()

    # -- configuration -------------------------------------------------

    def function_arguments(self) -> dict[str, Any]:
        config = self.config
        arguments = dict(self.default_function)
        overrides = {
            "function_id": config.function_id,
            "alpha": config.alpha,
            "sigma": config.sigma,
            "levels": config.levels,
        }
        if config.function_id is not None and config.function_id != arguments.get("function_id"):
            arguments = {"function_id": config.function_id}
        arguments.update({key: value for key, value in overrides.items() if value is not None})
        if config.coefficients is not None:
            arguments["coefficients"] = _coefficients_for(arguments["function_id"], config.coefficients)
        return arguments

    def build_function(self) -> FunctionSpec:
        arguments = self.function_arguments()
        function_id = arguments.pop("function_id")
        return build_function(function_id, **arguments)

    def validate(self) -> None:
        """Raise ParameterError when the configuration cannot test the inequality."""
        f = self.function
        if f.domain != self.domain:
            raise ParameterError(
                f"{self.experiment_id} needs a {self.domain} function, {f.name} lives on the {f.domain}"
            )
        if self.domain == LINE:
            self._check_reach()

    def _check_reach(self) -> None:
        center = self.planted if self.planted is not None else 0.0
        if self.gap >= self.radius:
            raise ParameterError(
                f"spectral_gap {self.gap} must be smaller than spectrum_radius {self.radius}"
            )
        extent = self.radius + self.reach * self.scales[0]
        low, high = self.function.interval
        if center - extent < low or center + extent > high:
            raise ParameterError(
                f"Spectra up to {center - extent:g}..{center + extent:g} leave the "
                f"working interval [{low:g}, {high:g}] of {self.function.name}"
            )

    def resolve_scales(self) -> tuple[float, ...]:
        configured = self.config.perturbation_scales
        if configured is not None:
            scales = tuple(float(scale) for scale in configured)
            if not scales or any(not scale > 0 for scale in scales):
                raise ParameterError("perturbation_scales must be positive")
            if any(a <= b for a, b in zip(scales, scales[1:])):
                raise ParameterError("perturbation_scales must be strictly decreasing")
            if scales[-1] < FINEST_SCALE * (1 - 1e-12):
                raise ParameterError(
                    f"Scales below {FINEST_SCALE:g} drown in eigendecomposition noise"
                )
            return scales
        resolution = self.function.resolution
        if resolution is None:
            return DEFAULT_SCALES
        levels = round(-math.log2(resolution))
        finest = min(14, levels - math.ceil(WITNESS_MARGIN / self.function.class_exponent))
        if finest < 3:
            _LOGGER.warning(
                "%s resolves only down to 2^-%s, falling back to scales 2^-1..2^-3",
                self.function.name,
                levels,
            )
            self.flags.append(FLAG_COARSE)
            return COARSE_SCALES
        return tuple(2.0**-k for k in range(1, finest + 1))

    @property
    def slope_tol(self) -> float:
        tol = self.config.tolerances.slope_tol
        return self.default_slope_tol if tol is None else tol

    @property
    def radius(self) -> float:
        if self.config.spectrum_radius is not None:
            return float(self.config.spectrum_radius)
        return DEFAULT_SPECTRUM_RADIUS

    @property
    def planted(self) -> float | None:
        points = self.function.singular_points
        return points[0] if points and self.domain == LINE else None

    @property
    def gap(self) -> float:
        if self.planted is None:
            return 0.0
        if self.config.spectral_gap is not None:
            return float(self.config.spectral_gap)
        return DEFAULT_SPECTRAL_GAP

    @cached_property
    def normalizer(self) -> tuple[float, str]:
        """Seminorm dividing the right-hand sides and its source."""
        value, source = normalization(self.function)
        if value == 0:
            self.flags.append(FLAG_ANNIHILATED)
            return 1.0, "unit (zero seminorm)"
        return value, source

    @property
    def seminorm(self) -> float:
        return self.normalizer[0]

    def expected_slope(self) -> float | None:
        if self.slope_target == SLOPE_LHS:
            return self.function.class_exponent
        if self.slope_target == SLOPE_RATIO:
            return 0.0
        return None

    # -- sampling ------------------------------------------------------

    def groups(self, dim: int) -> list[str | None]:
        return [None]

    def layout(self, dim: int) -> ParameterLayout:
        if dim not in self._layouts:
            layout = ParameterLayout()
            for name, count in self.blocks(dim):
                layout.add(name, count)
            self._layouts[dim] = layout
        return self._layouts[dim]

    def blocks(self, dim: int) -> tuple[tuple[str, int], ...]:
        return hermitian_layout(dim, "a") + hermitian_layout(dim, "k")

    def draw(self, rng: np.random.Generator, dim: int) -> np.ndarray:
        return self.layout(dim).draw(rng)

    def base_operator(self, params: np.ndarray, dim: int, radius: float | None = None) -> np.ndarray:
        return hermitian_from_params(
            self.layout(dim), params, "a", self.radius if radius is None else radius, self.gap, self.planted
        )

    def perturbation(
        self,
        params: np.ndarray,
        dim: int,
        scale: float,
        norm_kind: NormKind | None = None,
        rank: int | None = None,
        spectrum: str = SPECTRUM_POSITIVE,
    ) -> np.ndarray:
        layout = self.layout(dim)
        return perturbation_from_params(
            layout.block(params, "k_frame"),
            layout.block(params, "k_spectrum"),
            scale,
            rank,
            norm_kind,
            spectrum,
        )

    def unitary(self, params: np.ndarray, dim: int) -> np.ndarray:
        return unitary_from_params(self.layout(dim), params, "u_frame", dim)

    def evaluate(
        self, params: np.ndarray, dim: int, scale: float, groups: list[str | None] | None = None
    ) -> list[Outcome]:
        raise NotImplementedError

    # -- reporting -----------------------------------------------------

    def describe(self) -> dict[str, Any]:
        f = self.function
        value, source = self.normalizer
        notes = {
            "function": f.name,
            "function_parameters": dict(f.parameters),
            "class_order": f.class_order,
            "class_exponent": f.class_exponent,
            "seminorm": value,
            "seminorm_source": source,
            "scales": list(self.scales),
        }
        notes.update(f.notes)
        notes.update(self.notes)
        return notes

    def prepare(self) -> None:
        """Compute lazily cached normalizations before trials run concurrently."""
        self.normalizer

    def run(self, jobs: int = 1) -> ExperimentReport:
        """Run all trials, aggregate them and decide the verdicts."""
        _LOGGER.info("Running %s with %s", self.experiment_id, self.function.name)
        self.prepare()
        report = ExperimentReport(experiment_id=self.experiment_id, config=self.config.as_dict())
        coordinator = TrialCoordinator(self, jobs)
        batch = coordinator.run()
        coordinator.aggregate(batch, report)
        self.assess(report, batch)
        self.estimate_constant(report, batch)
        report.notes = self.describe()
        report.flags = sorted(set(self.flags))
        failed = [name for name, verdict in report.verdicts.items() if verdict is not None and not verdict]
        if failed:
            _LOGGER.warning("%s failed verdicts: %s", self.experiment_id, ", ".join(failed))
        _LOGGER.info(
            "Finished %s: %s trials, %s skipped, slope %s",
            self.experiment_id,
            report.trials,
            report.skips.get("count"),
            report.slope,
        )
        return report

    def estimate_constant(self, report: ExperimentReport, batch: TrialBatch) -> None:
        trial = best_trial(batch.results)
        if trial is None:
            return
        report.constant_estimate = refine_witness(self, trial, self.config.adversarial_steps)

    def regression_points(self, batch: TrialBatch) -> list[tuple[float, float]]:
        attribute = "lhs_norm" if self.slope_target == SLOPE_LHS else "ratio"
        points = []
        for scale in self.scales:
            values = [getattr(r, attribute) for r in batch.results if r.scale == scale]
            if values and max(values) > 0:
                points.append((scale, max(values)))
        return points

    def assess(self, report: ExperimentReport, batch: TrialBatch) -> None:
        """Fill slope, growth, boundedness and skip verdicts."""
        tolerances = self.config.tolerances
        if self.slope_target is not None:
            self._assess_slope(report, self.regression_points(batch))
        report.verdicts["bounded"] = (
            all(math.isfinite(r.ratio) for r in batch.results) if batch.results else None
        )
        report.verdicts["growth"] = self._growth_verdict(report, batch.results, "growth_factor")
        report.verdicts["skips"] = bool(report.skips["rate"] <= tolerances.skip_tol)
        if report.skips["rate"] > tolerances.skip_tol:
            _LOGGER.warning(
                "%s skipped %.1f%% of its trials", self.experiment_id, 100 * report.skips["rate"]
            )

    def _assess_slope(self, report: ExperimentReport, points: list[tuple[float, float]]) -> None:
        if len(points) < 3:
            self.flags.append(FLAG_INSUFFICIENT)
            report.verdicts["slope"] = None
            return
        fit = exponent_regression(points)
        report.slope, report.stderr = fit.slope, fit.stderr
        expected = self.expected_slope()
        report.extra["expected_slope"] = expected
        report.extra["slope_tol"] = self.slope_tol
        if expected is None:
            report.verdicts["slope"] = None
        elif self.slope_target == SLOPE_LHS and self.function.smooth:
            self.flags.append(FLAG_DEGENERATE)
            report.verdicts["slope"] = None
        elif self.slope_rule == RULE_NO_GROWTH:
            report.verdicts["slope"] = bool(fit.slope >= expected - self.slope_tol)
        else:
            report.verdicts["slope"] = bool(abs(fit.slope - expected) <= self.slope_tol)

    def _growth_verdict(
        self, report: ExperimentReport, results: list[TrialResult], name: str, ratio=None
    ) -> bool | None:
        dims = sorted(set(self.config.dims))
        if len(dims) < 2:
            return None
        ratio = ratio or (lambda r: r.ratio)
        largest = max((ratio(r) for r in results if r.dim == dims[-1]), default=None)
        smallest = max((ratio(r) for r in results if r.dim == dims[0]), default=None)
        if largest is None or smallest is None:
            return None
        factor = growth_factor(largest, smallest)
        report.extra[name] = factor
        return bool(factor <= self.config.tolerances.growth_tol)


def _coefficients_for(function_id: str, pairs: tuple[tuple[int, complex], ...]) -> Any:
    if function_id == "polynomial":
        dense = [0j] * (max(k for k, _ in pairs) + 1)
        for k, c in pairs:
            if k < 0:
                raise ParameterError("Polynomial coefficients need nonnegative degrees")
            dense[k] += c
        return dense
    return dict(pairs)


def _reject_polynomial(f: FunctionSpec, order: int, experiment_id: str) -> None:
    if f.polynomial_degree is not None and f.polynomial_degree >= order:
        raise ParameterError(
            f"{experiment_id}: a polynomial of degree {f.polynomial_degree} has no finite "
            f"Λ seminorm of order {order} and cannot witness the inequality"
        )


class SelfAdjointHolderExperiment(Experiment):
    """‖f(A) − f(B)‖ against ‖f‖_{Λ_α}·‖A − B‖^α for 0 < α < 1."""

    experiment_id = "selfadjoint_holder"

    def validate(self) -> None:
        alpha = self.function.class_exponent
        if not 0 < alpha < 1:
            raise ParameterError(f"{self.experiment_id} requires 0 < alpha < 1, got {alpha}")
        _reject_polynomial(self.function, 1, self.experiment_id)
        super().validate()

    def measure(self, A: Any, B: Any) -> Outcome:
        f = self.function
        direct = apply_hermitian(f, A) - apply_hermitian(f, B)
        distance = operator_norm(np.asarray(A) - np.asarray(B))
        doi = doi_first_difference(f, A, B)
        residual = float(np.linalg.norm(doi - direct)) / (
            1 + float(np.linalg.norm(A)) + float(np.linalg.norm(B))
        )
        return Outcome(
            lhs=operator_norm(direct),
            rhs=self.seminorm * distance**f.class_exponent,
            checks={"doi_residual": residual},
        )

    def evaluate(self, params, dim, scale, groups=None):
        A = self.base_operator(params, dim)
        B = A + self.perturbation(params, dim, scale)
        return [self.measure(A, B)]

    def assess(self, report, batch):
        super().assess(report, batch)
        residuals = [r.checks.get("doi_residual", 0.0) for r in batch.results]
        report.extra["doi_residual_max"] = max(residuals, default=0.0)
        report.verdicts["doi_consistency"] = (
            bool(max(residuals) <= self.config.tolerances.doi_tol) if residuals else None
        )


class FarforovskayaCompareExperiment(SelfAdjointHolderExperiment):
    """Compare the logarithmic interval bound with the dimension-free Hölder bound."""

    experiment_id = "farforovskaya_compare"
    slope_target = None

    @property
    def interval(self) -> tuple[float, float]:
        if self.config.interval is not None:
            return tuple(float(x) for x in self.config.interval)
        center = self.planted if self.planted is not None else 0.0
        return (center - self.radius, center + self.radius + self.scales[0])

    def validate(self) -> None:
        super().validate()
        low, high = self.interval
        center = self.planted if self.planted is not None else 0.0
        if not low < high:
            raise ParameterError(f"Empty comparison interval [{low}, {high}]")
        if center - self.radius < low or center + self.radius + self.scales[0] > high:
            raise ParameterError(
                f"Comparison interval [{low}, {high}] does not contain the sampled spectra"
            )

    @staticmethod
    def log_factor(width: float, distance: float) -> float:
        """Return (ln(width/distance + 1) + 1)²."""
        return (math.log(width / distance + 1) + 1) ** 2

    def assess(self, report, batch):
        super().assess(report, batch)
        low, high = self.interval
        width = high - low
        factors, measured = {}, {}
        for scale in self.scales:
            key = repr(scale)
            factors[key] = self.log_factor(width, scale)
            measured[key] = max((r.ratio for r in batch.results if r.scale == scale), default=None)
        report.extra.update(
            {
                "interval": [low, high],
                "bound_ratio": factors,
                "measured_max_ratio": measured,
            }
        )
        report.verdicts = {"informational": True}


class ZygmundExperiment(Experiment):
    """‖f(A+K) − 2f(A) + f(A−K)‖ against ‖f‖_{Λ_1}·‖K‖."""

    experiment_id = "zygmund"
    default_function = {"function_id": "xloglx"}
    slope_target = SLOPE_RATIO
    default_slope_tol = SLOPE_TOL_HIGHER_ORDER
    reach = 2

    def validate(self) -> None:
        f = self.function
        if f.class_order != 2 or f.class_exponent != 1:
            raise ParameterError(
                f"{self.experiment_id} needs a Zygmund function (n=2, alpha=1), "
                f"{f.name} has n={f.class_order}, alpha={f.class_exponent}"
            )
        _reject_polynomial(f, 2, self.experiment_id)
        super().validate()

    def measure(self, A: Any, K: Any) -> Outcome:
        """Measure the symmetric second difference centred at A."""
        A, K = np.asarray(A, dtype=complex), np.asarray(K, dtype=complex)
        difference = delta_n(self.function, A - K, K, 2)
        return Outcome(lhs=operator_norm(difference), rhs=self.seminorm * operator_norm(K))

    def evaluate(self, params, dim, scale, groups=None):
        base = self.base_operator(params, dim)
        K = self.perturbation(params, dim, scale)
        return [self.measure(base + K, K)]


class BernsteinExperiment(Experiment):
    """‖f(A) − f(B)‖ against σ‖f‖_∞‖A − B‖ for functions of exponential type σ.

    On the circle, trigonometric polynomials of degree d take the place of
    band-limited functions and d the place of σ.
    """

    experiment_id = "bernstein"
    default_function = {"function_id": "sin_sigma"}
    slope_target = None
    default_slope_tol = SLOPE_TOL_HIGHER_ORDER

    def __init__(self, config: ExperimentConfig) -> None:
        self.circle = (
            config.function_id == "trig_poly"
            or config.degrees is not None
            or config.coefficients is not None
        )
        super().__init__(config)

    @property
    def radius(self) -> float:
        if self.config.spectrum_radius is not None:
            return float(self.config.spectrum_radius)
        return BERNSTEIN_SPECTRUM_RADIUS

    def build_function(self) -> FunctionSpec:
        if self.circle:
            return trig_poly(
                dict(self.config.coefficients) if self.config.coefficients else {1: 1}
            )
        return super().build_function()

    @cached_property
    def members(self) -> dict[str, tuple[float, FunctionSpec, float]]:
        """Map group label to (σ or degree, function, sup norm)."""
        config = self.config
        members = {}
        if self.circle and config.coefficients is not None:
            degree = max(abs(k) for k, _ in config.coefficients)
            members[f"degree={degree}"] = (float(degree), self.function, sup_norm(self.function))
        elif self.circle:
            for degree in config.degrees or DEFAULT_DEGREES:
                f = trig_poly({int(degree): 1})
                members[f"degree={degree}"] = (float(degree), f, sup_norm(f))
        else:
            sigmas = config.sigmas or ((config.sigma,) if config.sigma else DEFAULT_SIGMAS)
            for sigma in sigmas:
                f = build_function("sin_sigma", sigma=float(sigma))
                members[f"sigma={sigma:g}"] = (float(sigma), f, sup_norm(f))
        return members

    def validate(self) -> None:
        if not self.circle and self.function.name != "sin_sigma":
            raise ParameterError(f"{self.experiment_id} on the line uses sin_sigma witnesses")
        if self.circle:
            if any(value < 1 for value, _, _ in self.members.values()):
                raise ParameterError("Trigonometric polynomial degrees must be at least 1")
            return
        for sigma, f, _ in self.members.values():
            if not sigma > 0:
                raise ParameterError(f"sigma must be positive, got {sigma}")
            if self.radius + self.scales[0] > f.interval[1]:
                raise ParameterError("Bernstein witnesses leave the working interval")

    def groups(self, dim):
        return list(self.members)

    def measure_line(self, f: FunctionSpec, sigma: float, sup: float, A: Any, B: Any) -> Outcome:
        distance = operator_norm(np.asarray(A) - np.asarray(B))
        lhs = operator_norm(apply_hermitian(f, A) - apply_hermitian(f, B))
        return Outcome(lhs=lhs, rhs=sigma * sup * distance, checks={"quotient": lhs / distance if distance else 0.0})

    def measure_circle(self, f: FunctionSpec, degree: float, sup: float, U: Any, V: Any) -> Outcome:
        distance = operator_norm(np.asarray(U) - np.asarray(V))
        lhs = operator_norm(apply_unitary(f, U) - apply_unitary(f, V))
        return Outcome(lhs=lhs, rhs=degree * sup * distance, checks={"quotient": lhs / distance if distance else 0.0})

    def evaluate(self, params, dim, scale, groups=None):
        A = self.base_operator(params, dim)
        K = self.perturbation(params, dim, scale, spectrum=SPECTRUM_SIGNED)
        if self.circle:
            left = expm_hermitian(A)
            right = expm_hermitian(K) @ left
        else:
            left, right = A, A + K
        outcomes = []
        for label, (value, f, sup) in self.members.items():
            if groups is not None and label not in groups:
                continue
            measure = self.measure_circle if self.circle else self.measure_line
            outcome = measure(f, value, sup, left, right)
            outcomes.append(Outcome(outcome.lhs, outcome.rhs, label, outcome.checks))
        return outcomes

    def assess(self, report, batch):
        super().assess(report, batch)
        points, per_group = [], {}
        for label, (value, _, _) in self.members.items():
            members = [r for r in batch.results if r.group == label]
            quotient = max((r.checks["quotient"] for r in members), default=0.0)
            per_group[label] = {
                "parameter": value,
                "max_ratio": max((r.ratio for r in members), default=None),
                "max_quotient": quotient,
            }
            if quotient > 0:
                points.append((value, quotient))
        report.extra["groups"] = per_group
        if len(points) < 3:
            self.flags.append(FLAG_INSUFFICIENT)
            report.verdicts["sigma_scaling"] = None
            return
        fit = exponent_regression(points)
        report.slope, report.stderr = fit.slope, fit.stderr
        report.extra["expected_slope"] = 1.0
        report.extra["slope_tol"] = self.slope_tol
        report.verdicts["sigma_scaling"] = bool(abs(fit.slope - 1.0) <= self.slope_tol)


class UnitaryHolderExperiment(Experiment):
    """‖f(U) − f(V)‖ against ‖f‖_{Λ_α}·‖U − V‖^α for unitary U, V."""

    experiment_id = "unitary_holder"
    domain = CIRCLE
    default_function = {"function_id": "lacunary", "alpha": 0.5, "levels": 20}
    default_slope_tol = SLOPE_TOL_HIGHER_ORDER

    def validate(self) -> None:
        alpha = self.function.class_exponent
        if not 0 < alpha < 1:
            raise ParameterError(f"{self.experiment_id} requires 0 < alpha < 1, got {alpha}")
        super().validate()

    def blocks(self, dim):
        return (("u_frame", 2 * dim * dim),) + hermitian_layout(dim, "k")

    def pair(self, params, dim, scale) -> tuple[np.ndarray, np.ndarray]:
        """Return U and V = e^{iH}·U with H positive and ‖H‖ = scale."""
        U = self.unitary(params, dim)
        H = self.perturbation(params, dim, scale)
        return U, expm_hermitian(H) @ U

    def measure(self, U: Any, V: Any) -> Outcome:
        f = self.function
        distance = operator_norm(np.asarray(U) - np.asarray(V))
        lhs = operator_norm(apply_unitary(f, U) - apply_unitary(f, V))
        return Outcome(lhs=lhs, rhs=self.seminorm * distance**f.class_exponent)

    def evaluate(self, params, dim, scale, groups=None):
        return [self.measure(*self.pair(params, dim, scale))]


class UnitaryLipschitzLogExperiment(UnitaryHolderExperiment):
    """‖f(U) − f(V)‖ against ‖f‖_{Λ_1}(2 + log₂(1/‖U − V‖))‖U − V‖."""

    experiment_id = "unitary_lipschitz_log"
    default_function = {"function_id": "lacunary", "alpha": 1.0, "levels": 20}
    slope_target = SLOPE_RATIO
    default_slope_tol = SLOPE_TOL_FIRST_ORDER

    def validate(self) -> None:
        f = self.function
        if f.class_order != 2 or f.class_exponent != 1:
            raise ParameterError(
                f"{self.experiment_id} needs a Zygmund function (n=2, alpha=1), "
                f"{f.name} has n={f.class_order}, alpha={f.class_exponent}"
            )
        Experiment.validate(self)

    @staticmethod
    def log_factor(distance: float) -> float:
        return 2 + math.log2(1 / distance)

    def blocks(self, dim):
        rest = dim - 1
        return (("u_frame", 2 * dim * dim), ("u_rest", 2 * rest * rest)) + hermitian_layout(rest, "k")

    def pair(self, params, dim, scale):
        """Return U fixing a planted unit vector and V = e^{iH}·U.

        The planted vector is an eigenvector of U for the eigenvalue 1, where
        the lacunary frequencies add up in phase, and of H for the eigenvalue
        ``scale``. Off that vector U is Haar and H is positive with norm
        ``PLANTED_COMPLEMENT_SHARE·scale``, so ‖U − V‖ = |1 − e^{i·scale}|.
        """
        layout = self.layout(dim)
        frame = self.unitary(params, dim)
        core = np.eye(dim, dtype=complex)
        generator = np.zeros((dim, dim), dtype=complex)
        generator[0, 0] = scale
        if dim > 1:
            rest = dim - 1
            core[1:, 1:] = unitary_from_gaussian(
                complex_gaussian(layout.block(params, "u_rest"), (rest, rest))
            )
            generator[1:, 1:] = perturbation_from_params(
                layout.block(params, "k_frame"),
                layout.block(params, "k_spectrum"),
                scale * PLANTED_COMPLEMENT_SHARE,
                spectrum=SPECTRUM_POSITIVE,
            )
        U = frame @ core @ adjoint(frame)
        H = symmetrize(frame @ generator @ adjoint(frame))
        return U, expm_hermitian(H) @ U

    def measure(self, U: Any, V: Any) -> Outcome:
        distance = operator_norm(np.asarray(U) - np.asarray(V))
        if distance >= 1:
            raise ScaleTooLarge(f"‖U − V‖ = {distance:.3g} is not below 1")
        if distance == 0:
            raise NumericError("U = V leaves the logarithmic bound undefined")
        lhs = operator_norm(apply_unitary(self.function, U) - apply_unitary(self.function, V))
        return Outcome(lhs=lhs, rhs=self.seminorm * self.log_factor(distance) * distance)


class UnitaryHigherExperiment(Experiment):
    """‖Σ (−1)^{n−k} C(n,k) f(e^{ikA}U)‖ against ‖f‖_{Λ_α}·‖A‖^α."""

    experiment_id = "unitary_higher"
    domain = CIRCLE
    default_function = {"function_id": "lacunary", "alpha": 1.5, "levels": 20}
    default_slope_tol = SLOPE_TOL_HIGHER_ORDER

    @property
    def order(self) -> int:
        return self.config.n if self.config.n is not None else self.function.class_order

    def validate(self) -> None:
        alpha = self.function.class_exponent
        if self.order < 1 or not 0 < alpha < self.order:
            raise ParameterError(
                f"{self.experiment_id} requires 0 < alpha < n, got alpha={alpha}, n={self.order}"
            )
        if self.function.smooth:
            self.flags.append(FLAG_DEGENERATE)
        super().validate()

    def blocks(self, dim):
        return (("u_frame", 2 * dim * dim),) + hermitian_layout(dim, "k")

    def measure(self, U: Any, A: Any) -> Outcome:
        difference = unitary_multiplicative_differences(self.function, U, A, self.order)
        return Outcome(
            lhs=operator_norm(difference),
            rhs=self.seminorm * operator_norm(A) ** self.function.class_exponent,
        )

    def evaluate(self, params, dim, scale, groups=None):
        return [self.measure(self.unitary(params, dim), self.perturbation(params, dim, scale))]


# functions paired with each modulus: (unitary setting, self-adjoint setting)
MODULUS_PAIRS: dict[str, tuple[dict[str, Any], dict[str, Any]]] = {
    "power": ({"function_id": "lacunary", "levels": 20}, {"function_id": "power_alpha"}),
    "capped_linear": ({"function_id": "abs_sin"}, {"function_id": "power_alpha", "alpha": 1.0}),
    "log_lipschitz": (
        {"function_id": "lacunary", "alpha": 1.0, "levels": 20},
        {"function_id": "xloglx"},
    ),
}


class OmegaExperiment(Experiment):
    """‖f(U) − f(V)‖ against ‖f‖_{Λ_ω}·ω*(‖U − V‖) for a modulus of continuity ω.

    ``setting: selfadjoint`` runs the same bound for self-adjoint pairs.
    """

    experiment_id = "omega"
    slope_target = SLOPE_RATIO
    slope_rule = RULE_NO_GROWTH
    default_slope_tol = SLOPE_TOL_HIGHER_ORDER

    def __init__(self, config: ExperimentConfig) -> None:
        if config.setting not in (SETTING_UNITARY, SETTING_SELFADJOINT):
            raise ParameterError(f"Unknown setting {config.setting!r}")
        self.setting = config.setting
        self.modulus: Modulus = build_modulus(config.modulus_id or "power", config.beta)
        super().__init__(config)

    @property
    def domain(self) -> str:  # type: ignore[override]
        return CIRCLE if self.setting == SETTING_UNITARY else LINE

    def function_arguments(self):
        pair = MODULUS_PAIRS.get(self.modulus.name)
        if pair is None or self.config.function_id is not None:
            if self.config.function_id is None:
                raise ParameterError(f"No default function pairs with modulus {self.modulus.name}")
            return super().function_arguments()
        arguments = dict(pair[0] if self.setting == SETTING_UNITARY else pair[1])
        if self.modulus.name == "power":
            arguments["alpha"] = self.modulus.parameters["beta"]
        if self.config.levels is not None and "levels" in arguments:
            arguments["levels"] = self.config.levels
        return arguments

    def validate(self) -> None:
        if self.modulus.tail.divergent:
            raise ParameterError(
                f"Modulus {self.modulus.name} has a divergent tail; omega_star is undefined"
            )
        super().validate()

    @cached_property
    def normalizer(self) -> tuple[float, str]:
        value = modulus_norm_estimate(self.function, self.modulus)
        if value == 0:
            self.flags.append(FLAG_ANNIHILATED)
            return 1.0, "unit (zero modulus norm)"
        return value, "sup |f(x) - f(y)| / omega(|x - y|), chordal on the circle"

    def describe(self):
        notes = super().describe()
        notes.update(
            {
                "modulus": self.modulus.name,
                "modulus_parameters": dict(self.modulus.parameters),
                "setting": self.setting,
            }
        )
        return notes

    def blocks(self, dim):
        if self.setting == SETTING_UNITARY:
            return (("u_frame", 2 * dim * dim),) + hermitian_layout(dim, "k")
        return super().blocks(dim)

    def measure(self, X: Any, Y: Any) -> Outcome:
        distance = operator_norm(np.asarray(X) - np.asarray(Y))
        if distance == 0:
            raise NumericError("Identical operators leave omega_star undefined")
        apply = apply_unitary if self.setting == SETTING_UNITARY else apply_hermitian
        lhs = operator_norm(apply(self.function, X) - apply(self.function, Y))
        return Outcome(lhs=lhs, rhs=self.seminorm * omega_star(self.modulus, distance))

    def evaluate(self, params, dim, scale, groups=None):
        H = self.perturbation(params, dim, scale)
        if self.setting == SETTING_UNITARY:
            U = self.unitary(params, dim)
            return [self.measure(U, expm_hermitian(H) @ U)]
        A = self.base_operator(params, dim)
        return [self.measure(A, A + H)]


class ContractionExperiment(Experiment):
    """Differences of analytic functions of contractions T and R against ‖T − R‖^α."""

    experiment_id = "contraction"
    domain = CIRCLE
    default_function = {"function_id": "lacunary", "alpha": 0.5, "levels": 20}
    default_slope_tol = SLOPE_TOL_HIGHER_ORDER

    @property
    def order(self) -> int:
        return self.config.n if self.config.n is not None else self.function.class_order

    def validate(self) -> None:
        f = self.function
        if not f.analytic or f.coefficients is None:
            raise ParameterError(f"{self.experiment_id} needs an analytic function, {f.name} is not")
        if self.order < 1 or not 0 < f.class_exponent < self.order:
            raise ParameterError(
                f"{self.experiment_id} requires 0 < alpha < n, got alpha={f.class_exponent}, n={self.order}"
            )
        if f.smooth:
            self.flags.append(FLAG_DEGENERATE)
        super().validate()
        self.notes["mode"] = self.config.mode
        if self.config.mode == MODE_LITERAL:
            _LOGGER.info("Literal mode evaluates f outside the unit ball for k > 0")

    @cached_property
    def truncation(self) -> FunctionSpec:
        """Fejér mean of the witness, recorded with its degree and sup error."""
        f = self.function
        degree = self.config.fejer_degree
        if degree is None:
            degree = 2 * max(abs(k) for k in f.coefficients)
        g = fejer_mean(f, degree)
        self.notes["fejer_degree"] = degree
        self.notes["fejer_sup_error"] = fejer_sup_error(f, g)
        return g

    def blocks(self, dim):
        return (("u_frame", 2 * dim * dim),) + hermitian_layout(dim, "k")

    def pair(self, params, dim, scale) -> tuple[np.ndarray, np.ndarray]:
        """Return T unitary and R = (1 − t/2)·e^{iH}·T with ‖H‖ = t/2."""
        T = self.unitary(params, dim)
        H = self.perturbation(params, dim, scale / 2)
        return T, (1 - scale / 2) * (expm_hermitian(H) @ T)

    def measure(self, T: Any, R: Any) -> Outcome:
        difference = contraction_differences(self.truncation, T, R, self.order, self.config.mode)
        distance = operator_norm(np.asarray(T) - np.asarray(R))
        return Outcome(
            lhs=operator_norm(difference),
            rhs=self.seminorm * distance**self.function.class_exponent,
        )

    def evaluate(self, params, dim, scale, groups=None):
        return [self.measure(*self.pair(params, dim, scale))]

    def prepare(self) -> None:
        super().prepare()
        self.truncation


class SelfAdjointHigherExperiment(Experiment):
    """‖Δ_K^n f(A)‖ against ‖f‖_{Λ_α}·‖K‖^α with n − 1 <= α < n."""

    experiment_id = "selfadjoint_higher"
    default_function = {"function_id": "xloglx"}
    default_slope_tol = SLOPE_TOL_HIGHER_ORDER

    @property
    def order(self) -> int:
        return self.function.class_order

    @property
    def reach(self) -> int:  # type: ignore[override]
        return self.order

    def validate(self) -> None:
        f = self.function
        if self.config.n is not None and self.config.n != f.class_order:
            raise ParameterError(
                f"{f.name} has order {f.class_order} but n={self.config.n} was requested"
            )
        _reject_polynomial(f, self.order, self.experiment_id)
        if f.polynomial_degree is not None:
            self.flags.append(FLAG_ANNIHILATED)
        super().validate()

    def expected_slope(self):
        if FLAG_ANNIHILATED in self.flags:
            return None
        return super().expected_slope()

    def measure(self, A: Any, K: Any) -> Outcome:
        difference = delta_n(self.function, A, K, self.order)
        return Outcome(
            lhs=operator_norm(difference),
            rhs=self.seminorm * operator_norm(K) ** self.function.class_exponent,
        )

    def evaluate(self, params, dim, scale, groups=None):
        return [self.measure(self.base_operator(params, dim), self.perturbation(params, dim, scale))]


class SchattenExperiment(Experiment):
    """Schatten-class perturbations: ‖f(A) − f(B)‖_{S_{p/α,∞}} against ‖A − B‖_{S_p}^α."""

    experiment_id = "schatten"
    slope_target = SLOPE_LHS

    @property
    def p(self) -> float:
        return 1.0 if self.config.p is None else float(self.config.p)

    @property
    def target_exponent(self) -> float:
        return self.p / self.function.class_exponent

    @property
    def norm_kind(self) -> NormKind:
        if self.config.weak_hypothesis:
            return NormKind.weak_schatten(self.p)
        return NormKind.schatten(self.p)

    @property
    def strong(self) -> bool:
        """Whether the strong-norm conclusion is claimed."""
        return self.p > 1 and not self.config.weak_hypothesis

    def validate(self) -> None:
        alpha = self.function.class_exponent
        if not (1 <= self.p < math.inf):
            raise ParameterError(f"{self.experiment_id} requires 1 <= p < inf, got p={self.p}")
        if self.config.weak_hypothesis and self.p <= 1:
            raise ParameterError("The weak-class hypothesis needs p > 1")
        if not 0 < alpha < 1:
            raise ParameterError(f"{self.experiment_id} requires 0 < alpha < 1, got {alpha}")
        _reject_polynomial(self.function, 1, self.experiment_id)
        self._validate_ranks()
        super().validate()

    def _validate_ranks(self) -> None:
        smallest = min(self.config.dims)
        for rank in self.config.ranks or DEFAULT_RANKS:
            if isinstance(rank, str) and rank in ("half", "full"):
                continue
            value = int(rank)
            if not 1 <= value <= smallest:
                raise ParameterError(f"Rank {rank} is infeasible in dimension {smallest}")

    @staticmethod
    def resolve_rank(rank: int | str, dim: int) -> int:
        if rank == "full":
            return dim
        if rank == "half":
            return max(1, dim // 2)
        return int(rank)

    def groups(self, dim):
        return [f"rank={rank}" for rank in self.config.ranks or DEFAULT_RANKS]

    def measure(self, A: Any, B: Any) -> Outcome:
        f = self.function
        difference = apply_hermitian(f, A) - apply_hermitian(f, B)
        return self._outcome(difference, np.asarray(A) - np.asarray(B))

    def _outcome(self, difference: np.ndarray, perturbation: np.ndarray) -> Outcome:
        q = self.target_exponent
        weak = weak_schatten_norm(difference, q)
        strong = schatten_norm(difference, q)
        scale = self.seminorm * self.norm_kind.of(perturbation) ** self.function.class_exponent
        checks = {
            "weak_le_strong": float(weak <= strong * (1 + 1e-12)),
            "strong_ratio": strong / scale if scale > 0 else math.nan,
        }
        return Outcome(lhs=weak, rhs=scale, checks=checks)

    def base_and_perturbations(self, params, dim, scale, groups):
        A = self.base_operator(params, dim)
        for rank in self.config.ranks or DEFAULT_RANKS:
            label = f"rank={rank}"
            if groups is not None and label not in groups:
                continue
            K = self.perturbation(
                params, dim, scale, norm_kind=self.norm_kind, rank=self.resolve_rank(rank, dim)
            )
            yield label, A, K

    def evaluate(self, params, dim, scale, groups=None):
        outcomes = []
        for label, A, K in self.base_and_perturbations(params, dim, scale, groups):
            outcome = self.measure(A, A + K)
            outcomes.append(Outcome(outcome.lhs, outcome.rhs, label, outcome.checks))
        return outcomes

    def expected_slope(self):
        return None

    def assess(self, report, batch):
        super().assess(report, batch)
        results = batch.results
        report.verdicts["weak_le_strong"] = (
            all(r.checks["weak_le_strong"] == 1.0 for r in results) if results else None
        )
        if self.strong:
            report.verdicts["growth_strong"] = self._growth_verdict(
                report, results, "growth_factor_strong", ratio=lambda r: r.checks["strong_ratio"]
            )
        per_rank, rank_verdicts = {}, []
        for label in self.groups(min(self.config.dims)):
            members = [r for r in results if r.group == label]
            verdict = self._growth_verdict(report, members, f"growth_factor[{label}]")
            rank_verdicts.append(verdict)
            per_rank[label] = {
                "max_ratio": max((r.ratio for r in members), default=None),
                "max_strong_ratio": max((r.checks["strong_ratio"] for r in members), default=None),
            }
        report.extra["ranks"] = per_rank
        report.extra["target_exponent"] = self.target_exponent
        report.extra["perturbation_norm"] = self.norm_kind.label
        evaluated = [v for v in rank_verdicts if v is not None]
        report.verdicts["rank_growth"] = bool(all(evaluated)) if evaluated else None


class SchattenHigherExperiment(SchattenExperiment):
    """‖Δ_K^n f(A)‖_{S_{p/α,∞}} against ‖K‖_{S_p}^α with n − 1 <= α < n and p >= n."""

    experiment_id = "schatten_higher"
    default_function = {"function_id": "xloglx"}
    default_slope_tol = SLOPE_TOL_HIGHER_ORDER

    @property
    def order(self) -> int:
        return self.function.class_order

    @property
    def reach(self) -> int:  # type: ignore[override]
        return self.order

    @property
    def p(self) -> float:
        return float(self.order) if self.config.p is None else float(self.config.p)

    @property
    def strong(self) -> bool:
        return self.p > self.order and not self.config.weak_hypothesis

    def validate(self) -> None:
        f = self.function
        if self.config.n is not None and self.config.n != f.class_order:
            raise ParameterError(
                f"{f.name} has order {f.class_order} but n={self.config.n} was requested"
            )
        if self.p < self.order:
            raise ParameterError(
                f"{self.experiment_id} requires p >= n, got p={self.p}, n={self.order}"
            )
        if self.config.weak_hypothesis and self.p <= self.order:
            raise ParameterError("The weak-class hypothesis needs p > n")
        _reject_polynomial(f, self.order, self.experiment_id)
        self._validate_ranks()
        Experiment.validate(self)

    def measure_difference(self, A: Any, K: Any) -> Outcome:
        return self._outcome(delta_n(self.function, A, K, self.order), np.asarray(K))

    def evaluate(self, params, dim, scale, groups=None):
        outcomes = []
        for label, A, K in self.base_and_perturbations(params, dim, scale, groups):
            outcome = self.measure_difference(A, K)
            outcomes.append(Outcome(outcome.lhs, outcome.rhs, label, outcome.checks))
        return outcomes


EXPERIMENT_CLASSES: dict[str, type[Experiment]] = {
    cls.experiment_id: cls
    for cls in (
        SelfAdjointHolderExperiment,
        ZygmundExperiment,
        BernsteinExperiment,
        UnitaryHolderExperiment,
        UnitaryLipschitzLogExperiment,
        UnitaryHigherExperiment,
        OmegaExperiment,
        ContractionExperiment,
        SelfAdjointHigherExperiment,
        SchattenExperiment,
        SchattenHigherExperiment,
        FarforovskayaCompareExperiment,
    )
}
