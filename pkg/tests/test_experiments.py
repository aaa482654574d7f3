"""Test the inequality experiments."""

import math

import numpy as np
import pytest

from holderlab.const import EXPERIMENT_IDS
from holderlab.exceptions import NumericError, ParameterError, ScaleTooLarge
from holderlab.experiments import (
    COARSE_SCALES,
    EXPERIMENT_CLASSES,
    FLAG_COARSE,
    FarforovskayaCompareExperiment,
    UnitaryLipschitzLogExperiment,
)
from holderlab.functions import sin_sigma
from holderlab.modulus import omega_star
from holderlab.models import ExperimentReport, Tolerances
from holderlab.registry import build_experiment, canonical_id, experiment_descriptions, run_experiment
from holderlab.utils import dumps, jsonable


def test_every_experiment_is_registered():
    """Test that the registry, the descriptions and the id list agree."""
    assert set(EXPERIMENT_CLASSES) == set(EXPERIMENT_IDS)
    descriptions = experiment_descriptions()
    assert set(descriptions) == set(EXPERIMENT_IDS)
    assert all(descriptor["description"] for descriptor in descriptions.values())


def test_canonical_id():
    """Test that the experiment_ prefix is optional."""
    assert canonical_id("experiment_zygmund") == "zygmund"
    assert canonical_id("zygmund") == "zygmund"
    with pytest.raises(ParameterError):
        canonical_id("experiment_fourier")


def test_holder_scalar_witness(small_config):
    """Test |0 − 1/4|^(1/2) against the seminorm 1 of |x|^(1/2)."""
    experiment = build_experiment(small_config("selfadjoint_holder"))
    outcome = experiment.measure([[0.0]], [[0.25]])
    assert outcome.lhs == pytest.approx(0.5)
    assert outcome.rhs == pytest.approx(0.5)
    assert outcome.checks["doi_residual"] < 1e-12


def test_zygmund_scalar_witness(small_config):
    """Test the second difference of x·log|x| at the singular point."""
    experiment = build_experiment(small_config("zygmund"))
    t = 0.25
    centred_at_t = experiment.measure([[t]], [[t]])
    assert centred_at_t.lhs == pytest.approx(2 * t * math.log(2))
    centred_at_zero = experiment.measure([[0.0]], [[t]])
    assert centred_at_zero.lhs == pytest.approx(0.0, abs=1e-15)


def test_bernstein_commuting_witness(small_config):
    """Test sin on 0 and pi/2, where the ratio is 2/pi."""
    experiment = build_experiment(small_config("bernstein"))
    outcome = experiment.measure_line(sin_sigma(1.0), 1.0, 1.0, [[0.0]], [[math.pi / 2]])
    assert outcome.ratio == pytest.approx(2 / math.pi)
    assert experiment.groups(2) == ["sigma=1", "sigma=2", "sigma=4", "sigma=8"]


def test_bernstein_circle_variant(small_config):
    """Test that degrees select trigonometric polynomials on unitary pairs."""
    experiment = build_experiment(small_config("bernstein", degrees=(1, 2, 4)))
    assert experiment.circle
    assert experiment.groups(2) == ["degree=1", "degree=2", "degree=4"]


def test_unitary_lipschitz_log_factor(small_config):
    """Test the logarithmic factor and the regime checks of the measurement."""
    assert UnitaryLipschitzLogExperiment.log_factor(0.5) == 3.0
    experiment = build_experiment(small_config("unitary_lipschitz_log"))
    with pytest.raises(ScaleTooLarge):
        experiment.measure([[1.0]], [[-1.0]])
    with pytest.raises(NumericError):
        experiment.measure([[1.0]], [[1.0]])


def test_unitary_lipschitz_log_planted_pair(small_config):
    """Test that the planted vector sets the distance and carries the scalar difference."""
    experiment = build_experiment(small_config("unitary_lipschitz_log", perturbation_scales=None))
    t = 2.0**-6
    params = experiment.draw(np.random.default_rng(3), 4)
    U, V = experiment.pair(params, 4, t)
    assert np.linalg.norm(U @ U.conj().T - np.eye(4)) < 1e-12
    assert np.linalg.norm(U - V, 2) == pytest.approx(abs(1 - np.exp(1j * t)), rel=1e-10)
    scalar = abs(experiment.function([0.0])[0] - experiment.function([t])[0])
    assert experiment.measure(U, V).lhs >= scalar * (1 - 1e-9)


def test_unitary_lipschitz_log_ratio_is_flat(small_config):
    """Test that the logarithmic factor exactly compensates the lacunary witness."""
    report = run_experiment(
        small_config("unitary_lipschitz_log", dims=(2, 4), perturbation_scales=None)
    )
    assert len(report.per_scale) == 14
    assert abs(report.slope) <= 0.05
    assert report.verdicts["slope"] is True


def test_farforovskaya_factor():
    """Test the interval factor for width 2048 at distance 1."""
    factor = FarforovskayaCompareExperiment.log_factor(2048.0, 1.0)
    assert factor == pytest.approx((math.log(2049) + 1) ** 2)
    assert factor == pytest.approx(74.39, abs=0.01)


def test_schatten_scalar_witness(small_config):
    """Test that a scalar witness has ratio 1 in every Schatten norm."""
    experiment = build_experiment(small_config("schatten", ranks=(1,)))
    outcome = experiment.measure([[0.0]], [[0.25]])
    assert outcome.ratio == pytest.approx(1.0)
    assert outcome.checks["weak_le_strong"] == 1.0
    assert experiment.target_exponent == 2.0


@pytest.mark.parametrize(
    ("experiment_id", "overrides"),
    [
        ("selfadjoint_holder", {"alpha": 1.0}),
        ("selfadjoint_holder", {"function_id": "lacunary"}),
        ("selfadjoint_holder", {"function_id": "identity"}),
        ("selfadjoint_holder", {"spectral_gap": 1.0}),
        ("selfadjoint_holder", {"spectrum_radius": 4.0}),
        ("selfadjoint_holder", {"perturbation_scales": (0.01, 0.1, 0.001)}),
        ("selfadjoint_holder", {"perturbation_scales": (2.0**-10, 2.0**-15)}),
        ("zygmund", {"function_id": "power_alpha"}),
        ("bernstein", {"function_id": "power_alpha"}),
        ("unitary_holder", {"alpha": 1.5}),
        ("unitary_lipschitz_log", {"alpha": 0.5}),
        ("omega", {"beta": 1.0}),
        ("omega", {"setting": "sideways"}),
        ("contraction", {"function_id": "trig_poly", "coefficients": ((-1, 1 + 0j),)}),
        ("contraction", {"function_id": "abs_sin"}),
        ("selfadjoint_higher", {"n": 3}),
        ("schatten", {"p": 0.5}),
        ("schatten", {"ranks": (5,)}),
        ("schatten", {"weak_hypothesis": True}),
        ("schatten_higher", {"p": 1.0}),
        ("farforovskaya_compare", {"interval": (0.0, 0.5)}),
    ],
)
def test_preconditions(small_config, experiment_id, overrides):
    """Test that configurations outside the hypotheses are refused."""
    with pytest.raises(ParameterError):
        build_experiment(small_config(experiment_id, **overrides))


def test_circle_scales_follow_witness_resolution(small_config):
    """Test that circle scales stop where the lacunary witness is resolved."""
    experiment = build_experiment(small_config("unitary_holder", perturbation_scales=None))
    assert experiment.scales == tuple(2.0**-k for k in range(1, 12))
    lipschitz = build_experiment(small_config("unitary_lipschitz_log", perturbation_scales=None))
    assert len(lipschitz.scales) == 14


def test_coarse_witness_falls_back(small_config):
    """Test the fallback for witnesses with few levels."""
    experiment = build_experiment(small_config("unitary_holder", levels=8, perturbation_scales=None))
    assert experiment.scales == COARSE_SCALES
    assert FLAG_COARSE in experiment.flags


def test_line_scales_default(small_config):
    """Test the default dyadic scales on the line."""
    experiment = build_experiment(small_config("selfadjoint_holder", perturbation_scales=None))
    assert experiment.scales[0] == 2.0**-4
    assert experiment.scales[-1] == 2.0**-14


def test_planted_spectrum(small_config):
    """Test that base operators carry the singular point and keep the gap."""
    experiment = build_experiment(small_config("selfadjoint_holder", spectral_gap=0.25))
    params = experiment.draw(np.random.default_rng(0), 4)
    eigenvalues = np.linalg.eigvalsh(experiment.base_operator(params, 4))
    distances = np.sort(np.abs(eigenvalues))
    assert distances[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(distances[1:] >= 0.25 - 1e-12)


@pytest.mark.parametrize("experiment_id", sorted(EXPERIMENT_IDS))
def test_small_run(small_config, experiment_id):
    """Test that every experiment runs end to end and reports serializable results."""
    report = run_experiment(small_config(experiment_id))
    assert report.experiment_id == experiment_id
    assert report.trials >= 12
    assert report.verdicts
    assert report.constant_estimate.value >= 0
    document = jsonable(report.as_dict())
    assert document["passed"] == report.passed
    dumps(document)


def test_farforovskaya_is_informational(small_config):
    """Test that the comparison never fails and records the factors per scale."""
    report = run_experiment(small_config("farforovskaya_compare"))
    assert report.verdicts == {"informational": True}
    assert report.passed
    width = report.extra["interval"][1] - report.extra["interval"][0]
    for key, factor in report.extra["bound_ratio"].items():
        assert factor == pytest.approx(FarforovskayaCompareExperiment.log_factor(width, float(key)))


def test_growth_verdict_fails_the_report(small_config):
    """Test that a growth factor above tolerance fails the report."""
    config = small_config("unitary_holder", dims=(2, 8), tolerances=Tolerances(growth_tol=1e-9))
    report = run_experiment(config)
    assert report.verdicts["growth"] is False
    assert report.extra["growth_factor"] > 1e-9
    assert report.passed is False


def test_numpy_verdicts_count_as_failures():
    """Test that numpy booleans are honoured by the pass decision."""
    report = ExperimentReport(experiment_id="zygmund", config={})
    report.verdicts = {"bounded": np.True_, "growth": np.False_, "slope": None}
    assert report.passed is False
    report.verdicts["growth"] = np.True_
    assert report.passed is True


def test_bernstein_sigma_scaling(small_config):
    """Test that maximal difference quotients grow linearly in sigma."""
    report = run_experiment(small_config("bernstein", trials_per_dim=3))
    assert report.slope == pytest.approx(1.0, abs=0.1)
    assert report.verdicts["sigma_scaling"] is True


def test_run_is_reproducible_across_jobs(small_config):
    """Test that the serialized report does not depend on the number of workers."""
    config = small_config("zygmund")
    serial = dumps(jsonable(run_experiment(config, jobs=1).as_dict()))
    parallel = dumps(jsonable(run_experiment(config, jobs=2).as_dict()))
    assert serial == parallel


def scalar(f, x):
    return complex(f([x])[0])


def scalar_difference(f, start, step, n):
    """Return Σ_j (−1)^{n−j} C(n,j) f(start + j·step) for real points."""
    return sum((-1) ** (n - j) * math.comb(n, j) * scalar(f, start + j * step) for j in range(n + 1))


@pytest.mark.parametrize("experiment_id", ["selfadjoint_holder", "farforovskaya_compare", "schatten"])
def test_first_difference_matches_scalar_oracle(small_config, experiment_id):
    """Test 1x1 first differences against |f(a) − f(b)| / (‖f‖·|a − b|^α)."""
    experiment = build_experiment(small_config(experiment_id))
    a, b = 0.375, 0.375 - 2.0**-5
    f = experiment.function
    expected = abs(scalar(f, a) - scalar(f, b)) / (experiment.seminorm * abs(a - b) ** f.class_exponent)
    assert experiment.measure([[a]], [[b]]).ratio == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(
    ("experiment_id", "method", "centred"),
    [
        ("zygmund", "measure", True),
        ("selfadjoint_higher", "measure", False),
        ("schatten_higher", "measure_difference", False),
    ],
)
def test_higher_difference_matches_scalar_oracle(small_config, experiment_id, method, centred):
    """Test 1x1 n-th differences against the scalar sum of shifted values."""
    experiment = build_experiment(small_config(experiment_id))
    a, k = 0.5, 0.25
    f = experiment.function
    start = a - k if centred else a
    lhs = abs(scalar_difference(f, start, k, f.class_order))
    expected = lhs / (experiment.seminorm * k**f.class_exponent)
    assert getattr(experiment, method)([[a]], [[k]]).ratio == pytest.approx(expected, rel=1e-12)


def test_bernstein_matches_scalar_oracle(small_config):
    """Test every σ on the line and every degree on the circle at dimension 1."""
    line = build_experiment(small_config("bernstein"))
    a, b = 0.02, -0.01
    for sigma, f, sup in line.members.values():
        expected = abs(scalar(f, a) - scalar(f, b)) / (sigma * sup * abs(a - b))
        assert line.measure_line(f, sigma, sup, [[a]], [[b]]).ratio == pytest.approx(expected, rel=1e-12)

    circle = build_experiment(small_config("bernstein", degrees=(1, 2, 4)))
    u, v = np.exp(0.4j), np.exp(0.43j)
    for degree, f, sup in circle.members.values():
        lhs = abs(scalar(f, np.angle(u)) - scalar(f, np.angle(v)))
        expected = lhs / (degree * sup * abs(u - v))
        assert circle.measure_circle(f, degree, sup, [[u]], [[v]]).ratio == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(
    ("experiment_id", "overrides"),
    [
        ("unitary_holder", {"levels": 8}),
        ("unitary_lipschitz_log", {"levels": 8}),
        ("omega", {"levels": 8}),
    ],
)
def test_unitary_pair_matches_scalar_oracle(small_config, experiment_id, overrides):
    """Test 1x1 unitaries e^{iθ}, e^{iφ} against the scalar difference and bound."""
    experiment = build_experiment(small_config(experiment_id, **overrides))
    u, v = np.exp(0.4j), np.exp(1j * (0.4 + 2.0**-5))
    f = experiment.function
    distance = abs(u - v)
    if experiment_id == "unitary_holder":
        bound = distance**f.class_exponent
    elif experiment_id == "unitary_lipschitz_log":
        bound = (2 + math.log2(1 / distance)) * distance
    else:
        bound = omega_star(experiment.modulus, distance)
    lhs = abs(scalar(f, np.angle(u)) - scalar(f, np.angle(v)))
    expected = lhs / (experiment.seminorm * bound)
    assert experiment.measure([[u]], [[v]]).ratio == pytest.approx(expected, rel=1e-12)


def test_selfadjoint_omega_matches_scalar_oracle(small_config):
    """Test the self-adjoint setting of the modulus bound at dimension 1."""
    experiment = build_experiment(small_config("omega", setting="selfadjoint"))
    a, b = 0.375, 0.375 + 2.0**-5
    f = experiment.function
    expected = abs(scalar(f, a) - scalar(f, b)) / (experiment.seminorm * omega_star(experiment.modulus, b - a))
    assert experiment.measure([[a]], [[b]]).ratio == pytest.approx(expected, rel=1e-12)


def test_unitary_higher_matches_scalar_oracle(small_config):
    """Test multiplicative differences Σ (−1)^{n−k} C(n,k) f(e^{ika}u) at dimension 1."""
    experiment = build_experiment(small_config("unitary_higher", levels=8))
    u, a = np.exp(0.4j), 2.0**-4
    f, n = experiment.function, experiment.order
    lhs = abs(
        sum((-1) ** (n - k) * math.comb(n, k) * scalar(f, np.angle(np.exp(1j * k * a) * u)) for k in range(n + 1))
    )
    expected = lhs / (experiment.seminorm * a**f.class_exponent)
    assert experiment.measure([[u]], [[a]]).ratio == pytest.approx(expected, rel=1e-12)


def test_contraction_matches_scalar_oracle(small_config):
    """Test differences of the truncated witness on a unitary and a contraction of dimension 1."""
    experiment = build_experiment(small_config("contraction", levels=4))
    t = 2.0**-4
    T, R = np.exp(0.4j), (1 - t / 2) * np.exp(1j * (0.4 + t / 2))
    g, n = experiment.truncation, experiment.order

    def polynomial_value(z):
        return sum(c * z**m for m, c in g.coefficients.items())

    lhs = abs(
        sum((-1) ** (n - k) * math.comb(n, k) * polynomial_value(R + (k / n) * (T - R)) for k in range(n + 1))
    )
    expected = lhs / (experiment.seminorm * abs(T - R) ** experiment.function.class_exponent)
    assert experiment.measure([[T]], [[R]]).ratio == pytest.approx(expected, rel=1e-12)
