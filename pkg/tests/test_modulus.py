"""Test moduli of continuity and the omega-star transform."""

import math

import numpy as np
import pytest

from holderlab.exceptions import ParameterError
from holderlab.functions import power_alpha
from holderlab.modulus import (
    MODULI,
    Tail,
    build_modulus,
    capped_linear,
    log_lipschitz,
    modulus_norm_estimate,
    omega_star,
    power,
    square,
    validate_modulus,
    zero,
)

GRID = np.linspace(0.0, 2.0, 41)


def validate(omega):
    return validate_modulus(omega, GRID)


def test_omega_star_of_power():
    """Test x^beta/(1 - beta) on both sides of the tail start."""
    assert omega_star(power(0.5), 0.25) == pytest.approx(1.0, rel=1e-9)
    assert omega_star(power(0.5), 1.0) == pytest.approx(2.0, rel=1e-12)
    assert omega_star(power(0.5), 4.0) == pytest.approx(4.0, rel=1e-12)


def test_omega_star_of_capped_linear():
    """Test the closed form x(ln(1/x) + 1) below the cap."""
    assert omega_star(capped_linear(), 0.5) == pytest.approx(0.5 * (math.log(2) + 1), rel=1e-9)
    assert omega_star(capped_linear(), 1.0) == pytest.approx(1.0)


def test_omega_star_rejects_divergent_tails():
    """Test that omega-star is refused when its integral diverges."""
    with pytest.raises(ParameterError):
        omega_star(power(1.0), 0.5)
    with pytest.raises(ParameterError):
        omega_star(power(0.5), 0.0)


@pytest.mark.parametrize("factory", [lambda: power(0.5), capped_linear, log_lipschitz, zero])
def test_valid_moduli_are_accepted(factory):
    """Test that genuine moduli pass validation."""
    assert validate(factory()).accepted


def test_square_is_not_subadditive():
    """Test that t^2 is reported with subadditivity violations."""
    report = validate(square())
    assert not report.accepted
    assert {violation.kind for violation in report.violations} == {"subadditivity"}


def test_tail_checks():
    """Test the tail declarations."""
    with pytest.raises(ParameterError):
        Tail("bounded", start=1.0)
    with pytest.raises(ParameterError):
        Tail("geometric", start=1.0)
    assert Tail("power", start=1.0, constant=1.0, exponent=1.5).divergent


def test_modulus_norm_of_power_alpha():
    """Test that |x|^(1/2) has norm 1 with respect to t^(1/2)."""
    assert modulus_norm_estimate(power_alpha(0.5), power(0.5)) == pytest.approx(1.0, rel=1e-9)


def test_build_modulus():
    """Test lookup by id with the optional exponent."""
    assert build_modulus("power", 0.25).parameters == {"beta": 0.25}
    assert build_modulus("capped_linear").name == "capped_linear"
    assert set(MODULI) == {"power", "capped_linear", "log_lipschitz", "square", "zero"}
    with pytest.raises(ParameterError):
        build_modulus("cubic")


DYADIC = [2.0**-k for k in range(1, 17)]


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_omega_star_of_power_on_dyadic_points(beta):
    """Test ω* of t^beta against x^beta/(1 − beta) from 2^-1 down to 2^-16."""
    for x in DYADIC:
        assert abs(omega_star(power(beta), x) - x**beta / (1 - beta)) <= 1e-6, x


@pytest.mark.slow
def test_omega_star_of_capped_linear_on_unit_interval():
    """Test x(ln(1/x) + 1) at dyadic and generic points of (0, 1]."""
    for x in [*DYADIC, 0.3, 0.77, 1.0]:
        assert abs(omega_star(capped_linear(), x) - x * (math.log(1 / x) + 1)) <= 1e-6, x


@pytest.mark.parametrize(
    "factory",
    [lambda: power(0.3), lambda: power(0.8), capped_linear],
    ids=["power_0.3", "power_0.8", "capped_linear"],
)
def test_omega_star_dominates_and_increases(factory):
    """Test that ω* is nondecreasing and never below ω."""
    omega = factory()
    points = np.geomspace(2.0**-16, 8.0, 40)
    values = np.array([omega_star(omega, x) for x in points])
    assert np.all(values >= omega(points) * (1 - 1e-9))
    assert np.all(np.diff(values) >= -1e-12 * values[1:])
