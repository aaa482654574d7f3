"""Test the functional calculus and the difference operators."""

import cmath
import math

import numpy as np
import pytest

from holderlab.calculus import (
    apply_hermitian,
    apply_polynomial,
    apply_unitary,
    contraction_differences,
    delta_n,
    divided_difference,
    doi_first_difference,
    expm_hermitian,
    unitary_multiplicative_differences,
)
from holderlab.const import MODE_LITERAL
from holderlab.ensembles import make_rng, random_hermitian, random_unitary
from holderlab.exceptions import DomainError, ParameterError
from holderlab.functions import (
    cube,
    identity,
    lacunary,
    polynomial,
    power_alpha,
    sin_sigma,
    square,
    trig_poly,
    xloglx,
)
from holderlab.linalg import hermitian_from_spectrum, operator_norm


def test_apply_hermitian_square(hermitian_pair):
    """Test that the calculus of x^2 is the matrix square."""
    A, _ = hermitian_pair
    assert np.allclose(apply_hermitian(square(), A), A @ A, atol=1e-12)


def test_apply_hermitian_requires_line_function(hermitian_pair):
    """Test that circle functions are refused for Hermitian input."""
    with pytest.raises(ParameterError):
        apply_hermitian(lacunary(0.5, 2), hermitian_pair[0])


def test_apply_unitary_identity_function(unitary):
    """Test that e^{iθ} applied to U gives U back."""
    assert np.allclose(apply_unitary(trig_poly({1: 1}), unitary), unitary, atol=1e-12)


def test_apply_unitary_lacunary_matches_polynomial(unitary):
    """Test the spectral and polynomial routes to an analytic function of U."""
    f = lacunary(0.5, 3)
    assert np.allclose(apply_unitary(f, unitary), apply_polynomial(f, unitary), atol=1e-12)


def test_apply_polynomial_dense_and_sparse():
    """Test Horner's scheme and the sparse power chain."""
    M = np.array([[1.0, 2.0], [0.0, 3.0]])
    assert np.allclose(apply_polynomial([1, 2, 3], M), np.eye(2) + 2 * M + 3 * M @ M)
    D = np.diag([0.5, -1.0])
    assert np.allclose(apply_polynomial({0: 1, 64: 1}, D), np.diag([1 + 0.5**64, 2.0]))
    assert np.array_equal(apply_polynomial({3: 0}, D), np.zeros((2, 2)))
    with pytest.raises(ParameterError):
        apply_polynomial({-1: 1}, D)


def test_divided_difference():
    """Test ordinary and confluent divided differences."""
    assert divided_difference(square(), 1.0, 3.0).value == pytest.approx(4.0)
    confluent = divided_difference(square(), 2.0, 2.0)
    assert confluent.value == pytest.approx(4.0)
    assert not confluent.confluent
    missing = divided_difference(xloglx(), 0.5, 0.5)
    assert missing.value == 0
    assert missing.confluent


def test_doi_first_difference_matches_direct(hermitian_pair):
    """Test the Schur multiplier form of f(A) − f(B)."""
    A, B = hermitian_pair
    f = sin_sigma(1.0)
    direct = apply_hermitian(f, A) - apply_hermitian(f, B)
    assert np.allclose(doi_first_difference(f, A, B), direct, atol=1e-10)


def test_delta_n_of_polynomials(hermitian_pair):
    """Test n-th differences of x^n, which equal n!·K^n."""
    A, K = hermitian_pair
    assert np.allclose(delta_n(square(), A, K, 2), 2 * K @ K, atol=1e-10)
    assert np.allclose(delta_n(cube(), A, K, 3), 6 * K @ K @ K, atol=1e-10)


def test_delta_n_reports_failing_index():
    """Test that leaving the working interval names the offending A + jK."""
    with pytest.raises(DomainError) as err:
        delta_n(power_alpha(0.5), [[3.0]], [[1.0]], 2)
    assert err.value.index == 2
    with pytest.raises(ParameterError):
        delta_n(square(), [[1.0]], [[1.0]], 0)


def test_expm_hermitian():
    """Test exp(iA) on a diagonal matrix."""
    assert np.allclose(expm_hermitian(np.diag([0.0, math.pi / 2])), np.diag([1.0, 1j]))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_unitary_multiplicative_differences_scalar(n):
    """Test the scalar identity Σ(−1)^{n−k}C(n,k)e^{ika} = (e^{ia} − 1)^n."""
    a = 0.3
    result = unitary_multiplicative_differences(trig_poly({1: 1}), [[1.0]], [[a]], n)
    assert result[0, 0] == pytest.approx((cmath.exp(1j * a) - 1) ** n)


@pytest.mark.parametrize("mode", ["interpolating", MODE_LITERAL])
def test_contraction_second_difference_of_square(mode):
    """Test that the second difference of z^2 with step (T − R)/2 is 2·((T − R)/2)^2."""
    result = contraction_differences([0, 0, 1], [[1.0]], [[0.5]], 2, mode)
    assert result[0, 0] == pytest.approx(0.125)


def test_contraction_differences_checks():
    """Test the analytic and mode preconditions."""
    with pytest.raises(ParameterError):
        contraction_differences(trig_poly({-1: 1}), [[0.5]], [[0.25]], 1)
    with pytest.raises(ParameterError):
        contraction_differences([0, 1], [[0.5]], [[0.25]], 1, mode="sideways")


DOI_FUNCTIONS = (square(), cube(), power_alpha(0.5), sin_sigma(3.0))
DOI_DIMS = (2, 4, 8, 16, 32, 64)


@pytest.mark.slow
def test_doi_identity_over_random_pairs():
    """Test the Schur multiplier form against direct differencing on 200 random pairs."""
    for draw in range(200):
        dim = DOI_DIMS[draw % len(DOI_DIMS)]
        f = DOI_FUNCTIONS[(draw // len(DOI_DIMS)) % len(DOI_FUNCTIONS)]
        scale = 0.5 / math.sqrt(dim)
        A = random_hermitian(dim, scale, seed=(21, draw, 0))
        B = random_hermitian(dim, scale, seed=(21, draw, 1))
        direct = apply_hermitian(f, A) - apply_hermitian(f, B)
        residual = np.linalg.norm(doi_first_difference(f, A, B) - direct)
        bound = 1e-9 * (1 + np.linalg.norm(A) + np.linalg.norm(B))
        assert residual <= bound, (f.name, dim, draw)


def difference_scale(A, K, n):
    return 2**n * (1 + operator_norm(A) + n * operator_norm(K)) ** n


@pytest.mark.slow
@pytest.mark.parametrize("dim", [2, 8, 32])
@pytest.mark.parametrize(
    ("n", "below", "monomial"),
    [
        (1, polynomial((1.0,)), identity()),
        (2, identity(), square()),
        (3, square(), cube()),
    ],
)
def test_nth_difference_annihilates_polynomials(dim, n, below, monomial):
    """Test that n-th differences kill degree below n and send x^n to n!·K^n."""
    A = random_hermitian(dim, 1 / math.sqrt(dim), seed=(22, dim, n, 0))
    K = random_hermitian(dim, 1 / math.sqrt(dim), seed=(22, dim, n, 1))
    scale = difference_scale(A, K, n)
    assert operator_norm(delta_n(below, A, K, n)) <= 1e-10 * scale
    expected = math.factorial(n) * np.linalg.matrix_power(K, n)
    assert operator_norm(delta_n(monomial, A, K, n) - expected) <= 1e-10 * scale


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("f", [sin_sigma(3.0), cube()], ids=["sin", "cube"])
def test_nth_difference_telescopes(n, f):
    """Test the binomial recurrence between differences of consecutive orders."""
    A = random_hermitian(6, 0.3, seed=(23, n, 0))
    K = random_hermitian(6, 0.3, seed=(23, n, 1))
    recurrence = delta_n(f, A + K, K, n - 1) - delta_n(f, A, K, n - 1)
    largest = max(operator_norm(apply_hermitian(f, A + j * K)) for j in range(n + 1))
    assert operator_norm(delta_n(f, A, K, n) - recurrence) <= 1e-12 * 2**n * (1 + largest)


@pytest.mark.slow
@pytest.mark.parametrize("f", [power_alpha(0.5), sin_sigma(3.0), xloglx()], ids=["sqrt", "sin", "xlogx"])
def test_commuting_pairs_reduce_to_scalars(f):
    """Test that a shared eigenbasis turns the operator difference into scalar ones."""
    rng = make_rng((24, 1))
    frame = random_unitary(8, seed=(24, 0))
    a = rng.uniform(-2.0, 2.0, 8)
    b = rng.uniform(-2.0, 2.0, 8)
    A = hermitian_from_spectrum(frame, a)
    B = hermitian_from_spectrum(frame, b)
    scalar = float(np.max(np.abs(f(a) - f(b))))
    assert operator_norm(apply_hermitian(f, A) - apply_hermitian(f, B)) == pytest.approx(scalar, abs=1e-10)


@pytest.mark.slow
@pytest.mark.parametrize("f", [power_alpha(0.5), sin_sigma(3.0), cube()], ids=["sqrt", "sin", "cube"])
def test_calculus_commutes_with_unitary_conjugation(f):
    """Test f(W·A·W†) = W·f(A)·W† for a Haar unitary W."""
    A = random_hermitian(8, 0.4, seed=(25, 0))
    W = random_unitary(8, seed=(25, 1))
    conjugated = W @ A @ W.conj().T
    residual = apply_hermitian(f, conjugated) - W @ apply_hermitian(f, A) @ W.conj().T
    assert operator_norm(residual) <= 1e-10
