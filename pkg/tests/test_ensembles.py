"""Test the random ensembles."""

import numpy as np
import pytest
from scipy import stats

from holderlab.const import POSITIVE_SPECTRUM_FLOOR, SPECTRUM_POSITIVE
from holderlab.ensembles import (
    ParameterLayout,
    hermitian_from_params,
    hermitian_layout,
    make_rng,
    perturbation_spectrum,
    random_contraction,
    random_hermitian,
    random_perturbation,
    random_unitary,
    spectrum_from_params,
)
from holderlab.exceptions import ParameterError
from holderlab.linalg import NormKind, eig_hermitian, eig_unitary, operator_norm, singular_values, unitary_deviation


def test_same_seed_same_matrix():
    """Test that generators are deterministic functions of the seed."""
    assert np.array_equal(random_hermitian(5, 1.0, seed=3), random_hermitian(5, 1.0, seed=3))
    assert np.array_equal(random_unitary(4, seed=(1, 2, 3)), random_unitary(4, seed=(1, 2, 3)))
    assert not np.array_equal(random_unitary(4, seed=(1, 2, 3)), random_unitary(4, seed=(1, 2, 4)))


def test_tuple_seeds_are_independent_of_draw_order():
    """Test that a keyed stream does not depend on other streams being consumed first."""
    first = make_rng((9, 8, 0, 1)).standard_normal(4)
    make_rng((9, 8, 0, 0)).standard_normal(100)
    again = make_rng((9, 8, 0, 1)).standard_normal(4)
    assert np.array_equal(first, again)


def test_random_hermitian_is_exactly_hermitian():
    """Test that the ensemble produces exactly self-adjoint matrices."""
    H = random_hermitian(7, 0.5, seed=21)
    assert np.array_equal(H, H.conj().T)


def test_random_unitary_is_unitary():
    """Test the Haar ensemble."""
    U = random_unitary(9, seed=4)
    assert unitary_deviation(U) < 1e-12


@pytest.mark.parametrize("dim", [0, -1, 2.5])
def test_bad_dimensions(dim):
    """Test that only positive integer dimensions are accepted."""
    with pytest.raises(ParameterError):
        random_unitary(dim, seed=1)


def test_random_hermitian_rejects_zero_scale():
    """Test the scale precondition."""
    with pytest.raises(ParameterError):
        random_hermitian(3, 0.0, seed=1)


@pytest.mark.parametrize(
    "norm_kind", [NormKind.operator(), NormKind.schatten(1), NormKind.schatten(2), NormKind.weak_schatten(1)]
)
def test_perturbation_has_prescribed_norm(norm_kind):
    """Test that perturbations are normalized in the requested norm."""
    K = random_perturbation(6, 0.01, rank=3, norm_kind=norm_kind, seed=(5, 6))
    assert norm_kind.of(K) == pytest.approx(0.01, rel=1e-9)
    assert np.array_equal(K, K.conj().T)


@pytest.mark.parametrize("rank", [1, 3, 6])
def test_perturbation_has_prescribed_rank(rank):
    """Test the rank of finite-rank perturbations."""
    K = random_perturbation(6, 1.0, rank=rank, seed=12)
    assert singular_values(K).rank(1e-9) == rank


@pytest.mark.parametrize("rank", [0, 7])
def test_infeasible_rank(rank):
    """Test that ranks outside 1..dim are rejected."""
    with pytest.raises(ParameterError):
        random_perturbation(6, 1.0, rank=rank, seed=12)


def test_positive_perturbation_spectrum():
    """Test that positive perturbations have eigenvalues in [0.1, 1)."""
    values = perturbation_spectrum(np.array([-2.0, 0.0, 1.0, 3.0]), 3, SPECTRUM_POSITIVE)
    assert np.all(values[:3] >= POSITIVE_SPECTRUM_FLOOR)
    assert np.all(values[:3] < 1.0)
    assert values[3] == 0.0
    assert values[1] == pytest.approx(POSITIVE_SPECTRUM_FLOOR)


def test_unknown_perturbation_spectrum():
    """Test that only signed and positive spectra exist."""
    with pytest.raises(ParameterError):
        perturbation_spectrum(np.zeros(2), 1, "imaginary")


def test_random_contraction_norm():
    """Test that contractions have the requested operator norm."""
    T = random_contraction(5, 0.75, seed=2)
    assert operator_norm(T) == pytest.approx(0.75)
    with pytest.raises(ParameterError):
        random_contraction(5, 1.5, seed=2)


def test_spectrum_from_params_plants_point():
    """Test that the planted eigenvalue is exact and the rest keep the gap."""
    values = spectrum_from_params(np.array([0.3, -4.0, 0.0, 2.0]), radius=1.0, gap=0.25, planted=0.5)
    assert values[0] == 0.5
    assert np.all(np.abs(values[1:] - 0.5) >= 0.25)
    assert np.all(np.abs(values - 0.5) <= 1.0)


def test_hermitian_from_params_uses_layout():
    """Test that a layout block becomes a Hermitian witness with the planted spectrum."""
    layout = ParameterLayout()
    for name, count in hermitian_layout(4, "A"):
        layout.add(name, count)
    assert layout.size == 2 * 16 + 4
    params = layout.draw(make_rng(17))
    A = hermitian_from_params(layout, params, "A", radius=0.5, planted=0.0)
    eigenvalues = eig_hermitian(A).eigenvalues
    assert np.min(np.abs(eigenvalues)) == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.abs(eigenvalues) <= 0.5 + 1e-12)


@pytest.mark.slow
def test_hermitian_eigenvalue_sum_is_centred():
    """Test that the trace of the Gaussian ensemble averages to zero over many draws."""
    sums = np.array(
        [eig_hermitian(random_hermitian(4, 1.0, seed=(31, draw))).eigenvalues.sum() for draw in range(10_000)]
    )
    standard_error = sums.std(ddof=1) / np.sqrt(sums.size)
    assert abs(sums.mean()) <= 4 * standard_error


@pytest.mark.slow
def test_haar_eigenvalue_arguments_are_uniform():
    """Test the arguments of 2x2 Haar unitaries against the uniform law on the circle."""
    angles = np.concatenate([eig_unitary(random_unitary(2, seed=(32, draw))).angles for draw in range(10_000)])
    counts, _ = np.histogram(angles, bins=16, range=(-np.pi, np.pi))
    assert counts.sum() == 20_000
    assert stats.chisquare(counts).pvalue > 0.01
