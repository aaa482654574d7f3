"""Reproducible random ensembles of Hermitian, unitary and contraction matrices.

Every generator is a deterministic function of an explicit seed. Seeds may be
plain integers or tuples of integers; tuples are fed to a counter-based
``Philox`` bit generator through ``SeedSequence`` so that trial streams do not
depend on the order in which trials are executed.

The ``*_from_params`` builders map a vector of standard normals onto a
witness. The experiments draw those vectors once per trial, and the
adversarial search perturbs them coordinate-wise.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.special import ndtr

from .const import POSITIVE_SPECTRUM_FLOOR, SPECTRUM_POSITIVE, SPECTRUM_SIGNED
from .exceptions import ParameterError
from .linalg import (
    NormKind,
    complex_gaussian,
    hermitian_from_spectrum,
    operator_norm,
    symmetrize,
    unitary_from_gaussian,
)

_LOGGER = logging.getLogger(__name__)

Seed = int | Sequence[int]


def make_rng(seed: Seed) -> np.random.Generator:
    """Return a counter-based generator for ``seed``."""
    if isinstance(seed, (int, np.integer)):
        entropy: int | list[int] = int(seed)
    else:
        entropy = [int(part) for part in seed]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1:
        raise ParameterError(f"Dimension must be a positive integer, got {dim}")
    return int(dim)


def _check_rank(rank: int | None, dim: int) -> int:
    if rank is None:
        return dim
    if int(rank) != rank or not 1 <= rank <= dim:
        raise ParameterError(f"Rank {rank} is infeasible in dimension {dim}")
    return int(rank)


def random_hermitian(dim: int, scale: float, seed: Seed) -> np.ndarray:
    """Return (G + G†)/2 for a complex Gaussian G with entries of deviation ``scale``."""
    dim = _check_dim(dim)
    if not scale > 0:
        raise ParameterError(f"Scale must be positive, got {scale}")
    rng = make_rng(seed)
    G = scale * complex_gaussian(rng.standard_normal(2 * dim * dim), (dim, dim))
    return symmetrize(G)


def random_unitary(dim: int, seed: Seed) -> np.ndarray:
    """Return a Haar-distributed unitary matrix."""
    dim = _check_dim(dim)
    rng = make_rng(seed)
    return unitary_from_gaussian(
        complex_gaussian(rng.standard_normal(2 * dim * dim), (dim, dim))
    )


def perturbation_spectrum(
    gaussians: np.ndarray, rank: int, spectrum: str = SPECTRUM_SIGNED
) -> np.ndarray:
    """Map normals to eigenvalues of magnitude in [0.1, 1), zero beyond ``rank``.

    The floor keeps every requested eigenvalue visibly nonzero, so the rank of
    the result is exactly ``rank``.
    """
    if spectrum not in (SPECTRUM_SIGNED, SPECTRUM_POSITIVE):
        raise ParameterError(f"Unknown perturbation spectrum {spectrum!r}")
    gaussians = np.asarray(gaussians, dtype=float)
    magnitude = POSITIVE_SPECTRUM_FLOOR + (1 - POSITIVE_SPECTRUM_FLOOR) * (
        2 * ndtr(np.abs(gaussians)) - 1
    )
    if spectrum == SPECTRUM_SIGNED:
        magnitude = np.where(gaussians >= 0, magnitude, -magnitude)
    values = np.zeros_like(magnitude)
    values[:rank] = magnitude[:rank]
    return values


def perturbation_from_params(
    frame_params: np.ndarray,
    spectrum_params: np.ndarray,
    target_norm: float,
    rank: int | None = None,
    norm_kind: NormKind | None = None,
    spectrum: str = SPECTRUM_SIGNED,
) -> np.ndarray:
    """Build a Hermitian K of the given rank with ``norm_kind.of(K) == target_norm``."""
    spectrum_params = np.asarray(spectrum_params, dtype=float)
    dim = spectrum_params.size
    rank = _check_rank(rank, dim)
    if not target_norm > 0:
        raise ParameterError(f"Target norm must be positive, got {target_norm}")
    norm_kind = norm_kind or NormKind.operator()
    frame = unitary_from_gaussian(complex_gaussian(frame_params, (dim, dim)))
    values = perturbation_spectrum(spectrum_params, rank, spectrum)
    # the eigenvalues of K are `values`, so its norm is known before assembly
    current = norm_kind.of(np.diag(values.astype(complex)))
    return hermitian_from_spectrum(frame, values * (target_norm / current))


def random_perturbation(
    dim: int,
    target_norm: float,
    rank: int | None = None,
    norm_kind: NormKind | None = None,
    seed: Seed = 0,
    spectrum: str = SPECTRUM_SIGNED,
) -> np.ndarray:
    """Return a Hermitian perturbation of prescribed norm and rank."""
    dim = _check_dim(dim)
    _check_rank(rank, dim)
    rng = make_rng(seed)
    frame_params = rng.standard_normal(2 * dim * dim)
    spectrum_params = rng.standard_normal(dim)
    return perturbation_from_params(
        frame_params, spectrum_params, target_norm, rank, norm_kind, spectrum
    )


def random_contraction(dim: int, norm: float = 1.0, seed: Seed = 0) -> np.ndarray:
    """Return a complex Gaussian matrix rescaled to operator norm ``norm`` <= 1."""
    dim = _check_dim(dim)
    if not 0 < norm <= 1:
        raise ParameterError(f"Contraction norm must lie in (0, 1], got {norm}")
    rng = make_rng(seed)
    G = complex_gaussian(rng.standard_normal(2 * dim * dim), (dim, dim))
    return G * (norm / operator_norm(G))


def spectrum_from_params(
    gaussians: np.ndarray,
    radius: float,
    gap: float = 0.0,
    planted: float | None = None,
) -> np.ndarray:
    """Map normals to eigenvalues within ``radius`` of the planted point.

    With a planted point p the first eigenvalue is exactly p and the others
    keep a distance of at least ``gap`` from it.
    """
    gaussians = np.asarray(gaussians, dtype=float)
    center = 0.0 if planted is None else float(planted)
    magnitude = gap + (radius - gap) * np.tanh(np.abs(gaussians))
    values = center + np.where(gaussians >= 0, magnitude, -magnitude)
    if planted is not None and values.size:
        values[0] = center
    return values


@dataclass
class ParameterLayout:
    """Named blocks of a flat Gaussian parameter vector."""

    blocks: dict[str, tuple[int, int]] = field(default_factory=dict)
    size: int = 0

    def add(self, name: str, count: int) -> ParameterLayout:
        self.blocks[name] = (self.size, self.size + count)
        self.size += count
        return self

    def block(self, params: np.ndarray, name: str) -> np.ndarray:
        start, stop = self.blocks[name]
        return params[start:stop]

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.size)


def hermitian_layout(dim: int, prefix: str) -> tuple[tuple[str, int], ...]:
    """Blocks describing a Hermitian witness: a frame and a spectrum."""
    return ((f"{prefix}_frame", 2 * dim * dim), (f"{prefix}_spectrum", dim))


def hermitian_from_params(
    layout: ParameterLayout,
    params: np.ndarray,
    prefix: str,
    radius: float,
    gap: float = 0.0,
    planted: float | None = None,
) -> np.ndarray:
    """Build a Hermitian witness whose spectrum lies within ``radius`` of ``planted``."""
    spectrum_params = layout.block(params, f"{prefix}_spectrum")
    dim = spectrum_params.size
    frame = unitary_from_gaussian(
        complex_gaussian(layout.block(params, f"{prefix}_frame"), (dim, dim))
    )
    return hermitian_from_spectrum(
        frame, spectrum_from_params(spectrum_params, radius, gap, planted)
    )


def unitary_from_params(
    layout: ParameterLayout, params: np.ndarray, name: str, dim: int
) -> np.ndarray:
    return unitary_from_gaussian(complex_gaussian(layout.block(params, name), (dim, dim)))
