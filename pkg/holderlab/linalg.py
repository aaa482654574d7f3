"""Matrix containers, spectral decompositions and Schatten norms."""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import Any

import numpy as np
import scipy.linalg

from .const import FRAME_TOL, HERMITIAN_TOL, REASSEMBLY_TOL, UNITARY_TOL
from .exceptions import InputError, NumericError, ParameterError

_LOGGER = logging.getLogger(__name__)

KIND_HERMITIAN = "hermitian"
KIND_UNITARY = "unitary"


def as_matrix(data: Any) -> np.ndarray:
    """Return ``data`` as a finite, square complex matrix.

    Scalars are promoted to 1x1 matrices so that scalar witnesses run through
    the same code paths as matrix ones.
    """
    matrix = np.array(data, dtype=complex)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise InputError(f"Expected a non-empty square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InputError("Matrix has non-finite entries")
    return matrix


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array)
    array.flags.writeable = False
    return array


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (M + M†)/2."""
    return (matrix + matrix.conj().T) / 2


def adjoint(matrix: np.ndarray) -> np.ndarray:
    return matrix.conj().T


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues and an orthonormal eigenvector frame of a normal matrix."""

    eigenvalues: np.ndarray
    frame: np.ndarray
    kind: str = KIND_HERMITIAN

    def __post_init__(self) -> None:
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        object.__setattr__(self, "frame", _frozen(self.frame))

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @property
    def angles(self) -> np.ndarray:
        """Arguments of unitary eigenvalues in (-pi, pi]."""
        return _principal_angles(self.eigenvalues)

    def reassemble(self, values: np.ndarray | None = None) -> np.ndarray:
        """Return frame·diag(values)·frame†, defaulting to the eigenvalues."""
        if values is None:
            values = self.eigenvalues
        return (self.frame * values) @ adjoint(self.frame)


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values s_0 >= s_1 >= ... >= 0."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(self.values))

    @property
    def largest(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0

    def rank(self, tol: float = 1e-12) -> int:
        """Numerical rank relative to the largest singular value."""
        if self.largest == 0.0:
            return 0
        return int(np.count_nonzero(self.values > tol * self.largest))


def _principal_angles(eigenvalues: np.ndarray) -> np.ndarray:
    angles = np.angle(eigenvalues)
    angles[angles <= -math.pi] += 2 * math.pi
    return angles


def _check_frame(frame: np.ndarray, residual: float, scale: float) -> None:
    dim = frame.shape[0]
    frame_error = float(np.linalg.norm(adjoint(frame) @ frame - np.eye(dim)))
    if frame_error > FRAME_TOL * dim:
        raise NumericError(
            f"Eigenvector frame is not unitary (deviation {frame_error:.3e})",
            residual=frame_error,
        )
    if residual > REASSEMBLY_TOL * max(scale, 1e-300) and residual > 0:
        raise NumericError(
            f"Decomposition does not reproduce its input (residual {residual:.3e})",
            residual=residual,
        )


def eig_hermitian(matrix: Any) -> SpectralDecomposition:
    """Decompose a Hermitian matrix with eigenvalues sorted ascending.

    The input is symmetrized first; the deviation from Hermiticity is logged
    rather than rejected so that round-off does not abort a sweep.
    """
    H = as_matrix(matrix)
    scale = float(np.linalg.norm(H))
    deviation = float(np.linalg.norm(H - adjoint(H)))
    if deviation > HERMITIAN_TOL * max(scale, 1.0):
        _LOGGER.debug("Symmetrizing input with Hermitian deviation %.3e", deviation)
    H = symmetrize(H)
    try:
        eigenvalues, frame = np.linalg.eigh(H)
    except np.linalg.LinAlgError as err:
        raise NumericError(f"Hermitian eigendecomposition failed: {err}") from err
    decomposition = SpectralDecomposition(eigenvalues, frame, KIND_HERMITIAN)
    residual = float(np.linalg.norm(decomposition.reassemble() - H))
    norm = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    _check_frame(frame, residual, norm)
    return decomposition


def unitary_deviation(matrix: np.ndarray) -> float:
    """Return ‖U†U − I‖ in Frobenius norm."""
    return float(np.linalg.norm(adjoint(matrix) @ matrix - np.eye(matrix.shape[0])))


def eig_unitary(matrix: Any) -> SpectralDecomposition:
    """Decompose a unitary matrix, eigenvalues sorted by argument in (-pi, pi].

    The complex Schur form of a normal matrix is diagonal, so its Schur
    vectors give an orthonormal eigenframe even for repeated eigenvalues.
    """
    U = as_matrix(matrix)
    dim = U.shape[0]
    deviation = unitary_deviation(U)
    if deviation > UNITARY_TOL * dim:
        raise InputError(
            f"Matrix is not unitary (deviation {deviation:.3e})", deviation=deviation
        )
    try:
        triangular, frame = scipy.linalg.schur(U, output="complex")
    except (np.linalg.LinAlgError, ValueError) as err:
        raise NumericError(f"Schur decomposition failed: {err}") from err
    eigenvalues = np.diag(triangular)
    eigenvalues = eigenvalues / np.abs(eigenvalues)
    order = np.argsort(_principal_angles(eigenvalues), kind="stable")
    decomposition = SpectralDecomposition(
        eigenvalues[order], frame[:, order], KIND_UNITARY
    )
    residual = float(np.linalg.norm(decomposition.reassemble() - U))
    _check_frame(decomposition.frame, residual, 1.0)
    return decomposition


def singular_values(matrix: Any) -> SingularSpectrum:
    """Return the singular values of ``matrix`` in nonincreasing order."""
    M = as_matrix(matrix)
    try:
        values = scipy.linalg.svdvals(M)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise NumericError(f"Singular value decomposition failed: {err}") from err
    return SingularSpectrum(np.clip(values, 0.0, None))


def operator_norm(matrix: Any) -> float:
    return singular_values(matrix).largest


def _check_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ParameterError(f"Schatten exponent must satisfy p >= 1, got {p}")
    return p


def schatten_norm(matrix: Any, p: float) -> float:
    """Return (Σ s_n^p)^{1/p}; p = inf gives the operator norm."""
    p = _check_exponent(p)
    values = singular_values(matrix).values
    largest = float(values[0]) if values.size else 0.0
    if largest == 0.0:
        return 0.0
    if math.isinf(p):
        return largest
    # scaled by s_0 to keep large p from overflowing
    return largest * float(np.sum((values / largest) ** p)) ** (1.0 / p)


def weak_schatten_norm(matrix: Any, p: float) -> float:
    """Return sup_n (1+n)^{1/p} s_n."""
    p = _check_exponent(p)
    values = singular_values(matrix).values
    if math.isinf(p):
        return float(values[0]) if values.size else 0.0
    weights = np.arange(1, values.size + 1, dtype=float) ** (1.0 / p)
    return float(np.max(weights * values)) if values.size else 0.0


@dataclass(frozen=True)
class NormKind:
    """Which norm a perturbation is normalized in."""

    p: float = math.inf
    weak: bool = False

    def __post_init__(self) -> None:
        _check_exponent(self.p)

    @classmethod
    def operator(cls) -> NormKind:
        return cls(math.inf)

    @classmethod
    def schatten(cls, p: float) -> NormKind:
        return cls(p)

    @classmethod
    def weak_schatten(cls, p: float) -> NormKind:
        return cls(p, weak=True)

    @property
    def label(self) -> str:
        if math.isinf(self.p):
            return "operator"
        p = f"{self.p:g}"
        return f"S_{p},inf" if self.weak else f"S_{p}"

    def of(self, matrix: Any) -> float:
        if self.weak:
            return weak_schatten_norm(matrix, self.p)
        return schatten_norm(matrix, self.p)


def complex_gaussian(params: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Pair up real standard normals into complex ones of unit variance."""
    size = int(np.prod(shape))
    params = np.asarray(params, dtype=float)
    if params.size != 2 * size:
        raise ParameterError(f"Expected {2 * size} parameters, got {params.size}")
    return ((params[:size] + 1j * params[size:]) / math.sqrt(2)).reshape(shape)


def unitary_from_gaussian(gaussian: np.ndarray) -> np.ndarray:
    """Orthonormalize a complex Gaussian matrix with positive-diagonal QR."""
    Q, R = np.linalg.qr(gaussian)
    diagonal = np.diag(R)
    magnitude = np.abs(diagonal)
    phases = np.where(magnitude > 0, diagonal / np.where(magnitude > 0, magnitude, 1), 1)
    return Q * phases


def hermitian_from_spectrum(frame: np.ndarray, eigenvalues: np.ndarray) -> np.ndarray:
    """Return the exactly Hermitian matrix frame·diag(eigenvalues)·frame†."""
    return symmetrize((frame * np.asarray(eigenvalues, dtype=float)) @ adjoint(frame))
