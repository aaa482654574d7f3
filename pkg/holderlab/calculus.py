"""Functional calculus for Hermitian, unitary and contraction matrices."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
import logging
import math
from typing import Any, NamedTuple

import numpy as np

from .const import CONFLUENT_TOL, MODE_INTERPOLATING, MODE_LITERAL
from .exceptions import DomainError, ParameterError
from .functions import CIRCLE, LINE, FunctionSpec, exp_i
from .linalg import adjoint, as_matrix, eig_hermitian, eig_unitary, symmetrize

_LOGGER = logging.getLogger(__name__)


class DividedDifference(NamedTuple):
    value: complex
    confluent: bool


def _require(f: FunctionSpec, domain: str) -> None:
    if f.domain != domain:
        raise ParameterError(f"{f.name} is a {f.domain} function, expected {domain}")


def apply_hermitian(f: FunctionSpec, matrix: Any) -> np.ndarray:
    """Return f(A) = P·diag(f(λ))·P†.

    Raises DomainError listing the eigenvalues outside the working interval.
    """
    _require(f, LINE)
    decomposition = eig_hermitian(matrix)
    values = f(decomposition.eigenvalues)
    result = decomposition.reassemble(values)
    if f.is_real(values):
        result = symmetrize(result)
    return result


def apply_unitary(f: FunctionSpec, matrix: Any) -> np.ndarray:
    """Return f(U) = P·diag(f(arg λ))·P† for unitary U."""
    _require(f, CIRCLE)
    decomposition = eig_unitary(matrix)
    return decomposition.reassemble(f(decomposition.angles))


def _coefficient_map(coefficients: Any) -> dict[int, complex]:
    if isinstance(coefficients, FunctionSpec):
        if coefficients.coefficients is None:
            raise ParameterError(f"{coefficients.name} has no polynomial coefficients")
        coefficients = coefficients.coefficients
    if isinstance(coefficients, Mapping):
        mapping = {int(k): complex(c) for k, c in coefficients.items()}
    else:
        mapping = {k: complex(c) for k, c in enumerate(coefficients)}
    negative = [k for k, c in mapping.items() if k < 0 and c != 0]
    if negative:
        raise ParameterError(f"Polynomial has negative powers {sorted(negative)}")
    return {k: c for k, c in mapping.items() if k >= 0}


def apply_polynomial(coefficients: Any, matrix: Any) -> np.ndarray:
    """Return Σ c_k M^k.

    Dense coefficient lists use Horner's scheme; sparse high-degree ones, such
    as lacunary series, walk the chain of required powers by squaring.
    """
    M = as_matrix(matrix)
    dim = M.shape[0]
    mapping = {k: c for k, c in _coefficient_map(coefficients).items() if c != 0}
    result = np.zeros((dim, dim), dtype=complex)
    if not mapping:
        return result
    degree = max(mapping)
    identity = np.eye(dim, dtype=complex)
    if degree < 4 * len(mapping) + 8:
        for k in range(degree, -1, -1):
            result = result @ M + mapping.get(k, 0) * identity
        return result
    power, exponent = identity, 0
    for k in sorted(mapping):
        power = power @ np.linalg.matrix_power(M, k - exponent)
        exponent = k
        result += mapping[k] * power
    return result


def _confluent_tol(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return CONFLUENT_TOL * np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))


def divided_difference(f: FunctionSpec, x: float, y: float) -> DividedDifference:
    """Return (f(x) − f(y))/(x − y), or f'(x) when x and y nearly coincide.

    Without a usable derivative the confluent value is 0 and flagged.
    """
    values, confluent = divided_difference_matrix(f, np.array([x]), np.array([y]))
    return DividedDifference(complex(values[0, 0]), bool(confluent[0, 0]))


def divided_difference_matrix(
    f: FunctionSpec, lam: np.ndarray, mu: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return D_ij = f[λ_i, μ_j] and the mask of confluent pairs lacking a derivative."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    f_lam, f_mu = f(lam), f(mu)
    gaps = lam[:, None] - mu[None, :]
    close = np.abs(gaps) <= _confluent_tol(lam[:, None], mu[None, :])
    safe = np.where(close, 1.0, gaps)
    values = (f_lam[:, None] - f_mu[None, :]) / safe
    flagged = np.zeros(close.shape, dtype=bool)
    if np.any(close):
        slope = f.derivative_at(lam)
        if slope is None:
            slope = np.full(lam.shape, np.nan, dtype=complex)
        diagonal = np.broadcast_to(slope[:, None], close.shape)
        missing = close & np.isnan(diagonal)
        values = np.where(close, np.where(missing, 0, diagonal), values)
        flagged = missing
    return values, flagged


def doi_first_difference(f: FunctionSpec, A: Any, B: Any) -> np.ndarray:
    """Return f(A) − f(B) as the Schur multiplier P·(D ∘ P†(A−B)Q)·Q†."""
    _require(f, LINE)
    A, B = as_matrix(A), as_matrix(B)
    left, right = eig_hermitian(A), eig_hermitian(B)
    D, flagged = divided_difference_matrix(f, left.eigenvalues, right.eigenvalues)
    if np.any(flagged):
        _LOGGER.debug("%d confluent divided differences without derivative", int(flagged.sum()))
    inner = adjoint(left.frame) @ (A - B) @ right.frame
    return left.frame @ (D * inner) @ adjoint(right.frame)


def _check_order(n: int) -> int:
    if int(n) != n or n < 1:
        raise ParameterError(f"Difference order must be a positive integer, got {n}")
    return int(n)


def delta_n(f: FunctionSpec, A: Any, K: Any, n: int) -> np.ndarray:
    """Return Σ_j (−1)^{n−j} C(n,j) f(A + jK)."""
    n = _check_order(n)
    A, K = as_matrix(A), as_matrix(K)
    total = np.zeros_like(A)
    for j in range(n + 1):
        try:
            term = apply_hermitian(f, A + j * K)
        except DomainError as err:
            raise DomainError(
                f"{err} (at A + {j}K)", values=err.values, index=j
            ) from err
        total += (-1) ** (n - j) * math.comb(n, j) * term
    return total


def expm_hermitian(A: Any, k: float = 1.0) -> np.ndarray:
    """Return exp(ikA) through the Hermitian eigendecomposition of A."""
    return apply_hermitian(exp_i(k), A)


def unitary_multiplicative_differences(
    f: FunctionSpec, U: Any, A: Any, n: int
) -> np.ndarray:
    """Return Σ_k (−1)^{n−k} C(n,k) f(e^{ikA}·U)."""
    n = _check_order(n)
    _require(f, CIRCLE)
    U, A = as_matrix(U), as_matrix(A)
    decomposition = eig_hermitian(A)
    total = np.zeros_like(U)
    for k in range(n + 1):
        rotation = decomposition.reassemble(np.exp(1j * k * decomposition.eigenvalues))
        total += (-1) ** (n - k) * math.comb(n, k) * apply_unitary(f, rotation @ U)
    return total


def contraction_differences(
    f: Any, T: Any, R: Any, n: int, mode: str = MODE_INTERPOLATING
) -> np.ndarray:
    """Return Σ_k (−1)^{n−k} C(n,k) f(X_k) for analytic polynomial f.

    ``literal`` uses X_k = T + (k/n)(T − R); ``interpolating`` uses
    X_k = R + (k/n)(T − R), which stays inside the unit ball.
    """
    n = _check_order(n)
    if isinstance(f, FunctionSpec) and not f.analytic:
        raise ParameterError(f"{f.name} is not an analytic polynomial")
    if mode not in (MODE_LITERAL, MODE_INTERPOLATING):
        raise ParameterError(f"Unknown contraction mode {mode!r}")
    coefficients = _coefficient_map(f)
    T, R = as_matrix(T), as_matrix(R)
    base = T if mode == MODE_LITERAL else R
    step = T - R
    total = np.zeros_like(T)
    for k in range(n + 1):
        total += (-1) ** (n - k) * math.comb(n, k) * apply_polynomial(
            coefficients, base + (k / n) * step
        )
    return total
