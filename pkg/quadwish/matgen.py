# quadwish/matgen.py

"""
Seeded generation of the random matrices used by the experiments.

- `random_symmetric`         symmetric B with N(0, 1) off-diagonal parents
- `random_spd`               SPD scale matrix Σ (Gram matrix plus a ridge)
- `random_shifted_spd`       SPD scale matrix Σ (symmetric Gaussian matrix plus a diagonal shift)
- `random_constrained_psd`   symmetric PSD A with exact norm and condition number
- `eigendecompose`           descending symmetric eigendecomposition

All matrices are stored read-only, so values can be shared freely between
threads once constructed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple, Union

import numpy as np

from quadwish.errors import (
    InvalidDimensionError,
    InvalidParameterError,
    NumericalFailureError,
)
from quadwish.log import get_logger
from quadwish.rng import RngLike, as_generator

logger = get_logger()

SPD_RIDGE = 1e-6
SHIFTED_SPD_FLOOR = 1.0


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _check_dim(n: int, minimum: int = 1) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < minimum:
        raise InvalidDimensionError(f"dimension must be an integer >= {minimum}, got {n!r}")
    return int(n)


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return (M + Mᵀ)/2, which is symmetric bit-for-bit."""
    m = np.asarray(m, dtype=float)
    return (m + m.T) / 2.0


# -------------------------------------------------------------------- #
# Types
# -------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """An n×n real matrix with entries[i, j] == entries[j, i] exactly."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidDimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise InvalidParameterError("matrix is not exactly symmetric; use SymmetricMatrix.from_array")
        object.__setattr__(self, "entries", _frozen(a))

    @classmethod
    def from_array(cls, m: np.ndarray) -> "SymmetricMatrix":
        """Symmetrize an arbitrary square array."""
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDimensionError(f"expected a square matrix, got shape {m.shape}")
        return cls(symmetrize(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class SpdMatrix(SymmetricMatrix):
    """
    Symmetric positive definite matrix with its eigendecomposition cached.

    ``entries == eig_u @ diag(eig_d) @ eig_u.T`` up to roundoff, with
    ``eig_d`` sorted descending and strictly positive.
    """

    eig_u: np.ndarray = None  # type: ignore[assignment]
    eig_d: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.eig_u is None or self.eig_d is None:
            u, d = eigendecompose(self.entries)
        else:
            u, d = np.asarray(self.eig_u, dtype=float), np.asarray(self.eig_d, dtype=float)
        if d[-1] <= 0.0:
            raise NumericalFailureError(
                f"matrix is not positive definite (smallest eigenvalue {d[-1]:.3e})"
            )
        object.__setattr__(self, "eig_u", _frozen(u))
        object.__setattr__(self, "eig_d", _frozen(d))

    @classmethod
    def scaled_identity(cls, n: int, variance: float = 1.0) -> "SpdMatrix":
        """σ²·I_n, built with an exact eigendecomposition."""
        n = _check_dim(n)
        if variance <= 0:
            raise InvalidParameterError("variance must be positive")
        return cls(variance * np.eye(n), eig_u=np.eye(n), eig_d=np.full(n, float(variance)))

    @cached_property
    def cholesky(self) -> np.ndarray:
        """Lower-triangular L with L·Lᵀ = entries."""
        try:
            return _frozen(np.linalg.cholesky(self.entries))
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError(f"Cholesky factorisation failed: {exc}") from exc

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))


MatrixLike = Union[SymmetricMatrix, np.ndarray]


# -------------------------------------------------------------------- #
# Operations
# -------------------------------------------------------------------- #
def eigendecompose(m: MatrixLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Symmetric eigendecomposition with eigenvalues sorted descending.

    Returns
    -------
    (U, d)
        Orthogonal U and eigenvalues d with U·diag(d)·Uᵀ = m.

    Raises
    ------
    NumericalFailureError
        If LAPACK fails to converge or returns non-finite values.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {a.shape}")
    try:
        d, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigendecomposition did not converge: {exc}") from exc
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(u))):
        raise NumericalFailureError("eigendecomposition produced non-finite values")
    return u[:, ::-1].copy(), d[::-1].copy()


def reconstruct(u: np.ndarray, d: np.ndarray) -> np.ndarray:
    """U·diag(d)·Uᵀ."""
    return (u * d) @ u.T


def random_symmetric(n: int, rng: RngLike) -> SymmetricMatrix:
    """(M + Mᵀ)/2 for M with i.i.d. N(0, 1) entries, no rescaling."""
    n = _check_dim(n)
    g = as_generator(rng).standard_normal((n, n))
    return SymmetricMatrix(symmetrize(g))


def random_spd(n: int, rng: RngLike) -> SpdMatrix:
    """G·Gᵀ + 1e-6·n·I, symmetrized, for G with i.i.d. N(0, 1) entries."""
    n = _check_dim(n)
    g = as_generator(rng).standard_normal((n, n))
    return SpdMatrix(symmetrize(g @ g.T + SPD_RIDGE * n * np.eye(n)))


def random_shifted_spd(n: int, rng: RngLike) -> SpdMatrix:
    """
    (M + Mᵀ)/2 + c·I for M with i.i.d. N(0, 1) entries.

    The shift is c = n, raised when needed so that the smallest eigenvalue is
    at least SHIFTED_SPD_FLOOR. For n = 10 the spectrum lies roughly in
    [5, 15], whereas `random_spd` routinely has eigenvalues near zero.
    """
    n = _check_dim(n)
    s = random_symmetric(n, rng).entries
    u, d = eigendecompose(s)
    shift = max(float(n), SHIFTED_SPD_FLOOR - float(d[-1]))
    return SpdMatrix(s + shift * np.eye(n), eig_u=u, eig_d=d + shift)


def random_orthogonal(n: int, rng: RngLike) -> np.ndarray:
    """Haar-distributed orthogonal matrix from the QR factorisation of a Gaussian matrix."""
    n = _check_dim(n)
    g = as_generator(rng).standard_normal((n, n))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def random_constrained_psd(n: int, norm: float, cond: float, rng: RngLike) -> SymmetricMatrix:
    """
    Symmetric PSD matrix with ‖A‖₂ = norm and cond(A) = cond.

    The spectrum is {norm, norm/cond} plus n - 2 values drawn uniformly in
    between; the eigenbasis is a random orthogonal matrix.
    """
    n = _check_dim(n, minimum=2)
    if not norm > 0:
        raise InvalidParameterError(f"norm must be positive, got {norm}")
    if not cond >= 1:
        raise InvalidParameterError(f"condition number must be >= 1, got {cond}")

    gen = as_generator(rng)
    lo = norm / cond
    spectrum = np.empty(n)
    spectrum[0] = norm
    spectrum[-1] = lo
    spectrum[1:-1] = np.sort(gen.uniform(lo, norm, size=n - 2))[::-1]
    q = random_orthogonal(n, gen)

    logger.debug("Constrained PSD matrix n=%d norm=%g cond=%g", n, norm, cond)
    return SymmetricMatrix(symmetrize(reconstruct(q, spectrum)))
