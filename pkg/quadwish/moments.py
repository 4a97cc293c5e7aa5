# quadwish/moments.py

"""
Expected value of the Wishart quadratic form E(QBQ), Q ~ W_n(Σ, k).

Three closed-form paths that must agree:

- algebraic   k·tr(BΣ)·Σ + (k²+k)·ΣBΣ
- eigen       k·U[2(d dᵀ)∘B̃ + tr(B̃D)·D]Uᵀ + (k²-k)·ΣBΣ, with Σ = U·D·Uᵀ, B̃ = UᵀBU
- kronecker   mat(E(Q⊗Q)·vec(B)),
              E(Q⊗Q) = k²·Σ⊗Σ + k·vec(Σ)vec(Σ)ᵀ + k·K_{n,n}·Σ⊗Σ

plus the second moment E(Q²), the k = 1 and Σ = σ²I special cases, and the
Monte Carlo estimator (1/m)·Σ QⁱBQⁱ used to check them.

vec stacks columns; mat is its inverse for a known (n, n) shape. Every
result is returned symmetrized, (X + Xᵀ)/2.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from quadwish.config import get_settings
from quadwish.errors import (
    CaseMismatchError,
    InvalidDimensionError,
    InvalidParameterError,
    SizeCapError,
)
from quadwish.log import get_logger
from quadwish.matgen import SymmetricMatrix, symmetrize
from quadwish.rng import RngLike, RngSeed, as_generator
from quadwish.wishart import WishartParams, sample_wishart_batch

logger = get_logger()

SCALAR_IDENTITY_TOLERANCE = 1e-12


# -------------------------------------------------------------------- #
# Enums & types
# -------------------------------------------------------------------- #
class MomentPath(str, Enum):
    """How a MomentResult was computed."""
    ALGEBRAIC = "algebraic"
    EIGEN = "eigen"
    KRONECKER = "kronecker"
    SPECIAL = "special"
    MONTE_CARLO = "monte_carlo"


class SpecialCase(str, Enum):
    """Simplified formulas with extra preconditions."""
    K_ONE = "k_one"
    SIGMA_SCALAR_IDENTITY = "sigma_scalar_identity"


@dataclass(frozen=True, eq=False)
class MomentResult:
    """A (symmetric) E(QBQ)-type matrix and the path that produced it."""

    value: np.ndarray
    path: MomentPath

    @property
    def dim(self) -> int:
        return self.value.shape[0]


@dataclass(frozen=True, eq=False)
class CommutationMatrix:
    """K_{n,n}: the n²×n² permutation with K·vec(M) = vec(Mᵀ)."""

    n: int
    entries: np.ndarray

    def apply(self, v: np.ndarray) -> np.ndarray:
        """K·v without forming the product, via the permutation."""
        v = np.asarray(v)
        return vec(mat(v, self.n).T)


BLike = Union[SymmetricMatrix, np.ndarray]


# -------------------------------------------------------------------- #
# Helpers
# -------------------------------------------------------------------- #
def vec(m: np.ndarray) -> np.ndarray:
    """Stack the columns of M on top of one another."""
    return np.asarray(m).reshape(-1, order="F")


def mat(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of `vec` for an n×n matrix."""
    v = np.asarray(v)
    if v.shape != (n * n,):
        raise InvalidDimensionError(f"cannot reshape vector of shape {v.shape} to ({n}, {n})")
    return v.reshape((n, n), order="F")


def relative_error(exact: np.ndarray, approx: np.ndarray, ord: Union[int, str] = 2) -> float:
    """‖exact - approx‖ / ‖exact‖ in the spectral (ord=2) or Frobenius ("fro") norm."""
    exact = np.asarray(getattr(exact, "value", exact), dtype=float)
    approx = np.asarray(getattr(approx, "value", approx), dtype=float)
    denom = np.linalg.norm(exact, ord)
    diff = np.linalg.norm(exact - approx, ord)
    if denom == 0.0:
        return 0.0 if diff == 0.0 else float("inf")
    return float(diff / denom)


def _b_matrix(params: WishartParams, b: BLike) -> np.ndarray:
    if isinstance(b, SymmetricMatrix):
        arr = np.asarray(b.entries)
    else:
        arr = np.asarray(b, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidDimensionError(f"B must be square, got shape {arr.shape}")
        if not np.allclose(arr, arr.T, rtol=1e-12, atol=0.0):
            raise InvalidParameterError("B must be symmetric")
    if arr.shape[0] != params.dim:
        raise InvalidParameterError(
            f"dimension mismatch: B is {arr.shape[0]}×{arr.shape[0]}, Σ is {params.dim}×{params.dim}"
        )
    return arr


def _result(value: np.ndarray, path: MomentPath) -> MomentResult:
    out = symmetrize(value)
    out.setflags(write=False)
    return MomentResult(value=out, path=path)


def _sigma_b_sigma(s: np.ndarray, b: np.ndarray) -> np.ndarray:
    return s @ b @ s


# -------------------------------------------------------------------- #
# Closed forms
# -------------------------------------------------------------------- #
def expected_qbq(params: WishartParams, b: BLike) -> MomentResult:
    """E(QBQ) = k·tr(BΣ)·Σ + (k²+k)·ΣBΣ."""
    bm = _b_matrix(params, b)
    s = np.asarray(params.scale.entries)
    k = params.dof
    value = k * np.trace(bm @ s) * s + (k * k + k) * _sigma_b_sigma(s, bm)
    return _result(value, MomentPath.ALGEBRAIC)


def expected_qbq_eigen(params: WishartParams, b: BLike) -> MomentResult:
    """E(QBQ) through the cached eigendecomposition Σ = U·D·Uᵀ."""
    bm = _b_matrix(params, b)
    s = np.asarray(params.scale.entries)
    u, d = params.scale.eig_u, params.scale.eig_d
    k = params.dof

    b_tilde = u.T @ bm @ u
    inner = 2.0 * np.outer(d, d) * b_tilde + np.dot(np.diag(b_tilde), d) * np.diag(d)
    value = k * (u @ inner @ u.T) + (k * k - k) * _sigma_b_sigma(s, bm)
    return _result(value, MomentPath.EIGEN)


def build_commutation(n: int) -> CommutationMatrix:
    """Commutation matrix K_{n,n} with K·vec(M) = vec(Mᵀ)."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDimensionError(f"dimension must be an integer >= 1, got {n!r}")
    n = int(n)
    idx = np.arange(n * n)
    i, j = idx % n, idx // n            # row idx holds vec entry (i, j)
    k_mat = np.zeros((n * n, n * n))
    k_mat[idx, i * n + j] = 1.0
    k_mat.setflags(write=False)
    return CommutationMatrix(n=n, entries=k_mat)


def expected_kron(params: WishartParams) -> np.ndarray:
    """E(Q⊗Q) = k²·Σ⊗Σ + k·vec(Σ)vec(Σ)ᵀ + k·K_{n,n}·Σ⊗Σ."""
    n = params.dim
    cap = get_settings().kronecker_max_dim
    if n > cap:
        raise SizeCapError(f"Kronecker path limited to n <= {cap}, got n = {n}")
    s = np.asarray(params.scale.entries)
    k = params.dof
    ss = np.kron(s, s)
    vs = vec(s)
    comm = build_commutation(n).entries
    return k * k * ss + k * np.outer(vs, vs) + k * (comm @ ss)


def expected_qbq_kronecker(params: WishartParams, b: BLike) -> MomentResult:
    """E(QBQ) = mat(E(Q⊗Q)·vec(B)); validation path, n⁴ memory."""
    bm = _b_matrix(params, b)
    eqq = expected_kron(params)
    logger.debug("Kronecker path: E(Q⊗Q) is %d×%d", *eqq.shape)
    return _result(mat(eqq @ vec(bm), params.dim), MomentPath.KRONECKER)


def second_moment(params: WishartParams) -> MomentResult:
    """E(Q²) = (k²+k)·Σ² + k·tr(Σ)·Σ."""
    s = np.asarray(params.scale.entries)
    k = params.dof
    value = (k * k + k) * (s @ s) + k * np.trace(s) * s
    return _result(value, MomentPath.ALGEBRAIC)


def scalar_variance(params: WishartParams) -> Optional[float]:
    """σ² when Σ = σ²·I to relative tolerance 1e-12, else None."""
    s = np.asarray(params.scale.entries)
    sigma2 = float(np.trace(s)) / params.dim
    resid = np.linalg.norm(s - sigma2 * np.eye(params.dim))
    if resid <= SCALAR_IDENTITY_TOLERANCE * np.linalg.norm(s):
        return sigma2
    return None


def expected_qbq_special(
    params: WishartParams, b: BLike, case: Union[SpecialCase, str]
) -> MomentResult:
    """
    Simplified E(QBQ) for special parameter choices.

    Parameters
    ----------
    case : SpecialCase
        ``k_one``: requires k = 1, gives tr(BΣ)·Σ + 2·ΣBΣ.
        ``sigma_scalar_identity``: requires Σ = σ²·I, gives
        σ⁴·[k·tr(B)·I + (k²+k)·B], i.e. σ⁴·[2B + tr(B)·I] when k = 1.

    Raises
    ------
    CaseMismatchError
        If the case precondition does not hold.
    """
    try:
        case = SpecialCase(case)
    except ValueError as exc:
        raise CaseMismatchError(f"unknown special case {case!r}") from exc
    bm = _b_matrix(params, b)

    if case is SpecialCase.K_ONE:
        if params.dof != 1:
            raise CaseMismatchError(f"case k_one requires k = 1, got k = {params.dof}")
        s = np.asarray(params.scale.entries)
        value = np.trace(bm @ s) * s + 2.0 * _sigma_b_sigma(s, bm)
        return _result(value, MomentPath.SPECIAL)

    sigma2 = scalar_variance(params)
    if sigma2 is None:
        raise CaseMismatchError("case sigma_scalar_identity requires Σ = σ²·I")
    k = params.dof
    n = params.dim
    value = sigma2 * sigma2 * (k * np.trace(bm) * np.eye(n) + (k * k + k) * bm)
    return _result(value, MomentPath.SPECIAL)


# -------------------------------------------------------------------- #
# Monte Carlo estimate
# -------------------------------------------------------------------- #
class QbqAccumulator:
    """
    Streaming estimate of E(QBQ) from a single growing sample stream.

    Samples are drawn in chunks of ``chunk`` matrices; chunk sums are added
    to an extended-precision running total and divided at the end. The
    stream is consumed in sample order, so extending to m₁ and then to m₂
    uses the first m₁ samples of the m₂ estimate.
    """

    def __init__(
        self,
        params: WishartParams,
        b: BLike,
        rng: RngLike,
        chunk: Optional[int] = None,
    ) -> None:
        self.params = params
        self.b = _b_matrix(params, b)
        self._gen = as_generator(rng)
        self._chunk = int(chunk or get_settings().sample_chunk)
        self._total = np.zeros((params.dim, params.dim), dtype=np.longdouble)
        self.count = 0

    def extend(self, count: int) -> "QbqAccumulator":
        """Draw ``count`` more samples."""
        if count < 0:
            raise InvalidParameterError("count must be non-negative")
        remaining = int(count)
        while remaining > 0:
            size = min(self._chunk, remaining)
            q = sample_wishart_batch(self.params, size, self._gen)
            self._total += (q @ self.b @ q).sum(axis=0)
            remaining -= size
        self.count += int(count)
        return self

    def extend_to(self, m: int) -> "QbqAccumulator":
        """Grow the sample to exactly ``m`` draws."""
        if m < self.count:
            raise InvalidParameterError(f"cannot shrink sample from {self.count} to {m}")
        return self.extend(m - self.count)

    @property
    def total(self) -> np.ndarray:
        return self._total.copy()

    def estimate(self) -> MomentResult:
        """(1/m)·Σ QⁱBQⁱ over the samples drawn so far."""
        if self.count == 0:
            raise InvalidParameterError("no samples drawn yet")
        mean = (self._total / self.count).astype(float)
        return _result(mean, MomentPath.MONTE_CARLO)


def empirical_qbq(
    params: WishartParams,
    b: BLike,
    m: int,
    rng: RngLike,
    *,
    shards: int = 1,
    max_workers: Optional[int] = None,
) -> MomentResult:
    """
    E_empiric = (1/m)·Σ_{i=1..m} QⁱBQⁱ.

    With ``shards > 1`` the m samples are split over independent substreams
    of ``rng`` (which must then be an `RngSeed`) and evaluated on a thread
    pool. Shard sums are reduced in shard order, so the result depends on
    the shard count but not on the number of threads.
    """
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidParameterError(f"sample count must be >= 1, got {m!r}")
    m = int(m)
    if shards <= 1:
        return QbqAccumulator(params, b, rng).extend(m).estimate()

    if not isinstance(rng, RngSeed):
        raise InvalidParameterError("sharded sampling needs an RngSeed to derive substreams")
    shards = min(int(shards), m)
    sizes = [m // shards + (1 if i < m % shards else 0) for i in range(shards)]
    workers = max_workers or get_settings().max_workers

    def _shard(i: int) -> np.ndarray:
        return QbqAccumulator(params, b, rng.substream(i)).extend(sizes[i]).total

    logger.debug("empirical_qbq: m=%d over %d shards, %d workers", m, shards, workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        totals = list(executor.map(_shard, range(shards)))

    total = np.zeros_like(totals[0])
    for t in totals:
        total += t
    return _result((total / m).astype(float), MomentPath.MONTE_CARLO)
