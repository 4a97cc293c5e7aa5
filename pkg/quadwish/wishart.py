# quadwish/wishart.py

"""
Sampling from the Wishart distribution W_n(Σ, k).

A draw is Q = Σ_{ℓ=1..k} r^ℓ (r^ℓ)ᵀ with r^ℓ ~ N_n(0, Σ) i.i.d.
The Gaussian factor is the cached Cholesky factor of Σ; nothing here
depends on which factor is used, only on L·Lᵀ = Σ.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from quadwish.errors import InvalidDimensionError, InvalidParameterError
from quadwish.log import get_logger
from quadwish.matgen import SpdMatrix
from quadwish.rng import RngLike, as_generator

logger = get_logger()

PSD_TOLERANCE = 1e-10
RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class WishartParams:
    """Scale matrix Σ and degrees of freedom k of W_n(Σ, k)."""

    scale: SpdMatrix
    dof: int

    def __post_init__(self) -> None:
        if not isinstance(self.scale, SpdMatrix):
            raise InvalidParameterError("scale must be an SpdMatrix")
        if isinstance(self.dof, bool) or not isinstance(self.dof, (int, np.integer)) or self.dof < 1:
            raise InvalidParameterError(f"degrees of freedom must be an integer >= 1, got {self.dof!r}")
        object.__setattr__(self, "dof", int(self.dof))

    @property
    def dim(self) -> int:
        return self.scale.dim

    def mean(self) -> np.ndarray:
        """E(Q) = k·Σ."""
        return self.dof * np.asarray(self.scale.entries)


@dataclass(frozen=True, eq=False)
class WishartSample:
    """
    One Wishart draw.

    Attributes
    ----------
    q : ndarray
        The n×n matrix Σ r^ℓ (r^ℓ)ᵀ.
    draws : ndarray or None
        The k×n Gaussian vectors, kept only when requested.
    """

    q: np.ndarray
    draws: Optional[np.ndarray] = None

    def is_psd(self, tol: float = PSD_TOLERANCE) -> bool:
        """All eigenvalues >= -tol·‖q‖₂."""
        eig = np.linalg.eigvalsh(self.q)
        scale = max(abs(eig[0]), abs(eig[-1]))
        return bool(eig[0] >= -tol * scale)


def _outer_sum(r: np.ndarray) -> np.ndarray:
    # Σ_ℓ r_ℓ r_ℓᵀ; einsum keeps entry (i, j) and (j, i) bitwise equal.
    return np.einsum("...li,...lj->...ij", r, r)


def sample_gaussian_vector(scale: SpdMatrix, rng: RngLike, size: Optional[int] = None) -> np.ndarray:
    """
    Draw r ~ N_n(0, Σ) as L·z with z standard normal.

    With ``size`` given, returns a ``(size, n)`` array of independent draws.
    """
    gen = as_generator(rng)
    n = scale.dim
    shape = (n,) if size is None else (int(size), n)
    z = gen.standard_normal(shape)
    return z @ scale.cholesky.T


def sample_wishart(params: WishartParams, rng: RngLike, keep_draws: bool = False) -> WishartSample:
    """One draw Q ~ W_n(Σ, k), optionally retaining the underlying r^ℓ."""
    r = sample_gaussian_vector(params.scale, rng, size=params.dof)
    return WishartSample(q=_outer_sum(r), draws=r if keep_draws else None)


def sample_wishart_batch(params: WishartParams, size: int, rng: RngLike) -> np.ndarray:
    """
    ``size`` independent draws stacked into a ``(size, n, n)`` array.

    Consumes the stream in the same order as ``size`` calls to
    `sample_wishart` on a shared generator.
    """
    if size < 0:
        raise InvalidParameterError("size must be non-negative")
    gen = as_generator(rng)
    n, k = params.dim, params.dof
    z = gen.standard_normal((int(size), k, n))
    r = z @ params.scale.cholesky.T
    return _outer_sum(r)


def transform_sample(sample: WishartSample, c: np.ndarray) -> np.ndarray:
    """
    Cᵀ·Q·C, which is W_m(CᵀΣC, k) distributed for full column rank C.

    Raises
    ------
    InvalidParameterError
        If C is rank deficient (smallest singular value <= 1e-10·largest).
    """
    c = np.asarray(c, dtype=float)
    if c.ndim == 1:
        c = c.reshape(-1, 1)
    n = sample.q.shape[0]
    if c.ndim != 2 or c.shape[0] != n:
        raise InvalidDimensionError(f"C must have {n} rows, got shape {c.shape}")
    if c.shape[1] > n:
        raise InvalidParameterError("C has more columns than rows and cannot have full column rank")
    sv = np.linalg.svd(c, compute_uv=False)
    if sv[-1] <= RANK_TOLERANCE * sv[0]:
        raise InvalidParameterError(
            f"C is rank deficient (singular values {sv[0]:.3e} .. {sv[-1]:.3e})"
        )
    return c.T @ sample.q @ c
