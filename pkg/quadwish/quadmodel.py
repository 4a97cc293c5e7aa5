# quadwish/quadmodel.py

"""
Random quadratic functions and their gradient noise.

With r^ℓ, b^ℓ ~ N_n(0, Σ) independent and a^ℓ = A·r^ℓ, each sample is

    f_ℓ(x) = ½((a^ℓ)ᵀx)² + (b^ℓ)ᵀx,

whose mean is f(x) = ½·xᵀAΣAᵀx. The gradient noise ξ^ℓ = ∇f_ℓ(x) - ∇f(x)
has zero mean and covariance

    Cov(ξ) = A·E(QBQ)·Aᵀ + Σ - AΣBΣAᵀ,   B = AᵀxxᵀA,  Q ~ W_n(Σ, 1),

evaluated here through the k = 1 closed form of E(QBQ).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from quadwish.errors import InvalidDimensionError, InvalidParameterError
from quadwish.matgen import SpdMatrix, SymmetricMatrix, symmetrize
from quadwish.moments import SpecialCase, expected_qbq_special
from quadwish.rng import RngLike, as_generator
from quadwish.wishart import WishartParams, sample_gaussian_vector

SINGULARITY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """
    Fixed A (det(A) ≠ 0) and scale Σ of the random quadratic objective.

    ``cached_hessian`` is AΣAᵀ, the Hessian of the limit objective f.
    """

    a_mat: np.ndarray
    scale: SpdMatrix
    cached_hessian: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        a = np.array(np.asarray(self.a_mat, dtype=float), copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidDimensionError(f"A must be square, got shape {a.shape}")
        if a.shape[0] != self.scale.dim:
            raise InvalidParameterError(
                f"dimension mismatch: A is {a.shape[0]}×{a.shape[0]}, Σ is {self.scale.dim}×{self.scale.dim}"
            )
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[-1] <= SINGULARITY_TOLERANCE * sv[0]:
            raise InvalidParameterError(
                f"A must be invertible (singular values {sv[0]:.3e} .. {sv[-1]:.3e})"
            )
        a.setflags(write=False)
        hessian = symmetrize(a @ np.asarray(self.scale.entries) @ a.T)
        hessian.setflags(write=False)
        object.__setattr__(self, "a_mat", a)
        object.__setattr__(self, "cached_hessian", hessian)

    @property
    def dim(self) -> int:
        return self.scale.dim

    def check_point(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InvalidParameterError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        return x

    def objective(self, x: np.ndarray) -> float:
        """f(x) = ½·xᵀAΣAᵀx."""
        x = self.check_point(x)
        return 0.5 * float(x @ self.cached_hessian @ x)

    def stochastic_value(self, draw: "StochasticDraw", x: np.ndarray) -> float:
        """f_ℓ(x) = ½((a^ℓ)ᵀx)² + (b^ℓ)ᵀx."""
        x = self.check_point(x)
        return 0.5 * float(draw.a_vec @ x) ** 2 + float(draw.b_vec @ x)


@dataclass(frozen=True, eq=False)
class StochasticDraw:
    """One sampled function: a^ℓ = A·r^ℓ and b^ℓ."""

    a_vec: np.ndarray
    b_vec: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.a_vec, dtype=float)
        b = np.asarray(self.b_vec, dtype=float)
        if a.ndim != 1 or a.shape != b.shape:
            raise InvalidDimensionError(f"a and b must be vectors of equal length, got {a.shape}, {b.shape}")
        object.__setattr__(self, "a_vec", a)
        object.__setattr__(self, "b_vec", b)


@dataclass(frozen=True, eq=False)
class NoiseMoments:
    """Exact mean (always zero) and covariance of the gradient noise at a point."""

    mean: np.ndarray
    cov: np.ndarray


# -------------------------------------------------------------------- #
# Sampling
# -------------------------------------------------------------------- #
def sample_draws(model: QuadraticModel, size: int, rng: RngLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    ``size`` draws at once as ``(a_block, b_block)``, each of shape (size, n).

    Row i consumes the stream exactly like the i-th call of `sample_function`
    on a shared generator: r then b.
    """
    gen = as_generator(rng)
    n = model.dim
    z = gen.standard_normal((int(size), 2, n)) @ model.scale.cholesky.T
    return z[:, 0, :] @ model.a_mat.T, z[:, 1, :].copy()


def sample_function(model: QuadraticModel, rng: RngLike) -> StochasticDraw:
    """Draw r^ℓ, b^ℓ ~ N_n(0, Σ) independently and return (A·r^ℓ, b^ℓ)."""
    gen = as_generator(rng)
    rb = sample_gaussian_vector(model.scale, gen, size=2)
    return StochasticDraw(a_vec=model.a_mat @ rb[0], b_vec=rb[1])


# -------------------------------------------------------------------- #
# Gradients & noise
# -------------------------------------------------------------------- #
def _check_draw(model: QuadraticModel, draw: StochasticDraw) -> None:
    if draw.a_vec.shape != (model.dim,):
        raise InvalidParameterError(
            f"draw has dimension {draw.a_vec.shape[0]}, model has {model.dim}"
        )


def stochastic_gradient(model: QuadraticModel, draw: StochasticDraw, x: np.ndarray) -> np.ndarray:
    """∇f_ℓ(x) = a^ℓ·((a^ℓ)ᵀx) + b^ℓ."""
    x = model.check_point(x)
    _check_draw(model, draw)
    return draw.a_vec * float(draw.a_vec @ x) + draw.b_vec


def true_gradient(model: QuadraticModel, x: np.ndarray) -> np.ndarray:
    """∇f(x) = AΣAᵀ·x."""
    x = model.check_point(x)
    return model.cached_hessian @ x


def noise(model: QuadraticModel, draw: StochasticDraw, x: np.ndarray) -> np.ndarray:
    """ξ^ℓ = ∇f_ℓ(x) - ∇f(x)."""
    return stochastic_gradient(model, draw, x) - true_gradient(model, x)


def noise_covariance(model: QuadraticModel, x: np.ndarray) -> NoiseMoments:
    """
    Exact moments of ξ at x.

    Builds B = AᵀxxᵀA explicitly and evaluates
    Cov(ξ) = A·E(QBQ)·Aᵀ + Σ - AΣBΣAᵀ with E(QBQ) = tr(BΣ)Σ + 2ΣBΣ.
    """
    x = model.check_point(x)
    a = model.a_mat
    s = np.asarray(model.scale.entries)
    y = a.T @ x
    b = SymmetricMatrix(np.outer(y, y))

    e_qbq = expected_qbq_special(WishartParams(model.scale, 1), b, SpecialCase.K_ONE).value
    cov = a @ e_qbq @ a.T + s - a @ s @ b.entries @ s @ a.T
    cov = symmetrize(cov)
    cov.setflags(write=False)
    return NoiseMoments(mean=np.zeros(model.dim), cov=cov)
