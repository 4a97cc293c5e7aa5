# tests/test_quadmodel.py

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadwish.errors import InvalidDimensionError, InvalidParameterError
from quadwish.matgen import SpdMatrix, random_constrained_psd, random_spd
from quadwish.moments import relative_error
from quadwish.quadmodel import (
    QuadraticModel,
    StochasticDraw,
    noise,
    noise_covariance,
    sample_draws,
    sample_function,
    stochastic_gradient,
    true_gradient,
)
from quadwish.rng import RngSeed

seeds = st.integers(min_value=0, max_value=2**32)


def make_model(seed: RngSeed, n: int) -> QuadraticModel:
    scale = random_spd(n, seed.substream(0))
    a = random_constrained_psd(n, 1.0, 5.0, seed.substream(1)) if n > 1 else np.array([[0.7]])
    return QuadraticModel(np.asarray(a), scale)


@pytest.fixture
def model(seed):
    return make_model(seed, 3)


def empirical_noise(model: QuadraticModel, x: np.ndarray, m: int, seed: RngSeed) -> np.ndarray:
    a, b = sample_draws(model, m, seed)
    return a * (a @ x)[:, None] + b - model.cached_hessian @ x


# ------------------------------------------------------------------ #
# Model
# ------------------------------------------------------------------ #
def test_hessian(model):
    a, s = model.a_mat, model.scale.entries
    assert relative_error(a @ s @ a.T, model.cached_hessian, ord="fro") <= 1e-12
    assert np.array_equal(model.cached_hessian, model.cached_hessian.T)


def test_rejects_singular_a():
    with pytest.raises(InvalidParameterError):
        QuadraticModel(np.array([[1.0, 1.0], [1.0, 1.0]]), SpdMatrix.scaled_identity(2))


def test_rejects_dimension_mismatch():
    with pytest.raises(InvalidParameterError):
        QuadraticModel(np.eye(3), SpdMatrix.scaled_identity(2))
    with pytest.raises(InvalidDimensionError):
        QuadraticModel(np.ones((2, 3)), SpdMatrix.scaled_identity(2))


def test_check_point(model):
    with pytest.raises(InvalidParameterError):
        model.objective(np.zeros(4))


def test_objective_at_optimum(model):
    assert model.objective(np.zeros(3)) == 0.0
    assert np.array_equal(true_gradient(model, np.zeros(3)), np.zeros(3))


# ------------------------------------------------------------------ #
# Draws
# ------------------------------------------------------------------ #
def test_batched_draws_match_single_draws(model, seed):
    gen = seed.generator()
    singles = [sample_function(model, gen) for _ in range(6)]
    a_blk, b_blk = sample_draws(model, 6, seed)
    np.testing.assert_allclose(a_blk, [d.a_vec for d in singles], rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(b_blk, [d.b_vec for d in singles], rtol=1e-12, atol=1e-14)


def test_draw_shapes_validated():
    with pytest.raises(InvalidDimensionError):
        StochasticDraw(np.zeros(3), np.zeros(2))


def test_a_and_b_uncorrelated():
    model = QuadraticModel(np.eye(1), SpdMatrix.scaled_identity(1))
    a, b = sample_draws(model, 1_000_000, RngSeed(9))
    assert abs(np.corrcoef(a[:, 0], b[:, 0])[0, 1]) <= 0.01


def test_a_covariance(seed):
    model = make_model(seed, 4)
    a, _ = sample_draws(model, 100_000, RngSeed(10))
    assert relative_error(model.cached_hessian, np.cov(a, rowvar=False), ord="fro") <= 0.03


# ------------------------------------------------------------------ #
# Gradients
# ------------------------------------------------------------------ #
@given(s=seeds, n=st.integers(min_value=1, max_value=6))
def test_gradient_matches_finite_differences(s, n):
    seed = RngSeed(s)
    model = make_model(seed, n)
    draw = sample_function(model, seed.substream(2))
    x = seed.substream(3).generator().standard_normal(n)
    grad = stochastic_gradient(model, draw, x)
    h = 1e-5
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fd = (model.stochastic_value(draw, x + e) - model.stochastic_value(draw, x - e)) / (2 * h)
        assert abs(fd - grad[i]) <= 1e-6


def test_gradient_is_unbiased(model, seed):
    x = np.array([0.3, -1.2, 0.5])
    a, b = sample_draws(model, 100_000, seed.substream(4))
    grads = a * (a @ x)[:, None] + b
    stderr = grads.std(axis=0, ddof=1) / np.sqrt(len(grads))
    assert np.all(np.abs(grads.mean(axis=0) - true_gradient(model, x)) <= 4 * stderr)


def test_noise_is_gradient_difference(model, seed):
    draw = sample_function(model, seed)
    x = np.array([1.0, 2.0, -1.0])
    np.testing.assert_allclose(
        noise(model, draw, x), stochastic_gradient(model, draw, x) - true_gradient(model, x)
    )


def test_noise_mean_vanishes(model, seed):
    x = np.array([0.5, 0.5, -0.25])
    m = 100_000
    xi = empirical_noise(model, x, m, seed.substream(5))
    bound = 4 * np.sqrt(np.trace(noise_covariance(model, x).cov) / m)
    assert np.linalg.norm(xi.mean(axis=0)) <= bound


# ------------------------------------------------------------------ #
# Noise covariance
# ------------------------------------------------------------------ #
def test_covariance_at_optimum_is_scale(model):
    moments = noise_covariance(model, np.zeros(3))
    assert np.max(np.abs(moments.cov - model.scale.entries)) <= 1e-14 * np.abs(model.scale.entries).max()
    assert np.array_equal(moments.mean, np.zeros(3))


def test_covariance_identity_scale_closed_form(seed):
    a = np.asarray(random_constrained_psd(4, 1.0, 5.0, seed))
    model = QuadraticModel(a, SpdMatrix.scaled_identity(4))
    x = seed.substream(1).generator().standard_normal(4)
    y = a.T @ x
    aat = a @ a.T
    expected = aat @ np.outer(x, x) @ aat + (y @ y) * aat + np.eye(4)
    assert relative_error(expected, noise_covariance(model, x).cov, ord="fro") <= 1e-12


@given(s=seeds, n=st.integers(min_value=1, max_value=6))
def test_covariance_dominates_scale(s, n):
    seed = RngSeed(s)
    model = make_model(seed, n)
    x = 3.0 * seed.substream(4).generator().standard_normal(n)
    cov = noise_covariance(model, x).cov
    assert np.array_equal(cov, cov.T)
    eig = np.linalg.eigvalsh(cov - model.scale.entries)
    assert eig[0] >= -1e-10 * np.linalg.norm(cov, 2)


@given(s=seeds, n=st.integers(min_value=1, max_value=6))
def test_covariance_is_even_in_x(s, n):
    seed = RngSeed(s)
    model = make_model(seed, n)
    x = seed.substream(4).generator().standard_normal(n)
    assert np.array_equal(noise_covariance(model, x).cov, noise_covariance(model, -x).cov)


@pytest.mark.slow
def test_covariance_matches_empirical():
    seed = RngSeed(12)
    model = make_model(seed, 3)
    x = seed.substream(6).generator().standard_normal(3)
    xi = empirical_noise(model, x, 1_000_000, seed.substream(7))
    exact = noise_covariance(model, x).cov
    assert relative_error(exact, np.cov(xi, rowvar=False), ord="fro") <= 0.02
