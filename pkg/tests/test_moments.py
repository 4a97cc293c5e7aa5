# tests/test_moments.py

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadwish.config import override_settings
from quadwish.errors import (
    CaseMismatchError,
    InvalidDimensionError,
    InvalidParameterError,
    SizeCapError,
)
from quadwish.matgen import SpdMatrix, SymmetricMatrix, random_spd, random_symmetric
from quadwish.moments import (
    MomentPath,
    QbqAccumulator,
    SpecialCase,
    build_commutation,
    empirical_qbq,
    expected_kron,
    expected_qbq,
    expected_qbq_eigen,
    expected_qbq_kronecker,
    expected_qbq_special,
    mat,
    relative_error,
    second_moment,
    vec,
)
from quadwish.rng import RngSeed
from quadwish.wishart import WishartParams, sample_wishart

CLOSED_FORMS = [expected_qbq, expected_qbq_eigen, expected_qbq_kronecker]


def _instance(seed: RngSeed, n: int, k: int):
    return WishartParams(random_spd(n, seed.substream(1)), k), random_symmetric(n, seed.substream(0))


# ------------------------------------------------------------------ #
# vec / mat / commutation
# ------------------------------------------------------------------ #
def test_vec_stacks_columns():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(vec(m), [1.0, 3.0, 2.0, 4.0])
    assert np.array_equal(mat(vec(m), 2), m)
    with pytest.raises(InvalidDimensionError):
        mat(np.arange(5.0), 2)


def test_commutation_n2():
    expected = np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
        ],
        dtype=float,
    )
    assert np.array_equal(build_commutation(2).entries, expected)
    a, b, c, d = 1.0, 2.0, 3.0, 4.0
    assert np.array_equal(build_commutation(2).entries @ [a, b, c, d], [a, c, b, d])


def test_commutation_transposes(seed):
    m = seed.generator().standard_normal((5, 5))
    k = build_commutation(5)
    assert np.array_equal(k.entries @ vec(m), vec(m.T))
    assert np.array_equal(k.apply(vec(m)), vec(m.T))
    assert np.array_equal(k.entries @ k.entries, np.eye(25))


def test_commutation_n1():
    assert np.array_equal(build_commutation(1).entries, [[1.0]])
    with pytest.raises(InvalidDimensionError):
        build_commutation(0)


# ------------------------------------------------------------------ #
# Scalar anchors
# ------------------------------------------------------------------ #
@pytest.mark.parametrize("k", [1, 3, 7, 20])
def test_chi_square_anchor(k):
    params = WishartParams(SpdMatrix.scaled_identity(1), k)
    b = SymmetricMatrix(np.array([[1.0]]))
    for fn in CLOSED_FORMS:
        assert fn(params, b).value[0, 0] == pytest.approx(k * k + 2 * k, rel=1e-12)
    assert second_moment(params).value[0, 0] == pytest.approx(k * k + 2 * k, rel=1e-12)


def test_chi_square_anchor_k3_is_15():
    params = WishartParams(SpdMatrix.scaled_identity(1), 3)
    assert expected_qbq(params, np.eye(1)).value[0, 0] == 15.0


def test_diagonal_hand_evaluation():
    params = WishartParams(SpdMatrix(np.diag([2.0, 3.0])), 1)
    b = np.eye(2)
    expected = np.diag([18.0, 33.0])
    for fn in CLOSED_FORMS:
        np.testing.assert_allclose(fn(params, b).value, expected, rtol=1e-14)
    np.testing.assert_allclose(
        expected_qbq_special(params, b, SpecialCase.K_ONE).value, expected, rtol=1e-14
    )


def test_second_moment_scalar():
    params = WishartParams(SpdMatrix(np.array([[2.0]])), 3)
    assert second_moment(params).value[0, 0] == pytest.approx(60.0, rel=1e-14)


def test_second_moment_matches_identity_b(seed):
    params = WishartParams(random_spd(4, seed), 2)
    assert relative_error(expected_qbq(params, np.eye(4)), second_moment(params), ord="fro") <= 1e-12


# ------------------------------------------------------------------ #
# Path equivalence and structure
# ------------------------------------------------------------------ #
@given(
    n=st.integers(min_value=1, max_value=10),
    k=st.integers(min_value=1, max_value=20),
    s=st.integers(min_value=0, max_value=2**32),
)
def test_closed_forms_agree(n, k, s):
    params, b = _instance(RngSeed(s), n, k)
    values = [fn(params, b).value for fn in CLOSED_FORMS]
    for i in range(3):
        for j in range(i + 1, 3):
            assert relative_error(values[i], values[j], ord="fro") <= 1e-10


def test_results_are_symmetric_and_tagged(params, b_sym):
    for fn, path in zip(CLOSED_FORMS, [MomentPath.ALGEBRAIC, MomentPath.EIGEN, MomentPath.KRONECKER]):
        res = fn(params, b_sym)
        assert res.path is path
        assert np.array_equal(res.value, res.value.T)
        assert res.dim == 4


def test_linear_in_b(params, seed):
    b1 = random_symmetric(4, seed.substream(5)).entries
    b2 = random_symmetric(4, seed.substream(6)).entries
    alpha, beta = 1.7, -0.4
    lhs = expected_qbq(params, alpha * b1 + beta * b2).value
    rhs = alpha * expected_qbq(params, b1).value + beta * expected_qbq(params, b2).value
    assert relative_error(rhs, lhs, ord="fro") <= 1e-12


def test_congruence(params, b_sym, seed):
    c = seed.substream(7).generator().standard_normal((4, 4))
    s = params.scale.entries
    moved = WishartParams(SpdMatrix.from_array(c.T @ s @ c), params.dof)

    lhs = expected_qbq(moved, b_sym).value
    rhs = c.T @ expected_qbq(params, SymmetricMatrix.from_array(c @ b_sym.entries @ c.T)).value @ c
    assert relative_error(rhs, lhs, ord="fro") <= 1e-10


def test_kron_moment_is_symmetric(params):
    eqq = expected_kron(params)
    assert eqq.shape == (16, 16)
    np.testing.assert_allclose(eqq, eqq.T, rtol=0, atol=1e-12 * np.abs(eqq).max())


def test_kronecker_size_cap(seed):
    override_settings(kronecker_max_dim=3)
    params, b = _instance(seed, 4, 2)
    with pytest.raises(SizeCapError):
        expected_qbq_kronecker(params, b)
    expected_qbq(params, b)


def test_b_validation(params):
    with pytest.raises(InvalidParameterError):
        expected_qbq(params, np.eye(3))
    with pytest.raises(InvalidParameterError):
        expected_qbq(params, np.triu(np.ones((4, 4))))
    with pytest.raises(InvalidDimensionError):
        expected_qbq(params, np.ones((4, 3)))


# ------------------------------------------------------------------ #
# Special cases
# ------------------------------------------------------------------ #
def test_k_one_matches_general(seed, b_sym):
    params = WishartParams(random_spd(4, seed), 1)
    special = expected_qbq_special(params, b_sym, "k_one")
    assert special.path is MomentPath.SPECIAL
    assert relative_error(expected_qbq(params, b_sym), special, ord="fro") <= 1e-12


@pytest.mark.parametrize("k", [1, 4])
def test_scalar_identity_matches_general(k, b_sym):
    params = WishartParams(SpdMatrix.scaled_identity(4, 2.5), k)
    special = expected_qbq_special(params, b_sym, SpecialCase.SIGMA_SCALAR_IDENTITY)
    assert relative_error(expected_qbq(params, b_sym), special, ord="fro") <= 1e-12


def test_scalar_identity_k1_form(b_sym):
    params = WishartParams(SpdMatrix.scaled_identity(4, 2.0), 1)
    b = b_sym.entries
    expected = 4.0 * (2 * b + np.trace(b) * np.eye(4))
    np.testing.assert_allclose(
        expected_qbq_special(params, b_sym, "sigma_scalar_identity").value, expected, rtol=1e-12
    )


def test_special_case_mismatch(params, b_sym):
    with pytest.raises(CaseMismatchError):
        expected_qbq_special(params, b_sym, SpecialCase.K_ONE)
    with pytest.raises(CaseMismatchError):
        expected_qbq_special(params, b_sym, SpecialCase.SIGMA_SCALAR_IDENTITY)
    with pytest.raises(CaseMismatchError):
        expected_qbq_special(params, b_sym, "no_such_case")


# ------------------------------------------------------------------ #
# Monte Carlo
# ------------------------------------------------------------------ #
def test_empirical_rejects_bad_m(params, b_sym, seed):
    with pytest.raises(InvalidParameterError):
        empirical_qbq(params, b_sym, 0, seed)


def test_single_sample_estimate(params, b_sym, seed):
    q = sample_wishart(params, seed).q
    est = empirical_qbq(params, b_sym, 1, seed)
    np.testing.assert_allclose(est.value, q @ b_sym.entries @ q, rtol=1e-12, atol=1e-12 * np.abs(est.value).max())


def test_empirical_is_deterministic(params, b_sym, seed):
    a = empirical_qbq(params, b_sym, 500, seed)
    b = empirical_qbq(params, b_sym, 500, seed)
    assert a.path is MomentPath.MONTE_CARLO
    assert np.array_equal(a.value, b.value)


def test_nested_accumulator_matches_fresh_estimate(params, b_sym, seed):
    acc = QbqAccumulator(params, b_sym, seed, chunk=64)
    acc.extend_to(10)
    acc.extend_to(300)
    fresh = empirical_qbq(params, b_sym, 300, seed)
    np.testing.assert_allclose(acc.estimate().value, fresh.value, rtol=1e-10)
    assert acc.count == 300
    with pytest.raises(InvalidParameterError):
        acc.extend_to(100)


def test_accumulator_requires_samples(params, b_sym, seed):
    with pytest.raises(InvalidParameterError):
        QbqAccumulator(params, b_sym, seed).estimate()


def test_sharded_result_independent_of_workers(params, b_sym, seed):
    one = empirical_qbq(params, b_sym, 1000, seed, shards=4, max_workers=1)
    many = empirical_qbq(params, b_sym, 1000, seed, shards=4, max_workers=4)
    assert np.array_equal(one.value, many.value)


def test_sharding_needs_seed(params, b_sym, seed):
    with pytest.raises(InvalidParameterError):
        empirical_qbq(params, b_sym, 100, seed.generator(), shards=2)


@pytest.mark.slow
def test_monte_carlo_error_band():
    params, b = _instance(RngSeed(31), 10, 3)
    err = relative_error(expected_qbq(params, b), empirical_qbq(params, b, 100_000, RngSeed(32)), ord=2)
    assert 1e-3 <= err <= 1e-1


@pytest.mark.slow
def test_monte_carlo_rate():
    params, b = _instance(RngSeed(41), 10, 3)
    exact = expected_qbq(params, b)
    grid = [10, 100, 1_000, 10_000, 100_000]
    errors = np.zeros(len(grid))
    for r in range(10):
        acc = QbqAccumulator(params, b, RngSeed(42, stream_id=r))
        for i, m in enumerate(grid):
            errors[i] += relative_error(exact, acc.extend_to(m).estimate(), ord=2) / 10
    slope = np.polyfit(np.log10(grid), np.log10(errors), 1)[0]
    assert -0.65 <= slope <= -0.35


@pytest.mark.slow
def test_kronecker_against_monte_carlo():
    params, b = _instance(RngSeed(51), 3, 5)
    exact = expected_qbq_kronecker(params, b)
    assert relative_error(exact, empirical_qbq(params, b, 1_000_000, RngSeed(52)), ord="fro") <= 0.02


@pytest.mark.long
def test_small_instance_against_ten_million_samples():
    params, b = _instance(RngSeed(61), 2, 2)
    approx = empirical_qbq(params, b, 10_000_000, RngSeed(62), shards=8)
    assert relative_error(expected_qbq(params, b), approx, ord="fro") <= 0.01


@pytest.mark.long
def test_million_sample_error():
    params, b = _instance(RngSeed(71), 10, 3)
    approx = empirical_qbq(params, b, 1_000_000, RngSeed(72), shards=8)
    assert 5e-4 <= relative_error(expected_qbq_eigen(params, b), approx, ord=2) <= 2e-2
