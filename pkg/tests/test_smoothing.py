import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ossnls.problems import EvalCounter, Problem
from ossnls.smoothing import (
    POOL_SIZE,
    DirectionMode,
    DirectionSampler,
    estimate_jacobians,
    jacobians_along,
    sample_orthonormal,
)

from conftest import affine_problem


def forward_differences(fun, x, h):
    """Textbook forward differences, one column per coordinate."""
    f0 = np.asarray(fun(x), dtype=float)
    cols = []
    for j in range(x.size):
        xp = x.copy()
        xp[j] = xp[j] + h
        cols.append((np.asarray(fun(xp), dtype=float) - f0) / h)
    return np.column_stack(cols)


def test_n1_is_plus_minus_one(rng):
    U = sample_orthonormal(1, rng)
    assert U.shape == (1, 1) and abs(U[0, 0]) == 1.0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 25), st.integers(0, 2**32 - 1))
def test_orthonormal(n, seed):
    U = sample_orthonormal(n, np.random.default_rng(seed))
    assert np.max(np.abs(U.T @ U - np.eye(n))) <= 1e-12


def test_same_seed_same_basis():
    a = sample_orthonormal(5, np.random.default_rng(7))
    b = sample_orthonormal(5, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_first_column_uniform_on_sphere():
    # Haar columns: mean zero and covariance I/n
    rng = np.random.default_rng(3)
    cols = np.array([sample_orthonormal(3, rng)[:, 0] for _ in range(6000)])
    assert np.max(np.abs(cols.mean(axis=0))) < 0.03
    assert np.max(np.abs(np.cov(cols.T) - np.eye(3) / 3)) < 0.03


def test_half_squared_norm_example():
    prob = Problem("q", 2, 1, 0, [0.0, 0.0], lambda x: np.array([0.5 * x @ x]),
                   lambda x: np.zeros(0))
    jac = jacobians_along(prob, np.array([1.0, 2.0]), 0.1, None, EvalCounter())
    assert jac.Jr[0] == pytest.approx([1.05, 2.05], abs=1e-12)


def test_zero_function(rng):
    prob = Problem("z", 3, 2, 1, np.zeros(3), lambda x: np.zeros(2), lambda x: np.zeros(1))
    jac = jacobians_along(prob, np.ones(3), 0.5, sample_orthonormal(3, rng), EvalCounter())
    assert not np.any(jac.Jr) and not np.any(jac.Jc)


@pytest.mark.parametrize("mode", list(DirectionMode))
def test_affine_exact(mode, rng):
    A = rng.standard_normal((4, 6))
    C = rng.standard_normal((2, 6))
    prob = affine_problem(A, rng.standard_normal(4), C, rng.standard_normal(2))
    sampler = DirectionSampler(mode, np.random.default_rng(1))
    for gamma in (1.0, 1e-3):
        jac = estimate_jacobians(prob, rng.standard_normal(6), gamma, sampler, EvalCounter())
        assert np.max(np.abs(jac.Jr - A)) <= 1e-10 * (1 + np.linalg.norm(A))
        assert np.max(np.abs(jac.Jc - C)) <= 1e-10 * (1 + np.linalg.norm(C))


def test_coordinate_mode_bitwise_forward_differences(rng):
    r = lambda x: np.array([np.sin(x[0]) * x[1], np.exp(x[2]) - x[0] ** 3, x @ x])
    c = lambda x: np.array([x[0] * x[1] * x[2] - 1.0])
    prob = Problem("fd", 3, 3, 1, np.zeros(3), r, c)
    x = rng.standard_normal(3)
    jac = estimate_jacobians(prob, x, 1e-4, DirectionSampler("fd", rng), EvalCounter())
    assert np.array_equal(jac.Jr, forward_differences(r, x, 1e-4))
    assert np.array_equal(jac.Jc, forward_differences(c, x, 1e-4))


def test_cost_accounting(rng):
    prob = affine_problem(np.eye(3), np.zeros(3), np.ones((1, 3)), np.zeros(1))
    sampler = DirectionSampler("oss-v1", rng)
    ctr = EvalCounter()
    estimate_jacobians(prob, np.zeros(3), 0.1, sampler, ctr)
    assert (ctr.r_calls, ctr.c_calls) == (4, 4)
    ctr = EvalCounter()
    estimate_jacobians(prob, np.zeros(3), 0.1, sampler, ctr, np.zeros(3), np.zeros(1))
    assert (ctr.r_calls, ctr.c_calls) == (3, 3)


def test_unconstrained_costs_no_constraint_calls(rng):
    prob = affine_problem(np.eye(2), np.zeros(2))
    ctr = EvalCounter()
    estimate_jacobians(prob, np.zeros(2), 0.1, DirectionSampler("fd", rng), ctr)
    assert (ctr.r_calls, ctr.c_calls) == (3, 0)


def test_pool_has_ten_fixed_bases():
    sampler = DirectionSampler("oss-v2", np.random.default_rng(0))
    pool = sampler.pool(4)
    assert len(pool) == POOL_SIZE == 10
    draws = [sampler.draw(4) for _ in range(60)]
    assert all(any(d is p for p in pool) for d in draws)
    assert sampler.pool(4) is pool


def test_gamma_must_be_positive():
    prob = affine_problem(np.eye(2), np.zeros(2))
    with pytest.raises(ValueError):
        jacobians_along(prob, np.zeros(2), 0.0, None, EvalCounter())


def test_mode_parse():
    assert DirectionMode.parse("oss-v2") is DirectionMode.OSS_POOL
    with pytest.raises(ValueError):
        DirectionMode.parse("central")
