import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vhandover import estimator, fading, solver
from vhandover.errors import ConvergenceError, DimensionError


def jacobi_eigenvalues(s, sweeps=100):
    """Classical cyclic Jacobi for a symmetric matrix."""
    a = np.array(s, dtype=float)
    n = a.shape[0]
    scale = max(1.0, np.abs(a).max())
    for _ in range(sweeps):
        off = np.abs(a - np.diag(np.diag(a))).max()
        if off < 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-18 * scale:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta**2 + 1))
                c = 1 / math.sqrt(t * t + 1)
                r = np.eye(n)
                r[p, p] = r[q, q] = c
                r[p, q], r[q, p] = t * c, -t * c
                a = r.T @ a @ r
    return np.sort(np.diag(a))[::-1]


def check_factors(a, f):
    r = min(a.shape)
    assert f.u.shape == (a.shape[0], r) and f.v.shape == (a.shape[1], r)
    assert np.all(np.diff(f.sigma) <= 0) and np.all(f.sigma >= 0)
    np.testing.assert_allclose(f.u.T @ f.u, np.eye(r), atol=1e-10)
    np.testing.assert_allclose(f.v.T @ f.v, np.eye(r), atol=1e-10)
    assert np.abs(f.reconstruct() - a).max() <= 1e-9 * (1 + np.abs(a).max())


def test_svd_identity_and_diag():
    np.testing.assert_allclose(solver.svd(np.eye(3)).sigma, [1, 1, 1])
    np.testing.assert_allclose(solver.svd(np.diag([3.0, 2.0])).sigma, [3, 2])
    np.testing.assert_allclose(solver.svd(np.diag([2.0, 3.0])).sigma, [3, 2])


def test_svd_random_reconstruction():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.standard_normal((5, 4))
        f = solver.svd(a)
        assert np.linalg.norm(f.reconstruct() - a) <= 1e-9
        check_factors(a, f)


@pytest.mark.parametrize("shape", [(1, 1), (1, 4), (4, 1), (3, 6), (6, 3), (7, 7)])
def test_svd_shapes(shape):
    a = np.random.default_rng(sum(shape)).standard_normal(shape)
    check_factors(a, solver.svd(a))


def test_svd_rank_deficient_keeps_orthonormal_u():
    a = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
    f = solver.svd(a)
    check_factors(a, f)
    assert f.rank() == 1
    z = np.zeros((3, 3))
    f = solver.svd(z)
    check_factors(z, f)
    assert f.rank() == 0


def test_svd_matches_jacobi_eigen_oracle():
    rng = np.random.default_rng(42)
    for _ in range(10):
        a = rng.standard_normal((4, 4))
        oracle = np.sqrt(np.clip(jacobi_eigenvalues(a.T @ a), 0, None))
        np.testing.assert_allclose(solver.svd(a).sigma, oracle, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)))
def test_svd_invariants_property(a):
    check_factors(a, solver.svd(a))


def test_svd_rejects_bad_input():
    with pytest.raises(DimensionError):
        solver.svd(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        solver.svd([[1.0, math.nan]])


def test_svd_iteration_cap(monkeypatch):
    with pytest.raises(ConvergenceError):
        solver._jacobi_tall(np.random.default_rng(1).standard_normal((5, 4)), 1)


def test_pinv_identity():
    b = np.array([3.0, -1.0, 2.5])
    np.testing.assert_allclose(solver.pinv_solve(np.eye(3), b), b)


def test_pinv_rank_deficient_min_norm():
    x = solver.pinv_solve([[1.0, 1.0], [1.0, 1.0]], [2.0, 2.0])
    np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-10)


def test_pinv_matches_normal_equations():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((6, 2))
    b = rng.standard_normal(6)
    oracle = np.linalg.solve(a.T @ a, a.T @ b)
    np.testing.assert_allclose(solver.pinv_solve(a, b), oracle, atol=1e-8)


def test_pinv_multiple_columns():
    rng = np.random.default_rng(6)
    a = rng.standard_normal((5, 3))
    b = rng.standard_normal((5, 2))
    x = solver.pinv_solve(a, b)
    assert x.shape == (3, 2)
    for j in range(2):
        np.testing.assert_allclose(x[:, j], solver.pinv_solve(a, b[:, j]))


def test_pinv_dimension_mismatch():
    with pytest.raises(DimensionError):
        solver.pinv_solve(np.eye(3), [1.0, 2.0])


def test_pinv_least_squares_optimality():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((8, 3))
    b = rng.standard_normal(8)
    x = solver.pinv_solve(a, b)
    r = np.linalg.norm(a @ x - b)
    for _ in range(100):
        xp = x + 1e-3 * rng.standard_normal(3)
        assert r <= np.linalg.norm(a @ xp - b)


def test_pinv_minimal_norm_among_equal_residual():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 5))  # rank 2
    b = rng.standard_normal(4)
    x = solver.pinv_solve(a, b)
    f = solver.svd(a)
    null = f.v[:, f.rank():]
    for _ in range(50):
        xn = x + null @ rng.standard_normal(null.shape[1])
        assert np.linalg.norm(a @ xn - b) == pytest.approx(np.linalg.norm(a @ x - b), abs=1e-9)
        assert np.linalg.norm(x) <= np.linalg.norm(xn) + 1e-12


def test_stationarity_quadratic_in_two_steps():
    target = np.array([2.0, -3.0, 0.5])
    res = solver.solve_stationarity(lambda x: -np.sum((x - target) ** 2), [10.0, 10.0, -10.0], tol=1e-6)
    assert res.converged and res.iterations <= 2
    np.testing.assert_allclose(res.x, target, atol=1e-6)


@pytest.mark.parametrize("lam,seed", [(0.5, 1), (1.0, 2), (3.0, 3)])
def test_stationarity_rayleigh_matches_mle(lam, seed):
    xs = fading.RayleighChannel(lam, seed=seed).draw(2000)
    mean = xs.mean()
    res = solver.solve_stationarity(lambda v: estimator.log_likelihood(xs, v[0]),
                                    [mean / math.sqrt(math.pi / 2) * 0.8], tol=1e-6)
    assert res.converged
    assert res.grad_norm <= 1e-6
    assert res.x[0] == pytest.approx(estimator.mle_lambda(xs), abs=1e-6)


def test_stationarity_separable_two_dim():
    xa = fading.RayleighChannel(0.7, seed=10).draw(800)
    xb = fading.RayleighChannel(2.2, seed=11).draw(600)

    def ll(v):
        return estimator.log_likelihood(xa, v[0]) + estimator.log_likelihood(xb, v[1])

    res = solver.solve_stationarity(ll, [1.0, 1.0], tol=1e-6)
    assert res.converged
    assert res.x[0] == pytest.approx(estimator.mle_lambda(xa), abs=1e-6)
    assert res.x[1] == pytest.approx(estimator.mle_lambda(xb), abs=1e-6)


def test_stationarity_reports_failure():
    res = solver.solve_stationarity(lambda v: float(v[0]), [0.0], tol=1e-8, max_iter=3)
    assert not res.converged
    assert res.iterations == 3
