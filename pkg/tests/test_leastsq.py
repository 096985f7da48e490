import numpy as np
import pytest

from nleqkit import (LsqOptions, SingularStepError, get_problem, lm_step,
                     singular_values, solve_lsq)
from nleqkit.numlin import CENTRAL, fd_jacobian
from nleqkit.problems import ProblemSpec


def test_options_validation():
    with pytest.raises(ValueError):
        LsqOptions(lambda_init=0.0)
    with pytest.raises(ValueError):
        LsqOptions(lambda_up=1.0)
    with pytest.raises(ValueError):
        LsqOptions(lambda_down=1.0)


def test_lm_step_identity_gauss_newton():
    d = lm_step(np.eye(2), np.array([1.0, 2.0]), 0.0)
    np.testing.assert_allclose(d, [-1.0, -2.0], atol=1e-14)


def test_lm_step_damping_limit():
    rng = np.random.default_rng(0)
    J = rng.standard_normal((5, 3)) + np.vstack([np.eye(3), np.zeros((2, 3))])
    r = rng.standard_normal(5)
    d0 = lm_step(J, r, 0.0)
    d_big = lm_step(J, r, 1e12)
    assert np.linalg.norm(d_big) <= 1e-9 * np.linalg.norm(d0)


def test_lm_step_matches_normal_equation_oracle():
    rng = np.random.default_rng(1)
    for _ in range(5):
        J = rng.standard_normal((6, 4))
        r = rng.standard_normal(6)
        lam = 10.0 ** rng.uniform(-6, 2)
        A = J.T @ J
        D = np.diag(np.maximum(np.diag(A), 1e-10))
        ref = np.linalg.solve(A + lam * D, -(J.T @ r))
        np.testing.assert_allclose(lm_step(J, r, lam), ref,
                                   rtol=1e-10, atol=1e-12)


def test_lm_step_singular_at_zero_damping():
    J = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    with pytest.raises(SingularStepError):
        lm_step(J, np.ones(3), 0.0)


def test_dgv_full_reaches_solution_with_singvals():
    prob = get_problem("dgv-full:0121a")
    res = solve_lsq(prob, prob.start("x0"))
    assert res.converged
    assert res.ss <= 1e-12
    np.testing.assert_allclose(res.x, prob.known_solution, atol=1e-4)
    assert res.singvals[0] / res.singvals[-1] >= 1e5
    assert abs(res.singvals[0] - 8523.0) <= 0.01 * 8523.0
    assert abs(res.singvals[-1] - 0.009023) <= 0.01 * 0.009023
    assert res.jac_evals <= 500 and res.fn_evals <= 2000


def test_dgv_reduced_reaches_solution():
    prob = get_problem("dgv-reduced:0121a")
    res = solve_lsq(prob, prob.start("x0"))
    assert res.ss <= 1e-12
    assert abs(res.singvals[0] - 8515.0) <= 0.01 * 8515.0
    assert abs(res.singvals[-1] - 0.01397) <= 0.01 * 0.01397


def test_start_at_solution_returns_immediately():
    prob = get_problem("trigexp:20")
    res = solve_lsq(prob, np.ones(20))
    assert res.converged
    assert res.ss <= 1e-20
    assert res.jac_evals <= 1


def test_accepted_steps_strictly_decrease():
    prob = get_problem("dgv-full:0121a")
    res = solve_lsq(prob, prob.start("x0"), LsqOptions(collect_trace=True))
    assert res.trace
    for t in res.trace:
        assert t["ss1"] < t["ss0"]


def test_near_stationarity_at_solution():
    prob = get_problem("dgv-full:0121a")
    res = solve_lsq(prob, prob.start("x0"))
    assert res.ss <= 1e-12
    assert np.max(np.abs(res.gradient)) <= 1e-5 * (1.0 + res.singvals[0])


def test_gauss_newton_limit_on_linear_problem():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((6, 4))
    b = rng.standard_normal(6)
    x0 = rng.standard_normal(4)
    r0 = A @ x0 - b
    d = lm_step(A, r0, 0.0)
    x1 = x0 + d
    ref, *_ = np.linalg.lstsq(A, b, rcond=None)
    np.testing.assert_allclose(x1, ref, atol=1e-10)


def test_singvals_same_code_path():
    prob = get_problem("dgv-reduced:0121a")
    res = solve_lsq(prob, prob.start("x0"))
    J = fd_jacobian(prob.fun, res.x, CENTRAL)
    np.testing.assert_array_equal(res.singvals, singular_values(J))
    np.testing.assert_array_equal(res.gradient, 2.0 * (J.T @ prob.fun(res.x)))


def test_trigexp_500():
    prob = get_problem("trigexp:500")
    res = solve_lsq(prob, prob.start("x0"))
    assert res.ss <= 1e-10


def test_budget_exhaustion_is_normal_return():
    prob = get_problem("dgv-full:0121a")
    res = solve_lsq(prob, prob.start("x0"), LsqOptions(max_jac=3, max_feval=10))
    assert not res.converged
    assert res.message in ("maxjac", "maxfev")


def test_underdetermined_rejected():
    from nleqkit import DimensionError
    prob = ProblemSpec(name="wide", n_params=3, n_residuals=2,
                       residual=lambda x, rhs: x[:2], rhs=np.empty(0))
    with pytest.raises(DimensionError):
        solve_lsq(prob, np.zeros(3))
