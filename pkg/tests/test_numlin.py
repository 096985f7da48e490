import numpy as np
import pytest

from nleqkit import (BACKWARD, CENTRAL, FORWARD, DimensionError,
                     EvaluationError, JacobianScheme, SingularMatrixError,
                     fd_gradient, fd_jacobian, get_problem, singular_values,
                     solve_linear, sumsq)


def test_scheme_validation():
    with pytest.raises(ValueError):
        JacobianScheme("sideways")
    with pytest.raises(ValueError):
        JacobianScheme("central", step=0.0)
    assert JacobianScheme("central").h > 0


def test_solve_identity():
    y = solve_linear(np.eye(3), np.array([1.0, 2.0, 3.0]))
    np.testing.assert_array_equal(y, [1.0, 2.0, 3.0])


def test_solve_diagonal():
    y = solve_linear(np.diag([2.0, 4.0]), np.array([2.0, 8.0]))
    np.testing.assert_array_equal(y, [1.0, 2.0])


def test_solve_singular():
    with pytest.raises(SingularMatrixError) as exc:
        solve_linear(np.ones((2, 2)), np.array([1.0, 2.0]))
    assert exc.value.pivot >= 0.0


def test_solve_shape_errors():
    with pytest.raises(DimensionError):
        solve_linear(np.ones((2, 3)), np.ones(2))
    with pytest.raises(DimensionError):
        solve_linear(np.eye(2), np.ones(3))


def test_solve_random_residual_bound():
    rng = np.random.default_rng(0)
    for n in (1, 2, 5, 12, 20):
        A = rng.standard_normal((n, n)) + n * np.eye(n)
        b = rng.standard_normal(n)
        y = solve_linear(A, b)
        res = np.max(np.abs(A @ y - b))
        assert res <= 1e-10 * (1.0 + np.max(np.abs(b)))


def test_singular_values_examples():
    np.testing.assert_allclose(singular_values(np.diag([3.0, 1.0])), [3.0, 1.0])
    np.testing.assert_array_equal(singular_values(np.zeros((3, 2))), [0.0, 0.0])


def test_singular_values_properties():
    rng = np.random.default_rng(1)
    for _ in range(10):
        m, n = rng.integers(1, 13, size=2)
        A = rng.standard_normal((m, n))
        sv = singular_values(A)
        assert np.all(np.diff(sv) <= 0)
        assert np.all(sv >= 0)
        np.testing.assert_allclose(np.sum(sv ** 2), np.sum(A ** 2), rtol=1e-10)
        sv2 = singular_values(A.T @ A)
        k = min(m, n)
        np.testing.assert_allclose(sv2[:k], sv[:k] ** 2, rtol=1e-8,
                                   atol=1e-12)


def test_singular_values_of_dgv_jacobian_at_solution():
    prob = get_problem("dgv-full:0121a")
    J = fd_jacobian(prob.fun, prob.known_solution, CENTRAL)
    sv = singular_values(J)
    assert abs(sv[0] - 8523.0) <= 0.01 * 8523.0
    assert abs(sv[-1] - 0.009023) <= 0.01 * 0.009023


def test_fd_jacobian_analytic():
    f = lambda x: np.array([x[0] ** 2, x[0] * x[1]])
    J = fd_jacobian(f, np.array([2.0, 3.0]), CENTRAL)
    np.testing.assert_allclose(J, [[4.0, 0.0], [3.0, 2.0]], atol=1e-6)


@pytest.mark.parametrize("scheme", [FORWARD, BACKWARD, CENTRAL])
def test_fd_jacobian_linear_map(scheme):
    rng = np.random.default_rng(2)
    A = rng.standard_normal((5, 4))
    f = lambda x: A @ x
    J = fd_jacobian(f, rng.standard_normal(4), scheme)
    np.testing.assert_allclose(J, A, rtol=1e-8, atol=1e-8)


def test_fd_jacobian_central_vs_forward_on_dgv():
    prob = get_problem("dgv-full:0121a")
    x0 = prob.start("x0")
    Jc = fd_jacobian(prob.fun, x0, CENTRAL)
    Jf = fd_jacobian(prob.fun, x0, FORWARD)
    # one-sided truncation error is O(h); entries agree to 1e-4 relative
    denom = np.maximum(np.abs(Jc), 1e-8)
    assert np.max(np.abs(Jc - Jf) / denom) <= 1e-4


def test_fd_jacobian_eval_failure_column():
    def f(x):
        out = np.array([x[0], x[1]])
        if x[1] > 1.0:
            out[1] = np.nan
        return out

    with pytest.raises(EvaluationError) as exc:
        fd_jacobian(f, np.array([0.0, 1.0]), FORWARD)
    assert exc.value.column == 1


def test_fd_gradient_examples():
    g = lambda x: float(x @ x)
    np.testing.assert_allclose(fd_gradient(g, np.array([1.0, 2.0]), CENTRAL),
                               [2.0, 4.0], atol=1e-6)
    const = lambda x: 7.5
    np.testing.assert_allclose(fd_gradient(const, np.ones(4), CENTRAL),
                               np.zeros(4), atol=1e-8)


def test_fd_gradient_chain_rule_on_dgv():
    prob = get_problem("dgv-full:0121a")
    x0 = prob.start("x0")
    g = fd_gradient(lambda x: sumsq(prob, x), x0, CENTRAL)
    J = fd_jacobian(prob.fun, x0, CENTRAL)
    ref = 2.0 * (J.T @ prob.fun(x0))
    assert np.max(np.abs(g - ref)) <= 1e-4 * max(1.0, np.max(np.abs(ref)))


def test_fd_gradient_of_sumsq_matches_jacobian_all_registry():
    from nleqkit import catalog
    for entry in catalog():
        prob = get_problem(entry["name"])
        for name in prob.starts:
            x = prob.start(name)
            g = fd_gradient(lambda v: sumsq(prob, v), x, CENTRAL)
            J = fd_jacobian(prob.fun, x, CENTRAL)
            ref = 2.0 * (J.T @ prob.fun(x))
            assert np.max(np.abs(g - ref)) <= 1e-4 * max(1.0, np.max(np.abs(ref)))
