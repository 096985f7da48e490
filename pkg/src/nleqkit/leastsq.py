"""Damped least-squares (Levenberg-Marquardt) solver.

Steps solve (J^T J + lambda * D) d = -J^T r with D = diag(J^T J) floored at
1e-10; lambda grows on rejected trials and shrinks on accepted ones.  The
result reports the singular values of the finite-difference Jacobian at the
final point, which is often the clearest signal of how hard the problem is.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (DimensionError, EvaluationError,
                         SingularMatrixError, SingularStepError)
from .numlin import CENTRAL, JacobianScheme, fd_jacobian, singular_values, solve_linear

__all__ = ["LsqOptions", "LsqResult", "lm_step", "solve_lsq"]

_DIAG_FLOOR = 1e-10
_LAMBDA_MAX = 1e15


@dataclass(frozen=True)
class LsqOptions:
    scheme: JacobianScheme = CENTRAL
    lambda_init: float = 1e-4
    lambda_up: float = 10.0
    lambda_down: float = 0.4
    max_jac: int = 500
    max_feval: int = 2000
    tol: float = 1e-12       # relative sum-of-squares decrease
    collect_trace: bool = False

    def __post_init__(self):
        if not self.lambda_init > 0.0:
            raise ValueError("lambda_init must be > 0")
        if not self.lambda_up > 1.0:
            raise ValueError("lambda_up must be > 1")
        if not 0.0 < self.lambda_down < 1.0:
            raise ValueError("lambda_down must be in (0, 1)")


@dataclass
class LsqResult:
    x: np.ndarray
    ss: float
    jac_evals: int
    fn_evals: int
    singvals: np.ndarray
    gradient: np.ndarray     # 2 J^T r at the final point
    converged: bool
    message: str
    trace: list = field(default_factory=list, repr=False)


def lm_step(J, r, lam: float) -> np.ndarray:
    """Damped normal-equation step; lam = 0 gives the Gauss-Newton step."""
    J = np.asarray(J, dtype=float)
    r = np.asarray(r, dtype=float)
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    A = J.T @ J
    d = np.maximum(np.diag(A), _DIAG_FLOOR)
    try:
        return solve_linear(A + lam * np.diag(d), -(J.T @ r))
    except SingularMatrixError as err:
        raise SingularStepError(str(err)) from err


def solve_lsq(problem, x0, opts: LsqOptions | None = None) -> LsqResult:
    if opts is None:
        opts = LsqOptions()
    if problem.n_residuals < problem.n_params:
        raise DimensionError(
            f"{problem.name}: least squares needs n_residuals >= n_params")
    x = np.ascontiguousarray(x0, dtype=float)
    if x.shape != (problem.n_params,):
        raise DimensionError(f"x0 must have length {problem.n_params}")
    fun = problem.fun
    trace = [] if opts.collect_trace else None

    r = fun(x)
    fn_evals = 1
    if not np.all(np.isfinite(r)):
        raise EvaluationError("non-finite residual at start", x=x)
    ss = float(r @ r)

    J = fd_jacobian(fun, x, opts.scheme)
    jac_evals = 1
    jac_current = True
    lam = opts.lambda_init
    converged = False
    message = "budget"

    while True:
        accepted = False
        while True:
            try:
                d = lm_step(J, r, lam)
            except SingularStepError:
                lam *= opts.lambda_up
                if lam > _LAMBDA_MAX:
                    message = "stalled"
                    break
                continue
            step_small = float(np.max(np.abs(d))) < 1e-12 * (1.0 + float(np.max(np.abs(x))))
            if step_small:
                converged = True
                message = "xsmall"
                break
            x_t = x + d
            r_t = fun(x_t)
            fn_evals += 1
            ss_t = float(r_t @ r_t) if np.all(np.isfinite(r_t)) else np.inf
            if ss_t < ss:
                if trace is not None:
                    trace.append({"ss0": ss, "ss1": ss_t, "lam": lam})
                rel_dec = (ss - ss_t) / ss if ss > 0.0 else 0.0
                x, r, ss = x_t, r_t, ss_t
                jac_current = False
                lam *= opts.lambda_down
                accepted = True
                if rel_dec < opts.tol:
                    converged = True
                    message = "sstol"
                break
            lam *= opts.lambda_up
            if lam > _LAMBDA_MAX:
                message = "stalled"
                break
            if fn_evals >= opts.max_feval:
                message = "maxfev"
                break
        if converged or not accepted:
            break
        if fn_evals >= opts.max_feval:
            message = "maxfev"
            break
        if jac_evals >= opts.max_jac:
            message = "maxjac"
            break
        J = fd_jacobian(fun, x, opts.scheme)
        jac_evals += 1
        jac_current = True

    if not jac_current:
        J = fd_jacobian(fun, x, opts.scheme)
        jac_evals += 1
    return LsqResult(
        x=x, ss=ss, jac_evals=jac_evals, fn_evals=fn_evals,
        singvals=singular_values(J), gradient=2.0 * (J.T @ r),
        converged=converged, message=message,
        trace=trace if trace is not None else [])
