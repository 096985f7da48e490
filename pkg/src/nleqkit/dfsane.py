"""Derivative-free spectral residual solver with optional secant acceleration.

The direction is the residual scaled by a Barzilai-Borwein coefficient
sigma_k = (s.s)/(s.y), tried with both signs under a nonmonotone line search
that compares against the worst of the last M merit values plus a summable
forcing term.  The accelerated variant extrapolates through the most recent
history of iterate/residual pairs by a truncated least-squares fit of the
modeled residual, keeping the extrapolation only when it reduces the sum of
squares.

The core loop runs compiled (see _accel) for registry problems whose
residual kernel is jitted; user problems with plain Python residuals take
the same source through the interpreter.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ._accel import NUMBA_ENABLED, jit_with_kernel_arg
from .exceptions import DimensionError, EvaluationError

__all__ = ["SpectralOptions", "SpectralResult", "solve_spectral",
           "solve_spectral_accelerated"]

_GAMMA = 1e-4
_TAU_MIN = 0.1
_TAU_MAX = 0.5
# extrapolation length cap: acc_cap * max(last step norm, acc_floor)
_ACC_CAP = 8.0
_ACC_FLOOR = 1e-4


@dataclass(frozen=True)
class SpectralOptions:
    memory: int = 10             # nonmonotone window M
    max_iter: int = 1500
    tol: float = 1e-7            # on sqrt(sum(r^2))/sqrt(n), or max|r|
    sigma_min: float = 1e-10
    sigma_max: float = 1e10
    acceleration: bool = False
    history: int = 6             # secant pairs p used by the acceleration
    collect_trace: bool = False

    def __post_init__(self):
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        if self.history < 1:
            raise ValueError("history must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not (0.0 < self.sigma_min < self.sigma_max < np.inf):
            raise ValueError("need 0 < sigma_min < sigma_max < inf")
        if not self.tol > 0.0:
            raise ValueError("tol must be strictly positive")


@dataclass
class SpectralResult:
    x: np.ndarray
    fvec: np.ndarray
    ss: float
    iterations: int
    fevals: int
    converged: bool
    # rows: (window max, forcing eta, accepted lambda, merit before,
    #        merit accepted, sigma used)
    trace: np.ndarray = field(default=None, repr=False)


def _core(fun, x0, rhs, mem, maxit, tol, sig_min, sig_max,
          gamma, tau_min, tau_max, accelerate, p, acc_cap, acc_floor):
    n = x0.shape[0]
    x = x0.copy()
    r = fun(x, rhs)
    fevals = 1
    trace = np.empty((maxit, 6))
    ntrace = 0
    if not np.all(np.isfinite(r)):
        return x, r, 0, fevals, 3, trace, ntrace

    f = float(np.dot(r, r))
    sqrt_n = np.sqrt(float(n))
    f0_norm = np.sqrt(f)
    sigma = 1.0 / max(1.0, f0_norm)

    fhist = np.empty(mem)
    fhist[0] = f
    nf = 1
    # sign of the secant coefficient decides which direction is tried first;
    # the magnitude is clamped into [sig_min, sig_max]
    dir_sign = 1.0

    # ring of the p+1 most recent spectral iterates (current included);
    # accelerated points replace the iterate but are not stored
    hcap = p + 1
    x_hist = np.zeros((hcap, n))
    r_hist = np.zeros((hcap, n))
    x_hist[0] = x
    r_hist[0] = r
    head = 1 % hcap
    nh = 1

    best_x = x.copy()
    best_r = r.copy()
    best_f = f

    status = 0
    k = 0
    converged = (np.sqrt(f) / sqrt_n <= tol) or (np.max(np.abs(r)) <= tol)
    while not converged and k < maxit:
        s_abs = abs(sigma)
        if not np.isfinite(s_abs) or s_abs > sig_max:
            s_abs = sig_max
        elif s_abs < sig_min:
            s_abs = sig_min
        sigma = s_abs

        d = -(dir_sign * sigma) * r

        fbar = fhist[0]
        for i in range(1, nf):
            if fhist[i] > fbar:
                fbar = fhist[i]
        eta = f0_norm / ((1.0 + k) * (1.0 + k))

        lam_p = 1.0
        lam_m = 1.0
        accepted = False
        lam_used = 0.0
        x_t = x
        r_t = r
        f_t = f
        while True:
            x_t = x + lam_p * d
            r_t = fun(x_t, rhs)
            fevals += 1
            f_t = float(np.dot(r_t, r_t))
            if not np.isfinite(f_t):
                f_t = np.inf
            if f_t <= fbar + eta - gamma * lam_p * lam_p * f:
                lam_used = lam_p
                accepted = True
                break
            x_m = x - lam_m * d
            r_m = fun(x_m, rhs)
            fevals += 1
            f_m = float(np.dot(r_m, r_m))
            if not np.isfinite(f_m):
                f_m = np.inf
            if f_m <= fbar + eta - gamma * lam_m * lam_m * f:
                x_t = x_m
                r_t = r_m
                f_t = f_m
                lam_used = -lam_m
                accepted = True
                break
            # safeguarded quadratic backtracking on each side
            den_p = f_t + (2.0 * lam_p - 1.0) * f
            if np.isfinite(den_p) and den_p > 0.0:
                cand = lam_p * lam_p * f / den_p
            else:
                cand = tau_min * lam_p
            lam_p = min(max(cand, tau_min * lam_p), tau_max * lam_p)
            den_m = f_m + (2.0 * lam_m - 1.0) * f
            if np.isfinite(den_m) and den_m > 0.0:
                cand = lam_m * lam_m * f / den_m
            else:
                cand = tau_min * lam_m
            lam_m = min(max(cand, tau_min * lam_m), tau_max * lam_m)
            if lam_p < 1e-30 and lam_m < 1e-30:
                break
        if not accepted:
            status = 2
            break

        trace[ntrace, 0] = fbar
        trace[ntrace, 1] = eta
        trace[ntrace, 2] = lam_used
        trace[ntrace, 3] = f
        trace[ntrace, 4] = f_t
        trace[ntrace, 5] = sigma
        ntrace += 1

        s_vec = x_t - x
        y_vec = r_t - r
        sts = float(np.dot(s_vec, s_vec))
        sty = float(np.dot(s_vec, y_vec))
        if sty != 0.0 and np.isfinite(sty):
            sigma = abs(sts / sty)
            dir_sign = 1.0 if sty > 0.0 else -1.0
        else:
            sigma = sig_max
            dir_sign = 1.0

        x_prev = x
        r_prev = r
        x = x_t
        r = r_t
        f = f_t

        x_hist[head] = x
        r_hist[head] = r
        head = (head + 1) % hcap
        nh = min(nh + 1, hcap)

        if accelerate and nh >= hcap:
            u_mat = np.empty((n, p))
            v_mat = np.empty((n, p))
            for j in range(p):
                idx = (head - 2 - j) % hcap
                u_mat[:, j] = x_hist[idx] - x
                v_mat[:, j] = r_hist[idx] - r
            coef, _resid, _rank, _sv = np.linalg.lstsq(v_mat, -r, rcond=1e-12)
            # combined point minimizing the modeled residual, followed by a
            # spectral step at the modeled residual itself
            r_model = r + v_mat @ coef
            s_acc = abs(sigma)
            if not np.isfinite(s_acc) or s_acc > sig_max:
                s_acc = sig_max
            elif s_acc < sig_min:
                s_acc = sig_min
            dx = u_mat @ coef - (dir_sign * s_acc) * r_model
            # keep the extrapolation within a multiple of the recent step
            # scale so the secant model is evaluated where it is trusted
            step_norm = np.sqrt(sts)
            limit = acc_cap * max(step_norm, acc_floor)
            dx_norm = float(np.sqrt(np.dot(dx, dx)))
            if dx_norm > limit and dx_norm > 0.0:
                dx = dx * (limit / dx_norm)
            x_acc = x + dx
            r_acc = fun(x_acc, rhs)
            fevals += 1
            f_acc = float(np.dot(r_acc, r_acc))
            if np.isfinite(f_acc) and f_acc < f:
                s2 = x_acc - x_prev
                y2 = r_acc - r_prev
                sty2 = float(np.dot(s2, y2))
                if sty2 != 0.0 and np.isfinite(sty2):
                    sigma = abs(float(np.dot(s2, s2)) / sty2)
                    dir_sign = 1.0 if sty2 > 0.0 else -1.0
                x = x_acc
                r = r_acc
                f = f_acc

        if nf < mem:
            fhist[nf] = f
            nf += 1
        else:
            for i in range(mem - 1):
                fhist[i] = fhist[i + 1]
            fhist[mem - 1] = f

        if f < best_f:
            best_f = f
            best_x = x.copy()
            best_r = r.copy()

        k += 1
        converged = (np.sqrt(f) / sqrt_n <= tol) or (np.max(np.abs(r)) <= tol)

    if converged:
        return x, r, k, fevals, 1, trace, ntrace
    return best_x, best_r, k, fevals, status, trace, ntrace


def _core_sig(kernel_type, types):
    return types.Tuple((
        types.float64[::1], types.float64[::1], types.int64, types.int64,
        types.int64, types.float64[:, ::1], types.int64,
    ))(kernel_type, types.float64[::1], types.float64[::1], types.int64,
       types.int64, types.float64, types.float64, types.float64,
       types.float64, types.float64, types.float64, types.boolean,
       types.int64, types.float64, types.float64)


_core_py = _core
_core_jit = jit_with_kernel_arg(_core_sig)(_core) if NUMBA_ENABLED else _core


def _solve(problem, x0, opts: SpectralOptions) -> SpectralResult:
    if problem.n_params != problem.n_residuals:
        raise DimensionError(
            f"{problem.name}: spectral solver needs a square system")
    x0 = np.ascontiguousarray(x0, dtype=float)
    if x0.shape != (problem.n_params,):
        raise DimensionError(f"x0 must have length {problem.n_params}")
    if not np.all(np.isfinite(x0)):
        raise EvaluationError("non-finite start", x=x0)

    use_jit = NUMBA_ENABLED and problem.kernel is not None
    core = _core_jit if use_jit else _core_py
    fun = problem.kernel if use_jit else problem.residual
    rhs = np.ascontiguousarray(problem.rhs, dtype=float)

    x, r, iters, fevals, status, trace, ntrace = core(
        fun, x0, rhs, opts.memory, opts.max_iter, opts.tol,
        opts.sigma_min, opts.sigma_max, _GAMMA, _TAU_MIN, _TAU_MAX,
        opts.acceleration, opts.history, _ACC_CAP, _ACC_FLOOR)
    if status == 3:
        raise EvaluationError("non-finite residual at start", x=x0)
    return SpectralResult(
        x=x, fvec=r, ss=float(r @ r), iterations=int(iters),
        fevals=int(fevals), converged=(status == 1),
        trace=trace[:ntrace].copy() if opts.collect_trace else None)


def solve_spectral(problem, x0, opts: SpectralOptions | None = None) -> SpectralResult:
    """Plain spectral residual iteration (no acceleration)."""
    if opts is None:
        opts = SpectralOptions()
    return _solve(problem, x0, replace(opts, acceleration=False))


def solve_spectral_accelerated(problem, x0,
                               opts: SpectralOptions | None = None) -> SpectralResult:
    """Spectral iteration with history-based secant extrapolation."""
    if opts is None:
        opts = SpectralOptions(acceleration=True)
    return _solve(problem, x0, replace(opts, acceleration=True))
