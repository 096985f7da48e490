"""Sum-of-squares objectives and general function minimizers.

Three minimizers are provided: a BFGS variable-metric method (``vm``), a
Polak-Ribiere+ nonlinear conjugate gradient (``cg``), and a derivative-free
Nelder-Mead simplex (``neldermead``).  Gradients come from finite
differences of the objective, not from 2 J^T r, so squaring the residuals
loses exactly the information it loses in practice.  ``parscale`` runs the
search in scaled coordinates z = x / parscale.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import DimensionError, EvaluationError
from .numlin import CENTRAL, JacobianScheme, fd_gradient

__all__ = ["MinimizeOptions", "MinimizeResult", "ScaledObjective",
           "sumsq", "minimize", "MINIMIZE_METHODS"]

MINIMIZE_METHODS = ("vm", "cg", "neldermead")

_ARMIJO_C = 1e-4
_CURVATURE_FLOOR = 1e-10
_EPS = float(np.finfo(float).eps)
# vm resets its metric periodically; escapes long ill-conditioned valleys
_METRIC_REFRESH = 1000
_EXPAND_CAP = 4.0


def gradient_scheme(scheme: JacobianScheme, fval: float) -> JacobianScheme:
    """Difference scheme used for the gradient at objective value fval.

    For the default central scheme the relative step shrinks with the
    objective: the roundoff noise of a near-zero sum of squares scales like
    sqrt(f), so the truncation/noise balance moves from eps**(1/3) toward
    sqrt(eps) as f -> 0.  Explicit user-chosen steps are honored unchanged.
    """
    if scheme.scheme != "central" or scheme.step is not None:
        return scheme
    factor = max(min(abs(fval), 1.0) ** (1.0 / 6.0), _EPS ** (1.0 / 6.0))
    return JacobianScheme("central", step=_EPS ** (1.0 / 3.0) * factor)


def sumsq(problem, x, rscale=None) -> float:
    """Sum of squared (optionally scaled) residuals at x."""
    r = problem.fun(x)
    if rscale is not None:
        rscale = np.asarray(rscale, dtype=float)
        if rscale.shape != (problem.n_residuals,):
            raise DimensionError(
                f"rscale must have length {problem.n_residuals}, "
                f"got shape {rscale.shape}")
        r = r * rscale
    return float(r @ r)


@dataclass(frozen=True)
class ScaledObjective:
    """Sum of squares of rscale-weighted residuals, callable on x."""

    problem: object
    rscale: Optional[np.ndarray] = None

    def __call__(self, x) -> float:
        return sumsq(self.problem, x, self.rscale)


@dataclass(frozen=True)
class MinimizeOptions:
    method: str = "vm"
    scheme: JacobianScheme = CENTRAL
    parscale: Optional[np.ndarray] = None
    max_iter: int = 20000
    max_feval: int = 25000
    gtol: Optional[float] = None      # default 1e-10 * sqrt(n)
    simplex_tol: float = 1e-8
    collect_trace: bool = False

    def __post_init__(self):
        if self.method not in MINIMIZE_METHODS:
            raise ValueError(f"unknown minimize method: {self.method!r}")
        if self.parscale is not None:
            ps = np.asarray(self.parscale, dtype=float)
            if np.any(ps <= 0.0):
                raise ValueError("parscale entries must be strictly positive")


@dataclass
class MinimizeResult:
    x: np.ndarray
    value: float
    fn_evals: int
    gr_evals: int
    iterations: int
    converged: bool
    kkt_grad_norm: float
    message: str
    trace: list = field(default_factory=list, repr=False)


class _Budget(Exception):
    pass


class _Counted:
    """Objective wrapper that counts direct calls and enforces the budget.

    Finite-difference gradient probes go through _Gradient instead, so they
    are reported as gradient evaluations rather than objective ones.
    """

    def __init__(self, func: Callable, max_feval: int):
        self.func = func
        self.max_feval = max_feval
        self.fn_evals = 0

    def __call__(self, z) -> float:
        if self.fn_evals >= self.max_feval:
            raise _Budget()
        self.fn_evals += 1
        v = float(self.func(z))
        return v if math.isfinite(v) else math.inf


def _backtrack(phi, z, fz, g, d, trace):
    """Armijo backtracking with safeguarded quadratic interpolation.

    Accepted full steps are extended while the merit keeps improving under
    the Armijo bound.  Returns (ok, z_new, f_new, lam); the comparison is on
    the difference f_t - fz so a sub-ulp bound cannot be absorbed into fz.
    """
    slope = float(g @ d)
    rel = float(np.max(np.abs(d) / np.maximum(np.abs(z), 1.0)))
    if rel == 0.0:
        return False, z, fz, 0.0
    lam_min = 1e-13 / rel
    lam = 1.0
    while True:
        z_t = z + lam * d
        f_t = phi(z_t)
        if f_t - fz <= _ARMIJO_C * lam * slope:
            break
        if lam <= lam_min:
            return False, z, fz, 0.0
        if math.isfinite(f_t):
            lam_new = -slope * lam * lam / (2.0 * (f_t - fz - lam * slope))
        else:
            lam_new = 0.1 * lam
        if not math.isfinite(lam_new):
            lam_new = 0.5 * lam
        lam = min(max(lam_new, 0.1 * lam), 0.5 * lam)
    if lam == 1.0:
        while lam < _EXPAND_CAP:
            z_e = z + 2.0 * lam * d
            f_e = phi(z_e)
            if (math.isfinite(f_e) and f_e < f_t
                    and f_e - fz <= _ARMIJO_C * 2.0 * lam * slope):
                lam *= 2.0
                z_t, f_t = z_e, f_e
            else:
                break
    if trace is not None:
        trace.append({"kind": "armijo", "f0": fz, "f1": f_t,
                      "slope": slope, "lam": lam})
    return True, z_t, f_t, lam


class _Gradient:
    """Finite-difference gradient on the raw objective (not budgeted)."""

    def __init__(self, func: Callable, scheme: JacobianScheme):
        self.func = func
        self.scheme = scheme
        self.gr_evals = 0

    def __call__(self, z, fval: float) -> np.ndarray:
        self.gr_evals += 1
        return fd_gradient(self.func, z, gradient_scheme(self.scheme, fval))


def _minimize_vm(phi, grad, z0, gtol, max_iter, trace):
    n = z0.size
    z = z0.copy()
    fz = phi(z)
    g = grad(z, fz)
    H = np.eye(n)
    identity_h = True
    converged = False
    message = "maxiter"
    it = 0
    since_refresh = 0
    try:
        for it in range(1, max_iter + 1):
            if float(np.max(np.abs(g))) <= gtol * (1.0 + abs(fz)):
                converged = True
                message = "gtol"
                break
            since_refresh += 1
            if since_refresh >= _METRIC_REFRESH:
                H = np.eye(n)
                identity_h = True
                since_refresh = 0
            d = -(H @ g)
            if not float(g @ d) < 0.0:
                H = np.eye(n)
                identity_h = True
                d = -g
            ok, z_new, f_new, lam = _backtrack(phi, z, fz, g, d, trace)
            if not ok and not identity_h:
                # retry along steepest descent with a reset metric
                H = np.eye(n)
                identity_h = True
                ok, z_new, f_new, lam = _backtrack(phi, z, fz, g, -g, trace)
                d = -g
            if not ok:
                message = "stalled"
                break
            g_new = grad(z_new, f_new)
            s = z_new - z
            y = g_new - g
            sy = float(s @ y)
            if (sy > _CURVATURE_FLOOR * float(np.linalg.norm(s)) * float(np.linalg.norm(y))
                    and float(np.max(np.abs(s))) > 1e-11 * (1.0 + float(np.max(np.abs(z))))):
                rho = 1.0 / sy
                Hy = H @ y
                H = (H - rho * (np.outer(s, Hy) + np.outer(Hy, s))
                     + rho * rho * float(y @ Hy) * np.outer(s, s)
                     + rho * np.outer(s, s))
                identity_h = False
            z, fz, g = z_new, f_new, g_new
    except _Budget:
        message = "maxfev"
    return z, fz, it, converged, float(np.max(np.abs(g))), message


def _minimize_cg(phi, grad, z0, gtol, max_iter, trace):
    z = z0.copy()
    fz = phi(z)
    g = grad(z, fz)
    d = -g
    converged = False
    message = "maxiter"
    it = 0
    try:
        for it in range(1, max_iter + 1):
            if float(np.max(np.abs(g))) <= gtol * (1.0 + abs(fz)):
                converged = True
                message = "gtol"
                break
            if not float(g @ d) < 0.0:
                d = -g
            ok, z_new, f_new, _lam = _backtrack(phi, z, fz, g, d, trace)
            if not ok:
                if np.array_equal(d, -g):
                    message = "stalled"
                    break
                ok, z_new, f_new, _lam = _backtrack(phi, z, fz, g, -g, trace)
                if not ok:
                    message = "stalled"
                    break
            g_new = grad(z_new, f_new)
            gg = float(g @ g)
            beta = max(0.0, float(g_new @ (g_new - g)) / gg) if gg > 0.0 else 0.0
            d = -g_new + beta * d
            z, fz, g = z_new, f_new, g_new
    except _Budget:
        message = "maxfev"
    return z, fz, it, converged, float(np.max(np.abs(g))), message


def _minimize_nm(phi, z0, simplex_tol, max_iter):
    n = z0.size
    verts = [z0.copy()]
    for i in range(n):
        v = z0.copy()
        v[i] = v[i] * 1.05 if v[i] != 0.0 else 0.00025
        verts.append(v)
    verts = np.array(verts)
    vals = np.array([phi(v) for v in verts])
    converged = False
    message = "maxiter"
    it = 0
    try:
        for it in range(1, max_iter + 1):
            order = np.argsort(vals, kind="stable")
            verts = verts[order]
            vals = vals[order]
            diameter = float(np.max(np.abs(verts[1:] - verts[0])))
            if diameter <= simplex_tol:
                converged = True
                message = "simplex"
                break
            centroid = verts[:-1].mean(axis=0)
            xr = centroid + (centroid - verts[-1])
            fr = phi(xr)
            if fr < vals[0]:
                xe = centroid + 2.0 * (centroid - verts[-1])
                fe = phi(xe)
                if fe < fr:
                    verts[-1], vals[-1] = xe, fe
                else:
                    verts[-1], vals[-1] = xr, fr
            elif fr < vals[-2]:
                verts[-1], vals[-1] = xr, fr
            else:
                if fr < vals[-1]:
                    xc = centroid + 0.5 * (xr - centroid)
                    fc = phi(xc)
                else:
                    xc = centroid + 0.5 * (verts[-1] - centroid)
                    fc = phi(xc)
                if fc < min(fr, vals[-1]):
                    verts[-1], vals[-1] = xc, fc
                else:
                    for i in range(1, n + 1):
                        verts[i] = verts[0] + 0.5 * (verts[i] - verts[0])
                        vals[i] = phi(verts[i])
    except _Budget:
        message = "maxfev"
    order = np.argsort(vals, kind="stable")
    return verts[order[0]], float(vals[order[0]]), it, converged, message


def minimize(objective, x0, opts: MinimizeOptions | None = None) -> MinimizeResult:
    """Minimize a scalar objective; for root systems use a ScaledObjective."""
    if opts is None:
        opts = MinimizeOptions()
    x0 = np.ascontiguousarray(x0, dtype=float)
    n = x0.size
    parscale = (np.ones(n) if opts.parscale is None
                else np.asarray(opts.parscale, dtype=float))
    if parscale.shape != (n,):
        raise DimensionError(f"parscale must have length {n}")
    gtol = opts.gtol if opts.gtol is not None else 1e-10 * math.sqrt(n)
    trace = [] if opts.collect_trace else None

    scaled = lambda z: float(objective(z * parscale))
    counted = _Counted(scaled, opts.max_feval)
    grad = _Gradient(scaled, opts.scheme)
    z0 = x0 / parscale
    f0 = counted(z0)
    if not math.isfinite(f0):
        raise EvaluationError("non-finite objective at start", x=x0)

    if opts.method == "neldermead":
        z, value, iters, converged, message = _minimize_nm(
            counted, z0, opts.simplex_tol, opts.max_iter)
        kkt = float(np.max(np.abs(grad(z, value))))
    else:
        runner = _minimize_vm if opts.method == "vm" else _minimize_cg
        z, value, iters, converged, kkt, message = runner(
            counted, grad, z0, gtol, opts.max_iter, trace)

    return MinimizeResult(
        x=z * parscale, value=value, fn_evals=counted.fn_evals,
        gr_evals=grad.gr_evals, iterations=iters, converged=converged,
        kkt_grad_norm=kkt, message=message,
        trace=trace if trace is not None else [])
