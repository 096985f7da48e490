"""Newton and Broyden solvers for square systems r(x) = 0.

The raw direction (Newton from a finite-difference Jacobian, or a rank-one
secant approximation) is combined with one of seven step-control strategies:

* ``cline`` / ``qline`` / ``gline`` -- backtracking line searches (cubic
  interpolation, quadratic interpolation, geometric halving) enforcing the
  Armijo condition on the merit 0.5*sum(r^2);
* ``pwldog`` / ``dbldog`` -- single and double dogleg trust-region steps;
* ``hook`` -- trust-region step from a scalar-shifted normal-equation solve
  whose length matches the radius;
* ``none`` -- undamped steps.

Termination codes: 1 residual criterion met, 2 step below xtol without the
residual criterion, 3 stalled line search, 4 iteration limit, 5 trust-region
collapse, -1 evaluation failure.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (DegenerateStepError, DimensionError, EvaluationError,
                         SingularMatrixError, SingularStepError)
from .numlin import FORWARD, JacobianScheme, fd_jacobian, solve_linear

__all__ = [
    "RootOptions", "RootResult", "solve_root", "newton_step",
    "broyden_update", "METHODS", "GLOBAL_STRATEGIES", "TERM_MESSAGES",
]

METHODS = ("newton", "broyden")
LINE_SEARCHES = ("cline", "qline", "gline")
TRUST_REGIONS = ("pwldog", "dbldog", "hook")
GLOBAL_STRATEGIES = LINE_SEARCHES + TRUST_REGIONS + ("none",)

TERM_MESSAGES = {
    1: "Fcrit",
    2: "Xtol",
    3: "Stalled",
    4: "Maxiter",
    5: "Trdelta",
    -1: "EvalErr",
}

_ARMIJO_C = 1e-4


@dataclass(frozen=True)
class RootOptions:
    method: str = "broyden"
    global_strategy: str = "dbldog"
    ftol: float = 1e-8
    xtol: float = 1e-8
    max_iter: int = 150
    scheme: JacobianScheme = FORWARD
    collect_trace: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method: {self.method!r}")
        if self.global_strategy not in GLOBAL_STRATEGIES:
            raise ValueError(f"unknown global strategy: {self.global_strategy!r}")
        if not (self.ftol > 0.0 and self.xtol > 0.0):
            raise ValueError("tolerances must be strictly positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class RootResult:
    x: np.ndarray
    fvec: np.ndarray
    termcd: int
    fcnt: int
    jcnt: int
    iter: int
    fnorm: float
    message: str
    trace: list = field(default_factory=list, repr=False)


def newton_step(J, r) -> np.ndarray:
    """Solve J d = -r for the undamped Newton direction."""
    r = np.asarray(r, dtype=float)
    try:
        return solve_linear(J, -r)
    except SingularMatrixError as err:
        raise SingularStepError(str(err)) from err


def broyden_update(B, s, y) -> np.ndarray:
    """Rank-one secant update B' = B + (y - B s) s^T / (s^T s)."""
    B = np.asarray(B, dtype=float)
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    ss = float(s @ s)
    if ss == 0.0:
        raise DegenerateStepError("secant update with zero step")
    return B + np.outer(y - B @ s, s) / ss


def _merit(r: np.ndarray) -> float:
    return 0.5 * float(r @ r)


def _finite_merit(r: np.ndarray) -> float:
    if not np.all(np.isfinite(r)):
        return math.inf
    return _merit(r)


def _cauchy_direction(M: np.ndarray, g: np.ndarray) -> np.ndarray | None:
    Mg = M @ g
    denom = float(Mg @ Mg)
    if denom <= 0.0 or not math.isfinite(denom):
        return None
    return -(float(g @ g) / denom) * g


def _line_search(fun, x, r, f, g, d, kind, xtol, trace):
    """Backtrack along d until the Armijo condition holds.

    Returns (ok, x_new, r_new, f_new, fcnt_delta); ok is False on stall.
    """
    slope = float(g @ d)
    rel_len = float(np.max(np.abs(d) / np.maximum(np.abs(x), 1.0)))
    fcnt = 0
    if rel_len == 0.0:
        return False, x, r, f, fcnt
    lam_min = xtol / rel_len
    lam = 1.0
    lam_prev = f_prev = None
    while True:
        x_t = x + lam * d
        r_t = fun(x_t)
        fcnt += 1
        f_t = _finite_merit(r_t)
        if f_t <= f + _ARMIJO_C * lam * slope:
            if trace is not None:
                trace.append({"kind": "armijo", "f0": f, "f1": f_t,
                              "slope": slope, "lam": lam})
            return True, x_t, r_t, f_t, fcnt
        if lam <= lam_min:
            return False, x, r, f, fcnt
        if kind == "gline" or not math.isfinite(f_t):
            lam_new = 0.5 * lam if kind == "gline" else 0.1 * lam
        elif kind == "qline" or lam_prev is None:
            lam_new = -slope * lam * lam / (2.0 * (f_t - f - lam * slope))
        else:
            # Cubic model through the two most recent trial merits.
            m1 = f_t - f - lam * slope
            m2 = f_prev - f - lam_prev * slope
            denom = lam - lam_prev
            a = (m1 / lam**2 - m2 / lam_prev**2) / denom
            b = (-lam_prev * m1 / lam**2 + lam * m2 / lam_prev**2) / denom
            if a == 0.0:
                lam_new = -slope / (2.0 * b)
            else:
                disc = b * b - 3.0 * a * slope
                if disc < 0.0:
                    lam_new = 0.5 * lam
                elif b <= 0.0:
                    lam_new = (-b + math.sqrt(disc)) / (3.0 * a)
                else:
                    lam_new = -slope / (b + math.sqrt(disc))
        if not math.isfinite(lam_new):
            lam_new = 0.5 * lam
        lam_prev, f_prev = lam, f_t
        lam = min(max(lam_new, 0.1 * lam), 0.5 * lam)


def _dogleg(M, g, d_newton, radius, double):
    """Step along the (double) dogleg path.

    Returns (step, constrained) where constrained means the trust radius,
    not the Newton point, limited the step length.
    """
    sd = _cauchy_direction(M, g)
    if sd is None:
        return None, False
    cp_norm = float(np.linalg.norm(sd))
    if d_newton is None:
        if cp_norm <= radius:
            return sd, False
        return (radius / cp_norm) * sd, True
    n_norm = float(np.linalg.norm(d_newton))
    if n_norm <= radius:
        return d_newton, False
    if cp_norm >= radius:
        return (radius / cp_norm) * sd, True
    if double:
        Mg = M @ g
        gBg = float(Mg @ Mg)
        descent = -float(g @ d_newton)
        gamma = (float(g @ g) ** 2) / (gBg * descent) if descent > 0.0 else 1.0
        eta = min(1.0, 0.2 + 0.8 * gamma)
        if eta * n_norm <= radius:
            return (radius / n_norm) * d_newton, True
        target = eta * d_newton
    else:
        target = d_newton
    w = target - sd
    a = float(w @ w)
    b = 2.0 * float(sd @ w)
    c = cp_norm * cp_norm - radius * radius
    theta = (-b + math.sqrt(max(b * b - 4.0 * a * c, 0.0))) / (2.0 * a)
    return sd + theta * w, True


def _hook(M, g, d_newton, radius):
    """Shifted-normal-equation step with length matched to the radius.

    Returns (step, constrained); the shift mu is located by bisection until
    the step length falls within [0.95, 1.0] * radius, so the step never
    exceeds the radius.
    """
    if d_newton is not None and float(np.linalg.norm(d_newton)) <= radius:
        return d_newton, False
    A = M.T @ M
    n = A.shape[0]
    eye = np.eye(n)
    gnorm = float(np.linalg.norm(g))
    if gnorm == 0.0:
        return None, False
    lo, hi = 0.0, gnorm / (0.95 * radius)
    step = None
    first = True
    for _ in range(80):
        mu = hi if first else 0.5 * (lo + hi)
        first = False
        try:
            s = solve_linear(A + mu * eye, -g)
        except SingularMatrixError:
            lo = mu
            continue
        s_norm = float(np.linalg.norm(s))
        step = s
        if 0.95 * radius <= s_norm <= radius:
            return s, True
        if s_norm > radius:
            lo = mu
        else:
            hi = mu
    if step is None:
        return None, False
    s_norm = float(np.linalg.norm(step))
    if s_norm > radius:
        step = (radius / s_norm) * step
    return step, True


def solve_root(problem, x0, opts: RootOptions | None = None) -> RootResult:
    """Drive r(x) to zero from x0 with the configured method and strategy."""
    if opts is None:
        opts = RootOptions()
    if problem.n_params != problem.n_residuals:
        raise DimensionError(
            f"{problem.name}: root solving needs a square system, got "
            f"{problem.n_residuals} residuals for {problem.n_params} parameters")
    x = np.ascontiguousarray(x0, dtype=float)
    if x.shape != (problem.n_params,):
        raise DimensionError(f"x0 must have length {problem.n_params}")
    if not np.all(np.isfinite(x)):
        raise EvaluationError("non-finite start", x=x)
    fun = problem.fun
    trace = [] if opts.collect_trace else None

    r = fun(x)
    fcnt = 1
    jcnt = 0
    if not np.all(np.isfinite(r)):
        raise EvaluationError("non-finite residual at start", x=x)

    def result(termcd, niter):
        return RootResult(
            x=x, fvec=r, termcd=termcd, fcnt=fcnt, jcnt=jcnt, iter=niter,
            fnorm=0.5 * float(r @ r), message=TERM_MESSAGES[termcd],
            trace=trace if trace is not None else [])

    if float(np.max(np.abs(r))) <= opts.ftol:
        return result(1, 0)

    is_newton = opts.method == "newton"
    strategy = opts.global_strategy
    f = _merit(r)
    M = fd_jacobian(fun, x, opts.scheme)
    jcnt = 1
    fresh = True
    radius = -1.0

    for it in range(1, opts.max_iter + 1):
        if is_newton and not fresh:
            M = fd_jacobian(fun, x, opts.scheme)
            jcnt += 1
            fresh = True

        g = M.T @ r
        try:
            d_newton = solve_linear(M, -r)
        except SingularMatrixError:
            d_newton = None

        if strategy == "none":
            if d_newton is None:
                raise SingularStepError(
                    f"singular model matrix at iteration {it} with no "
                    f"global strategy")
            x_new = x + d_newton
            r_new = fun(x_new)
            fcnt += 1
            if not np.all(np.isfinite(r_new)):
                raise EvaluationError("non-finite residual on undamped step",
                                      x=x_new)
            f_new = _merit(r_new)
            step = d_newton

        elif strategy in LINE_SEARCHES:
            accepted = False
            for _attempt in range(2):
                d = d_newton
                if d is None or not float(g @ d) < 0.0:
                    d = _cauchy_direction(M, g)
                    if d is not None and not float(g @ d) < 0.0:
                        d = None
                if d is not None:
                    ok, x_new, r_new, f_new, dfc = _line_search(
                        fun, x, r, f, g, d, strategy, opts.xtol, trace)
                    fcnt += dfc
                    if ok:
                        step = x_new - x
                        accepted = True
                        break
                if is_newton or fresh:
                    break
                # stale secant model: rebuild from finite differences and retry
                M = fd_jacobian(fun, x, opts.scheme)
                jcnt += 1
                fresh = True
                g = M.T @ r
                try:
                    d_newton = solve_linear(M, -r)
                except SingularMatrixError:
                    d_newton = None
            if not accepted:
                return result(3, it)

        else:  # trust region
            if radius < 0.0:
                sd = _cauchy_direction(M, g)
                cp = float(np.linalg.norm(sd)) if sd is not None else 1.0
                radius = min(max(cp, 1e-3), 1e3)
            def _tr_step(rad):
                if strategy == "hook":
                    return _hook(M, g, d_newton, rad)
                return _dogleg(M, g, d_newton, rad,
                               double=(strategy == "dbldog"))

            def _model_pred(s):
                Ms = M @ s
                return float(g @ s) + 0.5 * float(Ms @ Ms)

            accepted = False
            rejects = 0
            while True:
                s, constrained = _tr_step(radius)
                if s is None:
                    break
                x_t = x + s
                r_t = fun(x_t)
                fcnt += 1
                f_t = _finite_merit(r_t)
                slope_s = float(g @ s)
                if f_t <= f + _ARMIJO_C * slope_s:
                    pred = _model_pred(s)
                    # internal doubling: while the model tracked the actual
                    # reduction closely and the radius limited the step,
                    # retry at twice the radius within this iteration
                    doubles = 0
                    while (constrained and doubles < 12
                           and (abs(pred - (f_t - f)) <= 0.1 * abs(f_t - f)
                                or f_t - f <= slope_s)):
                        s2, c2 = _tr_step(2.0 * radius)
                        if s2 is None:
                            break
                        x_t2 = x + s2
                        r_t2 = fun(x_t2)
                        fcnt += 1
                        f_t2 = _finite_merit(r_t2)
                        if (f_t2 <= f + _ARMIJO_C * float(g @ s2)
                                and f_t2 < f_t):
                            radius *= 2.0
                            s, constrained = s2, c2
                            x_t, r_t, f_t = x_t2, r_t2, f_t2
                            pred = _model_pred(s)
                            doubles += 1
                        else:
                            break
                    ratio = (f_t - f) / pred if pred < 0.0 else 1.0
                    if trace is not None:
                        trace.append({"kind": "tr", "radius": radius,
                                      "snorm": float(np.linalg.norm(s)),
                                      "f0": f, "f1": f_t})
                    if ratio >= 0.75 and constrained:
                        radius = 2.0 * radius
                    elif ratio <= 0.1:
                        radius = 0.5 * radius
                    x_new, r_new, f_new, step = x_t, r_t, f_t, s
                    accepted = True
                    break
                rejects += 1
                if not is_newton and not fresh and rejects >= 2:
                    M = fd_jacobian(fun, x, opts.scheme)
                    jcnt += 1
                    fresh = True
                    g = M.T @ r
                    try:
                        d_newton = solve_linear(M, -r)
                    except SingularMatrixError:
                        d_newton = None
                    rejects = 0
                    continue
                floor = opts.xtol * (1.0 + float(np.max(np.abs(x))))
                new_radius = 0.5 * float(np.linalg.norm(s))
                if new_radius < floor:
                    return result(5, it)
                radius = new_radius
            if not accepted:
                return result(5, it)

        if not is_newton:
            try:
                M = broyden_update(M, step, r_new - r)
            except DegenerateStepError:
                pass
        fresh = False
        x, r, f = x_new, r_new, f_new
        if trace is not None:
            trace.append({"kind": "iter", "fmax": float(np.max(np.abs(r)))})
        if float(np.max(np.abs(r))) <= opts.ftol:
            return result(1, it)
        if float(np.max(np.abs(step) / np.maximum(np.abs(x), 1.0))) <= opts.xtol:
            return result(2, it)

    return result(4, opts.max_iter)
