"""Command-line front end.

Subcommands: ``list``, ``solve``, ``grid``, ``cascade``, ``compare``.
Output formats: fixed-width table (default), CSV, JSON.  All numeric output
carries at least 10 significant digits.

Exit status: 0 on success, 1 when --strict is set and the solver did not
converge, 2 on usage errors (unknown problem, start, flag or value).
"""

import argparse
import sys

import numpy as np

from . import harness
from .dfsane import SpectralOptions, solve_spectral, solve_spectral_accelerated
from .exceptions import NleqkitError, UnknownProblemError
from .leastsq import LsqOptions, solve_lsq
from .minimize import MinimizeOptions, ScaledObjective, minimize, sumsq
from .numlin import JacobianScheme
from .problems import catalog, get_problem
from .rootfind import GLOBAL_STRATEGIES, METHODS, RootOptions, solve_root

SOLVER_KINDS = ("root", "dfsane", "dfsaneacc", "lsq", "vm", "cg", "neldermead")


class UsageError(Exception):
    pass


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok != ""])
    except ValueError:
        raise UsageError(f"cannot parse vector: {text!r}") from None


def _resolve_start(problem, start: str):
    """A start is a named start of the problem or an inline vector."""
    if start in problem.starts:
        return start, problem.start(start)
    if any(ch in start for ch in ",+-.0123456789") and start not in problem.starts:
        try:
            vec = _parse_vector(start)
        except UsageError:
            raise UsageError(f"unknown start: {start!r}") from None
        if vec.size != problem.n_params:
            raise UsageError(
                f"inline start has {vec.size} entries, problem "
                f"{problem.name} needs {problem.n_params}")
        return "inline", vec
    raise UsageError(f"unknown start: {start!r}")


def _fmt_vec(x) -> str:
    return "[" + ", ".join(f"{v:.10e}" for v in x) + "]"


def _add_common(p):
    p.add_argument("--format", choices=("table", "csv", "json"),
                   default="table")


def _add_solver_flags(p):
    p.add_argument("--solver", choices=SOLVER_KINDS, default="root")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--global", dest="global_", choices=GLOBAL_STRATEGIES)
    p.add_argument("--jac", choices=("forward", "backward", "central"))
    p.add_argument("--maxiter", type=int)
    p.add_argument("--ftol", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--M", dest="memory", type=int)
    p.add_argument("--history", type=int)
    p.add_argument("--parscale")
    p.add_argument("--rscale")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nleqkit",
        description="Solvers and benchmarks for systems of nonlinear equations")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="list the problem registry")
    _add_common(p_list)

    p_solve = sub.add_parser("solve", help="run one solver on one problem")
    p_solve.add_argument("--problem", required=True)
    p_solve.add_argument("--start", default=None)
    p_solve.add_argument("--strict", action="store_true")
    _add_solver_flags(p_solve)
    _add_common(p_solve)

    p_grid = sub.add_parser("grid", help="method x global grid of root solves")
    p_grid.add_argument("--problem", required=True)
    p_grid.add_argument("--start", default=None)
    p_grid.add_argument("--method", default=",".join(METHODS))
    p_grid.add_argument("--global", dest="global_",
                        default=",".join(GLOBAL_STRATEGIES))
    p_grid.add_argument("--jac", choices=("forward", "backward", "central"))
    p_grid.add_argument("--maxiter", type=int)
    p_grid.add_argument("--ftol", type=float)
    p_grid.add_argument("--parallel", action="store_true")
    _add_common(p_grid)

    p_casc = sub.add_parser("cascade",
                            help="stop at the first satisfactory root solve")
    p_casc.add_argument("--problem", required=True)
    p_casc.add_argument("--start", default=None)
    p_casc.add_argument("--method", default=",".join(METHODS))
    p_casc.add_argument("--global", dest="global_",
                        default="qline,cline,gline,pwldog,dbldog,hook,none")
    p_casc.add_argument("--jac", choices=("forward", "backward", "central"))
    p_casc.add_argument("--maxiter", type=int)
    p_casc.add_argument("--ftol", type=float)
    p_casc.add_argument("--strict", action="store_true")
    _add_common(p_casc)

    p_cmp = sub.add_parser("compare",
                           help="compare solver families over problems and starts")
    p_cmp.add_argument("--problem", required=True,
                       help="comma-separated problem names")
    p_cmp.add_argument("--start", default=None,
                       help="comma-separated start names (default: all)")
    p_cmp.add_argument("--solver", default="root,dfsane,lsq,vm",
                       help="comma-separated solver kinds")
    p_cmp.add_argument("--reps", type=int, default=0)
    p_cmp.add_argument("--parallel", action="store_true")
    p_cmp.add_argument("--strict", action="store_true")
    _add_common(p_cmp)
    return parser


def _root_options(args) -> RootOptions:
    kw = {}
    if args.method:
        kw["method"] = args.method
    if getattr(args, "global_", None):
        kw["global_strategy"] = args.global_
    if args.jac:
        kw["scheme"] = JacobianScheme(args.jac)
    if args.maxiter is not None:
        kw["max_iter"] = args.maxiter
    if args.ftol is not None:
        kw["ftol"] = args.ftol
    return RootOptions(**kw)


def _spectral_options(args, accelerated: bool) -> SpectralOptions:
    kw = {"acceleration": accelerated}
    if args.memory is not None:
        kw["memory"] = args.memory
    if args.history is not None:
        kw["history"] = args.history
    if args.tol is not None:
        kw["tol"] = args.tol
    if args.maxiter is not None:
        kw["max_iter"] = args.maxiter
    return SpectralOptions(**kw)


def _lsq_options(args) -> LsqOptions:
    kw = {}
    if args.jac:
        kw["scheme"] = JacobianScheme(args.jac)
    if args.tol is not None:
        kw["tol"] = args.tol
    if args.maxiter is not None:
        kw["max_jac"] = args.maxiter
    return LsqOptions(**kw)


def _minimize_options(args) -> MinimizeOptions:
    kw = {"method": args.solver}
    if args.jac:
        kw["scheme"] = JacobianScheme(args.jac)
    if args.maxiter is not None:
        kw["max_iter"] = args.maxiter
    if args.parscale:
        kw["parscale"] = _parse_vector(args.parscale)
    return MinimizeOptions(**kw)


def _cmd_list(args) -> int:
    entries = catalog()
    if args.format == "json":
        print(harness.report_to_json(entries))
    elif args.format == "csv":
        print("Name,Nparams,Nresiduals,Starts")
        for e in entries:
            print(f"{e['name']},{e['n_params']},{e['n_residuals']},"
                  f"{' '.join(e['starts'])}")
    else:
        rows = [{"Name": e["name"], "Nparams": e["n_params"],
                 "Nresiduals": e["n_residuals"],
                 "Starts": " ".join(e["starts"])} for e in entries]
        print(harness._table(("Name", "Nparams", "Nresiduals", "Starts"), rows))
    return 0


def _cmd_solve(args) -> int:
    problem = get_problem(args.problem)
    start_name, x0 = _resolve_start(
        problem, args.start if args.start else next(iter(problem.starts)))
    payload = {"problem": problem.name, "start": start_name,
               "solver": args.solver}

    if args.solver == "root":
        res = solve_root(problem, x0, _root_options(args))
        converged = res.termcd == 1
        x = res.x
        payload.update(termcd=res.termcd, message=res.message,
                       fnorm=res.fnorm,
                       counts={"fcnt": res.fcnt, "jcnt": res.jcnt,
                               "iter": res.iter})
    elif args.solver in ("dfsane", "dfsaneacc"):
        solve = (solve_spectral_accelerated if args.solver == "dfsaneacc"
                 else solve_spectral)
        res = solve(problem, x0, _spectral_options(args, args.solver == "dfsaneacc"))
        converged = res.converged
        x = res.x
        payload.update(counts={"iterations": res.iterations,
                               "fevals": res.fevals})
    elif args.solver == "lsq":
        res = solve_lsq(problem, x0, _lsq_options(args))
        converged = res.converged
        x = res.x
        payload.update(singvals=res.singvals, gradient=res.gradient,
                       message=res.message,
                       counts={"jac_evals": res.jac_evals,
                               "fn_evals": res.fn_evals})
    else:
        rscale = _parse_vector(args.rscale) if args.rscale else None
        res = minimize(ScaledObjective(problem, rscale), x0,
                       _minimize_options(args))
        converged = res.converged
        x = res.x
        payload.update(value=res.value, kkt_grad_norm=res.kkt_grad_norm,
                       message=res.message,
                       counts={"fn_evals": res.fn_evals,
                               "gr_evals": res.gr_evals,
                               "iterations": res.iterations})

    payload["x"] = x
    payload["fvec"] = problem.fun(x)
    payload["ss"] = sumsq(problem, x)
    payload["converged"] = bool(converged)

    if args.format == "json":
        print(harness.report_to_json(payload))
    elif args.format == "csv":
        print("Problem,Solver,Start,Converged,SS")
        print(f"{problem.name},{args.solver},{start_name},{converged},"
              f"{payload['ss']:.10e}")
    else:
        print(f"problem: {problem.name}  solver: {args.solver}  "
              f"start: {start_name}")
        print(f"converged: {converged}")
        print(f"ss: {payload['ss']:.10e}")
        print(f"x: {_fmt_vec(x)}")
        print(f"residual: {_fmt_vec(payload['fvec'])}")
    return 0 if (converged or not args.strict) else 1


def _cmd_grid(args) -> int:
    problem = get_problem(args.problem)
    start_name, x0 = _resolve_start(
        problem, args.start if args.start else next(iter(problem.starts)))
    methods = [m for m in args.method.split(",") if m]
    globals_ = [g for g in args.global_.split(",") if g]
    report = harness.run_grid(problem, x0 if start_name == "inline" else start_name,
                              methods, globals_, _root_options_grid(args),
                              parallel=args.parallel)
    report.start = start_name
    if args.format == "json":
        print(harness.report_to_json(harness.grid_to_dict(report)))
    elif args.format == "csv":
        print(harness.grid_to_csv(report), end="")
    else:
        print(harness.grid_to_text(report))
    return 0


def _root_options_grid(args) -> RootOptions:
    kw = {}
    if args.jac:
        kw["scheme"] = JacobianScheme(args.jac)
    if args.maxiter is not None:
        kw["max_iter"] = args.maxiter
    if args.ftol is not None:
        kw["ftol"] = args.ftol
    return RootOptions(**kw)


def _cmd_cascade(args) -> int:
    problem = get_problem(args.problem)
    start_name, x0 = _resolve_start(
        problem, args.start if args.start else next(iter(problem.starts)))
    methods = [m for m in args.method.split(",") if m]
    globals_ = [g for g in args.global_.split(",") if g]
    res = harness.run_cascade(problem,
                              x0 if start_name == "inline" else start_name,
                              methods, globals_, _root_options_grid(args))
    res.start = start_name
    if args.format == "json":
        print(harness.report_to_json(harness.cascade_to_dict(res)))
    else:
        for m, g, termcd, ss in res.trace:
            print(f"method {m}  global {g}  termcd= {termcd}  sumsq= {ss:.10e}")
        if res.winner:
            print(f"winner: {res.winner[0]}/{res.winner[1]}")
            print(f"x: {_fmt_vec(res.result.x)}")
            ss = float(res.result.fvec @ res.result.fvec)
            print(f"sumsq: {ss:.10e}")
        else:
            print("winner: none")
    return 0 if (res.winner or not args.strict) else 1


def _cmd_compare(args) -> int:
    problems = [get_problem(name) for name in args.problem.split(",") if name]
    starts = ([s for s in args.start.split(",") if s]
              if args.start and args.start != "all" else None)
    solvers = []
    for kind in args.solver.split(","):
        kind = kind.strip()
        if not kind:
            continue
        if kind not in SOLVER_KINDS:
            raise UsageError(f"unknown solver: {kind!r}")
        solvers.append(harness.make_solver(kind))
    report = harness.run_comparison(problems, starts, solvers, reps=args.reps)
    if args.format == "json":
        print(harness.report_to_json(harness.comparison_to_dict(report)))
    elif args.format == "csv":
        print(harness.comparison_to_csv(report), end="")
    else:
        print(harness.comparison_to_text(report))
    ok = all(r.converged for r in report.rows)
    return 0 if (ok or not args.strict) else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"list": _cmd_list, "solve": _cmd_solve, "grid": _cmd_grid,
                "cascade": _cmd_cascade, "compare": _cmd_compare}
    try:
        return handlers[args.command](args)
    except (UsageError, UnknownProblemError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NleqkitError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
