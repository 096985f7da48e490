"""Batch experiment engine: grids, first-success cascades, comparisons.

A grid runs every (method, global strategy) pair and never aborts: a solver
crash becomes a row with termcd = -1.  A cascade runs the pairs in order and
stops at the first row with termcd = 1.  A comparison runs configured solver
families over problems and starts, reporting the recomputed sum of squares
at each returned point, with an optional repeated-timing block.
"""

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dfsane import SpectralOptions, solve_spectral, solve_spectral_accelerated
from .leastsq import LsqOptions, solve_lsq
from .minimize import MinimizeOptions, ScaledObjective, minimize, sumsq
from .numlin import JacobianScheme
from .rootfind import (GLOBAL_STRATEGIES, METHODS, RootOptions, RootResult,
                       TERM_MESSAGES, solve_root)

__all__ = [
    "GridRow", "GridReport", "CascadeResult", "SolverConfig",
    "ComparisonRow", "TimingRow", "ComparisonReport",
    "run_grid", "run_cascade", "run_comparison", "make_solver",
    "grid_to_text", "grid_to_csv", "report_to_json",
    "comparison_to_text", "comparison_to_csv",
]

GRID_COLUMNS = ("Method", "Global", "termcd", "Fcnt", "Jcnt", "Iter",
                "Message", "Fnorm")


@dataclass
class GridRow:
    method: str
    global_strategy: str
    termcd: int
    fcnt: int
    jcnt: int
    iter: int
    message: str
    fnorm: float
    time_us: float
    result: RootResult | None = field(default=None, repr=False)

    def columns(self) -> dict:
        return {
            "Method": self.method.capitalize(),
            "Global": self.global_strategy,
            "termcd": self.termcd,
            "Fcnt": self.fcnt,
            "Jcnt": self.jcnt,
            "Iter": self.iter,
            "Message": self.message,
            "Fnorm": self.fnorm,
        }


@dataclass
class GridReport:
    problem: str
    start: str
    rows: list


@dataclass
class CascadeResult:
    problem: str
    start: str
    winner: tuple | None         # (method, global) of the first termcd=1 pair
    result: RootResult | None
    trace: list                  # (method, global, termcd, sumsq) per attempt


@dataclass(frozen=True)
class SolverConfig:
    """A named, configured solver family for comparisons."""

    name: str
    kind: str                    # root|dfsane|dfsaneacc|lsq|vm|cg|neldermead
    options: dict = field(default_factory=dict)


@dataclass
class ComparisonRow:
    problem: str
    solver: str
    start: str
    ss: float                    # sumsq recomputed at the returned x
    converged: bool
    time_us: float
    x: np.ndarray | None = field(default=None, repr=False)
    error: str | None = None


@dataclass
class TimingRow:
    problem: str
    solver: str
    start: str
    reps: int
    tmin_us: float
    tmean_us: float
    tmax_us: float


@dataclass
class ComparisonReport:
    rows: list
    timings: list


def _now_us() -> float:
    return time.perf_counter_ns() / 1000.0


def _resolve_start(problem, start):
    if isinstance(start, str):
        return start, problem.start(start)
    x0 = np.ascontiguousarray(start, dtype=float)
    return "inline", x0


def _grid_cell(problem, x0, method, glob, opts):
    cell_opts = replace(opts, method=method, global_strategy=glob)
    t0 = _now_us()
    try:
        res = solve_root(problem, x0, cell_opts)
    except Exception:
        return GridRow(method=method, global_strategy=glob, termcd=-1,
                       fcnt=0, jcnt=0, iter=0, message=TERM_MESSAGES[-1],
                       fnorm=math.nan, time_us=_now_us() - t0)
    return GridRow(method=method, global_strategy=glob, termcd=res.termcd,
                   fcnt=res.fcnt, jcnt=res.jcnt, iter=res.iter,
                   message=res.message, fnorm=res.fnorm,
                   time_us=_now_us() - t0, result=res)


def run_grid(problem, start, methods=None, globals_=None,
             opts: RootOptions | None = None, parallel: bool = False) -> GridReport:
    """Run every (method, global) pair; one row per pair in request order."""
    methods = list(METHODS) if methods is None else list(methods)
    globals_ = list(GLOBAL_STRATEGIES) if globals_ is None else list(globals_)
    if not methods or not globals_:
        raise ValueError("methods and globals must be non-empty")
    opts = opts if opts is not None else RootOptions()
    start_name, x0 = _resolve_start(problem, start)
    cells = [(m, g) for m in methods for g in globals_]
    if parallel:
        with ThreadPoolExecutor() as pool:
            rows = list(pool.map(
                lambda mg: _grid_cell(problem, x0, mg[0], mg[1], opts), cells))
    else:
        rows = [_grid_cell(problem, x0, m, g, opts) for m, g in cells]
    return GridReport(problem=problem.name, start=start_name, rows=rows)


def run_cascade(problem, start, methods=None, globals_=None,
                opts: RootOptions | None = None) -> CascadeResult:
    """Try pairs in order (methods outer, globals inner); stop at termcd=1."""
    methods = list(METHODS) if methods is None else list(methods)
    globals_ = list(GLOBAL_STRATEGIES) if globals_ is None else list(globals_)
    if not methods or not globals_:
        raise ValueError("methods and globals must be non-empty")
    opts = opts if opts is not None else RootOptions()
    start_name, x0 = _resolve_start(problem, start)
    trace = []
    for m in methods:
        for g in globals_:
            try:
                res = solve_root(problem, x0, replace(
                    opts, method=m, global_strategy=g))
            except Exception:
                trace.append((m, g, -1, math.nan))
                continue
            ss = float(res.fvec @ res.fvec)
            trace.append((m, g, res.termcd, ss))
            if res.termcd == 1:
                return CascadeResult(problem=problem.name, start=start_name,
                                     winner=(m, g), result=res, trace=trace)
    return CascadeResult(problem=problem.name, start=start_name,
                         winner=None, result=None, trace=trace)


def make_solver(kind: str, name: str | None = None, **options) -> SolverConfig:
    if kind not in ("root", "dfsane", "dfsaneacc", "lsq", "vm", "cg",
                    "neldermead"):
        raise ValueError(f"unknown solver kind: {kind!r}")
    return SolverConfig(name=name or kind, kind=kind, options=dict(options))


def _run_config(cfg: SolverConfig, problem, x0):
    """Run one configured solver; returns (x, converged)."""
    opts = dict(cfg.options)
    if cfg.kind == "root":
        res = solve_root(problem, x0, RootOptions(**opts))
        return res.x, res.termcd == 1
    if cfg.kind == "dfsane":
        res = solve_spectral(problem, x0, SpectralOptions(**opts))
        return res.x, res.converged
    if cfg.kind == "dfsaneacc":
        opts.setdefault("acceleration", True)
        res = solve_spectral_accelerated(problem, x0, SpectralOptions(**opts))
        return res.x, res.converged
    if cfg.kind == "lsq":
        res = solve_lsq(problem, x0, LsqOptions(**opts))
        return res.x, res.converged
    rscale = opts.pop("rscale", None)
    res = minimize(ScaledObjective(problem, rscale), x0,
                   MinimizeOptions(method=cfg.kind, **opts))
    return res.x, res.converged


def run_comparison(problems, starts=None, solvers=(), reps: int = 0) -> ComparisonReport:
    """One row per (problem, solver, start) with the recomputed sum of squares.

    ``starts=None`` uses every named start of each problem.  ``reps > 0``
    adds a timing block with min/mean/max wall time over that many runs.
    """
    rows = []
    timings = []
    for problem in problems:
        names = list(problem.starts) if starts is None else list(starts)
        for cfg in solvers:
            for sname in names:
                if sname not in problem.starts:
                    continue
                x0 = problem.start(sname)
                t0 = _now_us()
                try:
                    x, conv = _run_config(cfg, problem, x0)
                except Exception as err:
                    rows.append(ComparisonRow(
                        problem=problem.name, solver=cfg.name, start=sname,
                        ss=math.nan, converged=False, time_us=_now_us() - t0,
                        error=f"{type(err).__name__}: {err}"))
                    continue
                elapsed = _now_us() - t0
                rows.append(ComparisonRow(
                    problem=problem.name, solver=cfg.name, start=sname,
                    ss=sumsq(problem, x), converged=conv, time_us=elapsed,
                    x=x))
                if reps > 0:
                    times = []
                    for _ in range(reps):
                        t0 = _now_us()
                        try:
                            _run_config(cfg, problem, x0)
                        except Exception:
                            pass
                        times.append(_now_us() - t0)
                    timings.append(TimingRow(
                        problem=problem.name, solver=cfg.name, start=sname,
                        reps=reps, tmin_us=min(times),
                        tmean_us=sum(times) / len(times),
                        tmax_us=max(times)))
    return ComparisonReport(rows=rows, timings=timings)


# ---------------------------------------------------------------------------
# report formatting

def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10e}"
    return str(value)


def _table(headers, rows) -> str:
    cells = [[_fmt(r[h]) for h in headers] for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    for c in cells:
        lines.append("  ".join(v.rjust(w) for v, w in zip(c, widths)))
    return "\n".join(lines)


def grid_to_text(report: GridReport) -> str:
    return _table(GRID_COLUMNS, [r.columns() for r in report.rows])


def grid_to_csv(report: GridReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=GRID_COLUMNS)
    writer.writeheader()
    for r in report.rows:
        writer.writerow({k: _fmt(v) if isinstance(v, float) else v
                         for k, v in r.columns().items()})
    return buf.getvalue()


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def report_to_json(payload) -> str:
    return json.dumps(payload, default=_json_default, indent=2)


def grid_to_dict(report: GridReport) -> dict:
    return {
        "problem": report.problem,
        "start": report.start,
        "rows": [dict(r.columns(), time_us=r.time_us) for r in report.rows],
    }


def cascade_to_dict(res: CascadeResult) -> dict:
    out = {
        "problem": res.problem,
        "start": res.start,
        "winner": ({"method": res.winner[0], "global": res.winner[1]}
                   if res.winner else None),
        "trace": [{"method": m, "global": g, "termcd": t, "sumsq": ss}
                  for m, g, t, ss in res.trace],
    }
    if res.result is not None:
        out["x"] = res.result.x
        out["fvec"] = res.result.fvec
        out["sumsq"] = float(res.result.fvec @ res.result.fvec)
        out["fnorm"] = res.result.fnorm
        out["counts"] = {"fcnt": res.result.fcnt, "jcnt": res.result.jcnt,
                         "iter": res.result.iter}
    return out


COMPARISON_COLUMNS = ("Problem", "Solver", "Start", "Converged", "SS")
TIMING_COLUMNS = ("Problem", "Solver", "Start", "Reps", "Tmin", "Tmean", "Tmax")


def _comparison_rows(report: ComparisonReport):
    return [{"Problem": r.problem, "Solver": r.solver, "Start": r.start,
             "Converged": r.converged, "SS": r.ss} for r in report.rows]


def _timing_rows(report: ComparisonReport):
    return [{"Problem": t.problem, "Solver": t.solver, "Start": t.start,
             "Reps": t.reps, "Tmin": t.tmin_us, "Tmean": t.tmean_us,
             "Tmax": t.tmax_us} for t in report.timings]


def comparison_to_text(report: ComparisonReport) -> str:
    out = _table(COMPARISON_COLUMNS, _comparison_rows(report))
    if report.timings:
        out += "\n\ntimes (microseconds):\n"
        out += _table(TIMING_COLUMNS, _timing_rows(report))
    return out


def comparison_to_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COMPARISON_COLUMNS)
    writer.writeheader()
    for row in _comparison_rows(report):
        writer.writerow({k: _fmt(v) if isinstance(v, float) else v
                         for k, v in row.items()})
    return buf.getvalue()


def comparison_to_dict(report: ComparisonReport) -> dict:
    return {
        "rows": [{"problem": r.problem, "solver": r.solver, "start": r.start,
                  "converged": r.converged, "ss": r.ss, "time_us": r.time_us,
                  "x": r.x, "error": r.error} for r in report.rows],
        "timings": [{"problem": t.problem, "solver": t.solver,
                     "start": t.start, "reps": t.reps, "tmin_us": t.tmin_us,
                     "tmean_us": t.tmean_us, "tmax_us": t.tmax_us}
                    for t in report.timings],
    }
