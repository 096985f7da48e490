import json
import math

import numpy as np
import pytest

from nleqkit import RootOptions, get_problem, make_solver, run_cascade, run_comparison, run_grid
from nleqkit.harness import (GRID_COLUMNS, cascade_to_dict, comparison_to_csv,
                             comparison_to_text, grid_to_csv, grid_to_dict,
                             grid_to_text, report_to_json)
from nleqkit.minimize import sumsq
from nleqkit.problems import ProblemSpec
from nleqkit.rootfind import GLOBAL_STRATEGIES, METHODS

TRAP_VALUE = 0.183361654677934


def test_grid_shape_on_dgv():
    prob = get_problem("dgv-full:0121a")
    report = run_grid(prob, "x0")
    assert len(report.rows) == 14
    pairs = [(r.method, r.global_strategy) for r in report.rows]
    assert pairs == [(m, g) for m in METHODS for g in GLOBAL_STRATEGIES]
    newton_rows = [r for r in report.rows if r.method == "newton"]
    assert all(r.termcd == 1 for r in newton_rows)
    assert all(r.fnorm <= 1e-16 for r in newton_rows)
    ls_broyden = [r for r in report.rows if r.method == "broyden"
                  and r.global_strategy in ("cline", "qline", "gline")]
    assert all(r.termcd == 1 for r in ls_broyden)
    tr_broyden = [r for r in report.rows if r.method == "broyden"
                  and r.global_strategy in ("pwldog", "dbldog", "hook")]
    for r in tr_broyden:
        assert r.termcd in (1, 4)
        if r.termcd == 4:
            assert r.iter == 150


def test_single_cell_grid():
    prob = get_problem("simple2")
    report = run_grid(prob, np.array([1.0, 1.0]), methods=["newton"],
                      globals_=["none"])
    assert len(report.rows) == 1
    row = report.rows[0]
    assert row.termcd == 1
    assert row.iter <= 1


def test_empty_lists_rejected():
    prob = get_problem("simple2")
    with pytest.raises(ValueError):
        run_grid(prob, "xstart1", methods=[], globals_=["none"])
    with pytest.raises(ValueError):
        run_cascade(prob, "xstart1", methods=["newton"], globals_=[])


def _throwing_problem():
    def resid(x, rhs):
        if x[0] > 1.05:
            raise FloatingPointError("synthetic failure")
        return np.array([x[0] - 1.0, x[1] - 1.0])

    return ProblemSpec(name="thrower", n_params=2, n_residuals=2,
                       residual=resid, rhs=np.empty(0),
                       starts={"x0": np.array([2.0, 2.0])})


def test_grid_fault_isolation():
    prob = _throwing_problem()
    report = run_grid(prob, "x0", methods=["newton"],
                      globals_=["none", "qline"])
    assert len(report.rows) == 2
    # the cell that evaluates past the failure wall becomes termcd=-1 and
    # the other cells are unaffected
    assert any(r.termcd == -1 for r in report.rows)
    codes = {r.global_strategy: r.termcd for r in report.rows}
    assert set(codes) == {"none", "qline"}


def test_grid_rows_against_direct_solves():
    from nleqkit import solve_root
    prob = get_problem("dgv-full:0121a")
    report = run_grid(prob, "x0", methods=["newton"], globals_=["qline"])
    direct = solve_root(prob, prob.start("x0"),
                        RootOptions(method="newton", global_strategy="qline"))
    row = report.rows[0]
    assert (row.termcd, row.fcnt, row.jcnt, row.iter) == (
        direct.termcd, direct.fcnt, direct.jcnt, direct.iter)
    assert row.fnorm == direct.fnorm


def test_grid_determinism_and_parallel_equivalence():
    prob = get_problem("dgv-full:0121a")
    seq1 = run_grid(prob, "x0")
    seq2 = run_grid(prob, "x0")
    par = run_grid(prob, "x0", parallel=True)
    for a, b in zip(seq1.rows, seq2.rows):
        assert a.columns() == b.columns()
    for a, b in zip(seq1.rows, par.rows):
        assert a.columns() == b.columns()
        np.testing.assert_array_equal(a.result.x, b.result.x)


def test_cascade_winner_on_dgv():
    prob = get_problem("dgv-full:0121a")
    res = run_cascade(prob, "x0", methods=["newton", "broyden"],
                      globals_=["qline", "cline", "gline", "pwldog",
                                "dbldog", "hook", "none"])
    assert res.winner == ("newton", "qline")
    ss = float(res.result.fvec @ res.result.fvec)
    assert ss <= 1e-20
    assert res.trace[-1][2] == 1
    assert len(res.trace) == 1


def test_cascade_reversed_order_still_finds_winner():
    prob = get_problem("dgv-full:0121a")
    res = run_cascade(prob, "x0", methods=["broyden", "newton"],
                      globals_=["none", "hook", "dbldog", "pwldog",
                                "gline", "cline", "qline"])
    assert res.winner is not None
    assert len(res.trace) > 1
    ss = float(res.result.fvec @ res.result.fvec)
    assert ss <= 1e-16


def test_cascade_budget_starvation():
    prob = get_problem("dgv-full:0121a")
    res = run_cascade(prob, "x0", opts=RootOptions(max_iter=1))
    assert res.winner is None
    assert res.result is None
    assert len(res.trace) == len(METHODS) * len(GLOBAL_STRATEGIES)


def test_comparison_simple2_has_trap_and_root_rows():
    prob = get_problem("simple2")
    solvers = [make_solver("root", name="newton-qline", method="newton",
                           global_strategy="qline"),
               make_solver("dfsane"),
               make_solver("lsq"),
               make_solver("vm")]
    report = run_comparison([prob], None, solvers)
    assert len(report.rows) == 4 * 3
    ss_ok = [r.ss for r in report.rows if r.ss <= 1e-13]
    trapped = [r.ss for r in report.rows if abs(r.ss - TRAP_VALUE) <= 1e-6]
    assert ss_ok
    assert trapped


def test_comparison_single_solver_equals_direct_call():
    from nleqkit import solve_root
    prob = get_problem("dgv-full:0121a")
    cfg = make_solver("root", method="newton", global_strategy="qline")
    report = run_comparison([prob], ["x0"], [cfg])
    assert len(report.rows) == 1
    direct = solve_root(prob, prob.start("x0"),
                        RootOptions(method="newton", global_strategy="qline"))
    assert report.rows[0].ss == sumsq(prob, direct.x)


def test_comparison_recomputes_unscaled_ss():
    prob = get_problem("dgv-reduced:0121a")
    cfg = make_solver("vm", rscale=np.array([1e8, 1e8, 1e3, 1e3, 1.0, 1.0]),
                      max_iter=100)
    report = run_comparison([prob], ["x0"], [cfg])
    row = report.rows[0]
    assert row.ss == sumsq(prob, row.x)


def test_comparison_timing_block_ordering():
    prob = get_problem("simple2")
    cfg = make_solver("root", method="newton", global_strategy="qline")
    report = run_comparison([prob], ["xstart1"], [cfg], reps=5)
    assert len(report.timings) == 1
    t = report.timings[0]
    assert t.tmin_us <= t.tmean_us <= t.tmax_us
    assert t.reps == 5


def test_comparison_failures_become_rows():
    prob = _throwing_problem()
    cfg = make_solver("root", method="newton", global_strategy="none")
    report = run_comparison([prob], ["x0"], [cfg])
    assert len(report.rows) == 1
    assert math.isnan(report.rows[0].ss)
    assert report.rows[0].error


def test_grid_text_and_csv_columns():
    prob = get_problem("simple2")
    report = run_grid(prob, "xstart1", methods=["newton"], globals_=["qline"])
    text = grid_to_text(report)
    header = text.splitlines()[0].split()
    assert header == list(GRID_COLUMNS)
    csv_text = grid_to_csv(report)
    assert csv_text.splitlines()[0] == ",".join(GRID_COLUMNS)


def test_grid_json_roundtrip():
    prob = get_problem("simple2")
    report = run_grid(prob, "xstart1", methods=["newton"], globals_=["qline"])
    payload = json.loads(report_to_json(grid_to_dict(report)))
    assert payload["problem"] == "simple2"
    assert payload["rows"][0]["Method"] == "Newton"


def test_cascade_json_contains_solution():
    prob = get_problem("dgv-full:0121a")
    res = run_cascade(prob, "x0", methods=["newton"], globals_=["qline"])
    payload = json.loads(report_to_json(cascade_to_dict(res)))
    assert payload["winner"] == {"method": "newton", "global": "qline"}
    x = np.array(payload["x"])
    assert sumsq(prob, x) == payload["sumsq"]


def test_comparison_formats():
    prob = get_problem("simple2")
    report = run_comparison([prob], ["xstart1"], [make_solver("dfsane")],
                            reps=2)
    text = comparison_to_text(report)
    assert "Solver" in text and "times" in text
    csv_text = comparison_to_csv(report)
    assert csv_text.splitlines()[0] == "Problem,Solver,Start,Converged,SS"
