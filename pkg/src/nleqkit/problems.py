"""Built-in test problems and the registry the CLI and harness use.

Four problem families are provided:

* the Dennis-Gay-Vu electrochemistry system, in its full 8-parameter and
  reduced 6-parameter forms, with five published data sets selected by
  problem id;
* ``simple2``, a 2x2 system whose sum of squares has a non-root local
  minimum that traps many minimizers;
* ``trigexp``, a three-band trigonometric/exponential system of arbitrary
  size with known solution at all ones;
* ``brent``, a tridiagonal boundary-value system of arbitrary size.

Registry names: ``dgv-full:<pid>``, ``dgv-reduced:<pid>``, ``simple2``,
``trigexp:<n>``, ``brent:<n>``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .exceptions import DimensionError, UnknownProblemError

__all__ = [
    "DgvData", "ProblemSpec", "dgv_prep", "dgv_reduce", "dgv_unreduce",
    "dgv_full_residual", "dgv_reduced_residual", "simple2_residual",
    "trigexp_residual", "brent_residual", "get_problem", "catalog",
    "DGV_PIDS",
]

SIGMA_NAMES = ("sigmax", "sigmay", "sigmaa", "sigmab",
               "sigmac", "sigmad", "sigmae", "sigmaf")

# Right-hand sides, starts and reference solutions for the five published
# data sets, keyed by problem id.
_DGV_TABLE = {
    "791129": dict(
        sigma=[0.485, -0.0019, -0.0581, 0.015, 0.105, 0.0406, 0.167, -0.399],
        x0=[0.299, 0.186, -0.0273, 0.0254, -0.474, 0.474, -0.0892, 0.0892],
        xstar=[-6.321349025e-3, 4.913213490e-1, -1.998156408e-3,
               9.815640840e-5, 1.226569755e-1, -1.003153205e-1,
               -4.023517593, -2.071785527e-2],
    ),
    "791226": dict(
        sigma=[-0.69, -0.044, -1.57, -1.31, -2.65, 2.0, -12.6, 9.48],
        x0=[-0.3, -0.39, 0.3, -0.344, -1.2, 2.69, 1.59, -1.5],
        xstar=[-3.116266056e-1, -3.783733944e-1, 3.282442301e-1,
               -3.722442301e-1, -1.282227094, 2.494300312,
               1.554865879, -1.384637843],
    ),
    "0121a": dict(
        sigma=[-0.816, -0.017, -1.826, -0.754, -4.839, -3.259, -14.023, 15.467],
        x0=[-0.41, -0.775, 0.03, -0.047, -2.565, 2.565, -0.754, 0.754],
        xstar=[3.099869097e-3, -8.190998691e-1, -2.239405352e-4,
               -1.677605946e-2, 2.681514498, 2.250215931,
               -2.024170463e+1, 7.970982952e-1],
    ),
    "0121b": dict(
        sigma=[-0.809, -0.021, -2.04, -0.614, -6.903, -2.934, -26.328, 18.639],
        x0=[-0.056, -0.753, 0.026, -0.047, -2.991, 2.991, -0.568, 0.568],
        xstar=[9.034542990e-3, -8.180345430e-1, -4.450738446e-4,
               -2.055492616e-2, 2.773429036, 2.529477259,
               -1.480097186e+1, 5.220468844e-1],
    ),
    "0121c": dict(
        sigma=[-0.807, -0.021, -2.379, -0.364, -10.541, -1.961, -51.551, 21.053],
        x0=[-0.074, -0.733, 0.013, -0.034, -3.632, 3.632, -0.289, 0.289],
        xstar=[5.140417418e-2, -8.584041742e-1, 1.047333626e-3,
               -2.204733363e-2, 2.861205288, 2.949155438,
               -8.304243489, -1.454992413e-1],
    ),
}

DGV_PIDS = tuple(_DGV_TABLE)

# Indices (0-based) kept by the full -> reduced parameter mapping.
_REDUCE_IDX = (0, 2, 4, 5, 6, 7)


@dataclass(frozen=True)
class DgvData:
    """One Dennis-Gay-Vu data set.

    ``sigma`` always holds the 8 right-hand sides; ``x0`` has 8 entries for
    the full form and 6 for the reduced form; ``xstar`` is the published
    8-parameter reference solution in both cases.
    """

    pid: str
    sigma: np.ndarray
    x0: np.ndarray
    xstar: np.ndarray
    reduced: bool


def dgv_prep(pid: str, reduced: bool = False) -> DgvData:
    """Look up the data set for ``pid``; unknown ids raise UnknownProblemError."""
    try:
        row = _DGV_TABLE[pid]
    except KeyError:
        raise UnknownProblemError(pid) from None
    sigma = np.array(row["sigma"])
    x0 = np.array(row["x0"])
    xstar = np.array(row["xstar"])
    if reduced:
        x0 = x0[list(_REDUCE_IDX)]
    return DgvData(pid=pid, sigma=sigma, x0=x0, xstar=xstar, reduced=reduced)


def _check_len(name: str, x: np.ndarray, n: int) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != n:
        raise DimensionError(f"{name} must be a vector of length {n}, "
                             f"got shape {x.shape}")
    return x


def dgv_full_residual(x, rhs) -> np.ndarray:
    x = _check_len("x", x, 8)
    rhs = _check_len("rhs", rhs, 8)
    return kernels.dgv_full(x, rhs)


def dgv_reduced_residual(x, rhs) -> np.ndarray:
    x = _check_len("x", x, 6)
    rhs = _check_len("rhs", rhs, 8)
    return kernels.dgv_reduced(x, rhs)


def dgv_reduce(x_full) -> np.ndarray:
    """Select the six parameters (1,3,5,6,7,8) of a full-form vector."""
    x_full = _check_len("x_full", x_full, 8)
    return x_full[list(_REDUCE_IDX)].copy()


def dgv_unreduce(x_red, sigma) -> np.ndarray:
    """Rebuild a full-form vector; b and d come from the linear equations."""
    x_red = _check_len("x_red", x_red, 6)
    sigma = _check_len("sigma", sigma, 8)
    x = np.empty(8)
    x[0] = x_red[0]
    x[1] = sigma[0] - x_red[0]
    x[2] = x_red[1]
    x[3] = sigma[1] - x_red[1]
    x[4] = x_red[2]
    x[5] = x_red[3]
    x[6] = x_red[4]
    x[7] = x_red[5]
    return x


def simple2_residual(x) -> np.ndarray:
    x = _check_len("x", x, 2)
    return kernels.simple2(x, kernels.EMPTY_RHS)


def trigexp_residual(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 3:
        raise DimensionError(f"trigexp needs a vector of length >= 3, "
                             f"got shape {x.shape}")
    return kernels.trigexp(x, kernels.EMPTY_RHS)


def brent_residual(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 3:
        raise DimensionError(f"brent needs a vector of length >= 3, "
                             f"got shape {x.shape}")
    return kernels.brent(x, kernels.EMPTY_RHS)


@dataclass(frozen=True)
class ProblemSpec:
    """A named square or rectangular residual system r(x) = 0.

    ``residual`` takes ``(x, rhs)``; problems without a right-hand side carry
    an empty ``rhs``.  ``kernel`` is the raw jit-compatible version of the
    residual when one exists (used by the compiled spectral solver); it is
    None for user-supplied Python residuals.  All fields are immutable, so a
    spec can be shared by concurrent solver runs.
    """

    name: str
    n_params: int
    n_residuals: int
    residual: Callable[[np.ndarray, np.ndarray], np.ndarray]
    rhs: np.ndarray = field(default_factory=lambda: np.empty(0))
    starts: dict = field(default_factory=dict)
    known_solution: Optional[np.ndarray] = None
    kernel: Optional[Callable] = None

    def fun(self, x) -> np.ndarray:
        """Evaluate the residual at ``x`` with the bound right-hand side."""
        x = np.ascontiguousarray(x, dtype=float)
        if x.shape != (self.n_params,):
            raise DimensionError(
                f"{self.name}: x must have length {self.n_params}, "
                f"got shape {x.shape}")
        return self.residual(x, self.rhs)

    def start(self, name: str) -> np.ndarray:
        try:
            return self.starts[name].copy()
        except KeyError:
            raise UnknownProblemError(f"{self.name}:{name}") from None

    def default_start(self) -> np.ndarray:
        first = next(iter(self.starts))
        return self.starts[first].copy()


# Additional documented starts for simple2.  xstart1 sits in the root's
# basin (minimizers reach (1, 1) from it); xstart2 lies beyond the
# sum-of-squares local minimum near (1.485, 0), from which root solvers
# still reach (1, 1) but minimizers typically stop at the local minimum;
# xstart3 is the near-trap start.
SIMPLE2_STARTS = {
    "xstart1": np.array([0.5, 1.5]),
    "xstart2": np.array([2.0, 0.5]),
    "xstart3": np.array([1.48508, -1.0886e-06]),
}

TRIGEXP_DEFAULT_N = 500
BRENT_DEFAULT_N = 50


def _dgv_full_problem(pid: str) -> ProblemSpec:
    data = dgv_prep(pid)
    return ProblemSpec(
        name=f"dgv-full:{pid}",
        n_params=8,
        n_residuals=8,
        residual=kernels.dgv_full,
        rhs=data.sigma,
        starts={"x0": data.x0, "10x0": 10.0 * data.x0, "100x0": 100.0 * data.x0},
        known_solution=data.xstar,
        kernel=kernels.dgv_full,
    )


def _dgv_reduced_problem(pid: str) -> ProblemSpec:
    data = dgv_prep(pid, reduced=True)
    xstar_r = dgv_reduce(data.xstar)
    return ProblemSpec(
        name=f"dgv-reduced:{pid}",
        n_params=6,
        n_residuals=6,
        residual=kernels.dgv_reduced,
        rhs=data.sigma,
        starts={"x0": data.x0, "10x0": 10.0 * data.x0, "100x0": 100.0 * data.x0},
        known_solution=xstar_r,
        kernel=kernels.dgv_reduced,
    )


def _simple2_problem() -> ProblemSpec:
    return ProblemSpec(
        name="simple2",
        n_params=2,
        n_residuals=2,
        residual=kernels.simple2,
        rhs=np.empty(0),
        starts={k: v.copy() for k, v in SIMPLE2_STARTS.items()},
        known_solution=np.array([1.0, 1.0]),
        kernel=kernels.simple2,
    )


def _trigexp_problem(n: int) -> ProblemSpec:
    if n < 3:
        raise DimensionError(f"trigexp needs n >= 3, got {n}")
    return ProblemSpec(
        name=f"trigexp:{n}",
        n_params=n,
        n_residuals=n,
        residual=kernels.trigexp,
        rhs=np.empty(0),
        starts={"x0": np.zeros(n)},
        known_solution=np.ones(n),
        kernel=kernels.trigexp,
    )


def _brent_problem(n: int) -> ProblemSpec:
    if n < 3:
        raise DimensionError(f"brent needs n >= 3, got {n}")
    return ProblemSpec(
        name=f"brent:{n}",
        n_params=n,
        n_residuals=n,
        residual=kernels.brent,
        rhs=np.empty(0),
        starts={"x0": np.ones(n)},
        known_solution=None,
        kernel=kernels.brent,
    )


def get_problem(name: str) -> ProblemSpec:
    """Look a problem up by registry name.

    ``trigexp`` and ``brent`` accept a size suffix (``trigexp:100``); without
    one the documented defaults (500 and 50) apply.
    """
    base, _, arg = name.partition(":")
    if base == "dgv-full" and arg in _DGV_TABLE:
        return _dgv_full_problem(arg)
    if base == "dgv-reduced" and arg in _DGV_TABLE:
        return _dgv_reduced_problem(arg)
    if name == "simple2":
        return _simple2_problem()
    if base == "trigexp":
        n = int(arg) if arg else TRIGEXP_DEFAULT_N
        return _trigexp_problem(n)
    if base == "brent":
        n = int(arg) if arg else BRENT_DEFAULT_N
        return _brent_problem(n)
    raise UnknownProblemError(name)


def catalog() -> list[dict]:
    """Machine-readable listing of the canonical registry entries."""
    names = ([f"dgv-full:{pid}" for pid in DGV_PIDS]
             + [f"dgv-reduced:{pid}" for pid in DGV_PIDS]
             + ["simple2", f"trigexp:{TRIGEXP_DEFAULT_N}", f"brent:{BRENT_DEFAULT_N}"])
    entries = []
    for name in names:
        prob = get_problem(name)
        entries.append({
            "name": name,
            "n_params": prob.n_params,
            "n_residuals": prob.n_residuals,
            "starts": list(prob.starts),
        })
    return entries
