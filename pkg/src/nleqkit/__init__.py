"""nleqkit: solvers and a benchmarking harness for nonlinear equations r(x)=0.

Solver families: Newton/Broyden root finding with seven global strategies,
a derivative-free spectral residual method with optional secant
acceleration, damped (Levenberg-Marquardt) least squares, and sum-of-squares
minimizers (BFGS variable metric, nonlinear CG, Nelder-Mead).
"""

from ._accel import NUMBA_ENABLED
from .dfsane import (SpectralOptions, SpectralResult, solve_spectral,
                     solve_spectral_accelerated)
from .exceptions import (DegenerateStepError, DimensionError, EvaluationError,
                         NleqkitError, SingularMatrixError, SingularStepError,
                         UnknownProblemError)
from .harness import (CascadeResult, ComparisonReport, GridReport, GridRow,
                      SolverConfig, make_solver, run_cascade, run_comparison,
                      run_grid)
from .leastsq import LsqOptions, LsqResult, lm_step, solve_lsq
from .minimize import (MinimizeOptions, MinimizeResult, ScaledObjective,
                       minimize, sumsq)
from .numlin import (BACKWARD, CENTRAL, FORWARD, JacobianScheme, fd_gradient,
                     fd_jacobian, singular_values, solve_linear)
from .problems import (DgvData, ProblemSpec, brent_residual, catalog,
                       dgv_full_residual, dgv_prep, dgv_reduce,
                       dgv_reduced_residual, dgv_unreduce, get_problem,
                       simple2_residual, trigexp_residual)
from .rootfind import (RootOptions, RootResult, broyden_update, newton_step,
                       solve_root)

__version__ = "0.1.0"
