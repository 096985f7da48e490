"""Dense linear algebra and finite-difference derivatives.

Small, deterministic routines sized for the problems in this package
(n <= 500, cheap residuals): a partial-pivot LU solve with an explicit
singularity threshold, LAPACK singular values, and forward/backward/central
difference Jacobians and gradients.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, EvaluationError, SingularMatrixError

_EPS = float(np.finfo(float).eps)

__all__ = [
    "JacobianScheme", "FORWARD", "BACKWARD", "CENTRAL",
    "solve_linear", "singular_values", "fd_jacobian", "fd_gradient",
]


@dataclass(frozen=True)
class JacobianScheme:
    """Finite-difference scheme and relative step size.

    ``step=None`` picks the truncation/roundoff balance for the scheme:
    sqrt(eps) for one-sided differences, eps**(1/3) for central.
    """

    scheme: str = "forward"
    step: float | None = None

    def __post_init__(self):
        if self.scheme not in ("forward", "backward", "central"):
            raise ValueError(f"unknown difference scheme: {self.scheme!r}")
        if self.step is not None and not self.step > 0.0:
            raise ValueError("step must be strictly positive")

    @property
    def h(self) -> float:
        if self.step is not None:
            return self.step
        if self.scheme == "central":
            return _EPS ** (1.0 / 3.0)
        return math.sqrt(_EPS)


FORWARD = JacobianScheme("forward")
BACKWARD = JacobianScheme("backward")
CENTRAL = JacobianScheme("central")


def solve_linear(A, b) -> np.ndarray:
    """Solve A y = b by LU factorization with partial pivoting.

    Raises SingularMatrixError (carrying the offending pivot) when a pivot
    falls below n * eps * ||A||_inf.
    """
    A = np.array(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"A must be square, got shape {A.shape}")
    n = A.shape[0]
    if b.shape != (n,):
        raise DimensionError(f"b must have length {n}, got shape {b.shape}")

    norm_a = float(np.max(np.sum(np.abs(A), axis=1))) if n else 0.0
    threshold = n * _EPS * norm_a
    y = b.copy()
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        pivot = A[p, k]
        if abs(pivot) <= threshold:
            raise SingularMatrixError(abs(pivot), threshold)
        if p != k:
            A[[k, p]] = A[[p, k]]
            y[[k, p]] = y[[p, k]]
        mult = A[k + 1:, k] / pivot
        A[k + 1:, k + 1:] -= np.outer(mult, A[k, k + 1:])
        y[k + 1:] -= mult * y[k]
        A[k + 1:, k] = mult
    for k in range(n - 1, -1, -1):
        y[k] = (y[k] - A[k, k + 1:] @ y[k + 1:]) / A[k, k]
    return y


def singular_values(A) -> np.ndarray:
    """Singular values of A in descending order."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"A must be a matrix, got shape {A.shape}")
    return np.linalg.svd(A, compute_uv=False)


def _steps(x: np.ndarray, h: float) -> np.ndarray:
    return h * np.maximum(np.abs(x), 1.0)


def fd_jacobian(f, x, scheme: JacobianScheme = FORWARD) -> np.ndarray:
    """Finite-difference Jacobian of a vector function, column by column.

    A non-finite evaluation at a perturbed point raises EvaluationError
    naming the column.
    """
    x = np.asarray(x, dtype=float)
    hs = _steps(x, scheme.h)
    if scheme.scheme == "central":
        base = None
    else:
        base = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(base)):
            raise EvaluationError("non-finite residual at base point", x=x)
    cols = []
    for j in range(x.size):
        xp = x.copy()
        if scheme.scheme == "forward":
            xp[j] += hs[j]
            col = (np.asarray(f(xp), dtype=float) - base) / hs[j]
        elif scheme.scheme == "backward":
            xp[j] -= hs[j]
            col = (base - np.asarray(f(xp), dtype=float)) / hs[j]
        else:
            xm = x.copy()
            xp[j] += hs[j]
            xm[j] -= hs[j]
            col = ((np.asarray(f(xp), dtype=float)
                    - np.asarray(f(xm), dtype=float)) / (2.0 * hs[j]))
        if not np.all(np.isfinite(col)):
            raise EvaluationError(
                f"non-finite residual while differencing column {j}",
                x=xp, column=j)
        cols.append(col)
    return np.column_stack(cols)


def fd_gradient(g, x, scheme: JacobianScheme = CENTRAL) -> np.ndarray:
    """Finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    hs = _steps(x, scheme.h)
    grad = np.empty(x.size)
    if scheme.scheme != "central":
        g0 = float(g(x))
        if not math.isfinite(g0):
            raise EvaluationError("non-finite objective at base point", x=x)
    for j in range(x.size):
        xp = x.copy()
        if scheme.scheme == "forward":
            xp[j] += hs[j]
            grad[j] = (float(g(xp)) - g0) / hs[j]
        elif scheme.scheme == "backward":
            xp[j] -= hs[j]
            grad[j] = (g0 - float(g(xp))) / hs[j]
        else:
            xm = x.copy()
            xp[j] += hs[j]
            xm[j] -= hs[j]
            grad[j] = (float(g(xp)) - float(g(xm))) / (2.0 * hs[j])
        if not math.isfinite(grad[j]):
            raise EvaluationError(
                f"non-finite objective while differencing column {j}",
                x=xp, column=j)
    return grad
