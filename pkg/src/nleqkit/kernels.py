"""Residual kernels for the built-in test problems.

Each kernel has the uniform signature ``kernel(x, rhs) -> fvec`` over
contiguous float64 arrays (``rhs`` is ignored by problems without a
right-hand side) so the jitted spectral solver can take any of them as a
first-class function argument.  The ``*_py`` names keep the uncompiled
versions importable for the fallback/benchmark comparison.
"""

import numpy as np

from ._accel import jit_kernel


def _dgv_full(x, rhs):
    # 8-parameter electrochemistry system: two linear equations followed by
    # bilinear, cubic and quartic combinations of (a,b,c,d,t,u,v,w) = x[0..7].
    sigmax = rhs[0]
    sigmay = rhs[1]
    sigmaa = rhs[2]
    sigmab = rhs[3]
    sigmac = rhs[4]
    sigmad = rhs[5]
    sigmae = rhs[6]
    sigmaf = rhs[7]

    t2mv2 = x[4] ** 2 - x[6] ** 2
    u2mw2 = x[5] ** 2 - x[7] ** 2
    t2m3v2 = x[4] ** 2 - 3.0 * x[6] ** 2
    v2m3t2 = x[6] ** 2 - 3.0 * x[4] ** 2
    u2m3w2 = x[5] ** 2 - 3.0 * x[7] ** 2
    w2m3u2 = x[7] ** 2 - 3.0 * x[5] ** 2
    ctv = x[2] * x[4] * x[6]
    duw = x[3] * x[5] * x[7]
    atv = x[0] * x[4] * x[6]
    buw = x[1] * x[5] * x[7]
    at = x[0] * x[4]
    bu = x[1] * x[5]
    cv = x[2] * x[6]
    dw = x[3] * x[7]
    ct = x[2] * x[4]
    av = x[0] * x[6]
    du = x[3] * x[5]
    bw = x[1] * x[7]

    fvec = np.empty(8)
    fvec[0] = x[0] + x[1] - sigmax
    fvec[1] = x[2] + x[3] - sigmay
    fvec[2] = at + bu - cv - dw - sigmaa
    fvec[3] = av + bw + ct + du - sigmab
    fvec[4] = x[0] * t2mv2 - 2.0 * ctv + x[1] * u2mw2 - 2.0 * duw - sigmac
    fvec[5] = x[2] * t2mv2 + 2.0 * atv + x[3] * u2mw2 + 2.0 * buw - sigmad
    fvec[6] = at * t2m3v2 + cv * v2m3t2 + bu * u2m3w2 + dw * w2m3u2 - sigmae
    fvec[7] = ct * t2m3v2 - av * v2m3t2 + du * u2m3w2 - bw * w2m3u2 - sigmaf
    return fvec


def _dgv_reduced(x, rhs):
    # 6-parameter form: b and d eliminated through the two linear equations,
    # b = sigmax - a and d = sigmay - c, with (a,c,t,u,v,w) = x[0..5].
    sigmax = rhs[0]
    sigmay = rhs[1]
    sigmaa = rhs[2]
    sigmab = rhs[3]
    sigmac = rhs[4]
    sigmad = rhs[5]
    sigmae = rhs[6]
    sigmaf = rhs[7]

    t2mv2 = x[2] ** 2 - x[4] ** 2
    u2mw2 = x[3] ** 2 - x[5] ** 2
    t2m3v2 = x[2] ** 2 - 3.0 * x[4] ** 2
    v2m3t2 = x[4] ** 2 - 3.0 * x[2] ** 2
    u2m3w2 = x[3] ** 2 - 3.0 * x[5] ** 2
    w2m3u2 = x[5] ** 2 - 3.0 * x[3] ** 2
    b = sigmax - x[0]
    d = sigmay - x[1]
    ctv = x[1] * x[2] * x[4]
    duw = d * x[3] * x[5]
    atv = x[0] * x[2] * x[4]
    buw = b * x[3] * x[5]
    at = x[0] * x[2]
    bu = b * x[3]
    cv = x[1] * x[4]
    dw = d * x[5]
    ct = x[1] * x[2]
    av = x[0] * x[4]
    du = d * x[3]
    bw = b * x[5]

    fvec = np.empty(6)
    fvec[0] = at + bu - cv - dw - sigmaa
    fvec[1] = av + bw + ct + du - sigmab
    fvec[2] = x[0] * t2mv2 - 2.0 * ctv + b * u2mw2 - 2.0 * duw - sigmac
    fvec[3] = x[1] * t2mv2 + 2.0 * atv + d * u2mw2 + 2.0 * buw - sigmad
    fvec[4] = at * t2m3v2 + cv * v2m3t2 + bu * u2m3w2 + dw * w2m3u2 - sigmae
    fvec[5] = ct * t2m3v2 - av * v2m3t2 + du * u2m3w2 - bw * w2m3u2 - sigmaf
    return fvec


def _simple2(x, rhs):
    fvec = np.empty(2)
    fvec[0] = x[0] ** 2 + x[1] ** 2 - 2.0
    fvec[1] = np.exp(x[0] - 1.0) + x[1] ** 3 - 2.0
    return fvec


def _trigexp(x, rhs):
    # Three-band system: quadratic head, trig/exponential interior, exp tail.
    n = x.shape[0]
    fvec = np.empty(n)
    fvec[0] = (3.0 * x[0] ** 2 + 2.0 * x[1] - 5.0
               + np.sin(x[0] - x[1]) * np.sin(x[0] + x[1]))
    xm = x[:-2]
    xc = x[1:-1]
    xp = x[2:]
    fvec[1:-1] = (-xm * np.exp(xm - xc) + xc * (4.0 + 3.0 * xc ** 2)
                  + 2.0 * xp + np.sin(xc - xp) * np.sin(xc + xp) - 8.0)
    fvec[n - 1] = -x[n - 2] * np.exp(x[n - 2] - x[n - 1]) + 4.0 * x[n - 1] - 3.0
    return fvec


def _brent(x, rhs):
    # Tridiagonal second-difference system with boundary value 20 at the top.
    n = x.shape[0]
    fvec = np.empty(n)
    fvec[0] = 3.0 * x[0] * (x[1] - 2.0 * x[0]) + (x[1] ** 2) / 4.0
    xm = x[:-2]
    xc = x[1:-1]
    xp = x[2:]
    fvec[1:-1] = 3.0 * xc * (xp - 2.0 * xc + xm) + ((xp - xm) ** 2) / 4.0
    fvec[n - 1] = (3.0 * x[n - 1] * (20.0 - 2.0 * x[n - 1] + x[n - 2])
                   + ((20.0 - x[n - 2]) ** 2) / 4.0)
    return fvec


dgv_full_py = _dgv_full
dgv_reduced_py = _dgv_reduced
simple2_py = _simple2
trigexp_py = _trigexp
brent_py = _brent

dgv_full = jit_kernel(_dgv_full)
dgv_reduced = jit_kernel(_dgv_reduced)
simple2 = jit_kernel(_simple2)
trigexp = jit_kernel(_trigexp)
brent = jit_kernel(_brent)

EMPTY_RHS = np.empty(0)
