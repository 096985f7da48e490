"""Independent scalar-math oracles used by the tests.

These re-derive the built-in residuals term by term with plain Python
floats, deliberately sharing no code with the package kernels.
"""

import math


def dgv_full_oracle(x, rhs):
    sigmax, sigmay, sigmaa, sigmab, sigmac, sigmad, sigmae, sigmaf = rhs
    a, b, c, d, t, u, v, w = x
    t2mv2 = t * t - v * v
    u2mw2 = u * u - w * w
    t2m3v2 = t * t - 3.0 * v * v
    v2m3t2 = v * v - 3.0 * t * t
    u2m3w2 = u * u - 3.0 * w * w
    w2m3u2 = w * w - 3.0 * u * u
    return [
        a + b - sigmax,
        c + d - sigmay,
        a * t + b * u - c * v - d * w - sigmaa,
        a * v + b * w + c * t + d * u - sigmab,
        a * t2mv2 - 2.0 * (c * t * v) + b * u2mw2 - 2.0 * (d * u * w) - sigmac,
        c * t2mv2 + 2.0 * (a * t * v) + d * u2mw2 + 2.0 * (b * u * w) - sigmad,
        (a * t) * t2m3v2 + (c * v) * v2m3t2 + (b * u) * u2m3w2
        + (d * w) * w2m3u2 - sigmae,
        (c * t) * t2m3v2 - (a * v) * v2m3t2 + (d * u) * u2m3w2
        - (b * w) * w2m3u2 - sigmaf,
    ]


def dgv_reduced_oracle(x, rhs):
    sigmax, sigmay, sigmaa, sigmab, sigmac, sigmad, sigmae, sigmaf = rhs
    a, c, t, u, v, w = x
    b = sigmax - a
    d = sigmay - c
    t2mv2 = t * t - v * v
    u2mw2 = u * u - w * w
    t2m3v2 = t * t - 3.0 * v * v
    v2m3t2 = v * v - 3.0 * t * t
    u2m3w2 = u * u - 3.0 * w * w
    w2m3u2 = w * w - 3.0 * u * u
    return [
        a * t + b * u - c * v - d * w - sigmaa,
        a * v + b * w + c * t + d * u - sigmab,
        a * t2mv2 - 2.0 * (c * t * v) + b * u2mw2 - 2.0 * (d * u * w) - sigmac,
        c * t2mv2 + 2.0 * (a * t * v) + d * u2mw2 + 2.0 * (b * u * w) - sigmad,
        (a * t) * t2m3v2 + (c * v) * v2m3t2 + (b * u) * u2m3w2
        + (d * w) * w2m3u2 - sigmae,
        (c * t) * t2m3v2 - (a * v) * v2m3t2 + (d * u) * u2m3w2
        - (b * w) * w2m3u2 - sigmaf,
    ]


def trigexp_oracle(x):
    n = len(x)
    f = [0.0] * n
    f[0] = (3.0 * x[0] ** 2 + 2.0 * x[1] - 5.0
            + math.sin(x[0] - x[1]) * math.sin(x[0] + x[1]))
    for i in range(1, n - 1):
        f[i] = (-x[i - 1] * math.exp(x[i - 1] - x[i])
                + x[i] * (4.0 + 3.0 * x[i] ** 2) + 2.0 * x[i + 1]
                + math.sin(x[i] - x[i + 1]) * math.sin(x[i] + x[i + 1]) - 8.0)
    f[n - 1] = -x[n - 2] * math.exp(x[n - 2] - x[n - 1]) + 4.0 * x[n - 1] - 3.0
    return f


def brent_oracle(x):
    n = len(x)
    f = [0.0] * n
    f[0] = 3.0 * x[0] * (x[1] - 2.0 * x[0]) + (x[1] ** 2) / 4.0
    for i in range(1, n - 1):
        f[i] = (3.0 * x[i] * (x[i + 1] - 2.0 * x[i] + x[i - 1])
                + ((x[i + 1] - x[i - 1]) ** 2) / 4.0)
    f[n - 1] = (3.0 * x[n - 1] * (20.0 - 2.0 * x[n - 1] + x[n - 2])
                + ((20.0 - x[n - 2]) ** 2) / 4.0)
    return f


def simple2_oracle(x):
    return [x[0] ** 2 + x[1] ** 2 - 2.0,
            math.exp(x[0] - 1.0) + x[1] ** 3 - 2.0]
