"""Pure-Python (NumPy) likelihood kernels; fallback for ``_kernels.pyx``.

Both modules expose the same three functions with the same semantics:

``negloglik_bivariate(params, x1, x2, region)``
    Negative log-likelihood of the bivariate sample; ``inf`` when any term is
    not finite. ``region`` holds codes 0 (x1<x2), 1 (x1>x2), 2 (tie).
``negloglik_univariate(params, x)``
    Negative log-likelihood of an EGLED sample, params (alpha, a, b, theta).
``fit_simplex(kind, z0, free, fixed, x1, x2, region, step, diam_tol, val_tol, max_iter, zlo, zhi)``
    Nelder-Mead on log-parameters. ``kind`` 0 is bivariate, 1 univariate
    (``x2``/``region`` ignored). Free parameter ``free[j]`` is
    ``exp(clip(z[j], zlo, zhi))``; the rest come from ``fixed``. Returns
    ``(z, fun, iterations, nfev, reason)`` with reason 0 = diameter,
    1 = spread, 2 = iteration cap.
"""

from __future__ import annotations

import math

import numpy as np

from .numerics import SimplexConfig, simplex_minimize

REASONS = ("diameter", "spread", "max_iter")


def _terms(alpha, a, b, x):
    e = a * x + 0.5 * b * x * x
    le = np.log(e)
    ea = np.exp(alpha * le)
    lp = np.log(-np.expm1(-ea))
    ld = np.log(alpha * (a + b * x)) + (alpha - 1.0) * le - ea
    return ld, lp


def negloglik_bivariate(params, x1, x2, region) -> float:
    alpha, a, b, t1, t2, t3 = params
    with np.errstate(all="ignore"):
        ld1, lp1 = _terms(alpha, a, b, x1)
        ld2, lp2 = _terms(alpha, a, b, x2)
        below = region == 0
        above = region == 1
        tie = region == 2
        s = (
            np.count_nonzero(below) * math.log(t2 * (t1 + t3))
            + np.sum(ld1[below] + ld2[below] + (t1 + t3 - 1.0) * lp1[below] + (t2 - 1.0) * lp2[below])
        )
        s += np.count_nonzero(above) * math.log(t1 * (t2 + t3)) + np.sum(
            ld1[above] + ld2[above] + (t1 - 1.0) * lp1[above] + (t2 + t3 - 1.0) * lp2[above]
        )
        s += np.count_nonzero(tie) * math.log(t3) + np.sum(
            ld1[tie] + (t1 + t2 + t3 - 1.0) * lp1[tie]
        )
    s = float(s)
    return -s if math.isfinite(s) else math.inf


def negloglik_univariate(params, x) -> float:
    alpha, a, b, theta = params
    with np.errstate(all="ignore"):
        ld, lp = _terms(alpha, a, b, x)
        s = x.size * math.log(theta) + np.sum(ld + (theta - 1.0) * lp)
    s = float(s)
    return -s if math.isfinite(s) else math.inf


def fit_simplex(kind, z0, free, fixed, x1, x2, region, step, diam_tol, val_tol, max_iter, zlo, zhi):
    params = np.array(fixed, dtype=float)
    free = np.asarray(free, dtype=np.intp)

    def objective(z):
        params[free] = np.exp(np.clip(z, zlo, zhi))
        if kind == 0:
            return negloglik_bivariate(params, x1, x2, region)
        return negloglik_univariate(params, x1)

    cfg = SimplexConfig(diam_tol=diam_tol, val_tol=val_tol, max_iter=max_iter, initial_step=step)
    res = simplex_minimize(objective, z0, cfg)
    return res.x, res.fun, res.iterations, res.nfev, REASONS.index(res.reason)
