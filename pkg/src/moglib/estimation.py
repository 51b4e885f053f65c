"""Maximum likelihood for the bivariate EGLED and its nested special cases.

The sample is split into below-diagonal, above-diagonal and tied pairs, each
with its own density branch. Fits run a multistart Nelder-Mead over
log-parameters through the kernel selected in :mod:`moglib._backend`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from . import _backend
from .begled import BegledParams, BivariatePoint, Region
from .egled import EgledParams
from .numerics import NumericalError, RandomStream, chi_square_sf

__all__ = [
    "PartitionedSample",
    "FitConfig",
    "FitResult",
    "UnivariateFit",
    "LrtResult",
    "IcSet",
    "GofResult",
    "FitError",
    "BoundaryError",
    "BIVARIATE_MODELS",
    "UNIVARIATE_MODELS",
    "partition_sample",
    "log_likelihood",
    "score",
    "fit_mle",
    "fit_egled",
    "information_criteria",
    "likelihood_ratio_test",
    "gof_marginal",
    "gof_statistics",
]


class FitError(NumericalError):
    """Every start of a fit ended at an infeasible point."""


class BoundaryError(ValueError):
    """The score was requested at a parameter on the boundary of the space."""


# fixed values per model; None marks a free parameter
BIVARIATE_MODELS: dict[str, tuple[float | None, ...]] = {
    "begled": (None, None, None, None, None, None),
    "bglfr": (1.0, None, None, None, None, None),
    "bvge": (1.0, None, 0.0, None, None, None),
}
UNIVARIATE_MODELS: dict[str, tuple[float | None, ...]] = {
    "E": (1.0, None, 0.0, 1.0),
    "GE": (1.0, None, 0.0, None),
    "GLFR": (1.0, None, None, None),
    "EGLE": (None, None, None, None),
}
# univariate restriction used to initialize each bivariate model's margins
_MARGIN_MODEL = {"begled": "EGLE", "bglfr": "GLFR", "bvge": "GE"}
_NESTING = {"begled": {"bglfr", "bvge"}, "bglfr": {"bvge"}, "bvge": set()}


@dataclass(frozen=True)
class PartitionedSample:
    x1: np.ndarray
    x2: np.ndarray
    region: np.ndarray
    tol: float = 0.0

    @property
    def n(self) -> int:
        return int(self.x1.size)

    @property
    def idx_below(self) -> np.ndarray:
        return np.flatnonzero(self.region == Region.BELOW)

    @property
    def idx_above(self) -> np.ndarray:
        return np.flatnonzero(self.region == Region.ABOVE)

    @property
    def idx_diag(self) -> np.ndarray:
        return np.flatnonzero(self.region == Region.DIAGONAL)

    @property
    def counts(self) -> tuple[int, int, int]:
        c = np.bincount(self.region, minlength=3)
        return int(c[0]), int(c[1]), int(c[2])

    @property
    def pairs(self) -> list[BivariatePoint]:
        return [BivariatePoint(float(a), float(b)) for a, b in zip(self.x1, self.x2)]


def partition_sample(pairs, tol: float = 0.0) -> PartitionedSample:
    """Classify pairs as below / above / on the diagonal.

    ``pairs`` is an ``(n, 2)`` array-like or a sequence of
    :class:`BivariatePoint`. Pairs with ``|x1 - x2| <= tol`` are ties.
    Tied pairs keep their own coordinates; the likelihood evaluates the
    diagonal branch at ``x1``.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if len(pairs) and isinstance(pairs[0], BivariatePoint):
        arr = np.array([[p.x1, p.x2] for p in pairs], dtype=float)
    else:
        arr = np.asarray(pairs, dtype=float)
    if arr.size == 0:
        raise ValueError("empty sample")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must have shape (n, 2)")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("coordinates must be finite and nonnegative")
    x1 = np.ascontiguousarray(arr[:, 0])
    x2 = np.ascontiguousarray(arr[:, 1])
    region = np.full(x1.size, Region.DIAGONAL, dtype=np.int8)
    region[x1 < x2 - tol] = Region.BELOW
    region[x1 > x2 + tol] = Region.ABOVE
    return PartitionedSample(x1, x2, region, tol)


def log_likelihood(p: BegledParams, s: PartitionedSample) -> float:
    """Log-likelihood of the partitioned sample; ``-inf`` when any term underflows."""
    return -_backend.kernels.negloglik_bivariate(np.array(p.as_tuple()), s.x1, s.x2, s.region)


def _score_terms(alpha, a, b, x):
    """Per-observation derivatives of ``log dPsi(x)`` and ``log Psi(x)``.

    Returns ``(dld, dlp, lp)`` where ``dld``/``dlp`` are ``(len(x), 3)``
    arrays of partials with respect to (alpha, a, b).
    """
    e = a * x + 0.5 * b * x * x
    le = np.log(e)
    ea = np.exp(alpha * le)
    lp = np.log(-np.expm1(-ea))
    w = a + b * x
    # d eta / d(a, b) = (x, x^2/2)
    de = np.stack([x, 0.5 * x * x], axis=1)
    dld = np.empty((x.size, 3))
    dld[:, 0] = 1.0 / alpha + le - ea * le
    dld[:, 1:] = (alpha - 1.0) * de / e[:, None] - (alpha * ea / e)[:, None] * de
    dld[:, 1] += 1.0 / w
    dld[:, 2] += x / w
    # d log Psi = ea * d(eta^alpha) / (exp(ea) - 1)
    k = 1.0 / np.expm1(ea)
    dlp = np.empty((x.size, 3))
    dlp[:, 0] = ea * le * k
    dlp[:, 1:] = (alpha * ea / e * k)[:, None] * de
    return dld, dlp, lp


def score(p: BegledParams, s: PartitionedSample) -> np.ndarray:
    """Gradient of :func:`log_likelihood` in (alpha, a, b, theta1, theta2, theta3)."""
    if min(p.as_tuple()) <= 0:
        raise BoundaryError("score needs every parameter strictly positive")
    alpha, a, b, t1, t2, t3 = p.as_tuple()
    g = np.zeros(6)
    dld1, dlp1, lp1 = _score_terms(alpha, a, b, s.x1)
    dld2, dlp2, lp2 = _score_terms(alpha, a, b, s.x2)
    lo, hi, tie = (s.region == r for r in (Region.BELOW, Region.ABOVE, Region.DIAGONAL))
    n1, n2, n3 = s.counts

    # (alpha, a, b): log dPsi terms, then shape-weighted log Psi terms
    g[:3] += dld1[lo].sum(0) + dld2[lo].sum(0) + dld1[hi].sum(0) + dld2[hi].sum(0) + dld1[tie].sum(0)
    g[:3] += (t1 + t3 - 1.0) * dlp1[lo].sum(0) + (t2 - 1.0) * dlp2[lo].sum(0)
    g[:3] += (t1 - 1.0) * dlp1[hi].sum(0) + (t2 + t3 - 1.0) * dlp2[hi].sum(0)
    g[:3] += (t1 + t2 + t3 - 1.0) * dlp1[tie].sum(0)

    sl1, sl2 = lp1[lo].sum(), lp2[lo].sum()
    sh1, sh2 = lp1[hi].sum(), lp2[hi].sum()
    st = lp1[tie].sum()
    g[3] = n1 / (t1 + t3) + sl1 + n2 / t1 + sh1 + st
    g[4] = n1 / t2 + sl2 + n2 / (t2 + t3) + sh2 + st
    g[5] = n1 / (t1 + t3) + sl1 + n2 / (t2 + t3) + sh2 + n3 / t3 + st
    return g


# --------------------------------------------------------------------------
# fitting


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings shared by bivariate and univariate fits.

    ``starts`` counts the heuristic start plus ``starts - 1`` log-uniform
    jitters of it by factors in [1/3, 3]. ``margin_starts`` is the same for
    the marginal fits that build the heuristic start. Every start is first
    screened with a single simplex run to ``screen_diam_tol``; the
    ``refine_top`` best are then refined to full tolerance.
    """

    starts: int = 8
    margin_starts: int = 8
    seed: int = 0
    diam_tol: float = 1e-8
    val_tol: float = 1e-12
    improve_tol: float = 1e-9
    max_iter: int = 20000
    max_restarts: int = 10
    initial_step: float = 0.5
    restart_step: float = 0.25
    lower: float = 1e-8
    upper: float = 1e8
    polish: bool = False
    screen_diam_tol: float = 1e-4
    refine_top: int = 2


@dataclass
class FitResult:
    params: BegledParams
    neg_log_lik: float
    converged: bool
    iterations: int
    model_tag: str
    k: int
    n: int = 0
    partition: tuple[int, int, int] = (0, 0, 0)
    at_boundary: bool = False
    nfev: int = 0
    start_values: list[float] = field(default_factory=list)


@dataclass
class UnivariateFit:
    params: EgledParams
    neg_log_lik: float
    converged: bool
    iterations: int
    model: str
    k: int
    n: int
    at_boundary: bool = False


@dataclass
class _RawFit:
    z: np.ndarray
    fun: float
    converged: bool
    iterations: int
    nfev: int


def _run_from(kind, z0, free, fixed, x1, x2, region, cfg: FitConfig) -> _RawFit:
    """Simplex from ``z0``, restarted from its best vertex until it stops improving."""
    k = _backend.kernels
    zlo, zhi = math.log(cfg.lower), math.log(cfg.upper)
    z, fun, it, nfev, reason = k.fit_simplex(
        kind, z0, free, fixed, x1, x2, region, cfg.initial_step,
        cfg.diam_tol, cfg.val_tol, cfg.max_iter, zlo, zhi,
    )
    total_it, total_fev = it, nfev
    converged = False
    for _ in range(cfg.max_restarts):
        z2, fun2, it, nfev, reason = k.fit_simplex(
            kind, z, free, fixed, x1, x2, region, cfg.restart_step,
            cfg.diam_tol, cfg.val_tol, cfg.max_iter, zlo, zhi,
        )
        total_it += it
        total_fev += nfev
        improvement = fun - fun2
        if fun2 <= fun:
            z, fun = z2, fun2
        if math.isfinite(fun) and improvement < cfg.improve_tol:
            converged = reason != 2
            break
    z = np.clip(z, zlo, zhi)
    return _RawFit(z, fun, converged and math.isfinite(fun), total_it, total_fev)


def _multistart(kind, starts, free, fixed, x1, x2, region, cfg: FitConfig) -> tuple[_RawFit, int, int]:
    k = _backend.kernels
    zlo, zhi = math.log(cfg.lower), math.log(cfg.upper)
    screened = []
    total_it = total_fev = 0
    for z0 in starts:
        z, fun, it, nfev, _ = k.fit_simplex(
            kind, z0, free, fixed, x1, x2, region, cfg.initial_step,
            cfg.screen_diam_tol, cfg.val_tol, cfg.max_iter, zlo, zhi,
        )
        total_it += it
        total_fev += nfev
        screened.append((fun, len(screened), z))
    screened.sort(key=lambda t: (t[0], t[1]))
    best = None
    for fun, _, z in screened[: max(cfg.refine_top, 1)]:
        raw = _run_from(kind, z, free, fixed, x1, x2, region, cfg)
        total_it += raw.iterations
        total_fev += raw.nfev
        if best is None or raw.fun < best.fun:
            best = raw
    return best, total_it, total_fev


def _starts(first: np.ndarray, free, cfg: FitConfig, salt: int) -> list[np.ndarray]:
    """Heuristic start plus jitters; deterministic in (seed, salt)."""
    rng = RandomStream(cfg.seed, salt)
    out = [np.log(first[free])]
    for _ in range(max(cfg.starts, 1) - 1):
        jitter = (rng.uniform(len(free)) * 2.0 - 1.0) * math.log(3.0)
        out.append(out[0] + jitter)
    return out


def _fixed_and_free(template):
    fixed = np.array([0.0 if v is None else v for v in template], dtype=float)
    free = np.array([i for i, v in enumerate(template) if v is None], dtype=np.intp)
    return fixed, free


def _univariate_heuristic(x: np.ndarray, template) -> np.ndarray:
    a0 = 1.0 / float(np.mean(x))
    guess = np.array([1.0, a0, 0.1 * a0 * a0, 1.0])
    return np.array([g if t is None else t for g, t in zip(guess, template)])


def fit_egled(
    xs: Sequence[float], model: str = "EGLE", config: FitConfig = FitConfig(), init: EgledParams | None = None
) -> UnivariateFit:
    """MLE of an EGLED special case: E (a only), GE (a, theta), GLFR (a, b, theta) or EGLE."""
    if model not in UNIVARIATE_MODELS:
        raise ValueError(f"unknown univariate model {model!r}")
    x = np.ascontiguousarray(xs, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("univariate sample must be finite and positive")
    template = UNIVARIATE_MODELS[model]
    fixed, free = _fixed_and_free(template)
    first = np.array(init.as_tuple()) if init is not None else _univariate_heuristic(x, template)
    first = np.where([t is None for t in template], np.maximum(first, config.lower), fixed)
    cfg = FitConfig(**{**config.__dict__, "starts": config.margin_starts})
    starts = _starts(first, free, cfg, salt=1 + list(UNIVARIATE_MODELS).index(model))
    best, _, _ = _multistart(1, starts, free, fixed, x, x, None, cfg)
    if not math.isfinite(best.fun):
        raise FitError(f"{model} fit: no start reached a finite likelihood")
    vals = fixed.copy()
    vals[free] = np.exp(best.z)
    return UnivariateFit(
        params=EgledParams(*vals),
        neg_log_lik=best.fun,
        converged=best.converged,
        iterations=best.iterations,
        model=model,
        k=len(free),
        n=x.size,
        at_boundary=bool(np.any(best.z <= math.log(config.lower) + 1e-9)),
    )


def _bivariate_heuristic(s: PartitionedSample, model: str, cfg: FitConfig) -> np.ndarray:
    """Fit each margin, average (alpha, a, b), split each margin's shape half to theta3."""
    mm = _MARGIN_MODEL[model]
    f1 = fit_egled(s.x1[s.x1 > 0], mm, cfg)
    f2 = fit_egled(s.x2[s.x2 > 0], mm, cfg)
    p1, p2 = f1.params, f2.params
    geo = lambda u, v: math.sqrt(max(u, cfg.lower) * max(v, cfg.lower))  # noqa: E731
    return np.array(
        [
            geo(p1.alpha, p2.alpha),
            geo(p1.a, p2.a),
            geo(p1.b, p2.b),
            p1.theta / 2.0,
            p2.theta / 2.0,
            (p1.theta + p2.theta) / 4.0,
        ]
    )


def fit_mle(
    s: PartitionedSample,
    model_tag: str = "begled",
    init: BegledParams | None = None,
    config: FitConfig = FitConfig(),
) -> FitResult:
    """Maximize the bivariate log-likelihood under ``model_tag``.

    ``begled`` frees all six parameters, ``bglfr`` fixes alpha = 1 and
    ``bvge`` fixes alpha = 1, b = 0. With ``init`` given, it replaces the
    marginal heuristic as the first start (fixed entries are overridden).
    """
    if model_tag not in BIVARIATE_MODELS:
        raise ValueError(f"unknown model {model_tag!r}")
    if np.any(s.x1 <= 0) or np.any(s.x2 <= 0):
        raise ValueError("the likelihood needs strictly positive observations")
    template = BIVARIATE_MODELS[model_tag]
    fixed, free = _fixed_and_free(template)
    first = np.array(init.as_tuple()) if init is not None else _bivariate_heuristic(s, model_tag, config)
    first = np.where([t is None for t in template], np.maximum(first, config.lower), fixed)

    starts = _starts(first, free, config, salt=100 + list(BIVARIATE_MODELS).index(model_tag))
    best, total_it, total_fev = _multistart(0, starts, free, fixed, s.x1, s.x2, s.region, config)
    if not math.isfinite(best.fun):
        raise FitError(f"{model_tag} fit: all {config.starts} starts ended at -inf log-likelihood")

    at_boundary = bool(np.any(best.z <= math.log(config.lower) + 1e-9))
    vals = fixed.copy()
    vals[free] = np.exp(best.z)
    fun = best.fun
    if config.polish and not at_boundary:
        vals, fun = _polish(s, vals, free, fixed, fun)
    return FitResult(
        params=BegledParams(*vals),
        neg_log_lik=float(fun),
        converged=best.converged,
        iterations=total_it,
        model_tag=model_tag,
        k=len(free),
        n=s.n,
        partition=s.counts,
        at_boundary=at_boundary,
        nfev=total_fev,
        start_values=[float(v) for v in first],
    )


def _polish(s, vals, free, fixed, fun):
    """BFGS on log-parameters with the analytic score; kept only if it helps."""
    params = fixed.copy()

    def f(z):
        params[free] = np.exp(z)
        return -log_likelihood(BegledParams(*params), s)

    def grad(z):
        params[free] = np.exp(z)
        return -score(BegledParams(*params), s)[free] * params[free]

    res = optimize.minimize(f, np.log(vals[free]), jac=grad, method="BFGS")
    if np.isfinite(res.fun) and res.fun < fun:
        out = fixed.copy()
        out[free] = np.exp(res.x)
        return out, float(res.fun)
    return vals, fun


# --------------------------------------------------------------------------
# model selection


@dataclass(frozen=True)
class IcSet:
    aic: float
    caic: float
    hqic: float


@dataclass(frozen=True)
class LrtResult:
    lam: float
    df: int
    p_value: float


def information_criteria(fit: FitResult | tuple[float, int], n: int | None = None) -> IcSet:
    """AIC, corrected AIC and Hannan-Quinn criterion from ``-L``, ``k`` and ``n``.

    ``fit`` may be a :class:`FitResult` or a ``(neg_log_lik, k)`` pair.
    """
    if isinstance(fit, tuple):
        neg, k = fit
    else:
        neg, k = fit.neg_log_lik, fit.k
        n = fit.n if n is None else n
    if n is None:
        raise ValueError("sample size required")
    if n <= k + 1:
        raise ValueError(f"CAIC undefined for n={n} <= k+1={k + 1}")
    aic = 2.0 * k + 2.0 * neg
    caic = aic + 2.0 * k * (k + 1) / (n - k - 1)
    hqic = 2.0 * k * math.log(math.log(n)) + 2.0 * neg
    return IcSet(aic, caic, hqic)


def likelihood_ratio_test(full: FitResult, restricted: FitResult) -> LrtResult:
    if restricted.model_tag not in _NESTING.get(full.model_tag, set()):
        raise ValueError(f"{restricted.model_tag} is not nested in {full.model_tag}")
    if restricted.neg_log_lik < full.neg_log_lik - 1e-6:
        raise ValueError("restricted fit is better than the full fit; the full fit did not converge")
    lam = max(0.0, 2.0 * (restricted.neg_log_lik - full.neg_log_lik))
    df = full.k - restricted.k
    return LrtResult(lam, df, chi_square_sf(lam, df))


def lrt_from_values(lam: float, df: int) -> LrtResult:
    return LrtResult(lam, df, chi_square_sf(lam, df))


# --------------------------------------------------------------------------
# goodness of fit


@dataclass(frozen=True)
class GofResult:
    a_star: float
    w_star: float
    neg_log_lik: float
    fitted: EgledParams
    clamped: bool = False
    a2: float = 0.0
    w2: float = 0.0


def gof_statistics(u: Sequence[float]) -> tuple[float, float, float, float, bool]:
    """Anderson-Darling and Cramer-von Mises from probability-integral transforms.

    Returns ``(A2, W2, A*, W*, clamped)`` with the small-sample factors
    ``A* = A2 (1 + 0.75/n + 2.25/n^2)`` and ``W* = W2 (1 + 0.5/n)``.
    """
    u = np.sort(np.asarray(u, dtype=float))
    n = u.size
    if n == 0:
        raise ValueError("empty sample")
    lo, hi = 1e-12, 1.0 - 1e-12
    clamped = bool(np.any((u < lo) | (u > hi)))
    u = np.clip(u, lo, hi)
    i = np.arange(1, n + 1)
    a2 = -n - np.sum((2 * i - 1) * (np.log(u) + np.log1p(-u[::-1]))) / n
    w2 = np.sum((u - (2 * i - 1) / (2.0 * n)) ** 2) + 1.0 / (12.0 * n)
    return float(a2), float(w2), float(a2 * (1 + 0.75 / n + 2.25 / n**2)), float(w2 * (1 + 0.5 / n)), clamped


def gof_marginal(xs: Sequence[float], model: str = "EGLE", config: FitConfig = FitConfig()) -> GofResult:
    from . import egled

    fit = fit_egled(xs, model, config)
    u = egled.cdf(fit.params, np.asarray(xs, dtype=float))
    a2, w2, a_star, w_star, clamped = gof_statistics(u)
    return GofResult(a_star, w_star, fit.neg_log_lik, fit.params, clamped, a2, w2)
