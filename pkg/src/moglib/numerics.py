"""Shared numerical substrate.

Quadrature and special functions delegate to SciPy (QUADPACK and Cephes);
the Nelder-Mead simplex and finite differences are implemented here because
the compiled likelihood kernel mirrors the same simplex step for step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

__all__ = [
    "QuadConfig",
    "QuadratureError",
    "NumericalError",
    "quad_semi_infinite",
    "quad_finite",
    "quad_2d_region",
    "upper_incomplete_gamma",
    "chi_square_sf",
    "SimplexConfig",
    "SimplexResult",
    "simplex_minimize",
    "fd_gradient",
    "RandomStream",
]


class NumericalError(ArithmeticError):
    """Base class for numerical failures (non-convergence, degenerate input)."""


class QuadratureError(NumericalError):
    """Adaptive quadrature ran out of subdivisions.

    The best available estimate and its error bound are kept on the instance.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadConfig()


def _quad(f, lo, hi, config, points=None):
    kwargs = dict(
        epsabs=config.abs_tol,
        epsrel=config.rel_tol,
        limit=config.max_subdivisions,
        full_output=1,
    )
    if points is not None:
        pts = [p for p in points if lo < p < hi]
        if pts:
            kwargs["points"] = pts
    out = integrate.quad(f, lo, hi, **kwargs)
    value, error = out[0], out[1]
    # full_output adds an info dict, plus a message when ier != 0
    if len(out) > 3:
        msg = out[3]
        # ier=2 (roundoff) still yields a usable value when the bound is met
        if error > max(config.rel_tol * abs(value), config.abs_tol) * 10:
            raise QuadratureError(str(msg).splitlines()[0], value, error)
    return value, error


def quad_finite(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    config: QuadConfig = DEFAULT_QUAD,
    points: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[lo, hi]``; returns ``(value, error_estimate)``."""
    if hi < lo:
        value, error = _quad(f, hi, lo, config, points)
        return -value, error
    if hi == lo:
        return 0.0, 0.0
    return _quad(f, lo, hi, config, points)


def quad_semi_infinite(
    f: Callable[[float], float],
    config: QuadConfig = DEFAULT_QUAD,
    lower: float = 0.0,
    scale: float = 1.0,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[lower, inf)``.

    Uses ``x = lower + scale * u / (1 - u)`` so the adaptive rule works on the
    unit interval. ``scale`` should be of the order of the integrand's bulk
    (e.g. a median) so the mass is not squeezed against ``u = 1``.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")

    def g(u):
        if u >= 1.0:
            return 0.0
        w = 1.0 - u
        x = lower + scale * u / w
        val = f(x)
        if val == 0.0:
            return 0.0
        return val * scale / (w * w)

    return _quad(g, 0.0, 1.0, config)


def quad_2d_region(
    f: Callable[[float, float], float],
    region: str | tuple[float, float],
    config: QuadConfig = DEFAULT_QUAD,
    scale: float = 1.0,
) -> tuple[float, float]:
    """Iterated integral of ``f(x1, x2)``.

    ``region`` is ``"below"`` for ``{0 < x1 < x2}``, ``"above"`` for
    ``{0 < x2 < x1}``, or a pair ``(t1, t2)`` for the rectangle
    ``[0, t1] x [0, t2]`` (split along the diagonal, where joint laws of
    shock models are only piecewise smooth).
    """
    errors = []

    if region == "below":

        def outer(x1):
            v, e = quad_semi_infinite(lambda x2: f(x1, x2), config, lower=x1, scale=scale)
            errors.append(e)
            return v

        v, e = quad_semi_infinite(outer, config, scale=scale)
    elif region == "above":

        def outer(x2):
            v, e = quad_semi_infinite(lambda x1: f(x1, x2), config, lower=x2, scale=scale)
            errors.append(e)
            return v

        v, e = quad_semi_infinite(outer, config, scale=scale)
    else:
        t1, t2 = region

        def outer(x1):
            v, e = quad_finite(lambda x2: f(x1, x2), 0.0, t2, config, points=(x1,))
            errors.append(e)
            return v

        v, e = quad_finite(outer, 0.0, t1, config, points=(t2,))
    return v, e + (max(errors) if errors else 0.0)


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Non-normalized upper incomplete gamma ``Gamma(s, x)``."""
    if s <= 0:
        raise ValueError("s must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return math.gamma(s)
    return float(special.gammaincc(s, x) * special.gamma(s))


def chi_square_sf(x: float, df: int) -> float:
    """Chi-square survival function ``Gamma(df/2, x/2) / Gamma(df/2)``."""
    if df <= 0:
        raise ValueError("df must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    return float(special.gammaincc(df / 2.0, x / 2.0))


# --------------------------------------------------------------------------
# Nelder-Mead


@dataclass(frozen=True)
class SimplexConfig:
    """Termination and geometry of :func:`simplex_minimize`."""

    diam_tol: float = 1e-8
    val_tol: float = 1e-12
    max_iter: int = 20000
    initial_step: float = 0.5


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int
    nfev: int
    converged: bool
    reason: str


# reflection, expansion, contraction, shrink
NM_COEFFS = (1.0, 2.0, 0.5, 0.5)


def simplex_minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    config: SimplexConfig = SimplexConfig(),
) -> SimplexResult:
    """Minimize ``f`` by the Nelder-Mead simplex method.

    ``f`` may return ``inf`` (or NaN, treated as ``inf``) to mark infeasible
    points. Stops when the simplex diameter (max-norm distance of vertices to
    the best vertex) drops below ``diam_tol``, when the spread of vertex values
    drops below ``val_tol``, or after ``max_iter`` iterations; only the last
    case is reported as non-converged.
    """
    rho, chi, gamma, sigma = NM_COEFFS
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    nfev = 0

    def fe(x):
        nonlocal nfev
        nfev += 1
        v = f(x)
        return v if v == v else math.inf

    sim = np.empty((n + 1, n))
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += config.initial_step
    fs = np.array([fe(v) for v in sim])

    it = 0
    reason = "max_iter"
    while True:
        order = np.argsort(fs, kind="stable")
        sim = sim[order]
        fs = fs[order]
        diam = float(np.max(np.abs(sim[1:] - sim[0]))) if n else 0.0
        if diam < config.diam_tol:
            reason = "diameter"
            break
        spread = fs[-1] - fs[0]
        if math.isfinite(fs[-1]) and spread < config.val_tol:
            reason = "spread"
            break
        if it >= config.max_iter:
            break
        it += 1

        centroid = sim[:-1].mean(axis=0)
        worst = sim[-1]
        xr = centroid + rho * (centroid - worst)
        fr = fe(xr)
        if fr < fs[0]:
            xe = centroid + chi * (xr - centroid)
            fe_ = fe(xe)
            if fe_ < fr:
                sim[-1], fs[-1] = xe, fe_
            else:
                sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = centroid + gamma * (xr - centroid)
            fc = fe(xc)
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
                continue
        else:
            xc = centroid + gamma * (worst - centroid)
            fc = fe(xc)
            if fc < fs[-1]:
                sim[-1], fs[-1] = xc, fc
                continue
        for i in range(1, n + 1):
            sim[i] = sim[0] + sigma * (sim[i] - sim[0])
            fs[i] = fe(sim[i])

    return SimplexResult(
        x=sim[0].copy(),
        fun=float(fs[0]),
        iterations=it,
        nfev=nfev,
        converged=reason != "max_iter",
        reason=reason,
    )


def fd_gradient(f: Callable[[np.ndarray], float], x: Sequence[float]) -> np.ndarray:
    """Central-difference gradient with steps ``1e-6 * max(1, |x_i|)``."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = 1e-6 * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        fp, fm = f(xp), f(xm)
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise NumericalError(f"non-finite function value near coordinate {i}")
        g[i] = (fp - fm) / (xp[i] - xm[i])
    return g


# --------------------------------------------------------------------------
# Random streams


class RandomStream:
    """Counter-based (Philox) random stream keyed by ``(seed, stream_id)``.

    Streams with the same key replay bit for bit; distinct ``stream_id`` values
    give statistically independent substreams, so replication ``r`` of a
    study can draw from ``stream_id=r`` regardless of scheduling.
    """

    def __init__(self, seed: int = 0, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be nonnegative")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.Philox(ss))

    def uniform(self, size=None) -> np.ndarray | float:
        """Uniform draws on the open interval (0, 1)."""
        u = self._gen.random(size)
        # random() is on [0, 1); 0 maps to infinity under -log
        if size is None:
            return u if u > 0.0 else 2.0**-53
        u[u == 0.0] = 2.0**-53
        return u

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def substream(self, stream_id: int) -> "RandomStream":
        return RandomStream(self.seed, stream_id)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"
