"""Exponentiated generalized linear exponential (EGLED) lifetime family.

The CDF is ``F(x) = (1 - exp(-eta(x)**alpha))**theta`` with the quadratic
base ``eta(x) = a*x + (b/2)*x**2``. Everything below is evaluated in log
space where it matters: ``log F = theta * log(-expm1(-eta**alpha))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import (
    DEFAULT_QUAD,
    NumericalError,
    QuadConfig,
    RandomStream,
    quad_finite,
    quad_semi_infinite,
)

__all__ = [
    "EgledParams",
    "SaturatedSurvivalError",
    "DegenerateWindowError",
    "eta",
    "log_psi",
    "cdf",
    "log_cdf",
    "sf",
    "pdf",
    "log_pdf",
    "quantile",
    "sample_egled",
    "hazard",
    "reversed_hazard",
    "moment",
    "marginal_mean_waiting_time",
]


class SaturatedSurvivalError(NumericalError):
    """Survival probability is numerically zero; a hazard-type ratio is undefined."""


class DegenerateWindowError(NumericalError):
    """A CDF in a denominator underflowed to zero."""


@dataclass(frozen=True)
class EgledParams:
    alpha: float
    a: float
    b: float
    theta: float

    def __post_init__(self):
        vals = (self.alpha, self.a, self.b, self.theta)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite EGLED parameters: {vals}")
        if self.alpha <= 0 or self.theta <= 0:
            raise ValueError("alpha and theta must be positive")
        if self.a < 0 or self.b < 0 or self.a + self.b <= 0:
            raise ValueError("need a >= 0, b >= 0 and a + b > 0")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.a, self.b, self.theta)

    def with_theta(self, theta: float) -> "EgledParams":
        return EgledParams(self.alpha, self.a, self.b, theta)


def _arr(x):
    return np.asarray(x, dtype=float)


def _out(v, like):
    return float(v) if np.ndim(like) == 0 else v


def eta(p: EgledParams, x):
    x = _arr(x)
    if np.any(x < 0):
        raise ValueError("eta is defined for x >= 0")
    return _out(p.a * x + 0.5 * p.b * x * x, x)


def _eta_alpha(p: EgledParams, x: np.ndarray):
    """``(eta, log eta, eta**alpha)`` for x > 0 elementwise."""
    e = p.a * x + 0.5 * p.b * x * x
    with np.errstate(divide="ignore"):
        le = np.log(e)
    ea = np.where(e > 0, np.exp(p.alpha * le), 0.0)
    return e, le, ea


def log_psi(p: EgledParams, x):
    """``log(1 - exp(-eta(x)**alpha))``; ``-inf`` at x <= 0."""
    x = _arr(x)
    xp = np.where(x > 0, x, 1.0)
    _, _, ea = _eta_alpha(p, xp)
    with np.errstate(divide="ignore"):
        v = np.where(x > 0, np.log(-np.expm1(-ea)), -np.inf)
    return _out(v, x)


def log_cdf(p: EgledParams, x, theta: float | None = None):
    th = p.theta if theta is None else theta
    return th * log_psi(p, x)


def cdf(p: EgledParams, x, theta: float | None = None):
    """CDF; 0 for x <= 0. ``theta`` overrides the shape (used by the bivariate laws)."""
    return np.exp(log_cdf(p, x, theta))


def sf(p: EgledParams, x, theta: float | None = None):
    """Survival ``1 - F`` computed as ``-expm1(log F)``."""
    return -np.expm1(log_cdf(p, x, theta))


def log_pdf(p: EgledParams, x, theta: float | None = None):
    x = _arr(x)
    if np.any(x <= 0):
        raise ValueError("pdf is defined for x > 0")
    th = p.theta if theta is None else theta
    e, le, ea = _eta_alpha(p, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        lpsi = np.log(-np.expm1(-ea))
        v = (
            math.log(p.alpha * th)
            + np.log(p.a + p.b * x)
            + (p.alpha - 1.0) * le
            - ea
            + (th - 1.0) * lpsi
        )
    # survival underflow: -ea dominates, the density is 0 rather than NaN
    v = np.where(np.isnan(v), -np.inf, v)
    return _out(v, x)


def pdf(p: EgledParams, x, theta: float | None = None):
    return np.exp(log_pdf(p, x, theta))


def quantile(p: EgledParams, prob, theta: float | None = None):
    """Inverse CDF in closed form (the median formula with 1/2 replaced by ``prob``)."""
    q = _arr(prob)
    if np.any((q <= 0) | (q >= 1)):
        raise ValueError("prob must lie in (0, 1)")
    th = p.theta if theta is None else theta
    # -log(1 - q**(1/theta)), accurate at both ends of (0, 1)
    u = np.log(q) / th
    with np.errstate(divide="ignore"):
        level = np.where(u < -math.log(2.0), -np.log1p(-np.exp(u)), -np.log(-np.expm1(u)))
    L = level ** (1.0 / p.alpha)
    if p.b > 0:
        # (-a + sqrt(a^2 + 2bL))/b rewritten to avoid cancellation when 2bL << a^2
        x = 2.0 * L / (p.a + np.sqrt(p.a * p.a + 2.0 * p.b * L))
    else:
        x = L / p.a
    return _out(x, q)


def sample_egled(p: EgledParams, n: int, rng: RandomStream, theta: float | None = None) -> np.ndarray:
    """``n`` inverse-CDF draws; consumes exactly ``n`` uniforms from ``rng``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return np.empty(0)
    return quantile(p, rng.uniform(n), theta)


def hazard(p: EgledParams, x):
    x = _arr(x)
    s = sf(p, x)
    if np.any(s <= 0):
        raise SaturatedSurvivalError("survival underflow in hazard")
    return _out(pdf(p, x) / s, x)


def reversed_hazard(p: EgledParams, x):
    x = _arr(x)
    c = cdf(p, x)
    if np.any(c <= 0):
        raise DegenerateWindowError("CDF underflow in reversed hazard")
    return _out(pdf(p, x) / c, x)


def median(p: EgledParams, theta: float | None = None) -> float:
    return float(quantile(p, 0.5, theta))


def moment(p: EgledParams, r: int, config: QuadConfig = DEFAULT_QUAD) -> float:
    """``E[X**r]`` by adaptive quadrature of ``x**r * pdf(x)``."""
    if r < 1 or int(r) != r:
        raise ValueError("r must be a positive integer")
    scale = median(p)

    def integrand(x):
        if x <= 0:
            return 0.0
        return x**r * math.exp(log_pdf(p, x))

    value, _ = quad_semi_infinite(integrand, config, scale=scale)
    return value


def marginal_mean_waiting_time(p: EgledParams, t: float, config: QuadConfig = DEFAULT_QUAD) -> float:
    """``(1/F(t)) * integral_0^t F(x) dx``."""
    if t <= 0:
        raise ValueError("t must be positive")
    ft = cdf(p, t)
    if ft <= 0:
        raise DegenerateWindowError(f"F({t}) underflows to zero")
    value, _ = quad_finite(lambda x: float(cdf(p, x)), 0.0, t, config)
    return value / ft
