"""Bivariate EGLED built from the Marshall-Olkin maximum construction.

With independent ``U_k ~ EGLED(alpha, a, b, theta_k)`` for k = 1, 2, 3 the
pair ``X_k = max(U_k, U_3)`` has joint CDF

    F(x1, x2) = Psi(x1)**theta1 * Psi(x2)**theta2 * Psi(min(x1, x2))**theta3,

``Psi = 1 - exp(-eta**alpha)``. The law has an absolutely continuous part on
each side of the diagonal and a singular part on ``x1 == x2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import egled
from .egled import EgledParams
from .numerics import RandomStream

__all__ = [
    "BegledParams",
    "BivariatePoint",
    "Region",
    "region_of",
    "joint_cdf",
    "joint_pdf",
    "marginal_cdf",
    "marginal_pdf",
    "conditional_pdf",
    "conditional_atom",
    "max_cdf",
    "min_cdf",
    "min_pdf",
    "median_correlation",
    "tie_probability",
    "sample_begled",
]


@dataclass(frozen=True)
class BegledParams:
    alpha: float
    a: float
    b: float
    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        vals = self.as_tuple()
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite BEGLED parameters: {vals}")
        if min(self.alpha, self.theta1, self.theta2, self.theta3) <= 0:
            raise ValueError("alpha and the three thetas must be positive")
        if self.a < 0 or self.b < 0 or self.a + self.b <= 0:
            raise ValueError("need a >= 0, b >= 0 and a + b > 0")

    NAMES = ("alpha", "a", "b", "theta1", "theta2", "theta3")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.alpha, self.a, self.b, self.theta1, self.theta2, self.theta3)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.NAMES, self.as_tuple()))

    @property
    def theta_sum(self) -> float:
        return self.theta1 + self.theta2 + self.theta3

    @property
    def base(self) -> EgledParams:
        """The shared (alpha, a, b) with unit shape."""
        return EgledParams(self.alpha, self.a, self.b, 1.0)

    def latent(self, k: int) -> EgledParams:
        return self.base.with_theta((self.theta1, self.theta2, self.theta3)[k - 1])

    def marginal_of(self, k: int) -> EgledParams:
        if k == 1:
            return self.base.with_theta(self.theta1 + self.theta3)
        if k == 2:
            return self.base.with_theta(self.theta2 + self.theta3)
        raise ValueError("marginal index must be 1 or 2")

    def swapped(self) -> "BegledParams":
        return BegledParams(self.alpha, self.a, self.b, self.theta2, self.theta1, self.theta3)


@dataclass(frozen=True)
class BivariatePoint:
    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError("coordinates must be finite")
        if self.x1 < 0 or self.x2 < 0:
            raise ValueError("coordinates must be nonnegative")

    @property
    def z(self) -> float:
        return min(self.x1, self.x2)


class Region(enum.IntEnum):
    """Which branch of the joint density applies; codes match the likelihood kernel."""

    BELOW = 0  # x1 < x2
    ABOVE = 1  # x1 > x2
    DIAGONAL = 2  # x1 == x2


def region_of(x1: float, x2: float, tol: float = 0.0) -> Region:
    if x1 < x2 - tol:
        return Region.BELOW
    if x1 > x2 + tol:
        return Region.ABOVE
    return Region.DIAGONAL


def _log_dpsi(p: BegledParams, x):
    """log of d/dx Psi(x) = log(alpha (a+bx) eta^(alpha-1) exp(-eta^alpha))."""
    return egled.log_pdf(p.base, x, 1.0)


def joint_cdf(p: BegledParams, x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    z = np.minimum(x1, x2)
    base = p.base
    lf = (
        p.theta1 * egled.log_psi(base, x1)
        + p.theta2 * egled.log_psi(base, x2)
        + p.theta3 * egled.log_psi(base, z)
    )
    v = np.exp(lf)
    return float(v) if v.ndim == 0 else v


def joint_pdf(p: BegledParams, x1: float, x2: float, region: Region) -> float:
    """Branch density: area density for BELOW/ABOVE, line density on DIAGONAL.

    The region is supplied by the caller; a point that does not lie in it is a
    contract violation.
    """
    return math.exp(log_joint_pdf(p, x1, x2, region))


def log_joint_pdf(p: BegledParams, x1: float, x2: float, region: Region) -> float:
    region = Region(region)
    if x1 <= 0 or x2 <= 0:
        raise ValueError("joint density needs x1, x2 > 0")
    base = p.base
    t1, t2, t3 = p.theta1, p.theta2, p.theta3
    if region is Region.DIAGONAL:
        if x1 != x2:
            raise ValueError(f"point ({x1}, {x2}) is off the diagonal")
        return (
            math.log(t3)
            + float(_log_dpsi(p, x1))
            + (p.theta_sum - 1.0) * float(egled.log_psi(base, x1))
        )
    if region is Region.BELOW:
        if not x1 < x2:
            raise ValueError(f"point ({x1}, {x2}) is not below the diagonal")
        s1, s2, coef = t1 + t3, t2, t2 * (t1 + t3)
    else:
        if not x1 > x2:
            raise ValueError(f"point ({x1}, {x2}) is not above the diagonal")
        s1, s2, coef = t1, t2 + t3, t1 * (t2 + t3)
    return (
        math.log(coef)
        + float(_log_dpsi(p, x1))
        + float(_log_dpsi(p, x2))
        + (s1 - 1.0) * float(egled.log_psi(base, x1))
        + (s2 - 1.0) * float(egled.log_psi(base, x2))
    )


def marginal_cdf(p: BegledParams, k: int, x):
    return egled.cdf(p.marginal_of(k), x)


def marginal_pdf(p: BegledParams, k: int, x):
    return egled.pdf(p.marginal_of(k), x)


def _thetas(p: BegledParams, i: int):
    if i == 1:
        return p.theta1, p.theta2
    if i == 2:
        return p.theta2, p.theta1
    raise ValueError("conditional index must be 1 or 2")


def conditional_pdf(p: BegledParams, i: int, xi: float, xj: float) -> float:
    """Density of ``X_i`` at ``xi`` given ``X_j = xj`` (off the diagonal).

    At ``xi == xj`` this returns the mass of the diagonal atom instead, as the
    conditional law is mixed; see :func:`conditional_atom`.
    """
    if xi <= 0 or xj <= 0:
        raise ValueError("conditional density needs xi, xj > 0")
    ti, tj = _thetas(p, i)
    t3 = p.theta3
    base = p.base
    if xi > xj:
        return float(egled.pdf(base, xi, ti))
    if xi < xj:
        lv = (
            math.log(tj * (ti + t3) / (tj + t3))
            + float(_log_dpsi(p, xi))
            + (ti + t3 - 1.0) * float(egled.log_psi(base, xi))
            - t3 * float(egled.log_psi(base, xj))
        )
        return math.exp(lv)
    return conditional_atom(p, i, xj)


def conditional_atom(p: BegledParams, i: int, xj: float) -> float:
    """``P(X_i = xj | X_j = xj)``."""
    ti, tj = _thetas(p, i)
    return p.theta3 / (tj + p.theta3) * float(egled.cdf(p.base, xj, ti))


def max_cdf(p: BegledParams, t):
    return egled.cdf(p.base, t, p.theta_sum)


def min_cdf(p: BegledParams, t):
    base = p.base
    return (
        egled.cdf(base, t, p.theta1 + p.theta3)
        + egled.cdf(base, t, p.theta2 + p.theta3)
        - egled.cdf(base, t, p.theta_sum)
    )


def min_sf(p: BegledParams, t):
    """``P(min > t)``: the survival of the two marginals' lower envelope."""
    base = p.base
    return (
        egled.sf(base, t, p.theta1 + p.theta3)
        + egled.sf(base, t, p.theta2 + p.theta3)
        - egled.sf(base, t, p.theta_sum)
    )


def min_pdf(p: BegledParams, t):
    """Derivative of :func:`min_cdf`: a signed sum of three EGLED densities."""
    base = p.base
    return (
        egled.pdf(base, t, p.theta1 + p.theta3)
        + egled.pdf(base, t, p.theta2 + p.theta3)
        - egled.pdf(base, t, p.theta_sum)
    )


def median_correlation(p: BegledParams) -> float:
    m1 = egled.median(p.marginal_of(1))
    m2 = egled.median(p.marginal_of(2))
    return 4.0 * joint_cdf(p, m1, m2) - 1.0


def tie_probability(p: BegledParams) -> float:
    return p.theta3 / p.theta_sum


def sample_begled(p: BegledParams, n: int, rng: RandomStream) -> np.ndarray:
    """``n`` pairs as an ``(n, 2)`` array.

    Draws ``n`` uniforms for each of U1, U2, U3 in that order. A pair is an
    exact tie whenever U3 exceeds both U1 and U2.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    base = p.base
    u1 = egled.sample_egled(base, n, rng, p.theta1)
    u2 = egled.sample_egled(base, n, rng, p.theta2)
    u3 = egled.sample_egled(base, n, rng, p.theta3)
    return np.column_stack([np.maximum(u1, u3), np.maximum(u2, u3)])
