"""Reliability quantities of the bivariate EGLED.

Integral-defined quantities (mean waiting time, vitality) are computed by
adaptive quadrature. The published closed forms of the parallel-system hazard
vector are available through ``form="printed"`` for comparison only; the
default ``form="definitional"`` is what the functions mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import begled, egled
from .begled import BegledParams, Region, region_of
from .egled import DegenerateWindowError, SaturatedSurvivalError
from .numerics import QuadConfig, quad_finite, quad_semi_infinite

__all__ = [
    "VectorHazard",
    "VectorAvailability",
    "VectorMrl",
    "stress_strength",
    "stress_strength_exact",
    "joint_reliability",
    "joint_hazard",
    "joint_reversed_hazard",
    "marginal_hazard",
    "marginal_reversed_hazard",
    "joint_mean_waiting_time",
    "vector_hazard",
    "vector_availability",
    "vector_mrl",
]

QUAD_1E6 = QuadConfig(rel_tol=1e-9, abs_tol=1e-13)


@dataclass(frozen=True)
class VectorHazard:
    h_min: float
    h12: float
    h21: float


@dataclass(frozen=True)
class VectorAvailability:
    v_min: float
    v12: float
    v21: float


@dataclass(frozen=True)
class VectorMrl:
    m_min: float
    m12: float
    m21: float


def stress_strength(p: BegledParams) -> float:
    """``(theta2 + theta3) / (theta1 + theta2 + 2 theta3)``, the published value of R.

    This equals ``P(X1 < X2)`` for *independent* marginals. Under the shock
    model the strict event has probability :func:`stress_strength_exact`.
    """
    return (p.theta2 + p.theta3) / (p.theta1 + p.theta2 + 2.0 * p.theta3)


def stress_strength_exact(p: BegledParams) -> float:
    """``P(X1 < X2)`` strictly, i.e. the probability that U2 is the largest shock."""
    return p.theta2 / p.theta_sum


def joint_reliability(p: BegledParams, x1, x2):
    """``P(X1 > x1, X2 > x2) = 1 - F1(x1) - F2(x2) + F(x1, x2)``."""
    r = 1.0 - begled.marginal_cdf(p, 1, x1) - begled.marginal_cdf(p, 2, x2) + begled.joint_cdf(p, x1, x2)
    return float(r) if np.ndim(r) == 0 else r


def _region(x1, x2, region):
    return region_of(x1, x2) if region is None else Region(region)


def joint_hazard(p: BegledParams, x1: float, x2: float, region: Region | None = None) -> float:
    """Basu bivariate hazard ``f / R`` on the given branch."""
    r = joint_reliability(p, x1, x2)
    if r <= 0:
        raise SaturatedSurvivalError(f"joint survival vanishes at ({x1}, {x2})")
    return begled.joint_pdf(p, x1, x2, _region(x1, x2, region)) / r


def joint_reversed_hazard(p: BegledParams, x1: float, x2: float, region: Region | None = None) -> float:
    """``f / F`` on the given branch."""
    f = begled.joint_cdf(p, x1, x2)
    if f <= 0:
        raise DegenerateWindowError(f"joint CDF vanishes at ({x1}, {x2})")
    return begled.joint_pdf(p, x1, x2, _region(x1, x2, region)) / f


def marginal_hazard(p: BegledParams, k: int, x):
    return egled.hazard(p.marginal_of(k), x)


def marginal_reversed_hazard(p: BegledParams, k: int, x):
    return egled.reversed_hazard(p.marginal_of(k), x)


def joint_mean_waiting_time(
    p: BegledParams, t1: float, t2: float, config: QuadConfig = QUAD_1E6
) -> float:
    """``(1/F(t1,t2)) * double integral of F over [0,t1] x [0,t2]``.

    The inner integral runs along x2 with a breakpoint on the diagonal, where
    F has a kink.
    """
    if t1 <= 0 or t2 <= 0:
        raise ValueError("t1 and t2 must be positive")
    ft = begled.joint_cdf(p, t1, t2)
    if ft <= 0:
        raise DegenerateWindowError(f"F({t1}, {t2}) underflows to zero")
    base = p.base
    t1_, t2_, t3_ = p.theta1, p.theta2, p.theta3
    lpsi = lambda x: float(egled.log_psi(base, x))  # noqa: E731

    def inner(x1):
        if x1 <= 0:
            return 0.0
        l1 = lpsi(x1)

        def g(x2):
            if x2 <= 0:
                return 0.0
            l2 = lpsi(x2)
            return math.exp(t1_ * l1 + t2_ * l2 + t3_ * min(l1, l2))

        v, _ = quad_finite(g, 0.0, t2, config, points=(x1,))
        return v

    v, _ = quad_finite(inner, 0.0, t1, config, points=(t2,))
    return v / ft


# --------------------------------------------------------------------------
# two-component parallel system


def _h_min(p: BegledParams, x: float) -> float:
    s = float(begled.min_sf(p, x))
    if s <= 0:
        raise SaturatedSurvivalError(f"survival of the minimum vanishes at {x}")
    return float(begled.min_pdf(p, x)) / s


def _latent_hazard(p: BegledParams, k: int, x: float) -> float:
    """Hazard of component k after the other one failed earlier.

    Given ``X_j = x_j < x_k``, the conditional law of ``X_k`` beyond ``x_j`` is
    that of the latent shock ``U_k``, so the failure time ``x_j`` cancels.
    """
    q = p.latent(k)
    s = float(egled.sf(q, x))
    if s <= 0:
        raise SaturatedSurvivalError(f"survival of component {k} vanishes at {x}")
    return float(egled.pdf(q, x)) / s


def _printed_h_min(p: BegledParams, x: float) -> float:
    base = p.base
    psi = float(egled.cdf(base, x, 1.0))
    dpsi = math.exp(float(egled.log_pdf(base, x, 1.0)))
    s = p.theta_sum
    return s * dpsi / psi / (psi ** (s - 1.0) - 1.0)


def _printed_h_cond(p: BegledParams, k: int, x: float) -> float:
    # f_{X_k} read as the marginal density
    base = p.base
    tk = p.theta1 if k == 1 else p.theta2
    psi = float(egled.cdf(base, x, 1.0))
    fk = float(begled.marginal_pdf(p, k, x))
    return fk * psi**p.theta3 / (1.0 - psi**tk)


def vector_hazard(
    p: BegledParams, x: float, x1: float, x2: float, form: str = "definitional"
) -> VectorHazard:
    """Cox hazard vector ``(h of min at x, h12(x1 | x2), h21(x2 | x1))``.

    ``h12`` is the hazard of component 1 at age ``x1`` after component 2 has
    failed; ``h21`` the mirror image. ``form="printed"`` evaluates the
    published closed forms verbatim (they do not agree with the definitions).
    """
    if min(x, x1, x2) <= 0:
        raise ValueError("ages must be positive")
    if form == "definitional":
        return VectorHazard(_h_min(p, x), _latent_hazard(p, 1, x1), _latent_hazard(p, 2, x2))
    if form == "printed":
        return VectorHazard(_printed_h_min(p, x), _printed_h_cond(p, 1, x1), _printed_h_cond(p, 2, x2))
    raise ValueError(f"unknown form {form!r}")


def _conditional_mean(density, lower: float, scale: float, config: QuadConfig) -> float:
    mass, _ = quad_semi_infinite(density, config, lower=lower, scale=scale)
    if mass <= 0:
        raise SaturatedSurvivalError(f"no probability mass beyond {lower}")
    first, _ = quad_semi_infinite(lambda y: y * density(y), config, lower=lower, scale=scale)
    return first / mass


def vector_availability(
    p: BegledParams, x: float, x1: float, x2: float, config: QuadConfig = QUAD_1E6
) -> VectorAvailability:
    """Vitality vector: conditional mean lifetimes beyond the current ages.

    ``v12 = int_{x1}^inf y f(y, x2) dy / int_{x1}^inf f(y, x2) dy`` uses the
    ``x1 > x2`` branch density at the supplied failure time ``x2``; ``v21``
    uses the ``x1 < x2`` branch at ``x1``.
    """
    if min(x, x1, x2) < 0 or min(x1, x2) == 0:
        raise ValueError("ages must be positive")
    scale = egled.median(p.base.with_theta(p.theta_sum))
    fmin = lambda y: float(begled.min_pdf(p, y)) if y > 0 else 0.0  # noqa: E731
    v_min = _conditional_mean(fmin, x, scale, config)

    # the branch formulas are used on all of (x_k, inf), also where y < x_other
    v12 = _conditional_mean(lambda y: _branch(p, y, x2, Region.ABOVE), x1, scale, config)
    v21 = _conditional_mean(lambda y: _branch(p, x1, y, Region.BELOW), x2, scale, config)
    return VectorAvailability(v_min, v12, v21)


def _branch(p: BegledParams, x1: float, x2: float, region: Region) -> float:
    """Branch density formula evaluated without the region check."""
    if x1 <= 0 or x2 <= 0:
        return 0.0
    base = p.base
    t1, t2, t3 = p.theta1, p.theta2, p.theta3
    if region is Region.BELOW:
        s1, s2, coef = t1 + t3, t2, t2 * (t1 + t3)
    else:
        s1, s2, coef = t1, t2 + t3, t1 * (t2 + t3)
    lv = (
        math.log(coef)
        + float(egled.log_pdf(base, x1, 1.0))
        + float(egled.log_pdf(base, x2, 1.0))
        + (s1 - 1.0) * float(egled.log_psi(base, x1))
        + (s2 - 1.0) * float(egled.log_psi(base, x2))
    )
    return math.exp(lv)


def vector_mrl(
    p: BegledParams, x: float, x1: float, x2: float, config: QuadConfig = QUAD_1E6
) -> VectorMrl:
    v = vector_availability(p, x, x1, x2, config)
    return VectorMrl(v.v_min - x, v.v12 - x1, v.v21 - x2)
