"""Acceptance criteria, one test and one PASS/FAIL line per criterion.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
``MOGLIB_ACCEPTANCE_REPS`` sets the simulation replication count (default
1000; 200 is the smoke mode with its own runtime budget). Runtime budgets are
stated for 4 workers and scale by ``4 / min(4, workers)`` on smaller hosts.
"""

from __future__ import annotations

import math
import os
import sys
import time

import numpy as np
import pytest

from moglib import begled, egled
from moglib.begled import BegledParams, Region, region_of, sample_begled
from moglib.datasets import load_uefa
from moglib.estimation import (
    FitConfig,
    fit_egled,
    fit_mle,
    information_criteria,
    likelihood_ratio_test,
    log_likelihood,
    lrt_from_values,
    partition_sample,
    score,
)
from moglib.numerics import QuadConfig, RandomStream, fd_gradient, quad_2d_region, quad_semi_infinite
from moglib.reliability import stress_strength
from moglib.simulation import TABLE9_TRUTH, run_simulation, worker_count

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, tuple[bool, str]] = {}


def _scale() -> float:
    return 4.0 / min(4, worker_count())


def _report(k: int, ok: bool, detail: str) -> None:
    RESULTS[k] = (ok, detail)
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'}: {detail}"
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()


# -- criterion bodies -------------------------------------------------------


def criterion_1():
    x1 = load_uefa().x1
    t0 = time.perf_counter()
    f = fit_egled(x1, "E")
    dt = time.perf_counter() - t0
    ok = abs(f.params.a - 0.0245) <= 5e-4 and abs(f.neg_log_lik - 174.30) <= 0.05 and dt < 1.0
    return ok, f"a={f.params.a:.5f} (0.0245+/-0.0005), -L={f.neg_log_lik:.3f} (174.30+/-0.05), {dt:.3f}s (<1s)"


def criterion_2():
    ds = load_uefa()
    out = []
    ok = True
    for col, bound in ((ds.x1, 162.2), (ds.x2, 163.0)):
        t0 = time.perf_counter()
        f = fit_egled(col, "EGLE", FitConfig(margin_starts=8))
        dt = time.perf_counter() - t0
        ok &= f.neg_log_lik <= bound and dt < 10.0
        out.append(f"-L={f.neg_log_lik:.3f} (<={bound}) {dt:.2f}s")
    return ok, "X1 " + out[0] + "; X2 " + out[1]


def criterion_3():
    s = partition_sample(load_uefa().pairs)
    t0 = time.perf_counter()
    fits = {m: fit_mle(s, m) for m in ("begled", "bvge", "bglfr")}
    dt = time.perf_counter() - t0
    L = {m: f.neg_log_lik for m, f in fits.items()}
    ok = L["begled"] <= 292.2 and abs(L["bvge"] - 296.9) <= 0.5 and abs(L["bglfr"] - 293.4) <= 0.5 and dt < 60
    return ok, (
        f"BEGLED -L={L['begled']:.3f} (<=292.2), BVGE -L={L['bvge']:.3f} (296.9+/-0.5), "
        f"BGLFR -L={L['bglfr']:.3f} (293.4+/-0.5), {dt:.2f}s (<60s)"
    )


def criterion_4():
    ic = information_criteria((291.7, 6), 37)
    ok = abs(ic.aic - 595.4) <= 0.05 and abs(ic.caic - 598.2) <= 0.05 and abs(ic.hqic - 598.8) <= 0.05
    s = partition_sample(load_uefa().pairs)
    aic = {m: information_criteria(fit_mle(s, m)).aic for m in ("begled", "bglfr", "bvge")}
    order = sorted(aic, key=aic.get)
    ok &= order == ["begled", "bglfr", "bvge"]
    return ok, (
        f"AIC={ic.aic:.3f}, CAIC={ic.caic:.3f}, HQIC={ic.hqic:.3f} (595.4/598.2/598.8 +/-0.05); "
        f"AIC order {' < '.join(order)} (want begled < bglfr < bvge)"
    )


def criterion_5():
    p1 = lrt_from_values(10.466, 2).p_value
    p2 = lrt_from_values(3.354, 1).p_value
    s = partition_sample(load_uefa().pairs)
    fits = {m: fit_mle(s, m) for m in ("begled", "bvge", "bglfr")}
    l1 = likelihood_ratio_test(fits["begled"], fits["bvge"]).lam
    l2 = likelihood_ratio_test(fits["begled"], fits["bglfr"]).lam
    ok_p = abs(p1 - 0.00533749) <= 1e-6 and abs(p2 - 0.06704) <= 1e-4
    ok_l = abs(l1 - 10.466) <= 0.3 and abs(l2 - 3.354) <= 0.3
    return ok_p and ok_l, (
        f"p(10.466,2)={p1:.8f} (0.00533749+/-1e-6), p(3.354,1)={p2:.6f} (0.06704+/-1e-4) "
        f"[{'ok' if ok_p else 'off'}]; end-to-end Lambda BVGE={l1:.3f} (10.466+/-0.3), "
        f"BGLFR={l2:.3f} (3.354+/-0.3) [{'ok' if ok_l else 'off'}]"
    )


def criterion_6():
    reps = int(os.environ.get("MOGLIB_ACCEPTANCE_REPS", "1000"))
    budget = (600.0 if reps >= 1000 else 120.0) * _scale()
    t0 = time.perf_counter()
    rep = run_simulation(TABLE9_TRUTH, n_grid=(30, 50, 100, 200), replications=reps, seed=0)
    dt = time.perf_counter() - t0
    ma = rep.summary(200, "alpha").mse
    mb = rep.summary(200, "a").mse
    ok_a = 0.5 * 0.0057 <= ma <= 2 * 0.0057
    ok_b = 0.5 * 0.0008 <= mb <= 2 * 0.0008
    smaller = sum(abs(rep.summary(200, k).bias) < abs(rep.summary(30, k).bias) for k in BegledParams.NAMES)
    ok = ok_a and ok_b and smaller >= 5 and dt < budget
    return ok, (
        f"N={reps}, n=200 MSE(alpha)={ma:.5f} in [0.00285, 0.0114]: {ok_a}; MSE(a)={mb:.6f} in [0.0004, 0.0016]: {ok_b}; "
        f"|bias| smaller at 200 than 30 for {smaller}/6 (>=5); {dt:.0f}s on {worker_count()} worker(s) "
        f"(budget {budget:.0f}s)"
    )


def _random_params(rng: RandomStream) -> BegledParams:
    u = rng.uniform(6)
    return BegledParams(0.5 + 2.5 * u[0], 0.1 + 1.9 * u[1], 2.0 * u[2], 0.2 + 2.8 * u[3], 0.2 + 2.8 * u[4], 0.2 + 2.8 * u[5])


def criterion_7():
    rng = RandomStream(2024, 7)
    cfg = QuadConfig(rel_tol=1e-9, abs_tol=1e-12)
    worst_total = worst_diag = worst_ss = 0.0
    ss_example = None
    for _ in range(20):
        p = _random_params(rng)
        scale = egled.median(p.base.with_theta(p.theta_sum))
        below, _ = quad_2d_region(lambda u, v: begled.joint_pdf(p, u, v, Region.BELOW) if 0 < u < v else 0.0, "below", cfg, scale)
        above, _ = quad_2d_region(lambda u, v: begled.joint_pdf(p, u, v, Region.ABOVE) if u > v > 0 else 0.0, "above", cfg, scale)
        diag, _ = quad_semi_infinite(lambda x: begled.joint_pdf(p, x, x, Region.DIAGONAL) if x > 0 else 0.0, cfg, scale=scale)
        worst_total = max(worst_total, abs(below + above + diag - 1.0))
        worst_diag = max(worst_diag, abs(diag - p.theta3 / p.theta_sum))
        gap = abs(stress_strength(p) - below)
        if gap > worst_ss:
            worst_ss, ss_example = gap, (stress_strength(p), below, p.theta2 / p.theta_sum)

    # score vs central differences on 50 draws
    data = partition_sample(sample_begled(TABLE9_TRUTH, 80, RandomStream(2024, 8)))
    worst_score = 0.0
    for _ in range(50):
        p = _random_params(rng)
        f = lambda v: log_likelihood(BegledParams(*v), data)  # noqa: E731
        fd = fd_gradient(f, p.as_tuple())
        g = score(p, data)
        worst_score = max(worst_score, float(np.max(np.abs(g - fd) / np.maximum(np.abs(fd), 1e-3 * np.max(np.abs(fd))))))

    # quantile round trip on sampled x
    worst_q = 0.0
    for _ in range(50):
        p = _random_params(rng).marginal_of(1)
        x = float(egled.sample_egled(p, 1, rng)[0])
        c = float(egled.cdf(p, x))
        if 1e-12 < c < 1 - 1e-6:
            worst_q = max(worst_q, abs(float(egled.quantile(p, c)) - x) / x)

    # mixed partial of the joint CDF against the branch densities
    worst_mp = 0.0
    h = 1e-4
    for _ in range(20):
        p = _random_params(rng)
        m = egled.median(p.base.with_theta(p.theta_sum))
        u = rng.uniform(2) * 1.5 * m + 0.2 * m
        if abs(u[0] - u[1]) < 4 * h:
            continue
        F = lambda a, b: begled.joint_cdf(p, a, b)  # noqa: E731
        x1, x2 = u
        fd = (F(x1 + h, x2 + h) - F(x1 + h, x2 - h) - F(x1 - h, x2 + h) + F(x1 - h, x2 - h)) / (4 * h * h)
        f = begled.joint_pdf(p, x1, x2, region_of(x1, x2))
        worst_mp = max(worst_mp, abs(f - fd) / f)

    # empirical tie fraction
    n = 100_000
    xy = sample_begled(TABLE9_TRUTH, n, RandomStream(2024, 9))
    tp = begled.tie_probability(TABLE9_TRUTH)
    z = abs(np.mean(xy[:, 0] == xy[:, 1]) - tp) / math.sqrt(tp * (1 - tp) / n)

    parts = {
        "total probability": (worst_total <= 1e-6, f"max|err|={worst_total:.1e} (<=1e-6)"),
        "diagonal mass": (worst_diag <= 1e-8, f"max|err|={worst_diag:.1e} (<=1e-8)"),
        "score vs FD": (worst_score <= 1e-4, f"max rel={worst_score:.1e} (<=1e-4)"),
        "quantile round trip": (worst_q <= 1e-10, f"max rel={worst_q:.1e} (<=1e-10)"),
        "mixed partial": (worst_mp <= 1e-5, f"max rel={worst_mp:.1e} (<=1e-5)"),
        "tie fraction": (z <= 3, f"|z|={z:.2f} (<=3)"),
        "stress-strength vs below mass": (worst_ss <= 1e-6, f"max|err|={worst_ss:.3f} (<=1e-6); "
            f"worst case closed form {ss_example[0]:.4f}, quadrature {ss_example[1]:.4f}, theta2/sum {ss_example[2]:.4f}"),
    }
    ok = all(v[0] for v in parts.values())
    return ok, "; ".join(f"{k}: {'ok' if v[0] else 'off'} {v[1]}" for k, v in parts.items())


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7}


# -- pytest entry points ----------------------------------------------------


def _check(k):
    ok, detail = CRITERIA[k]()
    _report(k, ok, detail)
    assert ok, detail


def test_criterion_1_exponential_margin():
    _check(1)


def test_criterion_2_marginal_egle_fits():
    _check(2)


def test_criterion_3_joint_fits():
    _check(3)


def test_criterion_4_information_criteria():
    _check(4)


def test_criterion_5_likelihood_ratio_tests():
    _check(5)


@pytest.mark.slow
def test_criterion_6_simulation_study():
    _check(6)


def test_criterion_7_property_suite():
    _check(7)


if __name__ == "__main__":
    failed = 0
    for k, fn in CRITERIA.items():
        ok, detail = fn()
        _report(k, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
