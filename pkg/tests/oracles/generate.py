"""Regenerate the frozen reference values used by the test suite.

Uses mpmath only (no moglib import) so the references are independent of the
code under test. Run ``python tests/oracles/generate.py`` and compare with
``tests/oracles/values.json``.
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
HERE = Path(__file__).parent

T9 = dict(alpha=mp.mpf("1.5"), a=mp.mpf("0.5"), b=mp.mpf("0.7"), t1=mp.mpf("0.8"), t2=mp.mpf("1.2"), t3=mp.mpf("1.3"))


def eta(x, a, b):
    return a * x + b / 2 * x**2


def psi(x, alpha, a, b):
    return 1 - mp.exp(-eta(x, a, b) ** alpha)


def dpsi(x, alpha, a, b):
    e = eta(x, a, b)
    return alpha * (a + b * x) * e ** (alpha - 1) * mp.exp(-(e**alpha))


def cdf(x, alpha, a, b, th):
    return psi(x, alpha, a, b) ** th


def pdf(x, alpha, a, b, th):
    return th * dpsi(x, alpha, a, b) * psi(x, alpha, a, b) ** (th - 1)


def joint_cdf(x1, x2, P):
    al, a, b = P["alpha"], P["a"], P["b"]
    return psi(x1, al, a, b) ** P["t1"] * psi(x2, al, a, b) ** P["t2"] * psi(min(x1, x2), al, a, b) ** P["t3"]


def f_branch(x1, x2, P, branch=None):
    """Joint density; ``branch`` forces the x1<x2 ("below") or x1>x2 ("above") formula."""
    al, a, b, t1, t2, t3 = P["alpha"], P["a"], P["b"], P["t1"], P["t2"], P["t3"]
    p1, p2 = psi(x1, al, a, b), psi(x2, al, a, b)
    d1, d2 = dpsi(x1, al, a, b), dpsi(x2, al, a, b)
    if branch is None:
        branch = "below" if x1 < x2 else "above" if x1 > x2 else "diag"
    if branch == "below":
        return t2 * (t1 + t3) * d1 * d2 * p1 ** (t1 + t3 - 1) * p2 ** (t2 - 1)
    if branch == "above":
        return t1 * (t2 + t3) * d1 * d2 * p1 ** (t1 - 1) * p2 ** (t2 + t3 - 1)
    s = t1 + t2 + t3
    return t3 * d1 * p1 ** (s - 1)


def cond_mean(dens, lo):
    mass = mp.quad(dens, [lo, lo + 1, lo + 4, mp.inf])
    first = mp.quad(lambda y: y * dens(y), [lo, lo + 1, lo + 4, mp.inf])
    return first / mass


def main():
    out = {}
    # univariate cdf at alpha=2, a=1, b=2, theta=2, x=1
    out["cdf_2_1_2_2_at_1"] = cdf(mp.mpf(1), 2, 1, 2, 2)
    out["joint_cdf_t9_0.5_1.0"] = joint_cdf(mp.mpf("0.5"), mp.mpf("1.0"), T9)
    out["gammainc_upper_0.5_1"] = mp.gammainc(mp.mpf("0.5"), 1)
    out["chi2_sf_10.466_2"] = mp.exp(-mp.mpf("10.466") / 2)
    out["chi2_sf_3.354_1"] = mp.erfc(mp.sqrt(mp.mpf("3.354") / 2))
    out["chi2_sf_24.824_3"] = mp.gammainc(mp.mpf(3) / 2, mp.mpf("24.824") / 2, regularized=True)

    g = dict(alpha=mp.mpf("1.5"), a=mp.mpf("0.5"), b=mp.mpf("0.7"), th=mp.mpf("2.1"))
    dens = lambda x: pdf(x, g["alpha"], g["a"], g["b"], g["th"])  # noqa: E731
    out["moment1_generic"] = mp.quad(lambda x: x * dens(x), [0, 1, 4, mp.inf])
    out["moment2_generic"] = mp.quad(lambda x: x**2 * dens(x), [0, 1, 4, mp.inf])
    t = mp.mpf("1.3")
    out["marginal_mwt_generic_1.3"] = mp.quad(lambda x: cdf(x, g["alpha"], g["a"], g["b"], g["th"]), [0, t]) / cdf(
        t, g["alpha"], g["a"], g["b"], g["th"]
    )

    # joint mean waiting time at (1, 2), inner integral split on the diagonal
    t1, t2 = mp.mpf(1), mp.mpf(2)
    inner = lambda x1: mp.quad(lambda x2: joint_cdf(x1, x2, T9), [0, x1, t2])  # noqa: E731
    out["joint_mwt_t9_1_2"] = mp.quad(inner, [0, t1]) / joint_cdf(t1, t2, T9)

    # parallel-system vitality at x=0.5, ages (x1, x2) = (1.0, 0.7); v12 integrates
    # the x1>x2 formula and v21 the x1<x2 formula over the whole tail
    al, a, b = T9["alpha"], T9["a"], T9["b"]
    th1, th2, th3 = T9["t1"], T9["t2"], T9["t3"]
    s = th1 + th2 + th3
    fmin = lambda y: pdf(y, al, a, b, th1 + th3) + pdf(y, al, a, b, th2 + th3) - pdf(y, al, a, b, s)  # noqa: E731
    out["v_min_t9_0.5"] = cond_mean(fmin, mp.mpf("0.5"))
    out["v_min_t9_0"] = mp.quad(lambda y: y * fmin(y), [0, 1, 4, mp.inf])
    out["v12_t9_1.0_0.7"] = cond_mean(lambda y: f_branch(y, mp.mpf("0.7"), T9, "above"), mp.mpf("1.0"))
    out["v21_t9_1.0_0.7"] = cond_mean(lambda y: f_branch(mp.mpf("1.0"), y, T9, "below"), mp.mpf("0.7"))

    # hazards at x = 0.6: printed closed forms and latent-shock definitions
    x = mp.mpf("0.6")
    P_, D_ = psi(x, al, a, b), dpsi(x, al, a, b)
    out["printed_h_min_t9_0.6"] = s * D_ / P_ / (P_ ** (s - 1) - 1)
    out["printed_h12_t9_0.6"] = pdf(x, al, a, b, th1 + th3) * P_**th3 / (1 - P_**th1)
    out["printed_h21_t9_0.6"] = pdf(x, al, a, b, th2 + th3) * P_**th3 / (1 - P_**th2)
    out["h12_t9_0.6"] = pdf(x, al, a, b, th1) / (1 - cdf(x, al, a, b, th1))
    smin = 1 - (cdf(x, al, a, b, th1 + th3) + cdf(x, al, a, b, th2 + th3) - cdf(x, al, a, b, s))
    out["h_min_t9_0.6"] = fmin(x) / smin
    out["joint_reliability_t9_0.5_1.0"] = (
        1 - cdf(mp.mpf("0.5"), al, a, b, th1 + th3) - cdf(mp.mpf("1.0"), al, a, b, th2 + th3)
        + joint_cdf(mp.mpf("0.5"), mp.mpf("1.0"), T9)
    )
    out["joint_pdf_t9_0.5_1.0"] = f_branch(mp.mpf("0.5"), mp.mpf("1.0"), T9)
    out["joint_pdf_t9_1.0_0.5"] = f_branch(mp.mpf("1.0"), mp.mpf("0.5"), T9)
    out["joint_pdf_t9_diag_0.8"] = f_branch(mp.mpf("0.8"), mp.mpf("0.8"), T9)

    # UEFA log-likelihood at the rounded published BEGLED estimates
    rows = [l.split(",") for l in (HERE.parents[1] / "src/moglib/data/uefa.csv").read_text().split()[1:]]
    U = dict(alpha=mp.mpf("2.711"), a=mp.mpf("0.0107"), b=mp.mpf("0.00017"),
             t1=mp.mpf("0.249"), t2=mp.mpf("0.089"), t3=mp.mpf("0.220"))
    out["uefa_negloglik_published_point"] = -mp.fsum(mp.log(f_branch(mp.mpf(r[0]), mp.mpf(r[1]), U)) for r in rows)

    vals = {k: float(v) for k, v in out.items()}
    text = json.dumps(vals, indent=1, sort_keys=True)
    print(text)
    return vals


if __name__ == "__main__":
    main()
