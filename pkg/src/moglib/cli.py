"""Command-line interface: ``moglib {fit, reproduce-uefa, simulate, eval}``.

Exit codes: 0 success, 2 usage, 3 fit failure, 4 pipeline failure, 5 I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import begled, egled, reliability
from .begled import BegledParams, region_of
from .datasets import DataFormatError, load
from .egled import EgledParams
from .estimation import (
    BIVARIATE_MODELS,
    UNIVARIATE_MODELS,
    FitConfig,
    FitError,
    fit_egled,
    fit_mle,
    gof_statistics,
    information_criteria,
    likelihood_ratio_test,
    partition_sample,
)
from .numerics import NumericalError, chi_square_sf

EXIT_OK, EXIT_USAGE, EXIT_FIT, EXIT_PIPELINE, EXIT_IO = 0, 2, 3, 4, 5

EVAL_FUNCTIONS = (
    "cdf",
    "pdf",
    "joint-cdf",
    "joint-pdf",
    "hazard",
    "reversed-hazard",
    "reliability",
    "stress-strength",
    "mwt",
    "vector-hazard",
    "vector-availability",
    "vector-mrl",
    "median-correlation",
    "tie-prob",
    "max-cdf",
    "min-cdf",
    "moment",
    "quantile",
)


class UsageError(Exception):
    pass


def _config(args) -> FitConfig:
    return FitConfig(starts=args.starts, seed=args.seed)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _write_json(obj, path: str | None) -> None:
    text = _dump(obj)
    print(text)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# fit


def fit_record(fit) -> dict:
    ic = information_criteria(fit)
    return {
        "model": fit.model_tag,
        "params": fit.params.as_dict(),
        "neg_log_lik": fit.neg_log_lik,
        "ic": {"aic": ic.aic, "caic": ic.caic, "hqic": ic.hqic},
        "converged": fit.converged,
        "n": fit.n,
        "partition": list(fit.partition),
    }


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows)


def cmd_fit(args) -> int:
    ds = load(args.data)
    cfg = _config(args)
    if args.margin is not None:
        model = args.model or "EGLE"
        if model not in UNIVARIATE_MODELS:
            raise UsageError(f"--margin needs a univariate model {sorted(UNIVARIATE_MODELS)}, got {model!r}")
        xs = ds.pairs[:, args.margin - 1]
        fit = fit_egled(xs, model, cfg)
        ic = information_criteria((fit.neg_log_lik, fit.k), fit.n)
        _, _, a_star, w_star, _ = gof_statistics(egled.cdf(fit.params, xs))
        rec = {
            "model": model,
            "params": dict(zip(("alpha", "a", "b", "theta"), fit.params.as_tuple())),
            "neg_log_lik": fit.neg_log_lik,
            "ic": {"aic": ic.aic, "caic": ic.caic, "hqic": ic.hqic},
            "converged": fit.converged,
            "n": fit.n,
            "margin": args.margin,
            "a_star": a_star,
            "w_star": w_star,
        }
    else:
        model = args.model or "begled"
        if model not in BIVARIATE_MODELS:
            raise UsageError(f"unknown bivariate model {model!r}")
        fit = fit_mle(partition_sample(ds.pairs, tol=args.tol_tie), model, config=cfg)
        rec = fit_record(fit)
    rows = [["parameter", "estimate"]] + [[k, f"{v:.6g}"] for k, v in rec["params"].items()]
    rows += [["-L", f"{rec['neg_log_lik']:.4f}"]] + [[k.upper(), f"{v:.4f}"] for k, v in rec["ic"].items()]
    print(_table(rows), file=sys.stderr)
    _write_json(rec, args.json)
    return EXIT_OK if rec["converged"] else EXIT_FIT


# --------------------------------------------------------------------------
# reproduce-uefa

# published values used for side-by-side comparison
_PUB_MARGINS = {
    1: {"E": 174.30, "GE": 165.82, "GLFR": 162.68, "EGLE": 161.89},
    2: {"E": 166.219, "GE": 163.937, "GLFR": 162.938, "EGLE": 162.672},
}
_PUB_GOF = {
    1: {"E": (0.5202, 0.0686), "GE": (0.6171, 0.0826), "GLFR": (0.2637, 0.0399), "EGLE": (0.2530, 0.0396)},
    2: {"E": (0.3651, 0.0549), "GE": (0.3859, 0.0576), "GLFR": (0.2713, 0.04478), "EGLE": (0.2640, 0.0436)},
}
_PUB_JOINT = {"bvge": 296.9, "bglfr": 293.4, "begled": 291.7}
_PUB_IC = {"bvge": (601.9, 603.1, 604.1), "bglfr": (596.8, 598.7, 599.6), "begled": (595.4, 598.2, 598.8)}
_PUB_LRT = {"bvge": (10.466, 2, 0.00533749), "bglfr": (3.354, 1, 0.06704192)}


class _Report:
    def __init__(self):
        self.lines: list[str] = []
        self.checks: list[tuple[str, bool]] = []
        self.data: dict = {}

    def out(self, line: str = "") -> None:
        self.lines.append(line)
        print(line, flush=True)

    def check(self, label: str, ok: bool) -> None:
        ok = bool(ok)
        self.checks.append((label, ok))
        self.out(f"  [{'PASS' if ok else 'FAIL'}] {label}")


def reproduce_uefa(cfg: FitConfig = FitConfig(), tol_tie: float = 0.0, report: _Report | None = None) -> _Report:
    """Margins, joint fits, information criteria and LRTs on the UEFA data."""
    rep = report or _Report()
    ds = load("uefa")
    s = partition_sample(ds.pairs, tol=tol_tie)
    rep.out(f"UEFA data: n={s.n}, partition (x1<x2, x1>x2, tie) = {s.counts}")
    rep.data["partition"] = list(s.counts)

    margins: dict = {}
    for k in (1, 2):
        xs = ds.pairs[:, k - 1]
        rep.out(f"\nMargin X{k}")
        rows = [["model", "alpha", "a", "b", "theta", "-L", "-L pub", "A*", "A* pub", "W*", "W* pub"]]
        fits = {}
        for m in UNIVARIATE_MODELS:
            t0 = time.perf_counter()
            f = fit_egled(xs, m, cfg)
            dt = time.perf_counter() - t0
            _, _, a_star, w_star, _ = gof_statistics(egled.cdf(f.params, xs))
            fits[m] = (f, a_star, w_star, dt)
            pa, pw = _PUB_GOF[k][m]
            rows.append(
                [m, *(f"{v:.4g}" for v in f.params.as_tuple()), f"{f.neg_log_lik:.3f}", f"{_PUB_MARGINS[k][m]:.3f}",
                 f"{a_star:.4f}", f"{pa:.4f}", f"{w_star:.4f}", f"{pw:.4f}"]
            )
        rep.out(_table(rows))
        margins[k] = fits
        full = fits["EGLE"][0]
        rows = [["H0 model", "Lambda", "df", "p"]]
        for m in ("E", "GE", "GLFR"):
            lam = max(0.0, 2.0 * (fits[m][0].neg_log_lik - full.neg_log_lik))
            df = full.k - fits[m][0].k
            rows.append([m, f"{lam:.3f}", str(df), f"{chi_square_sf(lam, df):.6g}"])
        rep.out(_table(rows))
        rep.data[f"margin{k}"] = {m: {"neg_log_lik": f.neg_log_lik, "a_star": a, "w_star": w} for m, (f, a, w, _) in fits.items()}

    e1, _, _, t_e1 = margins[1]["E"]
    rep.out("\nChecks (margins)")
    rep.check(f"X1 exponential a = {e1.params.a:.5f} (0.0245 +/- 0.0005)", abs(e1.params.a - 0.0245) <= 5e-4)
    rep.check(f"X1 exponential -L = {e1.neg_log_lik:.3f} (174.30 +/- 0.05), {t_e1:.2f} s", abs(e1.neg_log_lik - 174.30) <= 0.05 and t_e1 < 1)
    g1, g2 = margins[1]["EGLE"], margins[2]["EGLE"]
    rep.check(f"X1 EGLE -L = {g1[0].neg_log_lik:.3f} (<= 162.2), {g1[3]:.2f} s", g1[0].neg_log_lik <= 162.2 and g1[3] < 10)
    rep.check(f"X2 EGLE -L = {g2[0].neg_log_lik:.3f} (<= 163.0), {g2[3]:.2f} s", g2[0].neg_log_lik <= 163.0 and g2[3] < 10)

    rep.out("\nJoint fits")
    joint = {}
    t0 = time.perf_counter()
    for m in ("bvge", "bglfr", "begled"):
        joint[m] = fit_mle(s, m, config=cfg)
    t_joint = time.perf_counter() - t0
    rows = [["model", *BegledParams.NAMES, "-L", "-L pub", "AIC", "CAIC", "HQIC"]]
    for m, f in joint.items():
        ic = information_criteria(f)
        rows.append([m, *(f"{v:.4g}" for v in f.params.as_tuple()), f"{f.neg_log_lik:.3f}", f"{_PUB_JOINT[m]:.1f}",
                     f"{ic.aic:.2f}", f"{ic.caic:.2f}", f"{ic.hqic:.2f}"])
        rep.data[m] = fit_record(f)
    rep.out(_table(rows))
    rows = [["model", "AIC pub", "CAIC pub", "HQIC pub"]] + [[m, *(f"{v:.1f}" for v in _PUB_IC[m])] for m in _PUB_IC]
    rep.out(_table(rows))

    rep.out("\nChecks (joint)")
    rep.check(f"BEGLED -L = {joint['begled'].neg_log_lik:.3f} (<= 292.2)", joint["begled"].neg_log_lik <= 292.2)
    rep.check(f"BVGE -L = {joint['bvge'].neg_log_lik:.3f} (296.9 +/- 0.5)", abs(joint["bvge"].neg_log_lik - 296.9) <= 0.5)
    rep.check(f"BGLFR -L = {joint['bglfr'].neg_log_lik:.3f} (293.4 +/- 0.5)", abs(joint["bglfr"].neg_log_lik - 293.4) <= 0.5)
    rep.check(f"joint fits took {t_joint:.1f} s (< 60 s)", t_joint < 60)
    aic = {m: information_criteria(f).aic for m, f in joint.items()}
    rep.check("AIC ordering BEGLED < BGLFR < BVGE", aic["begled"] < aic["bglfr"] < aic["bvge"])

    rep.out("\nLikelihood ratio tests")
    rows = [["H0 model", "Lambda", "Lambda pub", "df", "p", "p pub"]]
    lrts = {}
    for m in ("bvge", "bglfr"):
        r = likelihood_ratio_test(joint["begled"], joint[m])
        lrts[m] = r
        pl, pdf_, pp = _PUB_LRT[m]
        rows.append([m, f"{r.lam:.3f}", f"{pl:.3f}", str(r.df), f"{r.p_value:.6g}", f"{pp:.6g}"])
        rep.data[f"lrt_{m}"] = {"lam": r.lam, "df": r.df, "p_value": r.p_value}
    rep.out(_table(rows))
    rep.out("\nChecks (LRT)")
    for m in ("bvge", "bglfr"):
        pl = _PUB_LRT[m][0]
        rep.check(f"{m} Lambda = {lrts[m].lam:.3f} ({pl} +/- 0.3)", abs(lrts[m].lam - pl) <= 0.3)
    return rep


def cmd_reproduce_uefa(args) -> int:
    rep = _Report()
    try:
        reproduce_uefa(_config(args), args.tol_tie, rep)
    except (FitError, NumericalError, ValueError) as exc:
        rep.out(f"\npipeline stopped: {exc}")
        if args.json:
            Path(args.json).write_text(_dump({**rep.data, "error": str(exc)}) + "\n", encoding="utf-8")
        return EXIT_PIPELINE
    n_fail = sum(not ok for _, ok in rep.checks)
    rep.out(f"\n{len(rep.checks) - n_fail} of {len(rep.checks)} checks passed")
    if args.json:
        rep.data["checks"] = [{"label": label, "pass": ok} for label, ok in rep.checks]
        Path(args.json).write_text(_dump(rep.data) + "\n", encoding="utf-8")
    return EXIT_OK


# --------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    from .simulation import TABLE9_TRUTH, SimulationError, run_simulation

    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    truth = TABLE9_TRUTH
    if args.theta is not None:
        if len(args.theta) != 3:
            raise UsageError("--theta needs three values for the bivariate model")
        truth = BegledParams(args.alpha or truth.alpha, args.a or truth.a, args.b if args.b is not None else truth.b, *args.theta)
    try:
        rep = run_simulation(truth, args.n, args.reps, args.seed, _config(args), workers=args.workers)
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    print(rep.format_table(), file=sys.stderr)
    _write_json(rep.to_dict(), args.json)
    return EXIT_OK


# --------------------------------------------------------------------------
# eval


def _uni_params(args) -> EgledParams:
    th = args.theta or [1.0]
    if len(th) == 1:
        return EgledParams(args.alpha, args.a, args.b, th[0])
    return _biv_params(args).marginal_of(args.margin or 1)


def _biv_params(args) -> BegledParams:
    th = args.theta or [1.0, 1.0, 1.0]
    if len(th) != 3:
        raise UsageError(f"--fn {args.fn} needs three --theta values")
    return BegledParams(args.alpha, args.a, args.b, *th)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--fn {args.fn} needs --{n.replace('_', '-')}")


def _pairs(args):
    _need(args, "x1", "x2")
    if len(args.x1) != len(args.x2):
        raise UsageError("--x1 and --x2 need the same number of values")
    return list(zip(args.x1, args.x2))


def _listify(v):
    return [float(u) for u in np.atleast_1d(v)]


def evaluate(args):
    fn = args.fn
    if fn in ("cdf", "pdf", "hazard", "reversed-hazard"):
        _need(args, "x")
        f = {"cdf": egled.cdf, "pdf": egled.pdf, "hazard": egled.hazard, "reversed-hazard": egled.reversed_hazard}[fn]
        return _listify(f(_uni_params(args), np.asarray(args.x, dtype=float)))
    if fn == "quantile":
        _need(args, "q")
        return _listify(egled.quantile(_uni_params(args), np.asarray(args.q, dtype=float)))
    if fn == "moment":
        return egled.moment(_uni_params(args), args.r)
    p = _biv_params(args)
    if fn == "stress-strength":
        return reliability.stress_strength(p)
    if fn == "median-correlation":
        return begled.median_correlation(p)
    if fn == "tie-prob":
        return begled.tie_probability(p)
    if fn in ("max-cdf", "min-cdf"):
        _need(args, "x")
        f = begled.max_cdf if fn == "max-cdf" else begled.min_cdf
        return [float(f(p, x)) for x in args.x]
    if fn == "joint-cdf":
        return [float(begled.joint_cdf(p, u, v)) for u, v in _pairs(args)]
    if fn == "joint-pdf":
        return [begled.joint_pdf(p, u, v, region_of(u, v)) for u, v in _pairs(args)]
    if fn == "reliability":
        return [float(reliability.joint_reliability(p, u, v)) for u, v in _pairs(args)]
    if fn == "mwt":
        return [reliability.joint_mean_waiting_time(p, u, v) for u, v in _pairs(args)]
    if fn in ("vector-hazard", "vector-availability", "vector-mrl"):
        _need(args, "x")
        pairs = _pairs(args)
        if len(args.x) != len(pairs):
            raise UsageError("--x needs one value per (x1, x2) pair")
        out = []
        for x, (u, v) in zip(args.x, pairs):
            if fn == "vector-hazard":
                r = reliability.vector_hazard(p, x, u, v, form=args.form)
            elif fn == "vector-availability":
                r = reliability.vector_availability(p, x, u, v)
            else:
                r = reliability.vector_mrl(p, x, u, v)
            out.append({k: float(w) for k, w in r.__dict__.items()})
        return out
    raise UsageError(f"unknown function {fn!r}")  # pragma: no cover


def cmd_eval(args) -> int:
    value = evaluate(args)
    params = {"alpha": args.alpha, "a": args.a, "b": args.b, "theta": args.theta}
    _write_json({"fn": args.fn, "params": params, "value": value}, args.json)
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_common(p, data=True):
    if data:
        p.add_argument("--data", default="uefa", help="CSV path or 'uefa' (default)")
        p.add_argument("--tol-tie", type=float, default=0.0, help="|x1 - x2| treated as a tie")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=8, help="multistart count (default 8)")
    p.add_argument("--json", help="also write the JSON result to this path")


def _params_flags(p, alpha=1.0, a=1.0, b=0.0):
    p.add_argument("--alpha", type=float, default=alpha)
    p.add_argument("--a", type=float, default=a)
    p.add_argument("--b", type=float, default=b)
    p.add_argument("--theta", type=float, nargs="+", help="one shape (univariate) or three (bivariate)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moglib", description="EGLED and bivariate EGLED toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="maximum-likelihood fit of a bivariate model or one margin")
    _add_common(p)
    p.add_argument("--model", help="begled|bglfr|bvge, or E|GE|GLFR|EGLE with --margin")
    p.add_argument("--margin", type=int, choices=(1, 2), help="fit only column 1 or 2")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("reproduce-uefa", help="full UEFA analysis with published values side by side")
    _add_common(p, data=False)
    p.add_argument("--tol-tie", type=float, default=0.0)
    p.set_defaults(func=cmd_reproduce_uefa)

    p = sub.add_parser("simulate", help="Monte Carlo parameter-recovery study")
    _add_common(p, data=False)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--n", type=int, nargs="+", default=[30, 50, 100, 200])
    p.add_argument("--workers", type=int, help="worker processes (capped by MOGLIB_THREADS)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--theta", type=float, nargs="+")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="evaluate a distribution or reliability function")
    p.add_argument("--fn", required=True, choices=EVAL_FUNCTIONS)
    _params_flags(p)
    p.add_argument("--x", type=float, nargs="+")
    p.add_argument("--x1", type=float, nargs="+")
    p.add_argument("--x2", type=float, nargs="+")
    p.add_argument("--q", type=float, nargs="+", help="probabilities for quantile")
    p.add_argument("--r", type=int, default=1, help="moment order")
    p.add_argument("--margin", type=int, choices=(1, 2), help="margin for univariate functions with three thetas")
    p.add_argument("--form", choices=("definitional", "printed"), default="definitional")
    p.add_argument("--json")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
    except (FileNotFoundError, IsADirectoryError, PermissionError, DataFormatError, UnicodeDecodeError) as exc:
        print(f"moglib: {exc}", file=sys.stderr)
        return EXIT_IO
    except FitError as exc:
        print(f"moglib: fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (ValueError, NumericalError) as exc:
        print(f"moglib: {exc}", file=sys.stderr)
        return EXIT_USAGE if args.command == "eval" else EXIT_FIT
    return EXIT_OK  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
