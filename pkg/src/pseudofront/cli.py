"""Command-line entry point: ``pseudofront <mode> [flags]``.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
4 precondition violation.
"""

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from . import config as cfg
from . import export, pipeline
from .errors import DomainError, NumericalFailure, PreconditionError, UnknownCurve
from .expr import ExpressionSyntaxError
from .singular import TYPES, Tolerances, detect_singular_set
from .verify import check_suite, report_passes

log = logging.getLogger("pseudofront")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PRECONDITION = 0, 2, 3, 4
RUN_FILE = "run.json"
REPORT_FILE = "report.json"


# ---------------------------------------------------------------- orchestration

def tolerances(conf):
    return Tolerances().replace(**conf.tolerances.model_dump())


def _grid(conf, default_chart, default_a, default_b, epsilon):
    if conf.domain is not None:
        d = conf.domain
        return pipeline.grid_from_domain((*d.a, *d.b), conf.res, d.chart, epsilon)
    return pipeline.grid_from_domain((*default_a, *default_b), conf.res, default_chart,
                                     epsilon)


def _n_u(conf):
    return conf.res if isinstance(conf.res, int) else conf.res[0]


def build(conf, detect=True, checks=None):
    """Run the construction described by ``conf`` (any mode except classify)."""
    checks = conf.checks if checks is None else checks
    tol = tolerances(conf)
    b = conf.bindings
    common = dict(N=conf.truncation, lam0=conf.lambda0, tol=tol, detect=detect,
                  checks=checks)
    if conf.mode in ("cauchy", "verify") and (conf.curve is not None or conf.kappa is not None):
        curve = cfg.build_curve(conf.curve, b) if conf.curve is not None else None
        if curve is not None:
            kappa, tau = curve.kappa_function(), curve.tau_function()
        else:
            kappa, tau = cfg.scalar(conf.kappa, None, b), cfg.scalar(conf.tau, None, b)
        eps = conf.epsilon or 1
        if conf.domain is not None:
            grid = _grid(conf, "uv", None, None, eps)
        elif curve is None:
            v = conf.v_half or 1.0
            grid = _grid(conf, "uv", (-1.0, 1.0), (-v, v), eps)
        else:
            # keep every x-lattice sample inside the curve data
            lo, hi = curve.interval
            v = conf.v_half or min(1.0, 0.1 * (hi - lo))
            n = _n_u(conf)
            m = max(1, int(round(v * (n - 1) / (hi - lo - 2 * v))))
            h = (hi - lo) / (n - 1 + 2 * m)
            grid = pipeline.GridSpec("uv", (lo + m * h, hi - m * h), (-m * h, m * h),
                                     _n_u(conf), 2 * m + 1, conf.epsilon or 1)
        return pipeline.run_cauchy(kappa, tau, grid, branch=conf.branch,
                                   epsilon=conf.epsilon, curve=curve, **common)
    if conf.mode == "generate":
        grid = _grid(conf, "uv", (-1.0, 1.0), (-1.0, 1.0), conf.epsilon)
        return pipeline.run_generate(cfg.scalar(conf.A, None, b), cfg.scalar(conf.B, None, b),
                                     cfg.scalar(conf.beta, None, b), conf.epsilon, grid,
                                     **common)
    if conf.mode == "characteristic":
        grid = _grid(conf, "xy", (-1.0, 1.0), (-1.0, 1.0), 1)
        return pipeline.run_characteristic(cfg.scalar(conf.kappa, None, b),
                                           cfg.scalar(conf.alpha, None, b),
                                           cfg.scalar(conf.beta, None, b), grid, **common)
    raise cfg.ConfigError(f"mode {conf.mode!r} has no construction data")


def load_run(run_dir):
    path = os.path.join(run_dir, RUN_FILE)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise cfg.ConfigError(f"cannot read stored run {path}: {exc.strerror}") from None
    return cfg.parse_config(doc["config"])


def summary(run, tol):
    out = {"mode": run.mode, "grid": run.grid.to_dict(), "truncation": run.frame.N,
           "lambda0": run.surface.lam0, "diagnostics": run.frame.diagnostics}
    if run.singular is not None:
        counts = {t: 0 for t in TYPES}
        for c in run.singular.curves:
            for t in c.types:
                counts[t] += 1
        out["singular"] = {"curves": len(run.singular.curves), "type_counts": counts,
                           "degenerate_points": run.singular.degenerate_points,
                           "fully_degenerate": run.singular.fully_degenerate}
    if run.report is not None:
        out["checks"] = run.report
        out["checks_pass"] = report_passes(run.report)
    if run.mode == "cauchy":
        out["leading_coefficients"] = pipeline.leading_coefficient_report(
            run.pair, tol.weak_tol)
        if run.curve is not None and run.singular is not None:
            out["cauchy_fidelity"] = pipeline.cauchy_fidelity(run)
    return out


def run(conf):
    """Execute one job; returns the summary dict (files are written as a side effect)."""
    t0 = time.perf_counter()
    tol = tolerances(conf)
    out = conf.output
    if conf.mode == "classify":
        stored = load_run(conf.run)
        res = build(stored.model_copy(update={"tolerances": conf.tolerances}),
                    detect=False, checks=False)
        res.singular = detect_singular_set(res.surface, tol)
        doc = summary(res, tol)
        os.makedirs(out.dir, exist_ok=True)
        export.write_text(os.path.join(out.dir, f"{out.basename}.json"),
                          export.singular_json(res.singular, res.grid))
    elif conf.mode == "verify":
        source = load_run(conf.run) if conf.run else conf
        res = build(source, detect=False, checks=False)
        res.report = check_suite(res.surface, weak_tol=tol.weak_tol)
        doc = summary(res, tol)
        os.makedirs(out.dir, exist_ok=True)
    else:
        res = build(conf)
        doc = summary(res, tol)
        export.export_mesh(res.surface, res.singular, out.dir, out.formats, out.basename,
                           res.grid)
        export.write_text(os.path.join(out.dir, RUN_FILE),
                          export.dumps({"config": conf.model_dump(mode="json")}))
    export.write_text(os.path.join(out.dir, REPORT_FILE), export.dumps(doc))
    log.info("%s finished in %.2f s", conf.mode, time.perf_counter() - t0)
    return doc


# ---------------------------------------------------------------- argument parsing

def _pair(text, kind=float):
    parts = [p for p in text.replace("x", ",").split(",") if p]
    return [kind(p) for p in parts]


def make_parser():
    p = argparse.ArgumentParser(
        prog="pseudofront",
        description="Pseudospherical frontals from loop-group potentials.")
    sub = p.add_subparsers(dest="mode", required=True)
    for mode in cfg.MODES:
        s = sub.add_parser(mode)
        s.add_argument("--config", help="JSON job file; flags override its fields")
        s.add_argument("--kappa", help="curvature expression in t (or a number)")
        s.add_argument("--tau", help="torsion expression")
        s.add_argument("--alpha", help="characteristic-mode alpha(y)")
        s.add_argument("--A", dest="A", help="generate-mode A(t)")
        s.add_argument("--B", dest="B", help="generate-mode B(t)")
        s.add_argument("--beta", help="beta(t)")
        s.add_argument("--curve", help="named curve: circle, helix, cylinder_figure, viviani")
        s.add_argument("--domain", help="a0,a1,b0,b1 box of the chosen chart")
        s.add_argument("--chart", choices=("uv", "xy"))
        s.add_argument("--res", help="samples per axis: N or NxM")
        s.add_argument("--truncation", type=int, help="loop truncation order N")
        s.add_argument("--lambda0", type=float, help="spectral parameter of the Sym formula")
        s.add_argument("--epsilon", type=int, choices=(-1, 1))
        s.add_argument("--out", help="output directory")
        s.add_argument("--format", help="comma list of obj,ply,csv,json")
        s.add_argument("--run", help="stored run directory (classify, verify)")
        s.add_argument("--no-checks", action="store_true", help="skip the residual suite")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def merge(args):
    """Config document from ``--config`` with command-line overrides applied."""
    doc = {}
    if args.config:
        doc = cfg.load_config(args.config).model_dump(exclude_unset=True)
    doc["mode"] = args.mode
    for key in ("kappa", "tau", "alpha", "A", "B", "beta", "truncation", "lambda0",
                "epsilon", "run"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    if args.curve:
        doc["curve"] = {"named": args.curve}
    if args.domain or args.chart:
        dom = dict(doc.get("domain") or {})
        if args.domain:
            v = _pair(args.domain)
            if len(v) != 4:
                raise cfg.ConfigError("--domain needs four numbers a0,a1,b0,b1")
            dom["a"], dom["b"] = v[:2], v[2:]
        if args.chart:
            dom["chart"] = args.chart
        doc["domain"] = dom
    if args.res:
        v = _pair(args.res, int)
        doc["res"] = v[0] if len(v) == 1 else v
    out = dict(doc.get("output") or {})
    if args.out:
        out["dir"] = args.out
    if args.format:
        out["formats"] = [f.strip() for f in args.format.split(",") if f.strip()]
    if out:
        doc["output"] = out
    if args.no_checks:
        doc["checks"] = False
    return cfg.parse_config(doc)


def _print_summary(doc):
    g = doc["grid"]
    print(f"mode={doc['mode']} grid={g['n_a']}x{g['n_b']} ({g['chart']}) "
          f"N={doc['truncation']} lambda0={doc['lambda0']}")
    if "singular" in doc:
        counts = {k: v for k, v in doc["singular"]["type_counts"].items() if v}
        print(f"singular curves: {doc['singular']['curves']} {counts}")
    if "checks" in doc:
        for name, m in doc["checks"].items():
            if isinstance(m, dict) and "pass" in m:
                if name == "wave_front":
                    print(f"  {name:24s} {'yes' if m['pass'] else 'no'} "
                          f"({m['count']} nodes fail the rank or weak-regularity test)")
                    continue
                state = "skip" if m.get("skipped") else ("pass" if m["pass"] else "FAIL")
                print(f"  {name:24s} {state:4s} max={m['max']:.3e}")
    if doc.get("cauchy_fidelity"):
        f = doc["cauchy_fidelity"]
        print(f"curve fidelity: max={f['max_deviation']:.3e} "
              f"kappa_rel={f['kappa_rel_error']:.3e} tau_rel={f['tau_rel_error']:.3e}")


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    np.seterr(all="ignore")
    try:
        conf = merge(args)
        doc = run(conf)
    except (cfg.ConfigError, ExpressionSyntaxError, UnknownCurve) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (PreconditionError, DomainError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _print_summary(doc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
