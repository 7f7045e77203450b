"""Command-line front end: ``wallach-flow {classify,simulate,boundary,portrait,tables,verify}``."""

from __future__ import annotations

import argparse
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional

from . import checks
from .boundary import HIGH, LOW, sample_branch
from .catalog import family as family_spec
from .catalog import instantiate
from .classify import X_Y, preserving_pairs, so_family_classify, sturm_count, verdict
from .core import DomainError, GwsParams, MetricPoint, coords, in_region
from .exact import as_number
from .flow import ENTER, EXIT, IntegrationOptions, integrate, phi, sample_region
from .serialize import (
    CURVE_HEADER, TRAJECTORY_HEADER, curve_rows, dumps_csv, dumps_json, metadata,
    trajectory_payload, trajectory_rows,
)
from .signpoly import crossing_scenario, roots_h

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _params(args) -> GwsParams:
    has_a = args.a is not None
    has_family = args.family is not None
    if has_a == has_family:
        raise UsageError("give exactly one parameter source: --a or --family")
    if has_a:
        parts = [s for s in args.a.split(",") if s.strip()]
        if len(parts) != 3:
            raise UsageError(f"--a needs three comma-separated values, got {args.a!r}")
        vals = [as_number(s) for s in parts]
        if any(isinstance(v, float) for v in vals):
            _warn("decimal input is routed through the binary64 path; use p/q for exact decisions")
        return GwsParams(*vals)
    spec = family_spec(args.family)
    given = {"k": args.k, "l": args.l, "m": args.m}
    missing = [n for n in spec.params if given[n] is None]
    if missing:
        raise UsageError(f"family {args.family} needs {', '.join('-' + n for n in missing)}")
    return instantiate(args.family, *(given[n] for n in spec.params))


def _tolerances(args) -> dict:
    out = {}
    for name in ("rtol", "atol", "horizon"):
        if hasattr(args, name):
            out[name] = getattr(args, name)
    return out


def _config(args) -> dict:
    skip = {"func", "out", "workers"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _number(v):
    return str(v) if isinstance(v, Fraction) else v


# --- classify -------------------------------------------------------------

def classify_report(p: GwsParams, triple=None) -> dict:
    v = verdict(p)
    report = {
        "params": [_number(a) for a in p.a],
        "exact": p.exact,
        "family": p.family,
        "theta": {"value": _number(p.theta), "decimal": float(p.theta)},
        "indices": [
            {
                "i": w.i,
                "theta_i": w.theta_i,
                "lhs_4(aj+ak)^2": _number(w.lhs),
                "rhs_(1-2ai)/(1+2ai)": _number(w.rhs),
                "holds": w.holds,
                "tie": w.tie,
                "exact": w.exact,
            }
            for w in v.witnesses
        ],
        "verdict": {
            "outcome": v.outcome,
            "sum_regime": v.sum_regime,
            "exit_indices": list(v.exit_indices or ()),
            "inexact": v.inexact,
        },
        "roots": [],
        "scenarios": [],
    }
    for i in (1, 2, 3):
        sp = roots_h(p, i)
        for r in sp.roots:
            report["roots"].append({"i": i, "t": r.t, "multiplicity": r.multiplicity,
                                    "branch": r.tag, "y": r.y})
        for branch in (LOW, HIGH):
            sc = crossing_scenario(p, i, branch, sp)
            report["scenarios"].append({
                "i": i, "branch": branch, "label": sc.label,
                "interval": list(sc.interval),
                "pieces": [list(pc) for pc in sc.pieces],
                "touches": list(sc.touches),
            })
    if triple is not None:
        fv = so_family_classify(*triple)
        report["so_family"] = {"triple": list(fv.extra["triple"]), "outcome": fv.outcome,
                               "lm_vs_X": fv.extra.get("lm_vs_X"),
                               "lm_vs_Y": fv.extra.get("lm_vs_Y")}
    return report


def cmd_classify(args) -> int:
    p = _params(args)
    triple = (args.k, args.l, args.m) if args.family == 1 else None
    meta = metadata("classify", _config(args), None, {"tie_band": 1e-12})
    _emit(dumps_json(classify_report(p, triple), meta), args.out)
    return EXIT_OK


# --- simulate / portrait --------------------------------------------------

def _run_one(job):
    p, x0, horizon, opts = job
    return integrate(p, x0, horizon, opts)


def _run_batch(jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))  # map keeps input order


def _options(args) -> IntegrationOptions:
    return IntegrationOptions(rtol=args.rtol, atol=args.atol)


def _summary(trajs) -> dict:
    exits = sum(1 for t in trajs for e in t.events if e.direction == EXIT)
    enters = sum(1 for t in trajs for e in t.events if e.direction == ENTER)
    reentered = 0
    for t in trajs:
        seq = [d for _, d in t.region_transitions()]
        if EXIT in seq and ENTER in seq[seq.index(EXIT):]:
            reentered += 1
    terminals = {}
    for t in trajs:
        terminals[t.terminal] = terminals.get(t.terminal, 0) + 1
    return {
        "trajectories": len(trajs),
        "exit_events": exits,
        "enter_events": enters,
        "with_exit": sum(1 for t in trajs if any(e.direction == EXIT for e in t.events)),
        "reentered_after_exit": reentered,
        "terminal": dict(sorted(terminals.items())),
    }


def _write_trajectories(trajs, args, meta) -> None:
    if args.format == "json":
        payload = {"trajectories": [trajectory_payload(t) for t in trajs], "summary": _summary(trajs)}
        _emit(dumps_json(payload, meta), args.out)
        return
    if len(trajs) == 1:
        _emit(dumps_csv(TRAJECTORY_HEADER, trajectory_rows(trajs[0]), meta), args.out)
        return
    if not args.out:
        raise UsageError("CSV output of several trajectories needs --out DIR")
    os.makedirs(args.out, exist_ok=True)
    for idx, t in enumerate(trajs):
        m = dict(meta, trajectory=idx)
        with open(os.path.join(args.out, f"traj_{idx:04d}.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(dumps_csv(TRAJECTORY_HEADER, trajectory_rows(t), m))


def cmd_simulate(args) -> int:
    p = _params(args)
    if args.x0:
        seeds = [MetricPoint(*coords(float(v) for v in s.split(","))) for s in args.x0]
    else:
        seeds = sample_region(p, args.n, random.Random(args.seed))
    opts = _options(args)
    trajs = _run_batch([(p, x, args.horizon, opts) for x in seeds], args.workers)
    meta = metadata("simulate", _config(args), args.seed, _tolerances(args))
    _write_trajectories(trajs, args, meta)
    summary = _summary(trajs)
    if any(t.terminal == "step-failure" for t in trajs):
        _warn("some trajectories ended in step-failure; their outputs are partial")
    if args.out:
        print(dumps_json(summary), end="")
    return EXIT_OK


def cmd_portrait(args) -> int:
    p = _params(args)
    lo, hi = args.range
    n = args.grid
    vals = [lo + (hi - lo) * q / (n - 1) for q in range(n)]
    seeds = [MetricPoint(x1, x2, phi(p, x1, x2)) for x1 in vals for x2 in vals]
    trajs = _run_batch([(p, x, args.horizon, _options(args)) for x in seeds], args.workers)
    meta = metadata("portrait", _config(args), None, _tolerances(args))
    if args.format == "json":
        payload = {"trajectories": [trajectory_payload(t) for t in trajs], "summary": _summary(trajs)}
        _emit(dumps_json(payload, meta), args.out)
    else:
        rows = []
        for idx, t in enumerate(trajs):
            rows.extend((idx, *r) for r in trajectory_rows(t))
        _emit(dumps_csv(("seed",) + TRAJECTORY_HEADER, rows, meta), args.out)
    return EXIT_OK


# --- boundary -------------------------------------------------------------

def cmd_boundary(args) -> int:
    p = _params(args)
    samples = sample_branch(p, args.i, args.branch, n=args.n, trimmed=not args.untrimmed,
                            decades=args.decades)
    meta = metadata("boundary", _config(args), None, {"guard_band": 1e-9})
    rows = curve_rows(samples)
    if args.format == "json":
        _emit(dumps_json({"samples": [dict(zip(CURVE_HEADER, r)) for r in rows]}, meta), args.out)
    else:
        _emit(dumps_csv(CURVE_HEADER, rows, meta), args.out)
    return EXIT_OK


# --- tables / verify ------------------------------------------------------

def tables_payload(k_max: int = 17) -> dict:
    t3 = {str(k): {"X": X_Y(k)[0], "Y": X_Y(k)[1]} for k in range(12, k_max + 1)}
    t45 = {}
    for k in range(12, k_max + 1):
        pairs = preserving_pairs(k)
        t45[str(k)] = {"X_side": sorted(pairs["X"]), "Y_side": sorted(pairs["Y"])}
    t2 = {"sturm_roots_in_(0,1/k]": {str(k): sturm_count(k) for k in range(1, k_max + 1)}}
    return {"table2": t2, "table3": t3, "tables4_5": t45}


def _report_checks(results) -> int:
    failed = 0
    for c in results:
        status = "PASS" if c.ok else "FAIL"
        failed += not c.ok
        err = c.error
        err_s = f" err={err:.3g}" if err is not None else ""
        print(f"{status} {c.group}/{c.name}: measured={c.measured} expected={c.expected} "
              f"tol={c.tol:g}{err_s}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_tables(args) -> int:
    meta = metadata("tables", _config(args), None, {"table3": 0.005})
    results = checks.tables()
    payload = tables_payload()
    payload["golden"] = [{"name": c.name, "ok": c.ok} for c in results]
    _emit(dumps_json(payload, meta), args.out)
    bad = [c for c in results if not c.ok]
    for c in bad:
        print(f"FAIL tables/{c.name}: measured={c.measured} expected={c.expected}", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_verify(args) -> int:
    only: List[str] = []
    for item in args.only or ():
        only.extend(s for s in item.split(",") if s)
    try:
        results = checks.run(only or None)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    return _report_checks(results)


# --- parser ---------------------------------------------------------------

def _add_params(sp) -> None:
    sp.add_argument("--a", help="triple a1,a2,a3 as p/q rationals (decimals use the inexact path)")
    sp.add_argument("--family", type=int, help="family id 1..15")
    sp.add_argument("-k", type=int)
    sp.add_argument("-l", type=int)
    sp.add_argument("-m", type=int)


def _add_output(sp, formats=("csv", "json"), default="csv") -> None:
    sp.add_argument("--out", help="output file (directory for several CSV trajectories)")
    sp.add_argument("--format", choices=formats, default=default)


def _add_integration(sp, horizon: float) -> None:
    sp.add_argument("--horizon", type=float, default=horizon)
    sp.add_argument("--rtol", type=float, default=1e-9)
    sp.add_argument("--atol", type=float, default=1e-12)
    sp.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wallach-flow", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="verdict, thresholds, h-roots and crossing scenarios")
    _add_params(sp)
    _add_output(sp, ("json",), "json")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("simulate", help="integrate trajectories from given or sampled seeds")
    _add_params(sp)
    _add_output(sp)
    _add_integration(sp, 50.0)
    sp.add_argument("--x0", action="append", help="initial point x1,x2,x3 (repeatable)")
    sp.add_argument("--n", type=int, default=64, help="number of seeds sampled in R on Sigma")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("portrait", help="trajectories from a grid of seeds in the (x1, x2) chart")
    _add_params(sp)
    _add_output(sp)
    _add_integration(sp, 10.0)
    sp.add_argument("--grid", type=int, default=12)
    sp.add_argument("--range", type=float, nargs=2, default=(0.05, 4.0), metavar=("LO", "HI"))
    sp.set_defaults(func=cmd_portrait)

    sp = sub.add_parser("boundary", help="sample a branch of r_i with field-normal data")
    _add_params(sp)
    _add_output(sp)
    sp.add_argument("--i", type=int, default=1, choices=(1, 2, 3))
    sp.add_argument("--branch", choices=(LOW, HIGH), default=HIGH)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--decades", type=float, default=3.0)
    sp.add_argument("--untrimmed", action="store_true",
                    help="run up to the gap instead of stopping at the neighbouring curves")
    sp.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("tables", help="threshold tables with a diff against reference values")
    _add_output(sp, ("json",), "json")
    sp.set_defaults(func=cmd_tables)

    sp = sub.add_parser("verify", help="recompute the published worked examples")
    sp.add_argument("--only", action="append",
                    help=f"check group(s), comma separated: {', '.join(checks.GROUPS)}")
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
