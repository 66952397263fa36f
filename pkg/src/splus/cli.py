"""Command-line interface: ``splus {check,coeffs,bounds,search,probe,verify}``.

Exit codes: 0 success, 1 membership/verification failure, 2 usage or input error.
Every command can emit text (default), JSON or CSV.  JSON always has the
top-level keys ``command, inputs, results, tolerances, version``; CSV has one
row per ``quantity, value, bound, verdict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import bounds as bd
from .errors import ContractError, GridTooLargeError
from .model import (
    CATALOG_IDS,
    LAMBDA_CATALOG_IDS,
    BSeq,
    catalog,
    fekete_szego_value,
    log_coeffs_from_b,
    membership,
    taylor_from_b,
)
from .probe import DiscGrid, convexity_probe, f_over_z_re, g_re_prime, starlike_re, u_residual
from .search import TOL, FeasibleRegion, maximize, verify_bound
from .verification import run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("splus")


class UsageError(Exception):
    pass


# -- output -------------------------------------------------------------------


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, bool):
        return x
    return x


def _row(quantity, value, bound=None, verdict=None):
    return {
        "quantity": quantity,
        "value": _num(value),
        "exact": str(value) if isinstance(value, Fraction) else None,
        "bound": _num(bound),
        "verdict": verdict,
    }


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, BSeq):
        return [_num(v) for v in o.b]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, dict):
        return json.dumps(v, default=_json_default)
    return str(v)


def _render(payload: dict, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, default=_json_default) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "value", "bound", "verdict"])
        for r in rows:
            value = r["exact"] if r.get("exact") else _fmt(r["value"])
            w.writerow([r["quantity"], value, _fmt(r["bound"]), _fmt(r["verdict"])])
        return buf.getvalue()
    lines = [f"# {payload['command']}  {json.dumps(payload['inputs'], default=_json_default)}"]
    width = max((len(r["quantity"]) for r in rows), default=8)
    for r in rows:
        value = r["exact"] if r.get("exact") else _fmt(r["value"])
        parts = [r["quantity"].ljust(width), value]
        if r["bound"] is not None:
            parts.append(f"bound {_fmt(r['bound'])}")
        if r["verdict"] is not None:
            parts.append(str(r["verdict"]))
        lines.append("  ".join(parts))
    return "\n".join(lines) + "\n"


def _emit(args, inputs: dict, results, rows: list[dict], tolerances: dict | None = None) -> None:
    payload = {
        "command": args.command,
        "inputs": inputs,
        "results": results,
        "tolerances": tolerances or {},
        "version": __version__,
    }
    text = _render(payload, rows, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- inputs -------------------------------------------------------------------


def _parse_lambda(text):
    if text is None:
        return None
    try:
        return Fraction(text) if "." not in text and "e" not in text.lower() else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --lambda {text!r}") from exc


def _b_input(args) -> tuple[BSeq, dict]:
    lam = _parse_lambda(getattr(args, "lam", None))
    if args.b is not None:
        return BSeq.parse(args.b), {"b": args.b}
    if args.catalog not in CATALOG_IDS:
        raise UsageError(f"unknown catalog id {args.catalog!r}; choose from {', '.join(CATALOG_IDS)}")
    if args.catalog in LAMBDA_CATALOG_IDS and lam is None:
        raise UsageError(f"catalog id {args.catalog} needs --lambda")
    b = catalog(args.catalog, lam if args.catalog in LAMBDA_CATALOG_IDS else None)
    inputs = {"catalog": args.catalog, "b": [_num(v) for v in b.b]}
    if lam is not None:
        inputs["lambda"] = _num(lam)
    return b, inputs


def _float_list(text: str) -> list[float]:
    try:
        return [float(Fraction(t)) if "/" in t else float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


# -- commands -------------------------------------------------------------------


def cmd_check(args) -> int:
    b, inputs = _b_input(args)
    lam = _parse_lambda(args.lam) or 1
    m = membership(b, lam)
    inputs["lambda"] = _num(lam)
    rows = [
        _row("splus_weight", m.weight, 1, _yes(m.splus)),
        _row("ulambda_weight", m.weight, lam, _yes(m.ulambda)),
        _row("starlike_half_sum", m.starlike_half_sum, 1, _yes(m.starlike_half)),
        _row("analytic_in_disc", m.analytic, None, _yes(m.analytic)),
    ]
    verdicts = {"splus": m.splus, "ulambda": m.ulambda, "starlike_half": m.starlike_half, "analytic": m.analytic}
    required = [r.strip() for r in args.require.split(",") if r.strip()]
    unknown = set(required) - set(verdicts)
    if unknown:
        raise UsageError(f"unknown --require entries {sorted(unknown)}")
    results = {
        "splus_weight": m.weight,
        "splus": m.splus,
        "ulambda": m.ulambda,
        "starlike_half_sum": m.starlike_half_sum,
        "starlike_half": m.starlike_half,
        "analytic": m.analytic,
        "required": required,
    }
    _emit(args, inputs, results, rows)
    return EXIT_OK if all(verdicts[r] for r in required) else EXIT_FAIL


def cmd_coeffs(args) -> int:
    if args.N < 5:
        raise UsageError("-N must be >= 5")
    b, inputs = _b_input(args)
    inputs["N"] = args.N
    t = taylor_from_b(b, args.N)
    lg = log_coeffs_from_b(b, 3)
    rows = [_row(f"a{n}", t[n]) for n in range(2, args.N + 1)]
    rows += [_row(f"gamma{n}", lg[n]) for n in (1, 2, 3)]
    fs = {}
    gammas = [Fraction(g) if b.exact and "." not in g and "e" not in g.lower() else float(g)
              for g in args.fs_gamma.split(",") if g.strip()]
    for g in gammas:
        try:
            v = fekete_szego_value(b, g)
        except ContractError as exc:
            raise UsageError(str(exc)) from exc
        bound = bd.fs_upper(float(g))
        ok = bound.lower - TOL <= float(v) <= bound.upper + TOL
        rows.append(_row(f"fs[gamma={g}]", v, bound.upper, "within" if ok else "VIOLATES"))
        fs[str(g)] = v
    inputs["fs_gamma"] = [str(g) for g in gammas]
    results = {
        "a": {f"a{n}": t[n] for n in range(2, args.N + 1)},
        "gamma": {f"gamma{n}": lg[n] for n in (1, 2, 3)},
        "fekete_szego": fs,
    }
    _emit(args, inputs, results, rows)
    return EXIT_OK


def cmd_bounds(args) -> int:
    rows, results, inputs = [], {}, {}
    show_all = not (args.nu0 or args.lam or args.fs_gamma)
    v = bd.nu0()
    if args.nu0 or show_all:
        rows += [_row("nu0", v), _row("fs_breakpoint", bd.fs_breakpoint())]
        results["nu0"] = v
        results["fs_breakpoint"] = bd.fs_breakpoint()
    if args.fs_gamma or show_all:
        if args.fs_gamma:
            gammas = _float_list(args.fs_gamma)
        else:
            gammas = [k / args.gamma_steps for k in range(args.gamma_steps)]
        inputs["fs_gamma"] = gammas
        table = []
        for g in gammas:
            try:
                fb = bd.fs_upper(g)
            except ContractError as exc:
                raise UsageError(str(exc)) from exc
            rows.append(_row(f"fs[gamma={g:g}].lower", fb.lower))
            rows.append(_row(f"fs[gamma={g:g}].upper", fb.upper, None, fb.branch))
            table.append({"gamma": g, "lower": fb.lower, "upper": fb.upper, "branch": fb.branch})
        results["fekete_szego"] = table
    if show_all:
        lcb = bd.log_coeff_bounds()
        results["log_coefficients"] = {k: [iv.lower, iv.upper] for k, iv in lcb.items()}
        for k, iv in lcb.items():
            rows += [_row(f"{k}.lower", iv.lower), _row(f"{k}.upper", iv.upper)]
    if args.lam or show_all:
        lam = float(_parse_lambda(args.lam) or 1)
        inputs["lambda"] = lam
        try:
            ci = bd.uplus_coeff_intervals(lam)
        except ContractError as exc:
            raise UsageError(str(exc)) from exc
        results["uplus_intervals"] = {k: [iv.lower, iv.upper] for k, iv in ci.as_dict().items()}
        for k, iv in ci.as_dict().items():
            rows.append(_row(f"{k}.lower", iv.lower))
            rows.append(_row(f"{k}.upper", iv.upper, None, None if iv.upper is not None else "unavailable"))
    _emit(args, inputs, results, rows)
    return EXIT_OK


def cmd_search(args) -> int:
    lam = float(_parse_lambda(args.lam) or 1)
    region = FeasibleRegion(lam=lam, M=args.M, guard=args.guard)
    inputs = {"functional": args.functional, "lambda": lam, "M": args.M, "guard": args.guard, "mode": args.mode}
    if args.mode == "grid":
        inputs.update(step=args.step, refine=args.refine)
        try:
            r = maximize(args.functional, region, args.step, refine_rounds=args.refine,
                         max_evaluations=args.max_evaluations, n_jobs=args.jobs)
        except GridTooLargeError as exc:
            raise UsageError(str(exc)) from exc
    else:
        inputs.update(samples=args.samples, seed=args.seed, direction=args.direction)
        fid = args.functional
        if args.direction == "lower":
            # lower bound of f is minus the upper bound of -f
            neg = bd.theorem_bound(fid[1:] if fid.startswith("-") else "-" + fid, lam)
            bound = None if neg is None else -neg
        else:
            bound = bd.theorem_bound(fid, lam)
        if bound is None:
            raise UsageError(f"no theorem bound for {fid} ({args.direction}) at lambda={lam}")
        r = verify_bound(fid, bound, args.direction, region, samples=args.samples, seed=args.seed)
    d = r.to_dict()
    verdict = None if r.bound_compared is None else ("ok" if r.violation_count == 0 else "VIOLATED")
    rows = [_row("best_value", r.best_value, r.bound_compared, verdict),
            _row("gap", r.gap), _row("violations", r.violation_count),
            _row("argmax", ",".join(f"{float(x):.6g}" for x in r.argmax.b)),
            _row("evaluated", r.samples_evaluated)]
    _emit(args, inputs, d, rows, {"violation": TOL})
    return EXIT_OK if r.violation_count == 0 else EXIT_FAIL


def cmd_probe(args) -> int:
    b, inputs = _b_input(args)
    grid = DiscGrid(args.r_max, args.radial_steps, args.angular_steps)
    inputs.update(quantity=args.quantity, **grid.to_dict())
    if args.quantity == "convexity":
        value = convexity_probe(b, args.r)
        inputs["r"] = args.r
        _emit(args, inputs, {"quantity": "convexity", "value": value, "r": args.r},
              [_row("re(1+zf''/f')", value, 0.0, "positive" if value > 0 else "nonpositive")])
        return EXIT_OK
    if args.quantity == "starlike":
        inputs["alpha"] = args.alpha
        rep = starlike_re(b, grid, args.alpha, tolerance=args.tolerance)
    elif args.quantity == "u_residual":
        rep = u_residual(b, grid)
    elif args.quantity == "g_re_prime":
        rep = g_re_prime(b, grid)
    else:
        rep = f_over_z_re(b, grid)
    d = rep.to_dict()
    verdict = None if rep.passed is None else ("pass" if rep.passed else "fail")
    rows = [_row(f"{rep.quantity}.min", rep.min_value, rep.threshold, verdict),
            _row(f"{rep.quantity}.max", rep.max_value)]
    _emit(args, inputs, d, rows, {"pass_margin": rep.tolerance})
    return EXIT_OK if rep.passed in (True, None) else EXIT_FAIL


def _parse_injection(text: str):
    # FUNC[:upper|lower]=VALUE
    try:
        key, value = text.split("=", 1)
        fid, _, direction = key.partition(":")
        if fid.startswith("fs") and direction and direction not in ("upper", "lower"):
            fid, direction = key, ""
        direction = direction or "upper"
        return (fid, direction), float(value)
    except ValueError as exc:
        raise UsageError(f"bad --inject-bad-bound {text!r}; expected FUNC[:upper|lower]=VALUE") from exc


def cmd_verify(args) -> int:
    bad = dict(_parse_injection(t) for t in args.inject_bad_bound)
    options = {"samples": args.samples, "bad_bounds": bad, "step": args.a5_step, "n_jobs": args.jobs}
    results = run_checks(args.only, **options)
    if not results:
        raise UsageError(f"--only {args.only!r} selects no checks")
    rows = [_row(f"c{r.criterion}.{r.name}", r.detail, None, "PASS" if r.passed else "FAIL") for r in results]
    inputs = {"only": args.only, "samples": args.samples, "a5_step": args.a5_step,
              "injected": [f"{k[0]}:{k[1]}={v}" for k, v in bad.items()]}
    failed = [f"c{r.criterion}.{r.name}" for r in results if not r.passed]
    _emit(args, inputs, {"checks": [r.to_dict() for r in results], "failed": failed}, rows)
    for name in failed:
        print(f"FAILED: {name}", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    def b_source(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--b", help="comma-separated b1,b2,... (fractions allowed: 1/3)")
        g.add_argument("--catalog", help=f"extremal function id: {', '.join(CATALOG_IDS)}")
        p.add_argument("--lambda", dest="lam", help="lambda in (0, 1]")

    parser = argparse.ArgumentParser(prog="splus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="membership tests")
    b_source(p)
    p.add_argument("--require", default="splus",
                   help="memberships that decide the exit code (splus,ulambda,starlike_half,analytic)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("coeffs", parents=[common], help="Taylor, logarithmic and Fekete-Szegő values")
    b_source(p)
    p.add_argument("-N", type=int, default=12, help="highest Taylor index (>= 5)")
    p.add_argument("--fs-gamma", default="0,1/2", help="gamma values for a3 - gamma a2^2")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("bounds", parents=[common], help="theoretical bounds")
    p.add_argument("--nu0", action="store_true", help="only nu0 and the branch breakpoint")
    p.add_argument("--lambda", dest="lam", help="U+(lambda) coefficient intervals")
    p.add_argument("--fs-gamma", help="Fekete-Szegő bounds at these gamma values")
    p.add_argument("--gamma-steps", type=int, default=10, help="gamma grid size for the default table")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("search", parents=[common], help="grid or sampled extremal search")
    p.add_argument("--functional", required=True, help="a2..a5, gamma1..gamma3, fs:<gamma>; '-' negates")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--mode", choices=("grid", "sample"), default="grid")
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--M", type=int)
    p.add_argument("--refine", type=int, default=0)
    p.add_argument("--guard", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--direction", choices=("upper", "lower"), default="upper")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-evaluations", type=int, default=4_000_000_000)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("probe", parents=[common], help="disc-grid probes of f")
    b_source(p)
    p.add_argument("--quantity", choices=("starlike", "u_residual", "g_re_prime", "f_over_z", "convexity"),
                   default="starlike")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--r-max", type=float, default=0.99)
    p.add_argument("--radial-steps", type=int, default=50)
    p.add_argument("--angular-steps", type=int, default=256)
    p.add_argument("--r", type=float, default=0.99, help="radius for the convexity probe")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("verify", parents=[common], help="run the full verification report")
    p.add_argument("--only", help="criterion numbers or tags, comma-separated (e.g. 1,2 or fs)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--a5-step", type=float, default=0.002)
    p.add_argument("--jobs", type=int)
    p.add_argument("--inject-bad-bound", action="append", default=[], metavar="FUNC[:DIR]=VALUE",
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
