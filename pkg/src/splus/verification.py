"""End-to-end verification checks, one group per acceptance criterion.

Each check returns :class:`CheckResult` records with the measured values and
the pinned tolerance.  ``splus verify`` and ``tests/test_acceptance.py`` both
run these.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bounds as bd
from .model import (
    BSeq,
    catalog,
    fekete_szego_value,
    g_transform,
    log_closed_form,
    log_coeffs_from_b,
    taylor_closed_form,
    taylor_from_b,
)
from .probe import DiscGrid, convexity_probe, f_over_z_re, g_re_prime, starlike_re
from .search import FeasibleRegion, maximize, sample_feasible, verify_bound

__all__ = ["CheckResult", "CHECKS", "run_checks", "remark_convexity"]

STATED_NU0 = 0.83927
STATED_BREAKPOINT = 0.456278
STATED_GAMMA2_UPPER = 0.631464


def _plain(o):
    if isinstance(o, np.generic):
        return o.item()
    return str(o)


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = json.dumps(self.detail, default=_plain)
        return f"[{status}] criterion {self.criterion:>2} {self.name}: {detail}"

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 4),
        }


def _timed(fn, repeat=1):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def check_nu0(**_) -> list[CheckResult]:
    v, secs = _timed(lambda: bd.solve_nu0(1e-8), repeat=20)
    residual = 2 * (2 * v + 1) * math.exp(-2 * v)
    bp = v / (1 + v)
    return [
        CheckResult(1, "nu0-value", abs(v - STATED_NU0) <= 1e-5,
                    {"nu0": v, "target": STATED_NU0, "tol": 1e-5, "error": abs(v - STATED_NU0)}),
        CheckResult(1, "nu0-residual", abs(residual - 1) <= 1e-9, {"value": residual, "tol": 1e-9}),
        CheckResult(1, "nu0-breakpoint", abs(bp - STATED_BREAKPOINT) <= 1e-5,
                    {"breakpoint": bp, "target": STATED_BREAKPOINT, "tol": 1e-5}),
        CheckResult(1, "nu0-runtime", secs < 1e-3, {"seconds": secs, "limit": 1e-3}),
    ]


def check_fs_psi(seed: int = 11, **_) -> list[CheckResult]:
    def run():
        rng = np.random.default_rng(seed)
        gammas = rng.uniform(0.0, 0.99, 100)
        v = bd.nu0()
        grid = np.append(np.arange(0.0, v, 1e-4), v)
        return max(abs(bd.fs_upper(g).upper - float(np.max(bd.fs_psi(grid, g)))) for g in gammas)

    err, secs = _timed(run)
    bp = bd.fs_breakpoint()
    jump = abs(bd._exp_branch(bp) - bd._nu0_branch(bp))
    return [
        CheckResult(2, "fs-psi-max", err <= 1e-6, {"max_error": err, "tol": 1e-6}),
        CheckResult(2, "fs-continuity", jump <= 1e-9, {"jump": jump, "tol": 1e-9}),
        CheckResult(2, "fs-runtime", secs < 1.0, {"seconds": secs, "limit": 1.0}),
    ]


def check_gamma2(**_) -> list[CheckResult]:
    g2 = bd.log_coeff_bounds()["gamma2"].upper
    half = bd.fs_upper(0.5).upper / 2
    return [
        CheckResult(3, "gamma2-constant", abs(g2 - STATED_GAMMA2_UPPER) <= 1e-5,
                    {"value": g2, "target": STATED_GAMMA2_UPPER, "tol": 1e-5}),
        CheckResult(3, "gamma2-equals-fs-half", g2 == half, {"gamma2_upper": g2, "fs_upper(1/2)/2": half}),
    ]


def check_closed_forms(seed: int = 2024, **_) -> list[CheckResult]:
    def run():
        B = sample_feasible(FeasibleRegion(lam=1.0, M=6), 1000, seed)
        err_a = err_g = err_id = 0.0
        for row in B:
            b = BSeq(row.tolist())
            t = taylor_from_b(b, 5)
            lg = log_coeffs_from_b(b, 3)
            cf_a = taylor_closed_form(*row[:4])
            cf_g = log_closed_form(*row[:3])
            err_a = max(err_a, *(abs(t[n] - cf_a[n - 2]) for n in range(2, 6)))
            err_g = max(err_g, *(abs(lg[n] - cf_g[n - 1]) for n in range(1, 4)))
            err_id = max(err_id, abs(t[3] - t[2] ** 2 + row[1]))
        return err_a, err_g, err_id

    (err_a, err_g, err_id), secs = _timed(run)
    return [
        CheckResult(4, "taylor-closed-form", err_a <= 1e-12, {"max_error": err_a, "tol": 1e-12}),
        CheckResult(4, "log-closed-form", err_g <= 1e-12, {"max_error": err_g, "tol": 1e-12}),
        CheckResult(4, "a3-a2sq-identity", err_id <= 1e-14, {"max_error": err_id, "tol": 1e-14}),
        CheckResult(4, "closed-form-runtime", secs < 1.0, {"seconds": secs, "limit": 1.0}),
    ]


def check_witnesses(**_) -> list[CheckResult]:
    F = Fraction
    out = []
    f1 = catalog("f1")
    gammas = [F(0), F(1, 10), F(3, 10), F(1, 2), F(3, 4), F(99, 100)]
    vals = [fekete_szego_value(f1, g) for g in gammas]
    out.append(CheckResult(5, "f1-fs-lower", all(v == -1 for v in vals), {"values": [str(v) for v in vals]}))

    k = catalog("koebe_plus")
    t, lg = taylor_from_b(k, 3), log_coeffs_from_b(k, 1)
    out.append(CheckResult(5, "koebe-plus", (lg[1], t[2], t[3]) == (-1, -2, 3),
                           {"gamma1": str(lg[1]), "a2": str(t[2]), "a3": str(t[3])}))

    g3_f3 = log_coeffs_from_b(catalog("f3"), 3)[3]
    out.append(CheckResult(5, "f3-gamma3", g3_f3 == F(1, 3), {"gamma3": str(g3_f3)}))
    g3_f4 = log_coeffs_from_b(catalog("f4"), 3)[3]
    out.append(CheckResult(5, "f4-gamma3", g3_f4 == F(-1, 4), {"gamma3": str(g3_f4)}))

    ok, got = True, {}
    for lam in (F(1, 4), F(1, 2), F(1)):
        t = taylor_from_b(catalog("f_lambda", lam), 4)
        want = (-(1 + lam), 1 + lam + lam**2, -(1 + lam + lam**2 + lam**3))
        ok &= (t[2], t[3], t[4]) == want
        got[str(lam)] = [str(t[2]), str(t[3]), str(t[4])]
    out.append(CheckResult(5, "f-lambda-a2-a4", ok, got))

    a4 = taylor_from_b(catalog("f7", 1), 4)[4]
    target = (4 / 3) * math.sqrt(2 / 3)
    out.append(CheckResult(5, "f7-a4", abs(a4 - target) <= 1e-12, {"a4": a4, "target": target, "tol": 1e-12}))

    lam = F(4, 27)
    a5 = taylor_from_b(catalog("f8", lam), 5)[5]
    out.append(CheckResult(5, "f8-a5", a5 == -lam / 3, {"a5": str(a5), "target": str(-lam / 3)}))
    return out


# functional id -> (target best value) for the grid-maximum part of criterion 6
GRID_TARGETS = {
    "gamma3": 1 / 3,
    "-gamma3": 1 / 4,
    "a4": 1.0887,
    "fs:0": 3.0,
    "-a3": 1.0,
}


def _violation_cases():
    cases = []
    for g in (0.0, 0.25, 0.3, bd.fs_breakpoint(), 0.5, 0.75, 0.95):
        b = bd.fs_upper(g)
        cases.append((f"fs:{g!r}", b.upper, "upper"))
        cases.append((f"fs:{g!r}", b.lower, "lower"))
    for name, iv in bd.log_coeff_bounds().items():
        cases.append((name, iv.upper, "upper"))
        cases.append((name, iv.lower, "lower"))
    for name, iv in bd.uplus_coeff_intervals(1.0).as_dict().items():
        cases.append((name, iv.upper, "upper"))
        cases.append((name, iv.lower, "lower"))
    return cases


def check_grid_oracle(samples: int = 100_000, seed: int = 7, bad_bounds: dict | None = None, **_):
    t0 = time.perf_counter()
    out = []
    for fid, target in GRID_TARGETS.items():
        r = maximize(fid, FeasibleRegion(lam=1.0), 0.005, refine_rounds=3)
        err = abs(r.best_value - target)
        out.append(CheckResult(6, f"grid-max[{fid}]", err <= 0.01,
                               {"best": r.best_value, "target": target, "tol": 0.01,
                                "argmax": [round(float(x), 6) for x in r.argmax.b],
                                "grid_violations_of_theorem_bound": r.violation_count}))
    region = FeasibleRegion(lam=1.0, M=4)
    bad_bounds = bad_bounds or {}
    for fid, bound, direction in _violation_cases():
        bound = bad_bounds.get((fid, direction), bound)
        r = verify_bound(fid, bound, direction, region, samples=samples, seed=seed)
        out.append(CheckResult(6, f"violations[{fid} {direction} {bound:.6g}]", r.violation_count == 0,
                               {"violations": r.violation_count, "extreme": r.best_value,
                                "witness": r.witness,
                                "at": [round(float(x), 6) for x in r.argmax.b]}))
    secs = time.perf_counter() - t0
    out.append(CheckResult(6, "grid-oracle-runtime", secs <= 300, {"seconds": secs, "limit": 300}))
    return out


def check_a5_audit(step: float = 0.002, n_jobs: int | None = None, **_):
    jobs = n_jobs or min(8, os.cpu_count() or 1)
    bound = 9 / 4
    r, secs = _timed(lambda: maximize("-a5", FeasibleRegion(lam=1.0, M=4, guard=True), step,
                                      bound=bound, n_jobs=jobs))
    ok = r.violation_count == 0 and r.best_value <= bound + 1e-9
    return [CheckResult(7, "a5-lower-audit", ok,
                        {"best_minus_a5": r.best_value, "bound": bound, "gap": r.gap,
                         "witness": [round(float(x), 6) for x in r.argmax.b],
                         "violations": r.violation_count, "grid_step": step,
                         "points": r.samples_evaluated, "seconds": round(secs, 2)})]


def remark_convexity(r: float) -> float:
    """The closed rational form of ``1 + z f''/f'`` for ``f = z/(1 + z^2/3)`` at ``z = r``."""
    return (1 - 2 * r**2 + r**4 / 9) / (1 - r**4 / 9)


def check_starlike_half(**_):
    grid = DiscGrid()
    f1 = starlike_re(catalog("f1"), grid, alpha=0.5)
    rem = starlike_re(BSeq([0, Fraction(1, 3)]), grid, alpha=0.5)
    cv = convexity_probe(BSeq([0, Fraction(1, 3)]), 0.99)
    ref = remark_convexity(0.99)
    return [
        CheckResult(8, "f1-not-starlike-half", f1.passed is False and f1.min_value < 0.5,
                    {"min": f1.min_value, "alpha": 0.5}),
        CheckResult(8, "remark-starlike-half", rem.min_value >= 0.49, {"min": rem.min_value, "floor": 0.49}),
        CheckResult(8, "remark-convexity", cv < 0 and abs(cv - ref) <= 1e-12,
                    {"probe": cv, "formula": ref, "tol": 1e-12}),
    ]


def check_g_transform(seed: int = 99, **_):
    grid = DiscGrid()
    B = sample_feasible(FeasibleRegion(lam=1.0, M=6), 1000, seed)
    worst_sum, worst_re = -math.inf, math.inf
    for row in B:
        b = BSeq(row.tolist())
        c = g_transform(b)
        worst_sum = max(worst_sum, sum(n * v for n, v in enumerate(c, start=2)))
        worst_re = min(worst_re, g_re_prime(b, grid).min_value)

    rng = np.random.default_rng(seed + 1)
    err = 0.0
    for row in B[:20]:
        r = np.sqrt(rng.uniform(0, 0.99**2, 100))
        z = r * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
        coeffs = np.r_[1.0, row]
        q = np.polyval(coeffs[::-1], z)
        dq = np.polyval((coeffs * np.arange(len(coeffs)))[1:][::-1], z)
        f = z / q
        fp = 1 / q - z * dq / q**2
        direct = np.abs((z / f) ** 2 * fp - 1)
        closed = np.abs(sum((n - 1) * row[n - 1] * z**n for n in range(2, len(row) + 1)))
        err = max(err, float(np.max(np.abs(direct - closed))))
    return [
        CheckResult(9, "g-coefficient-sum", worst_sum <= 1, {"max_sum": worst_sum, "limit": 1}),
        CheckResult(9, "g-re-prime", worst_re > 0, {"min_re_g_prime": worst_re}),
        CheckResult(9, "u-residual-closed-form", err <= 1e-12, {"max_error": err, "tol": 1e-12}),
    ]


def check_b1_zero(seed: int = 5, **_):
    grid = DiscGrid()
    B = sample_feasible(FeasibleRegion(lam=1.0, M=6), 200, seed)
    B[:, 0] = 0.0
    worst_fz, worst_st = math.inf, math.inf
    for row in B:
        b = BSeq(row.tolist())
        worst_fz = min(worst_fz, f_over_z_re(b, grid).min_value)
        worst_st = min(worst_st, starlike_re(b, grid, alpha=0.0).min_value)
    return [
        CheckResult(10, "f-over-z-half", worst_fz > 0.5, {"min": worst_fz, "threshold": 0.5}),
        CheckResult(10, "starlike-b1-zero", worst_st > 0, {"min": worst_st, "threshold": 0.0}),
    ]


CHECKS: list[tuple[int, str, Callable[..., list[CheckResult]]]] = [
    (1, "nu0", check_nu0),
    (2, "fs-psi", check_fs_psi),
    (3, "gamma2", check_gamma2),
    (4, "closed-forms", check_closed_forms),
    (5, "witnesses", check_witnesses),
    (6, "grid-oracle fs gamma a", check_grid_oracle),
    (7, "a5-audit", check_a5_audit),
    (8, "starlike-half convexity", check_starlike_half),
    (9, "g-transform u-residual", check_g_transform),
    (10, "b1-zero starlike", check_b1_zero),
]


def select(only: str | None):
    if not only:
        return CHECKS
    keys = [k.strip() for k in only.split(",") if k.strip()]

    def hit(crit, tags, k):
        return k == str(crit) if k.isdigit() else k in tags

    return [c for c in CHECKS if any(hit(c[0], c[1], k) for k in keys)]


def run_checks(only: str | None = None, **options) -> list[CheckResult]:
    results = []
    for _, _, fn in select(only):
        t0 = time.perf_counter()
        group = fn(**options)
        elapsed = time.perf_counter() - t0
        for r in group:
            r.seconds = r.seconds or elapsed
        results.extend(group)
    return results
