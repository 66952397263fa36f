"""Brute-force oracle over the feasible b-region.

The feasible region for weight budget ``lam`` is::

    b_n >= 0,   b_1 <= b1_max,   sum_{n>=2} (n-1) b_n <= lam,
    and (guard on) 1 + sum b_n z^n has no zero in |z| < 1.

:func:`maximize` scans an exhaustive lattice in that region; :func:`verify_bound`
checks a bound on seeded random samples plus the catalog of extremal functions.
Functionals are evaluated through the closed forms in :mod:`splus.model`.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable

import numpy as np

from .bounds import theorem_bound
from .errors import ContractError, DomainError, GridTooLargeError
from .model import A_CLOSED, CATALOG_IDS, GAMMA_CLOSED, LAMBDA_CATALOG_IDS, BSeq, analytic_mask, catalog

log = logging.getLogger(__name__)

__all__ = [
    "FeasibleRegion",
    "Functional",
    "SearchResult",
    "parse_functional",
    "sample_feasible",
    "maximize",
    "verify_bound",
    "DEFAULT_MAX_EVALUATIONS",
    "TOL",
]

TOL = 1e-9
DEFAULT_MAX_EVALUATIONS = 4_000_000_000
_WEIGHT_SLACK = 1e-12


@dataclass(frozen=True)
class FeasibleRegion:
    """Box-and-budget region.

    ``M=None`` lets each search pick ``max(2, number of b's the functional uses)``;
    with the guard on, ``M=1`` would cap ``b_1`` at 1.
    """

    lam: float = 1.0
    M: int | None = None
    b1_max: float | None = None
    guard: bool = True

    def __post_init__(self):
        if not 0 <= self.lam <= 1:
            raise DomainError(f"lambda must lie in [0, 1], got {self.lam!r}")
        if self.M is not None and self.M < 1:
            raise DomainError("M must be >= 1")
        if self.b1_max is None:
            object.__setattr__(self, "b1_max", 1.0 + float(self.lam))

    def with_M(self, M: int) -> "FeasibleRegion":
        return FeasibleRegion(lam=self.lam, M=M, b1_max=self.b1_max, guard=self.guard)

    def contains(self, B: np.ndarray) -> np.ndarray:
        """Row mask of points satisfying the linear constraints (not the guard)."""
        B = np.atleast_2d(B)
        w = B[:, 1:] @ np.arange(1, B.shape[1], dtype=float)
        return (
            np.all(B >= 0, axis=1)
            & (B[:, 0] <= self.b1_max + _WEIGHT_SLACK)
            & (w <= self.lam + _WEIGHT_SLACK)
        )


@dataclass(frozen=True)
class Functional:
    """A signed coefficient functional of ``b_1..b_depends_on``."""

    id: str
    depends_on: int
    fn: Callable = field(repr=False, compare=False)

    def __call__(self, cols):
        return self.fn(*cols[: self.depends_on])


def parse_functional(fid: str) -> Functional:
    """Parse ``a2..a5``, ``gamma1..gamma3`` or ``fs:<gamma>``, optionally ``-``-prefixed."""
    fid = fid.strip()
    neg = fid.startswith("-")
    name = fid[1:] if neg else fid
    if name.startswith("fs:"):
        try:
            gamma = float(name[3:])
        except ValueError as exc:
            raise ContractError(f"bad functional id {fid!r}") from exc
        if not 0 <= gamma < 1:
            raise DomainError(f"gamma must lie in [0, 1), got {gamma}")
        dep, base = 2, (lambda b1, b2, g=gamma: (1.0 - g) * b1 * b1 - b2)
    elif name in ("a2", "a3", "a4", "a5"):
        n = int(name[1])
        dep, base = n - 1, A_CLOSED[n]
    elif name in ("gamma1", "gamma2", "gamma3"):
        n = int(name[-1])
        dep, base = n, GAMMA_CLOSED[n]
    else:
        raise ContractError(f"unknown functional {fid!r}")
    fn = (lambda *c, f=base: -f(*c)) if neg else base
    return Functional(id=fid, depends_on=dep, fn=fn)


def _as_functional(f) -> Functional:
    return f if isinstance(f, Functional) else parse_functional(f)


@dataclass
class SearchResult:
    functional_id: str
    best_value: float
    argmax: BSeq
    grid_step: float | None
    samples_evaluated: int
    bound_compared: float | None
    violation_count: int
    lam: float
    guard: bool
    direction: str = "upper"
    final_step: float | None = None
    witness: str | None = None

    @property
    def gap(self) -> float | None:
        if self.bound_compared is None:
            return None
        if self.direction == "upper":
            return self.bound_compared - self.best_value
        return self.best_value - self.bound_compared

    def to_dict(self) -> dict:
        return {
            "functional": self.functional_id,
            "lambda": self.lam,
            "grid_step": self.grid_step,
            "final_step": self.final_step,
            "best_value": self.best_value,
            "argmax": [float(v) for v in self.argmax.b],
            "witness": self.witness,
            "bound": self.bound_compared,
            "direction": self.direction,
            "gap": self.gap,
            "violations": self.violation_count,
            "samples_evaluated": self.samples_evaluated,
            "guard": self.guard,
        }


# -- sampling -------------------------------------------------------------------


@lru_cache(maxsize=16)
def _sample_cached(lam, M, b1_max, guard, count, seed):
    rng = np.random.default_rng(seed)
    weights = np.arange(1, M, dtype=float)
    out = []
    have = 0
    drawn = 0
    while have < count:
        batch = max(2 * (count - have), 64)
        raw = rng.exponential(size=(batch, M - 1))
        t = rng.uniform(0.0, lam, size=batch)
        b1 = rng.uniform(0.0, b1_max, size=batch)
        w = raw @ weights
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(w > 0, t / w, 0.0)
        tail = raw * scale[:, None]
        # rounding can push the weight a hair past lam
        w2 = tail @ weights
        over = w2 > lam
        tail[over] *= (lam / w2[over])[:, None]
        B = np.column_stack([b1, tail])
        drawn += batch
        if guard:
            B = B[analytic_mask(B)]
        out.append(B)
        have += len(B)
    B = np.concatenate(out)[:count]
    if guard:
        log.info("sample_feasible: guard acceptance %.3f over %d draws", have / drawn, drawn)
    B.setflags(write=False)
    return B


def sample_feasible(region: FeasibleRegion, count: int, seed: int = 0, M: int | None = None) -> np.ndarray:
    """Seeded random points of ``region`` as a ``(count, M)`` array of b-vectors.

    ``(b_2..b_M)`` is a uniformly random direction scaled so its weight is
    uniform on ``[0, lam]``; ``b_1`` is uniform on ``[0, b1_max]``.  With the
    guard on, non-analytic draws are rejected.
    """
    if count <= 0:
        raise ContractError("count must be positive")
    M = M or region.M
    if M is None:
        raise ContractError("sample_feasible needs M (region.M or argument)")
    B = _sample_cached(float(region.lam), int(M), float(region.b1_max), bool(region.guard), int(count), int(seed))
    return B.copy()


# -- exhaustive grid ------------------------------------------------------------


def _lattice_count(K: int, M: int) -> int:
    dp = [0] * (K + 1)
    dp[0] = 1
    for w in range(1, M):
        for s in range(w, K + 1):
            dp[s] += dp[s - w]
    return sum(dp)


def _inner_lattice(K: int, M: int) -> np.ndarray:
    """Integer points ``(k_2..k_M) >= 0`` with ``sum (n-1) k_n <= K``, lexicographic."""
    if M == 1:
        return np.zeros((1, 0), dtype=np.int64)
    ks = np.arange(K + 1, dtype=np.int64)[:, None]
    rem = K - ks[:, 0]
    for n in range(3, M + 1):
        w = n - 1
        counts = rem // w + 1
        rep = np.repeat(np.arange(len(ks)), counts)
        starts = np.cumsum(counts) - counts
        k_new = np.arange(counts.sum(), dtype=np.int64) - np.repeat(starts, counts)
        ks = np.column_stack([ks[rep], k_new])
        rem = rem[rep] - w * k_new
    return ks


@dataclass
class _Partial:
    value: float = -math.inf
    point: np.ndarray | None = None
    violations: int = 0
    evaluated: int = 0


def _first_guarded(order, rows_for, guard):
    """Index into ``order`` of the first row passing the guard, or None."""
    if not guard:
        return 0 if len(order) else None
    for start in range(0, len(order), 512):
        ok = analytic_mask(rows_for(order[start : start + 512]))
        if ok.any():
            return start + int(np.argmax(ok))
    return None


def _scan(fn, b1_values, inner_cols, guard, bound):
    part = _Partial()
    P = len(inner_cols[0]) if inner_cols else 1
    inner = np.column_stack(inner_cols) if inner_cols else np.zeros((1, 0))
    for b1 in b1_values:
        vals = np.broadcast_to(np.asarray(fn([b1, *inner_cols]), dtype=float), (P,))
        part.evaluated += P

        def rows_for(idx, b1=b1):
            sel = inner[idx]
            return np.column_stack([np.full(len(sel), b1), sel])

        if bound is not None:
            over = np.flatnonzero(vals > bound + TOL)
            if over.size:
                part.violations += int(analytic_mask(rows_for(over)).sum()) if guard else over.size
        cand = np.flatnonzero(vals > part.value)
        if cand.size == 0:
            continue
        order = cand[np.argsort(-vals[cand], kind="stable")]
        hit = _first_guarded(order, rows_for, guard)
        if hit is not None:
            j = order[hit]
            part.value = float(vals[j])
            part.point = rows_for(np.array([j]))[0]
    return part


def _refine(fn, region, M, point, value, step, rounds, guard):
    evaluated = 0
    offsets = np.array(list(product(range(-2, 3), repeat=M)), dtype=float)
    for _ in range(rounds):
        step /= 2
        pts = point[None, :] + offsets * step
        pts[np.abs(pts) < 1e-15] = 0.0
        pts = pts[region.contains(pts)]
        vals = np.asarray(fn([pts[:, i] for i in range(M)]), dtype=float)
        vals = np.broadcast_to(vals, (len(pts),))
        evaluated += len(pts)
        cand = np.flatnonzero(vals > value)
        if cand.size:
            order = cand[np.argsort(-vals[cand], kind="stable")]
            hit = _first_guarded(order, lambda idx: pts[idx], guard)
            if hit is not None:
                j = order[hit]
                value, point = float(vals[j]), pts[j].copy()
    return point, value, step, evaluated


def maximize(
    functional,
    region: FeasibleRegion | None = None,
    grid_step: float = 0.005,
    *,
    refine_rounds: int = 0,
    bound: float | None | str = "theorem",
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS,
    n_jobs: int = 1,
) -> SearchResult:
    """Exhaustive lattice maximum of a functional over the feasible region.

    The lattice is ``b_n = k_n * grid_step``, scanned with ``b_1`` outermost and
    ``b_M`` innermost; ties keep the first point found.  With the guard on,
    only analytic points can become the incumbent.  ``refine_rounds`` halves
    the step around the incumbent that many times.

    ``bound="theorem"`` compares against :func:`splus.bounds.theorem_bound`
    and counts (guarded) lattice points exceeding it by more than ``TOL``.

    Outer ``b_1`` ranges can be scanned on ``n_jobs`` threads; partitions are
    merged in index order so the result does not depend on scheduling.
    """
    f = _as_functional(functional)
    region = region or FeasibleRegion()
    if not grid_step > 0:
        raise DomainError("grid_step must be positive")
    M = region.M or max(f.depends_on, 2)
    if M < f.depends_on:
        raise ContractError(f"{f.id} depends on b_1..b_{f.depends_on}; region has M={M}")
    region = region.with_M(M)
    if bound == "theorem":
        bound = theorem_bound(f.id, region.lam)

    K = int(math.floor(region.lam / grid_step + 1e-9))
    n_b1 = int(math.floor(region.b1_max / grid_step + 1e-9)) + 1
    total = n_b1 * _lattice_count(K, M)
    if total > max_evaluations:
        ratio = (total / max_evaluations) ** (1.0 / M)
        raise GridTooLargeError(total, max_evaluations, float(f"{grid_step * ratio * 1.05:.2g}"))

    ks = _inner_lattice(K, M)
    inner_cols = [ks[:, i] * grid_step for i in range(ks.shape[1])]
    b1_values = np.arange(n_b1) * grid_step

    n_jobs = max(1, min(n_jobs, n_b1))
    chunks = np.array_split(b1_values, n_jobs)
    if n_jobs == 1:
        parts = [_scan(f, chunks[0], inner_cols, region.guard, bound)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda c: _scan(f, c, inner_cols, region.guard, bound), chunks))

    best = _Partial()
    for p in parts:  # ordered reduction
        if p.point is not None and p.value > best.value:
            best.value, best.point = p.value, p.point
        best.violations += p.violations
        best.evaluated += p.evaluated
    if best.point is None:
        raise ContractError("no feasible lattice point passed the guard")

    final_step = grid_step
    if refine_rounds:
        best.point, best.value, final_step, extra = _refine(
            f, region, M, best.point, best.value, grid_step, refine_rounds, region.guard
        )
        best.evaluated += extra

    return SearchResult(
        functional_id=f.id,
        best_value=best.value,
        argmax=BSeq(best.point.tolist()),
        grid_step=grid_step,
        final_step=final_step,
        samples_evaluated=best.evaluated,
        bound_compared=bound,
        violation_count=best.violations,
        lam=region.lam,
        guard=region.guard,
    )


# -- sampled bound verification ---------------------------------------------------


def _catalog_rows(region: FeasibleRegion, M: int):
    rows, labels = [], []
    lam = region.lam if region.lam > 0 else None
    for cid in CATALOG_IDS:
        if cid in LAMBDA_CATALOG_IDS and lam is None:
            continue
        b = catalog(cid, lam if cid in LAMBDA_CATALOG_IDS else None)
        if b.M > M:
            if any(v != 0 for v in b.b[M:]):
                continue
        rows.append([float(v) for v in b.padded(M)])
        labels.append(cid)
    if not rows:
        return np.zeros((0, M)), []
    R = np.array(rows)
    keep = region.contains(R)
    if region.guard:
        keep &= analytic_mask(R)
    return R[keep], [lab for lab, k in zip(labels, keep) if k]


def verify_bound(
    functional,
    bound: float,
    direction: str = "upper",
    region: FeasibleRegion | None = None,
    samples: int = 100_000,
    seed: int = 0,
    include_catalog: bool = True,
) -> SearchResult:
    """Count sampled and cataloged points where a bound fails by more than ``TOL``.

    ``direction="upper"`` checks ``value <= bound`` and reports the largest
    value found; ``"lower"`` checks ``value >= bound`` and reports the smallest.
    """
    if direction not in ("upper", "lower"):
        raise ContractError("direction must be 'upper' or 'lower'")
    f = _as_functional(functional)
    region = region or FeasibleRegion()
    M = max(region.M or 2, f.depends_on)
    region = region.with_M(M)

    B = sample_feasible(region, samples, seed)
    labels = None
    if include_catalog:
        C, names = _catalog_rows(region, M)
        if len(names):
            B = np.vstack([C, B])
            labels = names
    vals = np.broadcast_to(np.asarray(f([B[:, i] for i in range(M)]), dtype=float), (len(B),))

    if direction == "upper":
        viol = int(np.count_nonzero(vals > bound + TOL))
        j = int(np.argmax(vals))
    else:
        viol = int(np.count_nonzero(vals < bound - TOL))
        j = int(np.argmin(vals))
    n_cat = len(labels) if labels else 0
    witness = labels[j] if j < n_cat else f"sample[{j - n_cat}]"
    return SearchResult(
        functional_id=f.id,
        best_value=float(vals[j]),
        argmax=BSeq(B[j].tolist()),
        grid_step=None,
        samples_evaluated=len(B),
        bound_compared=bound,
        violation_count=viol,
        lam=region.lam,
        guard=region.guard,
        direction=direction,
        witness=witness,
    )
