"""Closed-form coefficient bounds for S+ and U+(lambda).

All constants that depend on ``nu0`` (the positive root of
``2(2v+1)e^{-2v} = 1``) are derived from a single cached value, so that
identities such as ``fs_upper(1/2).upper == 2 * gamma2_upper`` hold bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "solve_nu0",
    "nu0",
    "fs_breakpoint",
    "fs_psi",
    "FSBound",
    "fs_upper",
    "Interval",
    "log_coeff_bounds",
    "CoeffIntervals",
    "uplus_coeff_intervals",
    "theorem_bound",
]


def _h(v: float) -> float:
    return 2.0 * (2.0 * v + 1.0) * math.exp(-2.0 * v) - 1.0


def _dh(v: float) -> float:
    # d/dv of 2(2v+1)e^{-2v} = -8 v e^{-2v}
    return -8.0 * v * math.exp(-2.0 * v)


def solve_nu0(tol: float = 1e-12) -> float:
    """Positive root of ``2(2v+1)e^{-2v} = 1``.

    Bisection on ``[0.5, 1.5]`` down to a width of 1e-3, then Newton steps kept
    inside the bracket until the step drops below ``tol``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    lo, hi = 0.5, 1.5  # h(lo) > 0 > h(hi)
    while hi - lo > max(1e-3, tol):
        mid = 0.5 * (lo + hi)
        if _h(mid) > 0:
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    for _ in range(50):
        step = _h(v) / _dh(v)
        new = v - step
        if not lo <= new <= hi:
            new = 0.5 * (lo + hi)
        if _h(new) > 0:
            lo = new
        else:
            hi = new
        v = new
        if abs(step) <= tol:
            break
    return v


@lru_cache(maxsize=None)
def nu0() -> float:
    """Process-wide cached ``nu0`` (computed once, at full precision)."""
    return solve_nu0(1e-15)


def fs_breakpoint() -> float:
    """``nu0 / (1 + nu0)``, where the Fekete-Szegő bound switches branch."""
    v = nu0()
    return v / (1.0 + v)


def fs_psi(nu, gamma):
    """``4 e^{-2 nu} [(1-gamma)(nu+1)^2 - (nu + 1/2)] + 1``; broadcasts over arrays."""
    return 4.0 * np.exp(-2.0 * nu) * ((1.0 - gamma) * (nu + 1.0) ** 2 - (nu + 0.5)) + 1.0


def _exp_branch(gamma: float) -> float:
    return 1.0 + 2.0 * math.exp(-2.0 * gamma / (1.0 - gamma))


def _nu0_branch(gamma: float) -> float:
    v = nu0()
    return 2.0 * (1.0 - gamma) * (v + 1.0) ** 2 / (2.0 * v + 1.0)


def _check_gamma(gamma) -> None:
    if not 0 <= gamma < 1:
        raise DomainError(f"gamma must lie in [0, 1), got {gamma!r}")


@dataclass(frozen=True)
class FSBound:
    gamma: float
    lower: float
    upper: float
    branch: str  # "exp_branch" or "nu0_branch"
    breakpoint: float


def fs_upper(gamma: float) -> FSBound:
    """Bounds on ``a_3 - gamma a_2^2`` over S+ for ``0 <= gamma < 1``."""
    _check_gamma(gamma)
    bp = fs_breakpoint()
    gamma = float(gamma)
    if gamma <= bp:
        upper, branch = _exp_branch(gamma), "exp_branch"
    else:
        upper, branch = _nu0_branch(gamma), "nu0_branch"
    return FSBound(gamma=gamma, lower=-1.0, upper=upper, branch=branch, breakpoint=bp)


@dataclass(frozen=True)
class Interval:
    lower: float | None
    upper: float | None

    def contains(self, x: float, tol: float = 1e-9) -> bool:
        if self.lower is not None and x < self.lower - tol:
            return False
        if self.upper is not None and x > self.upper + tol:
            return False
        return True


def log_coeff_bounds() -> dict[str, Interval]:
    """Intervals for ``gamma_1, gamma_2, gamma_3`` over S+."""
    # gamma_2 = (a_3 - a_2^2 / 2) / 2, so its upper bound is half the gamma = 1/2 case.
    g2_upper = fs_upper(0.5).upper / 2.0
    return {
        "gamma1": Interval(-1.0, 0.0),
        "gamma2": Interval(-0.5, g2_upper),
        "gamma3": Interval(-0.25, 1.0 / 3.0),
    }


@dataclass(frozen=True)
class CoeffIntervals:
    lam: float
    a2: Interval
    a3: Interval
    a4: Interval
    a5: Interval  # upper is None unless lam == 1

    def as_dict(self) -> dict[str, Interval]:
        return {"a2": self.a2, "a3": self.a3, "a4": self.a4, "a5": self.a5}


def _check_lambda(lam) -> None:
    if not 0 < lam <= 1:
        raise DomainError(f"lambda must lie in (0, 1], got {lam!r}")


def uplus_coeff_intervals(lam: float) -> CoeffIntervals:
    """Intervals for ``a_2..a_5`` over U+(lambda)."""
    _check_lambda(lam)
    lam = float(lam)
    a5_lower = -lam / 3.0 if lam <= 4.0 / 27.0 else -9.0 * lam * lam / 4.0
    return CoeffIntervals(
        lam=lam,
        a2=Interval(-(1.0 + lam), 0.0),
        a3=Interval(-lam, 1.0 + lam + lam * lam),
        # lower endpoint uses lam^3, matching the sharp |a_4| bound and f_lambda
        a4=Interval(-(1.0 + lam + lam**2 + lam**3), (4.0 * lam / 3.0) * math.sqrt(2.0 * lam / 3.0)),
        a5=Interval(a5_lower, 5.0 if lam == 1.0 else None),
    )


def theorem_bound(functional: str, lam: float = 1.0) -> float | None:
    """Upper bound on a signed functional id (``"a4"``, ``"-gamma3"``, ``"fs:0.3"``).

    A leading ``-`` asks for ``-lower``.  Returns None when no bound is known
    (``a_5`` from above for ``lam < 1``).
    """
    neg = functional.startswith("-")
    name = functional[1:] if neg else functional
    if name.startswith("fs:"):
        b = fs_upper(float(name[3:]))
        iv = Interval(b.lower, b.upper)
    elif name.startswith("gamma"):
        iv = log_coeff_bounds()[name]
    else:
        iv = uplus_coeff_intervals(lam).as_dict()[name]
    value = -iv.lower if neg else iv.upper
    if value is None:
        return None
    return value
