"""The b-sequence data model for ``q(z) = z/f(z) = 1 + b_1 z + b_2 z^2 + ...``.

Membership tests, conversions to Taylor and logarithmic coefficients, the
Fekete-Szegő functional, the ``g`` transform and the catalog of extremal
functions all take a :class:`BSeq`.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InvariantError, PreconditionError, UnknownCatalogError
from .series import TruncSeries, _infer_exact, log_series, reciprocal, to_scalar

__all__ = [
    "BSeq",
    "TaylorCoeffs",
    "LogCoeffs",
    "Membership",
    "CATALOG_IDS",
    "LAMBDA_CATALOG_IDS",
    "catalog",
    "splus_weight",
    "ulambda_weight_check",
    "starlike_half_sum",
    "taylor_from_b",
    "log_coeffs_from_b",
    "A_CLOSED",
    "GAMMA_CLOSED",
    "taylor_closed_form",
    "log_closed_form",
    "fekete_szego_value",
    "g_transform",
    "membership",
    "analytic_in_disc",
    "analytic_mask",
    "ROOT_TOL",
]

# Slack on root moduli in the analyticity guard.  Double roots on |z| = 1
# (Koebe-type denominators) come back from the eigensolver perturbed by ~1e-8.
ROOT_TOL = 1e-7


class BSeq:
    """Nonnegative coefficients ``(b_1, ..., b_M)`` of ``z/f(z)``.

    Entries are Fractions when every input is an int, Fraction or fraction
    string (``"1/3"``), floats otherwise.  Trailing zeros do not affect
    equality or hashing.

    >>> BSeq([2, 1]) == BSeq([2, 1, 0, 0])
    True
    >>> BSeq.parse("0,1/3").b
    (Fraction(0, 1), Fraction(1, 3))
    """

    __slots__ = ("b", "exact")

    def __init__(self, b: Iterable, exact: bool | None = None):
        values = list(b.b if isinstance(b, BSeq) else b)
        values = [_parse_token(v) if isinstance(v, str) else v for v in values]
        if exact is None:
            exact = _infer_exact(values)
        values = tuple(to_scalar(v, exact) for v in values)
        for n, v in enumerate(values, start=1):
            if not v >= 0:
                raise InvariantError(f"b_{n} = {v!r} is negative")
        self.b = values
        self.exact = exact

    @classmethod
    def parse(cls, text: str) -> "BSeq":
        """Parse ``"b1,b2,..."``; decimals give float mode, fractions/ints exact."""
        tokens = [t.strip() for t in text.split(",") if t.strip()]
        if not tokens:
            raise InvariantError("empty b list")
        try:
            values = [_parse_token(t) for t in tokens]
        except ValueError as exc:
            raise InvariantError(f"malformed b list {text!r}") from exc
        return cls(values)

    @property
    def M(self) -> int:
        return len(self.b)

    def coef(self, n: int):
        """``b_n`` with zero beyond the stored length (``n >= 1``)."""
        if 1 <= n <= len(self.b):
            return self.b[n - 1]
        return Fraction(0) if self.exact else 0.0

    def padded(self, M: int) -> tuple:
        return tuple(self.coef(n) for n in range(1, M + 1))

    def normalized(self) -> tuple:
        b = list(self.b)
        while b and b[-1] == 0:
            b.pop()
        return tuple(b)

    def q_series(self, order: int) -> TruncSeries:
        """``1 + sum b_n z^n`` as a truncated series."""
        return TruncSeries([1, *self.b], order=order, exact=self.exact)

    def q_coeffs(self) -> list:
        one = Fraction(1) if self.exact else 1.0
        return [one, *self.normalized()]

    def as_float(self) -> np.ndarray:
        return np.array([float(v) for v in self.b], dtype=float)

    def to_text(self) -> str:
        return ",".join(str(v) for v in self.b) if self.b else "0"

    def __eq__(self, other) -> bool:
        if not isinstance(other, BSeq):
            return NotImplemented
        return self.normalized() == other.normalized()

    def __hash__(self) -> int:
        return hash(self.normalized())

    def __repr__(self) -> str:
        return f"BSeq({list(self.b)!r})"

    def analytic_in_disc(self) -> bool:
        return analytic_in_disc(self)


def _parse_token(t: str):
    t = t.strip()
    if any(ch in t for ch in ".eE") and "/" not in t:
        return float(t)
    return Fraction(t)


def _as_bseq(b) -> BSeq:
    return b if isinstance(b, BSeq) else BSeq(b)


@dataclass(frozen=True)
class TaylorCoeffs:
    """``a_2, ..., a_N`` of ``f(z) = z + a_2 z^2 + ...``; index with ``[n]``."""

    a: tuple

    @property
    def N(self) -> int:
        return len(self.a) + 1

    def __getitem__(self, n: int):
        if n == 1:
            return 1
        return self.a[n - 2]


@dataclass(frozen=True)
class LogCoeffs:
    """``gamma_1, ..., gamma_N`` with ``log(f(z)/z) = sum 2 gamma_n z^n``."""

    gamma: tuple

    def __getitem__(self, n: int):
        return self.gamma[n - 1]


def splus_weight(b) -> Fraction | float:
    """``sum_{n>=2} (n-1) b_n``; the function lies in S+ iff this is at most 1."""
    b = _as_bseq(b)
    return sum((n - 1) * v for n, v in enumerate(b.b, start=1) if n >= 2) + (
        Fraction(0) if b.exact else 0.0
    )


def ulambda_weight_check(b, lam) -> bool:
    """True iff ``splus_weight(b) <= lam``; ``lam = 1`` is S+ membership."""
    if not 0 < lam <= 1:
        raise DomainError(f"lambda must lie in (0, 1], got {lam!r}")
    return splus_weight(b) <= lam


def starlike_half_sum(b) -> Fraction | float:
    """``sum_{n>=1} (2n-1) b_n``; at most 1 iff f is starlike of order 1/2."""
    b = _as_bseq(b)
    return sum((2 * n - 1) * v for n, v in enumerate(b.b, start=1)) + (
        Fraction(0) if b.exact else 0.0
    )


def taylor_from_b(b, N: int) -> TaylorCoeffs:
    """Taylor coefficients ``a_2..a_N`` of ``f = z / q`` by series inversion."""
    if N < 2:
        raise DomainError("N must be >= 2")
    b = _as_bseq(b)
    r = reciprocal(b.q_series(N - 1))
    return TaylorCoeffs(r.coeffs[1:])


def log_coeffs_from_b(b, N: int) -> LogCoeffs:
    """``gamma_1..gamma_N``: ``2 gamma_n = -[z^n] log q``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    b = _as_bseq(b)
    u = log_series(b.q_series(N))
    return LogCoeffs(tuple(-c / 2 for c in u.coeffs[1:]))


# Closed forms for the Taylor and logarithmic coefficients as polynomials in
# b_1..b_4.  They broadcast over numpy arrays; the grid search relies on that.
A_CLOSED = {
    2: lambda b1, b2=0.0, b3=0.0, b4=0.0: -b1,
    3: lambda b1, b2=0.0, b3=0.0, b4=0.0: -b2 + b1 * b1,
    4: lambda b1, b2=0.0, b3=0.0, b4=0.0: -b3 + 2 * b1 * b2 - b1**3,
    5: lambda b1, b2=0.0, b3=0.0, b4=0.0: -b4 + b2 * b2 + 2 * b1 * b3 - 3 * b1 * b1 * b2 + b1**4,
}
GAMMA_CLOSED = {
    1: lambda b1, b2=0.0, b3=0.0: -b1 / 2,
    2: lambda b1, b2=0.0, b3=0.0: (b1 * b1 / 2 - b2) / 2,
    3: lambda b1, b2=0.0, b3=0.0: (-(b1**3) / 3 + b1 * b2 - b3) / 2,
}


def taylor_closed_form(b1, b2=0.0, b3=0.0, b4=0.0):
    """``(a_2, a_3, a_4, a_5)`` from the coefficient-comparison formulas."""
    return tuple(A_CLOSED[n](b1, b2, b3, b4) for n in (2, 3, 4, 5))


def log_closed_form(b1, b2=0.0, b3=0.0):
    """``(gamma_1, gamma_2, gamma_3)`` from the expansion of ``-log q``."""
    return tuple(GAMMA_CLOSED[n](b1, b2, b3) for n in (1, 2, 3))


def _fs_functional(b: BSeq, gamma):
    t = taylor_from_b(b, 3)
    return t[3] - gamma * t[2] ** 2


def fekete_szego_value(b, gamma):
    """``a_3 - gamma a_2^2`` for ``0 <= gamma < 1``."""
    if not 0 <= gamma < 1:
        raise DomainError(f"gamma must lie in [0, 1), got {gamma!r}")
    return _fs_functional(_as_bseq(b), gamma)


def g_transform(b) -> tuple:
    """Taylor coefficients ``(c_2, c_3, ...)`` of ``g(z) = z + (q(z) - 1 - b_1 z)/2``.

    Requires S+ membership.  The result always has ``sum n c_n <= 1``.
    """
    b = _as_bseq(b)
    if splus_weight(b) > 1:
        raise PreconditionError("g_transform needs an S+ member (weight <= 1)")
    return tuple(v / 2 for v in b.b[1:])


# -- analyticity guard -------------------------------------------------------


def _companion_stack(B: np.ndarray) -> np.ndarray:
    # Companion of the monic reversal w^M + b_1 w^(M-1) + ... + b_M; its roots
    # are 1/z over the zeros z of q, so q has a zero in |z| < 1 iff some
    # eigenvalue has modulus > 1.
    n, M = B.shape
    C = np.zeros((n, M, M))
    C[:, 0, :] = -B
    if M > 1:
        idx = np.arange(1, M)
        C[:, idx, idx - 1] = 1.0
    return C


def analytic_mask(B, tol: float = ROOT_TOL) -> np.ndarray:
    """Row-wise: does ``1 + sum b_n z^n`` stay nonzero on ``|z| < 1``?

    Rows are b-vectors with nonnegative entries.  Cheap sufficient tests
    settle most rows; the rest go through batched companion eigenvalues.
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n, M = B.shape
    out = np.ones(n, dtype=bool)
    if M == 0 or n == 0:
        return out
    # |q(z) - 1| < sum b_n on the open disc
    undecided = B.sum(axis=1) > 1.0
    # q(-1) < 0 forces a real zero in (-1, 0)
    alt = np.where(np.arange(1, M + 1) % 2 == 1, -1.0, 1.0)
    q_minus_one = 1.0 + B @ alt
    neg = undecided & (q_minus_one < 0)
    out[neg] = False
    undecided &= ~neg
    idx = np.flatnonzero(undecided)
    for start in range(0, idx.size, 200_000):
        chunk = idx[start : start + 200_000]
        ev = np.linalg.eigvals(_companion_stack(B[chunk]))
        out[chunk] = np.abs(ev).max(axis=1) <= 1.0 + tol
    return out


def analytic_in_disc(b, tol: float = ROOT_TOL) -> bool:
    """True iff ``q`` has no zero of modulus ``< 1`` (so ``f = z/q`` is analytic in D)."""
    b = _as_bseq(b)
    coeffs = b.normalized()
    if not coeffs:
        return True
    return bool(analytic_mask(np.array([[float(v) for v in coeffs]]), tol)[0])


# -- membership summary --------------------------------------------------------


@dataclass(frozen=True)
class Membership:
    weight: object
    splus: bool
    lam: object
    ulambda: bool
    starlike_half_sum: object
    starlike_half: bool
    analytic: bool


def membership(b, lam=1) -> Membership:
    """Coefficient conditions and the analyticity flag, in one record."""
    b = _as_bseq(b)
    w = splus_weight(b)
    s = starlike_half_sum(b)
    return Membership(
        weight=w,
        splus=w <= 1,
        lam=lam,
        ulambda=ulambda_weight_check(b, lam),
        starlike_half_sum=s,
        starlike_half=s <= 1,
        analytic=analytic_in_disc(b),
    )


# -- catalog of extremal functions ------------------------------------------------

LAMBDA_CATALOG_IDS = ("f_lambda", "f6", "f7", "f7_star", "f8")
CATALOG_IDS = ("f1", "koebe_plus", "f3", "f4") + LAMBDA_CATALOG_IDS


def _lam_scalar(lam):
    if lam is None:
        raise DomainError("this catalog entry needs lambda")
    if isinstance(lam, str):
        lam = _parse_token(lam)
    if not 0 < lam <= 1:
        raise DomainError(f"lambda must lie in (0, 1], got {lam!r}")
    if isinstance(lam, (Fraction, numbers.Integral)):
        return Fraction(lam)
    return float(lam)


def catalog(name: str, lam=None) -> BSeq:
    """Denominator coefficients of the named extremal function.

    ``f7`` and ``f7_star`` involve square roots and are always float.

    >>> catalog("f3")
    BSeq([Fraction(1, 1), Fraction(1, 1)])
    """
    F = Fraction
    if name == "f1":
        return BSeq([0, 1])
    if name == "koebe_plus":
        return BSeq([2, 1])
    if name == "f3":
        return BSeq([1, 1])
    if name == "f4":
        return BSeq([0, 0, F(1, 2)])
    if name not in LAMBDA_CATALOG_IDS:
        raise UnknownCatalogError(f"unknown catalog id {name!r}; choose from {CATALOG_IDS}")
    lam = _lam_scalar(lam)
    if name == "f_lambda":
        return BSeq([1 + lam, lam])
    if name == "f6":
        return BSeq([0, lam])
    if name == "f7":
        return BSeq([math.sqrt(2 * lam / 3), float(lam)])
    if name == "f7_star":
        return BSeq([math.sqrt(3 * lam / 2), float(lam)])
    return BSeq([0, 0, 0, lam / 3])
