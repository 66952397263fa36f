"""Truncated power series with exact (Fraction) or float coefficients.

A :class:`TruncSeries` holds ``c_0, ..., c_N`` and the truncation order ``N``.
Every product, reciprocal and logarithm is exact through degree ``N``; higher
terms are dropped.  Exact and float series never mix.

>>> s = TruncSeries([1, 2, 1, 0, 0])
>>> reciprocal(s).coeffs
(Fraction(1, 1), Fraction(-2, 1), Fraction(3, 1), Fraction(-4, 1), Fraction(5, 1))
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ContractError, MixedModeError, NormalizationError, SingularSeriesError

__all__ = [
    "TruncSeries",
    "mul",
    "reciprocal",
    "log_series",
    "exp_series",
    "derivative",
    "to_scalar",
]


def to_scalar(x, exact: bool):
    """Coerce ``x`` to the scalar type of the requested mode."""
    if exact:
        if isinstance(x, float):
            raise MixedModeError(f"float {x!r} passed to an exact series")
        if isinstance(x, (Fraction, numbers.Integral)):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise MixedModeError(f"cannot use {type(x).__name__} as an exact scalar")
    return float(x)


def _infer_exact(values: Sequence) -> bool:
    return all(isinstance(v, (Fraction, numbers.Integral)) for v in values)


@dataclass(frozen=True)
class TruncSeries:
    """Power series ``sum c_k z^k`` truncated after degree ``order``.

    ``exact`` defaults to True when every coefficient is an int or Fraction.
    Passing ``order`` larger than ``len(coeffs) - 1`` pads with zeros;
    smaller truncates.
    """

    coeffs: tuple
    order: int
    exact: bool

    def __init__(self, coeffs: Iterable, order: int | None = None, exact: bool | None = None):
        values = list(coeffs)
        if not values:
            values = [0]
        if exact is None:
            exact = _infer_exact(values)
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise ContractError("truncation order must be >= 0")
        values = values[: order + 1] + [0] * (order + 1 - len(values))
        object.__setattr__(self, "coeffs", tuple(to_scalar(v, exact) for v in values))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "exact", exact)

    @classmethod
    def unit(cls, order: int, exact: bool = True) -> "TruncSeries":
        return cls([1], order=order, exact=exact)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __len__(self) -> int:
        return self.order + 1

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        return mul(self, other)

    def _check_compatible(self, other: "TruncSeries") -> None:
        if self.order != other.order:
            raise ContractError(f"order mismatch: {self.order} vs {other.order}")
        if self.exact != other.exact:
            raise MixedModeError("exact and float series cannot be combined")

    def almost_equal(self, other: "TruncSeries", tol: float = 1e-12) -> bool:
        self._check_compatible(other)
        return all(abs(x - y) <= tol for x, y in zip(self.coeffs, other.coeffs))


def mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Cauchy product truncated at the common order."""
    a._check_compatible(b)
    n = a.order
    zero = Fraction(0) if a.exact else 0.0
    out = []
    for k in range(n + 1):
        acc = zero
        for i in range(k + 1):
            acc += a.coeffs[i] * b.coeffs[k - i]
        out.append(acc)
    return TruncSeries(out, order=n, exact=a.exact)


def reciprocal(a: TruncSeries) -> TruncSeries:
    """``1/a`` through order N via ``r_n = -(1/c_0) sum_{k=1..n} c_k r_{n-k}``."""
    c = a.coeffs
    if c[0] == 0:
        raise SingularSeriesError("reciprocal of a series with c0 = 0")
    inv0 = 1 / c[0]
    r = [inv0]
    for n in range(1, a.order + 1):
        acc = c[1] * r[n - 1]
        for k in range(2, n + 1):
            acc += c[k] * r[n - k]
        r.append(-inv0 * acc)
    return TruncSeries(r, order=a.order, exact=a.exact)


def log_series(a: TruncSeries) -> TruncSeries:
    """Logarithm of a series with ``c_0 = 1``.

    Uses ``a * u' = a'`` for ``u = log a``, i.e.
    ``n u_n = n c_n - sum_{k=1..n-1} k u_k c_{n-k}``.
    """
    c = a.coeffs
    if c[0] != 1:
        raise NormalizationError(f"log_series needs c0 = 1, got {c[0]!r}")
    zero = Fraction(0) if a.exact else 0.0
    u = [zero]
    for n in range(1, a.order + 1):
        acc = n * c[n]
        for k in range(1, n):
            acc -= k * u[k] * c[n - k]
        u.append(acc / n)
    return TruncSeries(u, order=a.order, exact=a.exact)


def exp_series(u: TruncSeries) -> TruncSeries:
    """Exponential of a series with ``u_0 = 0`` (inverse of :func:`log_series`)."""
    if u.coeffs[0] != 0:
        raise NormalizationError("exp_series needs a vanishing constant term")
    one = Fraction(1) if u.exact else 1.0
    e = [one]
    for n in range(1, u.order + 1):
        acc = 0 * one
        for k in range(1, n + 1):
            acc += k * u.coeffs[k] * e[n - k]
        e.append(acc / n)
    return TruncSeries(e, order=u.order, exact=u.exact)


def derivative(a: TruncSeries) -> TruncSeries:
    """Term-by-term derivative; the order drops by one (a constant gives ``(0)``)."""
    if a.order == 0:
        return TruncSeries([0], order=0, exact=a.exact)
    return TruncSeries(
        [(k + 1) * a.coeffs[k + 1] for k in range(a.order)], order=a.order - 1, exact=a.exact
    )
