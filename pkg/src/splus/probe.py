"""Grid evaluation of analytic quantities of ``f = z/q`` on discs ``|z| <= r_max < 1``.

These are numerical corroborations of the coefficient criteria, not proofs:
each report carries the threshold and tolerance it was judged against.
Derivatives of ``q`` are taken on its exact coefficients before evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleProximityError, PreconditionError
from .model import BSeq, splus_weight
from .series import TruncSeries, derivative

__all__ = [
    "DiscGrid",
    "ProbeReport",
    "eval_q",
    "starlike_re",
    "u_residual",
    "g_re_prime",
    "f_over_z_re",
    "convexity_probe",
    "POLE_TOL",
]

POLE_TOL = 1e-14


@dataclass(frozen=True)
class DiscGrid:
    """Points ``r e^{i theta}``; radii cluster geometrically toward ``r_max``."""

    r_max: float = 0.99
    radial_steps: int = 50
    angular_steps: int = 256

    def __post_init__(self):
        if not 0 < self.r_max < 1:
            raise DomainError("r_max must lie in (0, 1)")
        if self.radial_steps < 1 or self.angular_steps < 1:
            raise DomainError("grid needs at least one radius and one angle")

    def radii(self) -> np.ndarray:
        # 1 - r is geometric, ending exactly at 1 - r_max
        hi = 1.0 - self.r_max / self.radial_steps
        return 1.0 - np.geomspace(hi, 1.0 - self.r_max, self.radial_steps)

    def points(self) -> np.ndarray:
        theta = 2 * np.pi * np.arange(self.angular_steps) / self.angular_steps
        return (self.radii()[:, None] * np.exp(1j * theta)[None, :]).ravel()

    def to_dict(self) -> dict:
        return {"r_max": self.r_max, "radial_steps": self.radial_steps, "angular_steps": self.angular_steps}


@dataclass(frozen=True)
class ProbeReport:
    quantity: str
    min_value: float
    max_value: float
    arg_min: complex
    arg_max: complex
    grid: DiscGrid | None
    threshold: float | None = None
    tolerance: float = 0.0
    passed: bool | None = None

    def to_dict(self) -> dict:
        g = self.grid.to_dict() if self.grid else {"r_max": None, "radial_steps": None, "angular_steps": None}
        return {
            "quantity": self.quantity,
            "min": self.min_value,
            "max": self.max_value,
            "argmin": [self.arg_min.real, self.arg_min.imag],
            "argmax": [self.arg_max.real, self.arg_max.imag],
            **g,
            "threshold": self.threshold,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _poly(b: BSeq) -> TruncSeries:
    coeffs = b.q_coeffs()
    return TruncSeries(coeffs, order=len(coeffs) - 1, exact=b.exact)


def _horner(series: TruncSeries, z):
    # np.polyval wants the highest degree first
    return np.polyval([complex(c) for c in reversed(series.coeffs)], z)


def _q_and_derivs(b: BSeq, z, k: int):
    s = _poly(b)
    out = [_horner(s, z)]
    for _ in range(k):
        s = derivative(s)
        out.append(_horner(s, z))
    return out


def _check_poles(q, points) -> None:
    bad = np.abs(q) < POLE_TOL
    if np.any(bad):
        z = np.asarray(points).ravel()[np.flatnonzero(np.ravel(bad))[0]]
        raise PoleProximityError(f"z/f(z) vanishes near z = {z}")


def eval_q(b, z: complex) -> complex:
    """``q(z) = 1 + sum b_n z^n`` at a point of the open disc."""
    b = b if isinstance(b, BSeq) else BSeq(b)
    if not abs(z) < 1:
        raise DomainError("eval_q needs |z| < 1")
    q = complex(_horner(_poly(b), z))
    _check_poles(q, [z])
    return q


def _report(quantity, values, points, grid, threshold=None, tolerance=0.0, above=True) -> ProbeReport:
    i_min = int(np.argmin(values))
    i_max = int(np.argmax(values))
    vmin, vmax = float(values[i_min]), float(values[i_max])
    passed = None
    if threshold is not None:
        passed = vmin > threshold - tolerance if above else vmax < threshold + tolerance
    return ProbeReport(
        quantity=quantity,
        min_value=vmin,
        max_value=vmax,
        arg_min=complex(points[i_min]),
        arg_max=complex(points[i_max]),
        grid=grid,
        threshold=threshold,
        tolerance=tolerance,
        passed=passed,
    )


def starlike_re(b, grid: DiscGrid = DiscGrid(), alpha: float = 0.0, tolerance: float = 0.01) -> ProbeReport:
    """Minimum of ``Re(z f'/f) = Re(1 - z q'/q)``; passes iff ``min > alpha - tolerance``."""
    b = b if isinstance(b, BSeq) else BSeq(b)
    z = grid.points()
    q, dq = _q_and_derivs(b, z, 1)
    _check_poles(q, z)
    values = np.real(1.0 - z * dq / q)
    return _report("starlike_re", values, z, grid, threshold=alpha, tolerance=tolerance)


def u_residual(b, grid: DiscGrid = DiscGrid()) -> ProbeReport:
    """``|(z/f)^2 f' - 1| = |sum_{n>=2} (n-1) b_n z^n|`` over the grid.

    The threshold is ``sum (n-1) b_n r_max^n``, which the supremum never exceeds.
    """
    b = b if isinstance(b, BSeq) else BSeq(b)
    z = grid.points()
    coeffs = [0.0] + [float((n - 1) * v) if n >= 2 else 0.0 for n, v in enumerate(b.b, start=1)]
    values = np.abs(np.polyval(coeffs[::-1], z))
    radial = float(sum(c * grid.r_max**n for n, c in enumerate(coeffs)))
    return _report("u_residual", values, z, grid, threshold=radial, tolerance=1e-12, above=False)


def g_re_prime(b, grid: DiscGrid = DiscGrid()) -> ProbeReport:
    """Minimum of ``Re g'(z)`` with ``g'(z) = 1 + sum_{n>=2} n (b_n/2) z^(n-1)``; passes iff > 0."""
    b = b if isinstance(b, BSeq) else BSeq(b)
    if splus_weight(b) > 1:
        raise PreconditionError("g_re_prime needs an S+ member")
    z = grid.points()
    g = TruncSeries([0, 1, *[v / 2 for v in b.b[1:]]], exact=b.exact)
    values = np.real(_horner(derivative(g), z))
    return _report("g_re_prime", values, z, grid, threshold=0.0)


def f_over_z_re(b, grid: DiscGrid = DiscGrid()) -> ProbeReport:
    """Minimum of ``Re(f(z)/z) = Re(1/q)`` for S+ members with ``b_1 = 0``; passes iff > 1/2."""
    b = b if isinstance(b, BSeq) else BSeq(b)
    if b.coef(1) != 0:
        raise PreconditionError("f_over_z_re needs b_1 = 0")
    if splus_weight(b) > 1:
        raise PreconditionError("f_over_z_re needs an S+ member")
    z = grid.points()
    (q,) = _q_and_derivs(b, z, 0)
    _check_poles(q, z)
    values = np.real(1.0 / q)
    return _report("f_over_z_re", values, z, grid, threshold=0.5)


def convexity_probe(b, r: float) -> float:
    """``Re(1 + z f''/f')`` at ``z = r``.

    With ``P = q - z q'`` we have ``f' = P/q^2`` and
    ``z f''/f' = -z (z q'' q + 2 P q') / (q P)``.
    """
    b = b if isinstance(b, BSeq) else BSeq(b)
    if not 0 < r < 1:
        raise DomainError("r must lie in (0, 1)")
    z = complex(r)
    q, dq, d2q = (complex(v) for v in _q_and_derivs(b, z, 2))
    P = q - z * dq
    if abs(P) < POLE_TOL or abs(q) < POLE_TOL:
        raise PoleProximityError(f"f' vanishes or has a pole at z = {r}")
    return float((1.0 - z * (z * d2q * q + 2.0 * P * dq) / (q * P)).real)
