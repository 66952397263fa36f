import json

import numpy as np
import pytest

from splus.errors import DomainError, PoleProximityError, PreconditionError
from splus.model import BSeq, catalog
from splus.probe import (
    DiscGrid,
    convexity_probe,
    eval_q,
    f_over_z_re,
    g_re_prime,
    starlike_re,
    u_residual,
)
from splus.search import FeasibleRegion, sample_feasible

GRID = DiscGrid()


def remark(r):
    z = r
    return (1 - 2 * z**2 + z**4 / 9) / (1 - z**4 / 9)


def test_eval_q():
    assert eval_q(catalog("f1"), 0.5j) == pytest.approx(0.75)
    assert eval_q(BSeq([3, 1, 4]), 0) == 1
    assert eval_q(catalog("koebe_plus"), 0.3) == pytest.approx(1.3**2)
    with pytest.raises(DomainError):
        eval_q(catalog("f1"), 1.0)
    with pytest.raises(PoleProximityError):
        eval_q(BSeq([0, 4.0]), 0.5j)


def test_grid_radii():
    r = GRID.radii()
    assert len(r) == 50 and r[-1] == pytest.approx(0.99) and np.all(np.diff(r) > 0)
    with pytest.raises(DomainError):
        DiscGrid(r_max=1.0)


def test_starlike_examples():
    rep = starlike_re(BSeq([0, "1/3"]), GRID, alpha=0.5)
    assert rep.passed and rep.min_value >= 0.49
    ident = starlike_re(BSeq([0, 0]), GRID)
    assert ident.min_value == pytest.approx(1) and ident.max_value == pytest.approx(1)
    rep = starlike_re(catalog("f1"), GRID, alpha=0.5)
    assert not rep.passed and rep.min_value < 0.5


def test_u_residual_examples():
    lam = 0.5
    rep = u_residual(catalog("f6", lam), GRID)
    assert rep.max_value == pytest.approx(lam * 0.99**2, abs=1e-12)
    assert rep.passed
    assert u_residual(BSeq([0.7]), GRID).max_value == 0
    rep = u_residual(catalog("f_lambda", lam), GRID)
    assert rep.max_value == pytest.approx(0.49005, abs=1e-12)


def test_u_residual_matches_direct_evaluation():
    # (z/f)^2 f' - 1 with f = z/q is -(sum (n-1) b_n z^n)
    rng = np.random.default_rng(0)
    b = BSeq([0.4, 0.3, 0.1, 0.05])
    z = rng.uniform(0, 0.99, 50) * np.exp(2j * np.pi * rng.uniform(size=50))
    q = 1 + sum(v * z**n for n, v in enumerate(b.b, 1))
    dq = sum(n * v * z ** (n - 1) for n, v in enumerate(b.b, 1))
    fp = (q - z * dq) / q**2
    direct = np.abs((q**2) * fp - 1)
    closed = np.abs(sum((n - 1) * v * z**n for n, v in enumerate(b.b, 1)))
    assert np.allclose(direct, closed, atol=1e-12)


def test_g_re_prime_examples():
    rep = g_re_prime(catalog("f1"), GRID)
    assert rep.min_value == pytest.approx(1 - 0.99) and rep.passed
    assert g_re_prime(BSeq([0, 0]), GRID).min_value == pytest.approx(1)
    assert g_re_prime(catalog("koebe_plus"), GRID).min_value == pytest.approx(rep.min_value)
    with pytest.raises(PreconditionError):
        g_re_prime(BSeq([0, 2]), GRID)


def test_f_over_z_examples():
    assert f_over_z_re(catalog("f1"), GRID).passed
    assert f_over_z_re(BSeq([0, 0]), GRID).min_value == pytest.approx(1)
    assert f_over_z_re(catalog("f4"), GRID).passed
    with pytest.raises(PreconditionError):
        f_over_z_re(BSeq([0.5]), GRID)


def test_convexity_matches_rational_formula():
    b = BSeq([0, "1/3"])
    for r in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]:
        assert convexity_probe(b, r) == pytest.approx(remark(r), abs=1e-12)
    assert convexity_probe(b, 0.99) < 0
    assert convexity_probe(b, 0.1) > 0
    assert convexity_probe(BSeq([0]), 0.7) == pytest.approx(1)
    with pytest.raises(DomainError):
        convexity_probe(b, 1.0)


def test_probes_on_samples():
    B = sample_feasible(FeasibleRegion(M=4), 30, seed=4)
    small = DiscGrid(0.99, 20, 64)
    for row in B:
        assert g_re_prime(BSeq(row.tolist()), small).passed
        zero = BSeq([0.0, *row[1:].tolist()])
        assert f_over_z_re(zero, small).passed
        assert starlike_re(zero, small, tolerance=0).passed


def test_report_json():
    d = starlike_re(catalog("f1"), DiscGrid(0.9, 5, 16)).to_dict()
    json.dumps(d)
    assert {"quantity", "min", "max", "argmin", "argmax", "r_max", "radial_steps", "angular_steps", "tolerance"} <= set(d)
