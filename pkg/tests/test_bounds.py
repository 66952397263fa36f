import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from splus import bounds as bd
from splus.errors import DomainError

NU0 = 0.8391734950  # positive root, checked against brentq below


def _h(v):
    return 2 * (2 * v + 1) * math.exp(-2 * v) - 1


def test_nu0_against_independent_root_finder():
    ref = brentq(_h, 0.5, 1.5, xtol=1e-15)
    assert bd.solve_nu0(1e-8) == pytest.approx(ref, abs=1e-9)
    assert bd.nu0() == pytest.approx(ref, abs=1e-14)
    assert bd.nu0() == pytest.approx(NU0, abs=1e-9)


def test_nu0_residual_and_breakpoint():
    v = bd.solve_nu0(1e-6)
    assert abs(_h(v)) <= 1e-9
    assert bd.fs_breakpoint() == pytest.approx(0.456278, abs=1e-6)


def test_solve_nu0_rejects_bad_tol():
    with pytest.raises(DomainError):
        bd.solve_nu0(0)


def test_psi_examples():
    assert bd.fs_psi(0.0, 0.0) == pytest.approx(3.0)


@given(st.floats(0, 0.99))
def test_psi_identities(g):
    assert bd.fs_psi(g / (1 - g), g) == pytest.approx(1 + 2 * math.exp(-2 * g / (1 - g)), abs=1e-12)
    v = bd.nu0()
    assert bd.fs_psi(v, g) == pytest.approx(2 * (1 - g) * (v + 1) ** 2 / (2 * v + 1), abs=1e-12)


def test_fs_upper_examples():
    assert bd.fs_upper(0).upper == pytest.approx(3.0)
    assert bd.fs_upper(0).lower == -1
    v = bd.nu0()
    assert bd.fs_upper(0.5).upper == pytest.approx((v + 1) ** 2 / (2 * v + 1), abs=1e-15)
    assert bd.fs_upper(0.5).upper == pytest.approx(2 * 0.631464, abs=2e-5)
    bp = bd.fs_breakpoint()
    assert abs(bd._exp_branch(bp) - bd._nu0_branch(bp)) <= 1e-9
    with pytest.raises(DomainError):
        bd.fs_upper(1.0)
    with pytest.raises(DomainError):
        bd.fs_upper(-0.1)


def test_fs_upper_is_psi_maximum_on_zero_to_nu0():
    v = bd.nu0()
    nu = np.append(np.arange(0, v, 1e-4), v)
    for g in [0.0, 0.2, 0.45, 0.47, 0.7, 0.95]:
        assert bd.fs_upper(g).upper == pytest.approx(float(np.max(bd.fs_psi(nu, g))), abs=1e-6)


@given(st.floats(0, 0.98), st.floats(0.001, 0.01))
def test_fs_upper_decreasing(g, dg):
    assert bd.fs_upper(g + dg).upper < bd.fs_upper(g).upper


def test_log_coeff_bounds():
    lcb = bd.log_coeff_bounds()
    assert (lcb["gamma1"].lower, lcb["gamma1"].upper) == (-1.0, 0.0)
    assert lcb["gamma2"].upper == bd.fs_upper(0.5).upper / 2
    assert lcb["gamma2"].upper == pytest.approx(0.631464, abs=1e-5)
    assert (lcb["gamma3"].lower, lcb["gamma3"].upper) == (-0.25, 1 / 3)


def test_uplus_intervals_lambda_one():
    ci = bd.uplus_coeff_intervals(1)
    assert (ci.a2.lower, ci.a2.upper) == (-2, 0)
    assert (ci.a3.lower, ci.a3.upper) == (-1, 3)
    assert ci.a4.lower == -4
    assert ci.a4.upper == pytest.approx(4 / 3 * math.sqrt(2 / 3), abs=1e-12)
    assert (ci.a5.lower, ci.a5.upper) == (-9 / 4, 5)


def test_a5_lower_continuous_at_crossover():
    lam = 4 / 27
    assert lam / 3 == pytest.approx(9 * lam**2 / 4, abs=1e-15)
    assert bd.uplus_coeff_intervals(lam).a5.lower == pytest.approx(-4 / 81, abs=1e-15)
    assert bd.uplus_coeff_intervals(lam * (1 + 1e-9)).a5.lower == pytest.approx(-4 / 81, abs=1e-9)


def test_small_lambda_limit():
    ci = bd.uplus_coeff_intervals(1e-9)
    assert ci.a2.lower == pytest.approx(-1) and ci.a3.upper == pytest.approx(1)
    assert ci.a5.upper is None


def test_lambda_domain():
    for lam in (0, -0.5, 1.5):
        with pytest.raises(DomainError):
            bd.uplus_coeff_intervals(lam)


def test_theorem_bound_signs():
    assert bd.theorem_bound("a4") == pytest.approx(1.0886621, abs=1e-7)
    assert bd.theorem_bound("-a5") == 9 / 4
    assert bd.theorem_bound("-gamma3") == 0.25
    assert bd.theorem_bound("fs:0") == 3
    assert bd.theorem_bound("a5", 0.5) is None
