import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splus.errors import ContractError, DomainError, GridTooLargeError
from splus.model import analytic_mask
from splus.search import FeasibleRegion, maximize, parse_functional, sample_feasible, verify_bound


def test_sampling_is_seeded():
    r = FeasibleRegion(lam=1.0, M=4)
    a = sample_feasible(r, 3, seed=7)
    assert np.array_equal(a, sample_feasible(r, 3, seed=7))
    assert not np.array_equal(a, sample_feasible(r, 3, seed=8))


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 1), st.integers(1, 6), st.integers(0, 1000))
def test_samples_lie_in_region(lam, M, seed):
    r = FeasibleRegion(lam=lam, M=M)
    B = sample_feasible(r, 200, seed=seed)
    assert B.shape == (200, M)
    assert r.contains(B).all()
    assert analytic_mask(B).all()


def test_sample_count_with_guard():
    assert len(sample_feasible(FeasibleRegion(M=5), 1000, seed=1)) == 1000


def test_lambda_zero_region():
    B = sample_feasible(FeasibleRegion(lam=0.0, M=4), 100, seed=2)
    assert np.all(B[:, 1:] == 0)
    assert B[:, 0].max() <= 1.0


def test_region_domain():
    with pytest.raises(DomainError):
        FeasibleRegion(lam=-0.1)
    with pytest.raises(DomainError):
        FeasibleRegion(lam=1.1)


def test_returned_array_is_a_copy():
    r = FeasibleRegion(M=3)
    a = sample_feasible(r, 10, seed=0)
    a[:] = -1
    assert (sample_feasible(r, 10, seed=0) >= 0).all()


def test_parse_functional():
    f = parse_functional("-a4")
    assert f.depends_on == 3
    assert f([np.array(1.0), np.array(0.0), np.array(0.0)]) == pytest.approx(1.0)
    assert parse_functional("fs:0.3").depends_on == 2
    with pytest.raises(ContractError):
        parse_functional("a9")
    with pytest.raises(DomainError):
        parse_functional("fs:1.0")


def test_grid_refusal_suggests_step():
    with pytest.raises(GridTooLargeError) as exc:
        maximize("a5", FeasibleRegion(M=5), 0.001)
    assert exc.value.suggested_step > 0.001


def test_maximize_small_examples():
    r = maximize("gamma3", FeasibleRegion(M=3), 0.05)
    assert r.best_value == pytest.approx(1 / 3, abs=1e-12)
    assert r.argmax == __import__("splus").BSeq([1.0, 1.0])
    assert maximize("-a3", FeasibleRegion(lam=0.5), 0.05).best_value == pytest.approx(0.5)
    r = maximize("-a2", FeasibleRegion(lam=0.5), 0.05)
    assert r.best_value == pytest.approx(1.5) and r.violation_count == 0


def test_a4_maximum_near_f7():
    r = maximize("a4", FeasibleRegion(M=3), 0.01, refine_rounds=2)
    assert r.best_value == pytest.approx(4 / 3 * math.sqrt(2 / 3), abs=1e-3)
    assert r.argmax.b[0] == pytest.approx(math.sqrt(2 / 3), abs=0.01)
    assert r.violation_count == 0


def test_small_lambda_minus_a5_uses_f8():
    lam = 0.09  # lam/3 lies on the 0.005 lattice
    r = maximize("-a5", FeasibleRegion(lam=lam, M=4), 0.005)
    assert r.best_value == pytest.approx(lam / 3, abs=2e-3)
    assert r.violation_count == 0


@pytest.mark.parametrize("fid", ["gamma3", "a4", "fs:0.5"])
def test_step_halving_never_worse(fid):
    # every coarse lattice point is also a fine lattice point
    coarse = maximize(fid, FeasibleRegion(M=3), 0.05)
    fine = maximize(fid, FeasibleRegion(M=3), 0.025)
    assert fine.best_value >= coarse.best_value - 1e-12


def test_threads_do_not_change_result():
    a = maximize("a4", FeasibleRegion(M=3), 0.02, n_jobs=1)
    b = maximize("a4", FeasibleRegion(M=3), 0.02, n_jobs=4)
    assert (a.best_value, a.argmax, a.samples_evaluated) == (b.best_value, b.argmax, b.samples_evaluated)


def test_guard_off_admits_non_univalent_points():
    r = maximize("fs:0", FeasibleRegion(M=2, guard=False), 0.05)
    assert r.best_value == pytest.approx(4.0)  # b = (2, 0)
    assert r.violation_count > 0


def test_verify_bound_witnesses():
    r = verify_bound("gamma1", -1.0, "lower", FeasibleRegion(M=3), samples=2000, seed=0)
    assert r.violation_count == 0
    assert r.best_value == -1.0 and r.witness == "koebe_plus"
    r = verify_bound("fs:0.3", 1.848749, "upper", FeasibleRegion(M=3), samples=5000, seed=1)
    assert r.violation_count == 0


def test_verify_bound_counts_violations():
    r = verify_bound("a3", 2.0, "upper", samples=2000, seed=0)
    assert r.violation_count > 0 and r.best_value == pytest.approx(3.0)
    with pytest.raises(ContractError):
        verify_bound("a3", 2.0, "sideways")


def test_result_serializes():
    d = maximize("gamma1", FeasibleRegion(M=2), 0.1).to_dict()
    assert set(d) >= {"functional", "best_value", "argmax", "bound", "gap", "violations", "samples_evaluated"}
