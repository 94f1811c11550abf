import pytest

from apfree.constants import HSpec, compute_constants
from apfree.errors import ParameterRangeError, PreconditionFailed
from apfree.progressions import full_space_3aps, interval_3aps
from apfree.supersaturation import monotonicity, verify_fqn_supersaturation, verify_varnavides


def test_full_space_row():
    reps = verify_fqn_supersaturation(3, 5, [0], 2, seed=1)
    for r in reps:
        assert r.measured_count == 6 * full_space_3aps(3, 5)
        assert r.ratio_random == pytest.approx(1.0)
        assert r.passed


def test_field_grid_and_monotonicity():
    reps = verify_fqn_supersaturation(3, 6, [0, 0.02, 0.05], 6, seed=2)
    assert all(r.passed for r in reps)
    assert monotonicity(reps, "s") < -0.9
    assert all(r.flagged == (r.correction_share > 0.01) for r in reps)


def test_field_range_errors():
    cq = compute_constants(3).c_q
    with pytest.raises(ParameterRangeError):
        verify_fqn_supersaturation(3, 4, [cq], 1, 0)
    with pytest.raises(ParameterRangeError):
        verify_fqn_supersaturation(3, 4, [-0.1], 1, 0)
    with pytest.raises(ParameterRangeError):
        verify_fqn_supersaturation(3, 13, [0], 1, 0)


def test_field_threads_do_not_change_results():
    a = verify_fqn_supersaturation(5, 3, [0.01, 0.03], 4, seed=9)
    b = verify_fqn_supersaturation(5, 3, [0.01, 0.03], 4, seed=9, threads=4)
    assert [r.as_dict() for r in a] == [r.as_dict() for r in b]


def test_varnavides_full_interval():
    h = HSpec("logpower", 0.1, 0.5)
    (r,) = verify_varnavides(2000, [1.0], h, 1, seed=0)
    assert r.measured_count == interval_3aps(2000)
    assert r.passed


def test_varnavides_grid():
    reps = verify_varnavides(3000, [0.3, 0.6, 1.0], "logpower:0.1:0.5", 5, seed=4)
    assert all(r.passed for r in reps)
    assert monotonicity(reps, "eta") > 0.9


def test_varnavides_precondition():
    with pytest.raises(PreconditionFailed):
        verify_varnavides(10**4, [0.2], HSpec("logpower", 0.1, 1.0), 1, 0)
