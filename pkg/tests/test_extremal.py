import numpy as np
import pytest
from hypothesis import given, strategies as st

from apfree import fq
from apfree.errors import BudgetExhausted, TooLarge
from apfree.extremal import certify_free, fk_exact, fk_heuristic, fk_oracle, min_deletion
from apfree.sets import GroundSet, Interval

import oracles
from test_progressions import field_sets, interval_sets

# r_3(N), N = 1..40, frozen from a plain recursive search over [1..N]
R3 = [1, 2, 2, 3, 4, 4, 4, 4, 5, 5, 6, 6, 7, 8, 8, 8, 8, 8, 8, 9,
      9, 9, 9, 10, 10, 11, 11, 11, 11, 12, 12, 13, 13, 13, 13, 14, 14, 14, 14, 15]


def test_oracle_examples():
    r = fk_oracle(GroundSet.full(Interval(9)), 3)
    assert r.size == 5 and r.optimal and r.mode == "oracle"
    assert oracles.is_free(list(r.witness), 3)
    assert fk_oracle(GroundSet(Interval(20), [1, 2, 4, 5, 10, 11, 13, 14]), 3).size == 8
    assert fk_oracle(GroundSet(Interval(3), [1, 2, 3]), 3).size == 2
    with pytest.raises(TooLarge):
        fk_oracle(GroundSet.full(Interval(26)), 3)


def test_cap_sets():
    F2 = GroundSet.full(fq.make_space(3, 2))
    assert fk_exact(F2, 3).size == fk_oracle(F2, 3).size == 4
    F3 = GroundSet.full(fq.make_space(3, 3))
    a = fk_exact(F3, 3, tie="smallest")
    b = fk_exact(F3, 3, tie="largest")
    assert a.size == b.size == 9 and a.optimal and b.optimal
    assert certify_free(a.witness, 3) and certify_free(b.witness, 3)


def test_r3_table():
    sizes = [fk_exact(GroundSet.full(Interval(N)), 3).size for N in range(1, 41)]
    assert sizes == R3
    assert all(0 <= b - a <= 1 for a, b in zip(sizes, sizes[1:]))


def test_r4_small():
    for N in (8, 12, 16):
        A = GroundSet.full(Interval(N))
        assert fk_exact(A, 4).size == fk_oracle(A, 4).size == oracles.max_free(range(1, N + 1), 4)


@given(A=st.one_of(interval_sets(max_n=40, max_size=14), field_sets(spaces=[(3, 3), (5, 2)], max_size=14)),
       k=st.sampled_from([3, 4]))
def test_exact_equals_oracle(A, k):
    if k == 4 and A.is_field and A.space.p_char < 5:
        k = 3
    e = fk_exact(A, k)
    o = fk_oracle(A, k)
    assert e.size == o.size
    assert e.witness.members.tolist() == sorted(set(e.witness.members.tolist()) & set(A.members.tolist()))
    assert certify_free(e.witness, k) and certify_free(o.witness, k)
    assert oracles.is_free(list(e.witness), k, oracles.group_of(A))


def test_min_deletion():
    assert min_deletion(GroundSet(Interval(10), [1, 2, 4, 5]), 3) == 0
    assert min_deletion(GroundSet(Interval(3), [1, 2, 3]), 3) == 1
    assert min_deletion(GroundSet.full(Interval(9)), 3) == 4
    assert min_deletion(GroundSet.full(Interval(20)), 4) == 8


def test_budget_exhaustion_carries_incumbent():
    F3 = GroundSet.full(fq.make_space(3, 3))
    with pytest.raises(BudgetExhausted) as info:
        fk_exact(F3, 3, budget=50)
    inc = info.value.incumbent
    assert inc is not None and not inc.optimal and certify_free(inc.witness, 3)
    assert inc.size <= 9


def test_heuristic_feasible_and_bounded():
    rng = np.random.default_rng(11)
    for _ in range(20):
        A = GroundSet(Interval(40), rng.choice(np.arange(1, 41), 18, replace=False))
        h = fk_heuristic(A, 3, iters=10, seed=int(rng.integers(1000)))
        assert not h.optimal and certify_free(h.witness, 3)
        assert h.size <= fk_exact(A, 3).size


def test_heuristic_quality_on_interval_30():
    A = GroundSet.full(Interval(30))
    for seed in range(20):
        assert fk_heuristic(A, 3, iters=200, seed=seed).size >= R3[29] - 1


def test_heuristic_deterministic_across_threads():
    A = GroundSet.full(Interval(40))
    a = fk_heuristic(A, 3, iters=16, seed=3)
    b = fk_heuristic(A, 3, iters=16, seed=3)
    c = fk_heuristic(A, 3, iters=16, seed=3, threads=4)
    assert a.witness == b.witness == c.witness


def test_subset_monotonicity():
    rng = np.random.default_rng(7)
    for _ in range(100):
        big = rng.choice(np.arange(1, 41), size=int(rng.integers(8, 20)), replace=False)
        small = rng.choice(big, size=int(rng.integers(1, len(big))), replace=False)
        A, B = GroundSet(Interval(40), big), GroundSet(Interval(40), small)
        assert fk_exact(B, 3).size <= fk_exact(A, 3).size


@given(A=interval_sets(max_n=40, max_size=18), data=st.data())
def test_deleting_one_element_changes_f3_by_at_most_one(A, data):
    if not len(A):
        return
    x = data.draw(st.sampled_from(A.members.tolist()))
    full = fk_exact(A, 3).size
    less = fk_exact(A.without([x]), 3).size
    assert full - 1 <= less <= full
