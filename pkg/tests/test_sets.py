import numpy as np
import pytest
from hypothesis import given, strategies as st

from apfree import fq
from apfree.errors import AmbientMismatch, ParseError
from apfree.sets import GroundSet, Interval, dumps, load, loads, resolve, same_ambient, save


@given(N=st.integers(1, 500), data=st.data())
def test_interval_roundtrip(N, data):
    members = data.draw(st.sets(st.integers(1, N), max_size=60))
    A = GroundSet(Interval(N), sorted(members))
    assert loads(dumps(A)) == A


@given(q=st.sampled_from([3, 4, 5, 9]), n=st.integers(1, 3), data=st.data())
def test_field_roundtrip(q, n, data):
    sp = fq.make_space(q, n)
    members = data.draw(st.sets(st.integers(0, sp.size - 1), max_size=40))
    A = GroundSet(sp, list(members))
    B = loads(dumps(A))
    assert B == A and B.space.q == q and B.space.n == n


def test_exact_text_format(tmp_path):
    A = GroundSet(fq.make_space(3, 2), [4, 0, 8])
    assert dumps(A) == "#ambient field q=3 n=2\n0\n4\n8\n"
    save(A, tmp_path / "a.gs")
    assert load(tmp_path / "a.gs") == A
    assert dumps(GroundSet(Interval(5), [])) == "#ambient interval N=5\n"


@pytest.mark.parametrize("text", [
    "",
    "#ambient interval\n1\n",
    "#ambient interval N=0\n",
    "#ambient interval N=5\n3\n2\n",
    "#ambient interval N=5\n2\n2\n",
    "#ambient interval N=5\n6\n",
    "#ambient interval N=5\n0\n",
    "#ambient interval N=5\n-1\n",
    "#ambient interval N=5\nx\n",
    "#ambient field q=6 n=2\n1\n",
    "#ambient field q=3 n=2\n9\n",
    "#ambient torus d=2\n",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        loads(text)


def test_members_sorted_unique_readonly():
    A = GroundSet(Interval(10), [5, 1, 5, 3])
    assert A.members.tolist() == [1, 3, 5]
    with pytest.raises(ValueError):
        A.members[0] = 2
    with pytest.raises(ValueError):
        GroundSet(Interval(10), [11])


def test_contains_handles_out_of_range():
    A = GroundSet(Interval(10), [1, 3, 10])
    assert A.contains(np.array([-5, 0, 1, 2, 3, 10, 11, 10**12])).tolist() == [
        False, False, True, False, True, True, False, False]


def test_contains_sparse_path_for_huge_universe():
    sp = fq.make_space(2, 40)
    A = GroundSet(sp, [0, 7, 2**39])
    assert A.contains(np.array([0, 1, 7, 2**39, 2**40])).tolist() == [True, False, True, True, False]


def test_resolve_specs():
    assert len(resolve("interval:9")) == 9
    F = resolve("f3^2:full")
    assert len(F) == 9 and F.space.q == 3
    with pytest.raises(FileNotFoundError):
        resolve("/nonexistent/path.gs")


def test_subset_without_scaled():
    sp = fq.make_space(5, 1)
    A = GroundSet(sp, [0, 1, 2])
    assert A.scaled(2).members.tolist() == [0, 2, 4]
    assert A.without([1]).members.tolist() == [0, 2]
    with pytest.raises(AmbientMismatch):
        GroundSet(Interval(3), [1]).space
    with pytest.raises(AmbientMismatch):
        same_ambient(A, GroundSet(fq.make_space(5, 2), [0]))
