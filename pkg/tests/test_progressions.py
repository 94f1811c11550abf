from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apfree import fq
from apfree.errors import CharTooSmall, EmptyHypergraph
from apfree.progressions import (ap_edges, build_hypergraph, count_3aps, count_4aps, count_triangles,
                                 delta_function, full_space_3aps, interval_3aps, parametrizations)
from apfree.sets import GroundSet, Interval

import oracles

FIELD_SPACES = [(3, 2), (3, 3), (5, 2), (7, 2), (9, 2), (25, 1), (27, 1)]


def interval_sets(max_n=60, max_size=25):
    return st.integers(3, max_n).flatmap(
        lambda N: st.sets(st.integers(1, N), max_size=max_size).map(lambda s: GroundSet(Interval(N), sorted(s))))


def field_sets(spaces=FIELD_SPACES, max_size=20):
    return st.sampled_from(spaces).flatmap(
        lambda qn: st.sets(st.integers(0, qn[0] ** qn[1] - 1), max_size=max_size).map(
            lambda s: GroundSet(fq.make_space(*qn), sorted(s))))


@given(A=st.one_of(interval_sets(), field_sets()))
def test_3ap_counts_match_triple_enumeration(A):
    c = count_3aps(A)
    assert c.unordered_nontrivial == oracles.unordered_3aps(A)
    assert c.ordered_nontrivial == parametrizations(A, 3) * c.unordered_nontrivial


@given(A=st.one_of(interval_sets(), field_sets()))
def test_pairs_and_conv_kernels_agree(A):
    assert count_3aps(A, "pairs") == count_3aps(A, "conv")


@given(A=st.one_of(interval_sets(), field_sets(spaces=[(5, 2), (7, 2), (25, 1), (5, 3)])))
def test_4ap_counts_match_enumeration(A):
    c = count_4aps(A)
    assert c.unordered_nontrivial == oracles.unordered_4aps(A)
    assert c.ordered_nontrivial == parametrizations(A, 4) * c.unordered_nontrivial


@given(A=st.one_of(interval_sets(max_size=18), field_sets(max_size=15)))
def test_edges_are_exactly_the_progressions(A):
    E = ap_edges(A, 3)
    assert len(E) == count_3aps(A).unordered_nontrivial
    assert len({tuple(r) for r in E.tolist()}) == len(E)
    G = oracles.group_of(A)
    m = A.members
    for row in E.tolist():
        x, y, z = (int(m[i]) for i in row)
        assert row == sorted(row)
        assert any(G.lin((1, a), (1, c)) == G.lin((2, b),) for a, b, c in ((x, y, z), (y, x, z), (x, z, y)))
    assert E.tolist() == sorted(E.tolist())


def test_small_known_counts():
    assert count_3aps(GroundSet.full(Interval(9))).unordered_nontrivial == 16
    assert count_4aps(GroundSet(Interval(4), [1, 2, 3, 4])).unordered_nontrivial == 1
    assert count_4aps(GroundSet(Interval(16), [1, 2, 4, 8, 16])).unordered_nontrivial == 0
    assert count_3aps(GroundSet.full(fq.make_space(3, 2))).unordered_nontrivial == 12
    F5 = count_4aps(GroundSet.full(fq.make_space(5, 1)))
    assert (F5.ordered_nontrivial, F5.unordered_nontrivial) == (20, 5)


@pytest.mark.parametrize("q,n", [(3, 1), (3, 4), (5, 3), (7, 2), (9, 2), (11, 2), (27, 2), (3, 7)])
def test_full_space_closed_form(q, n):
    A = GroundSet.full(fq.make_space(q, n))
    expected = q**n * (q**n - 1) // (6 if q % 3 == 0 else 2)
    assert full_space_3aps(q, n) == expected
    assert count_3aps(A).unordered_nontrivial == expected


@pytest.mark.parametrize("N", [1, 2, 3, 10, 101, 1000])
def test_interval_closed_form(N):
    A = GroundSet.full(Interval(N))
    assert count_3aps(A).unordered_nontrivial == interval_3aps(N) == sum(max(0, N - 2 * d) for d in range(1, N))


def test_char_gates():
    with pytest.raises(CharTooSmall):
        count_3aps(GroundSet.full(fq.make_space(4, 2)))
    with pytest.raises(CharTooSmall):
        count_4aps(GroundSet.full(fq.make_space(3, 2)))
    with pytest.raises(CharTooSmall):
        full_space_3aps(2, 3)


def test_triangles_encode_3aps():
    sp = fq.make_space(3, 1)
    A = GroundSet.full(sp)
    Z = A.scaled(-2)
    # every (x, y) pair with x + y = 2b, trivial triples included
    assert count_triangles(A, A, Z) == 9
    sp = fq.make_space(5, 2)
    rng = np.random.default_rng(3)
    A = GroundSet(sp, rng.choice(25, 12, replace=False))
    t = count_triangles(A, A, A.scaled(-2))
    assert t == count_3aps(A).ordered_nontrivial + len(A)


def test_hypergraph_f3_squared():
    H = build_hypergraph(GroundSet.full(fq.make_space(3, 2)))
    assert H.edge_count == 12 and H.vertex_count == 9
    assert H.d_avg == Fraction(4) and H.delta2 == 1 and H.delta3 == 1
    assert np.all(H.degree == 4)
    assert delta_function(H, 0.1) == pytest.approx(60.0)


def test_hypergraph_interval_codegree():
    H = build_hypergraph(GroundSet.full(Interval(20)))
    # a pair {a, b} sits in at most three progressions (as first/last, middle, or spanning)
    assert H.delta2 == 3 and H.delta3 == 1
    assert H.edge_count == interval_3aps(20)
    assert int(H.degree.sum()) == 3 * H.edge_count


def test_delta_function_errors():
    H = build_hypergraph(GroundSet(Interval(10), [1, 2, 4, 5]))
    with pytest.raises(EmptyHypergraph):
        delta_function(H, 0.1)
    H = build_hypergraph(GroundSet.full(Interval(5)))
    for tau in (0, 1, -0.5):
        with pytest.raises(ValueError):
            delta_function(H, tau)


@given(A=field_sets(spaces=[(5, 2), (7, 2)]), c=st.integers(1, 4), t=st.integers(0, 48))
def test_counts_invariant_under_affine_maps(A, c, t):
    sp = A.space
    t = t % sp.size
    B = GroundSet(sp, fq.add(sp, fq.scalar_mul(sp, c, A.members), t))
    assert count_3aps(A) == count_3aps(B)
    assert count_4aps(A) == count_4aps(B)
