import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apfree import constants as K
from apfree.errors import NotPrimePower, ParameterRangeError, PreconditionFailed, QTooSmall
from apfree.progressions import build_hypergraph, delta_function, interval_3aps
from apfree.sets import GroundSet
from apfree import fq

QS = [3, 4, 5, 7, 8, 9, 11, 13, 25]


def grid_oracle(q, points=1_000_000):
    """Brute-force minimum of g on a uniform grid, with the geometric-series closed form."""
    y = np.linspace(1e-6, 1 - 1e-6, points)
    g = (1 - y**q) / (1 - y) / y ** ((q - 1) / 3)
    i = int(np.argmin(g))
    return y[i], g[i]


@pytest.mark.parametrize("q", QS)
def test_constants_match_grid_oracle(q):
    c = K.compute_constants(q)
    y, g = grid_oracle(q)
    assert c.bracket_validated
    assert c.g_star == pytest.approx(g, rel=1e-9)
    assert abs(c.y_star - y) < 2e-6
    assert c.g_star <= g
    assert c.c_q == pytest.approx(1 - math.log(c.g_star) / math.log(q), rel=1e-14)
    assert c.C_q == pytest.approx(1 + 1 / c.c_q, rel=1e-14)
    assert 0 < c.c_q < 1


def test_c5_value():
    assert abs(K.compute_constants(5).C_q - 15.12589) < 1e-3
    assert abs(K.thm_exponents(5).thm11 - 0.962) < 1e-3


def test_c_q_decreasing():
    cs = [K.compute_constants(q).c_q for q in (3, 5, 7, 9, 11, 13)]
    assert all(a > b for a, b in zip(cs, cs[1:]))


def test_invalid_q():
    with pytest.raises(QTooSmall):
        K.compute_constants(2)
    with pytest.raises(NotPrimePower):
        K.compute_constants(6)


def test_golden_section():
    x, fx, it = K.golden_section(lambda t: (t - 0.3) ** 2, 0.0, 1.0)
    assert abs(x - 0.3) < 1e-6 and fx < 1e-12 and it > 10
    x, _, _ = K.golden_section(math.cos, 2.0, 4.0)
    assert x == pytest.approx(math.pi, abs=1e-6)


def test_g_value_vectorised():
    y = np.array([0.2, 0.5, 0.9])
    assert np.allclose(K.g_value(5, y), [K.g_value(5, v) for v in y])


@pytest.mark.parametrize("q,n", [(3, 1), (3, 10), (5, 7)])
def test_eg_bound(q, n):
    assert K.eg_bound(q, n).value == pytest.approx(K.compute_constants(q).g_star ** n, rel=1e-9)


def test_r3_bounds():
    lo, hi = K.r3_bounds(1e100, 0.01)
    assert lo.log2_value < hi.log2_value < math.log2(1e100)
    with pytest.raises(ParameterRangeError):
        K.r3_bounds(2, 0.1)
    with pytest.raises(ParameterRangeError):
        K.r3_bounds(100, 0)


def test_interval_edge_floor():
    for N in range(3, 400):
        assert N * N / 9 <= interval_3aps(N)
        assert K.interval_edge_floor(N) <= interval_3aps(N)
        if N >= 40:
            assert N * N / 9 <= K.interval_edge_floor(N)


def test_container_params():
    cp = K.container_params(3, 10, 0.01, 0.01, t=0.02)
    C = K.compute_constants(3).C_q
    lq = math.log2(3)
    assert cp.log2_epsilon == pytest.approx(-0.01 * 10 * lq)
    assert cp.log2_tau == pytest.approx(5 * (0.02 - 1 + 0.01 * (C - 1)) * lq)
    assert cp.log2_container_count_exponent == pytest.approx(5 * (1 + 0.01 * (C - 3) + 0.02) * lq)
    assert cp.iterations == math.ceil(0.02 * C / 0.01 + 1)
    with pytest.raises(ParameterRangeError):
        K.container_params(3, 10, 0.5, 0.01)
    with pytest.raises(ParameterRangeError):
        K.container_params(3, 10, 0.01, 0)


def test_container_hypotheses_on_small_hypergraph():
    H = build_hypergraph(GroundSet.full(fq.make_space(3, 2)))
    chk = K.container_hypotheses(H, 0.1, 0.1)
    assert chk.delta_value == pytest.approx(delta_function(H, 0.1))
    assert chk.delta_ceiling == pytest.approx(0.1 / 72)
    assert not chk.tau_ok and not chk.delta_ok
    assert K.C3_CONTAINER == 648000


def test_probability_bound():
    C = K.compute_constants(3).C_q
    t, beta, n = 0.02, 0.01, 1000
    e = K.p_floor_exponent(t, C, beta)
    p = 3.0 ** (n * e)
    rep = K.probability_bound(3, n, t, beta, p)
    m = rep.metadata["m"]
    assert rep.log2_value == pytest.approx(m * (1 + K.LOG2E - 2 * beta * n * math.log2(3)))
    assert rep.log2_value < 0
    assert rep.metadata["admissible_restated"]
    with pytest.raises(ParameterRangeError):
        K.probability_bound(3, n, t, beta, p / 4)
    assert K.p_floor_exponent(t, C) == pytest.approx(-0.5 + t * (C - 1) / 2)


def test_supersat_log2_bound():
    C = K.compute_constants(3).C_q
    direct = (1 / (6 * 3 ** (8 * 0.01))) ** C * 3.0**16
    assert 2 ** K.supersat_log2_bound(3, 8, 0.01) == pytest.approx(direct, rel=1e-12)


@given(a=st.floats(0.1, 3), C=st.floats(0.2, 5), x=st.floats(2, 1e6))
def test_power_inverse(a, C, x):
    h = K.HSpec("power", a, C)
    assert h.inverse(h(x)) == pytest.approx(x, rel=1e-9)


@given(c=st.floats(0.01, 1), C=st.floats(0.2, 5), x=st.floats(3, 1e12))
def test_logpower_inverse(c, C, x):
    h = K.HSpec("logpower", c, C)
    assert h.inverse(h(x)) == pytest.approx(x, rel=1e-6)


def test_hspec_parse():
    assert K.HSpec.parse("logpower:0.1:0.5") == K.HSpec("logpower", 0.1, 0.5)
    assert K.HSpec.parse("power:2") == K.HSpec("power", 2.0, 1.0)
    for bad in ("cubic:1", "power", "power:-1", "power:1:2:3"):
        with pytest.raises(ValueError):
            K.HSpec.parse(bad)


def test_varnavides_count():
    h = K.HSpec("logpower", 0.1, 0.5)
    rep = K.varnavides_count(10**4, 1.0, h)
    M = rep.metadata["M"]
    assert rep.value == pytest.approx(1 / (2 * M**4) * 1e8)
    assert rep.value <= interval_3aps(10**4)
    with pytest.raises(PreconditionFailed):
        K.varnavides_count(10**4, 0.2, K.HSpec("logpower", 0.1, 1.0))
    with pytest.raises(ParameterRangeError):
        K.varnavides_count(100, 0, h)


def test_h_conditions():
    rep = K.check_h_conditions(K.HSpec("logpower", 0.01), 0.01, (10, 1e300))
    assert not rep.all_pass and rep.N0 is not None and 1e10 < rep.N0 < 1e300
    rep = K.check_h_conditions(K.HSpec("power", 1.0), 0.5, (10, 1e300))
    assert rep.N0 is None and not rep.conditions[1].all_pass
    rep = K.check_h_conditions(K.HSpec("power", 1.0, 0.5), 0.1, (10, 1e30))
    assert not rep.conditions[0].all_pass
    with pytest.raises(ParameterRangeError):
        K.check_h_conditions(K.HSpec("power", 1.0), 1.5, (10, 100))


def test_lowenergy_exponents_consistent():
    for q in (3, 5, 7):
        for eps in (0.1, 0.5, 1.0):
            lp = K.lowenergy_params(q, eps)
            r = eps / (4 - 2 * eps)
            assert lp.p_exponent == pytest.approx(-0.5 + r)
            assert lp.size_exponent == pytest.approx(0.5 + r)
            assert lp.energy_exponent == pytest.approx(1 + 4 * r)
            assert lp.delta == pytest.approx(K.thm_exponents(q).lowenergy_delta(eps))
    with pytest.raises(ParameterRangeError):
        K.lowenergy_params(3, 2.0)
