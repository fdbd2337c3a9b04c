from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from oracles import rational_gcd
from strategies import LENGTHS, metric_graphs
from tatgraph.constructors import make_circle, make_kpq
from tatgraph.ribbon import edge_of, rev
from tatgraph.walks import (
    IndivisibleLength, PointOnGraph, WalkError, as_fraction, boundary_safe_walk, common_unit,
    perm_order, permutation_power, safe_walk, subdivide,
)


def test_as_fraction_rejects_floats():
    assert as_fraction("3/4") == F(3, 4)
    assert as_fraction(2) == 2
    with pytest.raises((WalkError, TypeError, ValueError)):
        as_fraction(0.5)


@pytest.mark.parametrize("lengths,unit", [
    ([F(1, 2), F(1, 3)], F(1, 6)),
    ([F(3, 4), F(1, 2), F(1)], F(1, 4)),
    ([F(1, 12)], F(1, 12)),
    ([F(2), F(3)], F(1)),
])
def test_common_unit(lengths, unit):
    assert common_unit(lengths) == unit == rational_gcd(lengths)


def test_common_unit_includes_walk_length():
    assert common_unit([F(1, 2)], [F(1, 3)]) == F(1, 6)


def test_circle_walk_goes_halfway():
    g, m = make_circle(2)
    tr = safe_walk(g, m, PointOnGraph(1, F(1, 4)), 1, 1)
    assert tr.end.location(g, m) == ("e", 3, F(1, 4)) or tr.end.location(g, m) == ("e", 4, F(1, 4))
    back = safe_walk(g, m, PointOnGraph(2, F(3, 4)), 1, 1)
    assert tr.end.location(g, m) == back.end.location(g, m)


def test_zero_length_and_zero_sign_stay():
    g, m = make_kpq(2, 2)
    p = PointOnGraph(3, F(1, 8))
    assert safe_walk(g, m, p, 1, 0).end == p
    assert safe_walk(g, m, p, 0, 5).end == p


def test_walk_stopping_at_vertex_reports_next_dart():
    g, m = make_kpq(2, 3)
    tr = safe_walk(g, m, PointOnGraph(1, F(0)), 1, F(1, 2))
    assert tr.end == PointOnGraph(g.succ(1), F(0))


def test_kpq_walk_of_pi_lands_on_edge_interior():
    # from the midpoint of any edge two walks of length pi meet again at a midpoint
    g, m = make_kpq(2, 3)
    for e in g.edges:
        a = safe_walk(g, m, PointOnGraph(2 * e - 1, F(1, 4)), 1, 1).end
        b = safe_walk(g, m, PointOnGraph(2 * e, F(1, 4)), 1, 1).end
        assert a.location(g, m) == b.location(g, m)


def test_subdivision_maps_are_inverse():
    g, m = make_kpq(2, 3, F(1, 2))
    sub = subdivide(g, m, F(1, 6))
    assert len(sub.graph.edges) == 6 * 3
    for d, pieces in sub.forward.items():
        assert [sub.back[x] for x in pieces] == [(d, j) for j in range(3)]
        assert sub.forward[rev(d)] == [rev(x) for x in reversed(pieces)]


def test_subdivide_rejects_non_multiple():
    g, m = make_circle(2)
    with pytest.raises(IndivisibleLength):
        subdivide(g, m, F(2, 3))


def test_permutation_power_and_order():
    cycles = [(1, 2, 3), (4, 5)]
    p = permutation_power(cycles, lambda i: 2)
    assert p == {1: 3, 2: 1, 3: 2, 4: 4, 5: 5}
    assert perm_order({1: 2, 2: 3, 3: 1, 4: 5, 5: 4}) == 6


@st.composite
def walks(draw):
    g, m = draw(metric_graphs(max_edges=4))
    e = draw(st.sampled_from(list(g.edges)))
    d = draw(st.sampled_from([2 * e - 1, 2 * e]))
    t = m[e] * F(draw(st.integers(0, 5)), 6)
    a = draw(st.sampled_from(LENGTHS + [F(0), F(5, 2)]))
    b = draw(st.sampled_from(LENGTHS + [F(0), F(7, 3)]))
    sign = draw(st.sampled_from([1, -1]))
    return g, m, PointOnGraph(d, t), a, b, sign


@settings(max_examples=3000, deadline=None)
@given(walks())
def test_walk_additivity(case):
    g, m, p, a, b, sign = case
    whole = safe_walk(g, m, p, sign, a + b).end
    mid = safe_walk(g, m, p, sign, a).end
    two = safe_walk(g, m, mid, sign, b).end
    assert whole.location(g, m) == two.location(g, m)


@settings(max_examples=500, deadline=None)
@given(walks())
def test_backward_walk_undoes_forward(case):
    g, m, p, a, _, _ = case
    fwd = safe_walk(g, m, p, 1, a).end
    back = safe_walk(g, m, fwd, -1, a).end
    assert back.location(g, m) == p.location(g, m)
