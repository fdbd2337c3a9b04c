from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from oracles import euler_genus, sampled_mixed_tat
from strategies import metric_graphs, mixed_catalog, PURE, relative_tat_graphs
from tatgraph.assembly import (
    ChildSpec, MixedSpec, NON_REGULAR_THETAS, Piece, attach_level, example_thm_spec, glue,
    non_regular_example, realize_mixed, tripod_with_circles,
)
from tatgraph.constructors import make_kpq
from tatgraph.mixed import (
    AnnulusTwist, DeltaMap, FilteredGraph, LengthMismatch, MalformedFiltration, MixedError,
    SpecOrbitMismatch, VertexLanding, check_mixed_tat, depth_zero, dual_graph, level_permutation,
    mixed_dart_map, mixed_safe_walk, screw_from_linearization, screw_numbers, stage_order, twist_summary,
)
from tatgraph.periodic import BoundaryOrbit as B, OrbitSpec
from tatgraph.ribbon import edge_of, surface_invariants
from tatgraph.tat import check_tat
from tatgraph.walks import PointOnGraph, safe_walk


@pytest.fixture(scope="module")
def non_regular():
    return non_regular_example()


def test_non_regular_holds(non_regular):
    fg, delta = non_regular
    assert check_mixed_tat(fg, delta).holds
    assert sampled_mixed_tat(fg, delta) is None
    assert set(delta.resolve(fg, 0).values()) == {F(1)}
    assert set(delta.resolve(fg, 1).values()) == {F(1, 6)}
    assert set(fg.metric[e] for e in fg.edges_at(1)) == {F(1, 12)}


def test_non_regular_invariants(non_regular):
    fg, delta = non_regular
    s = twist_summary(fg, delta)
    assert [lp.alphas for lp in s.levels] == [[3]]
    assert [e.value for e in s.screws] == [F(-1)]
    assert (len(s.dual.vertices), len(s.dual.edges), s.dual.is_tree) == (2, 3, False)
    inv = surface_invariants(fg.graph, fg.rel)
    assert (inv.genus, inv.boundaries) == (3, 1)
    assert euler_genus(fg.graph) == (3, 1)
    assert list(s.fdtc0.values()) == [F(1, 3)]


def test_non_regular_needs_the_right_inner_length():
    fg, delta = non_regular_example()
    bad = DeltaMap({0: dict(delta.values[0]), 1: {e: F(1, 5) for e in delta.values[1]}})
    res = check_mixed_tat(fg, bad)
    assert not res.holds and res.clause == "I"
    assert res.verdict_line().startswith("MIXED TAT FAILS clause=I witness=e")


def test_non_regular_offsets_matter():
    # gluing every face with offset zero breaks the staged walks
    bg, bm, brel = tripod_with_circles()
    base = FilteredGraph(bg, bm, brel, [], {n: 0 for n in brel.names()})
    bdelta = DeltaMap({0: {1: F(1)}})
    kg, km = make_kpq(3, 3, F(1, 12))
    cdelta = DeltaMap({0: {1: F(1, 6)}})
    faces = [min(f) for f in kg.faces()]
    assert NON_REGULAR_THETAS != (0, 0, 0)
    pairs = [(n, k, F(0)) for n, k in zip(brel.names(), faces)]
    fg, delta = glue(base, bdelta, FilteredGraph(kg, km), cdelta, pairs, 1)
    assert not check_mixed_tat(fg, delta).holds


@pytest.fixture(scope="module")
def thm():
    return realize_mixed(example_thm_spec())


def test_example_thm(thm):
    fg, delta = thm
    assert check_mixed_tat(fg, delta).holds
    assert sampled_mixed_tat(fg, delta) is None
    assert set(delta.resolve(fg, 0).values()) == {F(1)}
    assert set(delta.resolve(fg, 1).values()) == {F(1, 18)}
    s = twist_summary(fg, delta)
    assert [lp.alphas for lp in s.levels] == [[2]]
    assert [e.value for e in s.screws] == [F(-1)]
    assert (len(s.dual.vertices), len(s.dual.edges), s.dual.is_tree) == (3, 2, True)
    assert list(s.fdtc0.values()) == [F(1, 2)]
    assert euler_genus(fg.graph) == (3, 1)


def test_example_thm_inner_length_from_screw(thm):
    # the inner length is -screw / alpha times the cycle length
    fg, delta = thm
    lp = level_permutation(fg, delta, 1)
    (length,) = set(lp.lengths.values())
    assert -F(-1) / 2 * length == F(1, 18)


def _spec(root, *children):
    return MixedSpec(root, list(children))


TORUS_PIECE = OrbitSpec(1, 1, [B(0, 0, 0)])


def test_depth_two_chain_is_tree():
    root = OrbitSpec(0, 2, [B(F(1, 2), 1, 1)], [1, 1, 1], marked=1)
    mid = OrbitSpec(1, 1, [B(0, 0, 0)], marked=1)
    ms = _spec(root, ChildSpec(mid, F(-1), 2, [ChildSpec(TORUS_PIECE, F(-1), 2)]))
    fg, delta = realize_mixed(ms)
    s = twist_summary(fg, delta)
    assert fg.depth == 2
    assert [e.value for e in s.screws] == [F(-1), F(-1)]
    assert (len(s.dual.vertices), len(s.dual.edges), s.dual.is_tree) == (5, 4, True)
    assert sampled_mixed_tat(fg, delta) is None


def test_two_orbits_have_separate_screws():
    root = OrbitSpec(1, 1, [B(1, 1, 0)], marked=2)
    ms = _spec(root, ChildSpec(TORUS_PIECE, F(-1), 1), ChildSpec(TORUS_PIECE, F(-2), 1))
    fg, delta = realize_mixed(ms)
    s = twist_summary(fg, delta)
    assert sorted(e.value for e in s.screws) == [F(-2), F(-1)]
    assert s.dual.is_tree


def test_orbit_size_mismatch():
    root = OrbitSpec(0, 2, [B(F(1, 2), 1, 1)], [1, 1, 1], marked=1)
    with pytest.raises(SpecOrbitMismatch):
        realize_mixed(_spec(root, ChildSpec(TORUS_PIECE, F(-1), 3)))


def test_fractional_screw_needs_symmetric_piece():
    root = OrbitSpec(0, 3, [B(F(1, 3), 1, 2)], [1, 1], marked=1)
    with pytest.raises(SpecOrbitMismatch):
        realize_mixed(_spec(root, ChildSpec(TORUS_PIECE, F(-1, 3), 3)))


def test_attach_rejects_bad_inputs(thm):
    bg, bm, brel = tripod_with_circles()
    base = FilteredGraph(bg, bm, brel, [], {n: 0 for n in brel.names()})
    bdelta = DeltaMap({0: {1: F(1)}})
    kg, km = make_kpq(2, 3, F(1, 6))
    piece = Piece(FilteredGraph(kg, km), DeltaMap(), 1)
    first = brel.names()[0]
    with pytest.raises(MixedError):
        attach_level(base, bdelta, [(first, piece, F(1), 3)])
    with pytest.raises(LengthMismatch):
        attach_level(base, bdelta, [(first, piece, F(-1), 3)])


def test_malformed_filtrations():
    g, m = make_kpq(2, 3)
    with pytest.raises(MalformedFiltration):
        FilteredGraph(g, m, levels=[set()]).validate()
    with pytest.raises(MalformedFiltration):
        FilteredGraph(g, m, levels=[{1, 2}, {3}]).validate()
    with pytest.raises(MalformedFiltration):
        FilteredGraph(g, m, levels=[{1}]).validate()
    fg = FilteredGraph(g, m)
    with pytest.raises(MalformedFiltration):
        DeltaMap().resolve(fg, 0)
    with pytest.raises(MalformedFiltration):
        DeltaMap({0: {1: F(1), 2: F(2)}}).resolve(fg, 0)


def test_walk_starting_at_vertex_rejected(non_regular):
    fg, delta = non_regular
    with pytest.raises(Exception):
        mixed_safe_walk(fg, delta, PointOnGraph(1, F(0)))


def test_vertex_landing_is_reported():
    fg, delta = non_regular_example()
    inner = sorted(fg.edges_at(1))
    outer = sorted(set(fg.graph.edges) - fg.edges_at(1) - fg.rel.edges)
    # a level-1 start whose first stage lands exactly on a vertex
    for e in inner:
        for d in (2 * e - 1, 2 * e):
            for k in range(1, 12):
                try:
                    mixed_safe_walk(fg, DeltaMap({0: {outer[0]: F(1, 24)}, 1: dict(delta.values[1])}),
                                    PointOnGraph(d, fg.metric[e] * k / 12))
                except VertexLanding as exc:
                    assert exc.stage == 1
                    return
    pytest.fail("no vertex landing found")


def test_stage_order(thm):
    fg, delta = thm
    assert stage_order(fg, delta, 1) > 0


def test_annulus_twist_algebra_examples():
    a, b = AnnulusTwist(1, F(1, 2)), AnnulusTwist(F(-1, 3), 2)
    assert a @ b == AnnulusTwist(F(2, 3), F(5, 2))
    assert a @ a.invert() == AnnulusTwist(0, 0)
    assert screw_from_linearization(1, 1, 1) == -1
    assert screw_from_linearization(2, 3, F(3, 4)) == F(-1, 2)
    with pytest.raises(ZeroDivisionError):
        screw_from_linearization(1, 0, 1)


# property suites

CATALOG = mixed_catalog()


def test_catalog_covers_depths():
    assert {fg.depth for fg, _ in CATALOG} == {0, 1, 2}
    assert len(CATALOG) > 50


@settings(max_examples=600, deadline=None)
@given(st.sampled_from(CATALOG))
def test_order_equals_level_everywhere(case):
    fg, delta = case
    res = check_mixed_tat(fg, delta)
    assert res.holds
    mm = res.mm
    a_edges = fg.rel.edges
    for d in mm.sub.graph.darts:
        if mm.sub.original_edge(d) in a_edges:
            continue
        assert mm.order[d] == mm.level[d]
        assert mm.level[mm.M[d]] == mm.level[d]


@st.composite
def staged_walk_cases(draw):
    fg, delta = draw(st.sampled_from(CATALOG))
    if draw(st.booleans()) and fg.depth:
        i = draw(st.integers(1, fg.depth))
        factor = draw(st.sampled_from([F(1, 2), F(2), F(3, 2)]))
        vals = {k: {e: v * factor if k == i else v for e, v in lv.items()} for k, lv in delta.values.items()}
        delta = DeltaMap(vals)
    e = draw(st.sampled_from(sorted(fg.graph.edges)))
    d = draw(st.sampled_from([2 * e - 1, 2 * e]))
    return fg, delta, d


@settings(max_examples=1000, deadline=None)
@given(staged_walk_cases())
def test_staged_walk_matches_dart_map(case):
    fg, delta, d = case
    mm = mixed_dart_map(fg, delta)
    sub = mm.sub
    for x in sub.forward[d]:
        start = sub.original_point(x, sub.unit / 2)
        try:
            tr = mixed_safe_walk(fg, delta, start)
        except VertexLanding:
            continue
        y = mm.M[x]
        want = sub.original_point(y, sub.unit / 2)
        assert tr.end.location(fg.graph, fg.metric) == want.location(fg.graph, fg.metric)
        assert tr.order == mm.order[x]


@settings(max_examples=150, deadline=None)
@given(staged_walk_cases())
def test_dart_criterion_matches_staged_sampling(case):
    fg, delta, _ = case
    res = check_mixed_tat(fg, delta)
    assert res.holds == (sampled_mixed_tat(fg, delta) is None)


@st.composite
def depth_zero_cases(draw):
    kind = draw(st.integers(0, 2))
    ell = draw(st.sampled_from([F(1), F(1, 2), F(2, 3)]))
    if kind == 0:
        g, m = draw(metric_graphs(max_edges=3, allow_univalent=False))
        return g, m, None, ell
    if kind == 1:
        g, m = draw(st.sampled_from(PURE))
        return g, m, None, ell
    g, m, rel = draw(relative_tat_graphs())
    return g, m, rel, ell


@settings(max_examples=1500, deadline=None)
@given(depth_zero_cases())
def test_depth_zero_collapses_to_pure(case):
    g, m, rel, ell = case
    fg, delta = depth_zero(g, m, rel, ell)
    mixed = check_mixed_tat(fg, delta)
    pure = check_tat(g, m, rel, ell)
    assert mixed.holds == pure.holds
    if pure.holds:
        assert mixed.mm.M == pure.T
    e = min(g.edges)
    p = PointOnGraph(2 * e - 1, m[e] / 3)
    tr = mixed_safe_walk(fg, delta, p)
    assert tr.end == safe_walk(g, m, p, 1, ell).end


twists = st.builds(AnnulusTwist, st.fractions(max_denominator=12), st.fractions(max_denominator=12))


@settings(max_examples=1500, deadline=None)
@given(twists, twists, twists)
def test_annulus_twist_laws(a, b, c):
    ident = AnnulusTwist(0, 0)
    assert (a @ b) @ c == a @ (b @ c)
    assert a @ b == b @ a
    assert a @ ident == a
    assert a @ a.invert() == ident
    assert AnnulusTwist(a.m + b.m, a.c + b.c) == a @ b


@settings(max_examples=1000, deadline=None)
@given(st.integers(-6, 6), st.integers(1, 6), st.fractions(max_denominator=10))
def test_screw_linearization_scales(e, n, theta):
    assert screw_from_linearization(e, n, theta) == -F(e, n) * theta
    assert screw_from_linearization(e, n, 2 * theta) == 2 * screw_from_linearization(e, n, theta)
