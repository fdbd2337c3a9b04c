"""Filtered metric ribbon graphs and their staged (mixed) walks.

A filtration is a list of nested edge sets; level 0 is the whole graph.
Each level carries a walk length per connected component.  On the common
unit subdivision the whole staged walk is a composition of per-level face
rotations, so checking the mixed property is again dart arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ribbon import (
    RelativeStructure, RibbonGraph, RibbonError, edge_of, induced_subgraph_ribbon, rev, validate,
)
from .tat import PropertyDoesNotHold, _witness, a_face_keys, check_tat, face_key
from .walks import (
    PointOnGraph, WalkError, WalkTrace, as_fraction, common_unit, face_length, perm_order,
    permutation_power, safe_walk, subdivide,
)


class MixedError(ValueError):
    pass


class MalformedFiltration(MixedError):
    pass


class VertexLanding(MixedError):
    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class LengthMismatch(MixedError):
    pass


class SpecOrbitMismatch(MixedError):
    pass


class MixedPostCheckFailed(MixedError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class FilteredGraph:
    graph: RibbonGraph
    metric: dict
    rel: RelativeStructure = field(default_factory=RelativeStructure.empty)
    levels: list = field(default_factory=list)        # levels[i-1] = edge set of level i
    rel_level: dict = field(default_factory=dict)     # relative component name -> deepest level

    @property
    def depth(self) -> int:
        return len(self.levels)

    def edges_at(self, i: int) -> frozenset:
        return frozenset(self.graph.edges) if i == 0 else frozenset(self.levels[i - 1])

    def level_of(self, e: int) -> int:
        lv = 0
        for i, s in enumerate(self.levels, 1):
            if e in s:
                lv = i
        return lv

    def level_graph(self, i: int) -> RibbonGraph:
        return self.graph if i == 0 else induced_subgraph_ribbon(self.graph, self.edges_at(i))

    def components(self, i: int) -> list:
        return self.level_graph(i).components()

    def rel_at(self, i: int) -> RelativeStructure:
        return RelativeStructure(tuple(
            c for c in self.rel.components if self.rel_level.get(c[0], 0) >= i))

    def validate(self):
        rep = validate(self.graph, self.rel)
        rep.raise_if_failed()
        prev = self.edges_at(0)
        for i in range(1, self.depth + 1):
            cur = self.edges_at(i)
            if not cur:
                raise MalformedFiltration(f"level {i} is empty")
            if not cur <= prev:
                raise MalformedFiltration(f"level {i} is not contained in level {i - 1}")
            sub = self.level_graph(i)
            for vi, cyc in enumerate(sub.vertices):
                if len(cyc) == 1:
                    raise MalformedFiltration(f"level {i} has a univalent vertex {sub.names[vi]}")
            prev = cur
        for name, cyc in self.rel.components:
            lv = self.rel_level.get(name, 0)
            if not {edge_of(d) for d in cyc} <= self.edges_at(lv):
                raise MalformedFiltration(f"relative circle {name} is not inside level {lv}")


@dataclass
class DeltaMap:
    """Walk lengths per level; each value is attached to the component
    containing its key edge."""

    values: dict = field(default_factory=dict)   # level -> {edge: length}

    def set(self, level: int, edge: int, value):
        self.values.setdefault(level, {})[edge] = as_fraction(value)

    def resolve(self, fg: FilteredGraph, i: int) -> dict:
        """Map edge -> length for every edge of level i."""
        out = {}
        given = self.values.get(i, {})
        for comp in fg.components(i):
            vals = {given[e] for e in comp if e in given}
            if len(vals) > 1:
                raise MalformedFiltration(f"two lengths given for one component of level {i}")
            v = vals.pop() if vals else None
            if v is None:
                if i == 0:
                    raise MalformedFiltration("every component of level 0 needs a positive length")
                v = Fraction(0)
            if v < 0 or (i == 0 and v == 0):
                raise MalformedFiltration(f"invalid walk length {v} at level {i}")
            for e in comp:
                out[e] = v
        for e in given:
            if e not in out:
                raise MalformedFiltration(f"edge e{e} named for level {i} is not in that level")
        return out

    def all_values(self):
        return [v for lv in self.values.values() for v in lv.values()]


@dataclass
class MixedMap:
    sub: object
    M: dict            # refined dart -> refined dart
    order: dict        # refined dart -> number of stages after the first
    level: dict        # refined dart -> level of its edge
    stage_maps: list   # per level, the rotation map on that level's refined darts


def mixed_dart_map(fg: FilteredGraph, delta: DeltaMap) -> MixedMap:
    vals = [v for v in delta.all_values() if v > 0]
    unit = common_unit((fg.metric[e] for e in fg.graph.edges), vals)
    sub = subdivide(fg.graph, fg.metric, unit, fg.rel)
    rg = sub.graph
    orig_level = {e: fg.level_of(e) for e in fg.graph.edges}
    level = {d: orig_level[sub.original_edge(d)] for d in rg.darts}
    stage_maps = []
    for i in range(fg.depth + 1):
        lengths = delta.resolve(fg, i)
        keep = {edge_of(d) for d in rg.darts if level[d] >= i}
        lg = rg if i == 0 else induced_subgraph_ribbon(rg, keep)
        steps = lambda f: int(lengths[sub.original_edge(f[0])] / unit)
        stage_maps.append(permutation_power(lg.faces(), steps))
    M, order = {}, {}
    for d in rg.darts:
        c = level[d]
        x = stage_maps[0][d]
        o = 0
        for i in range(1, c + 1):
            if level[x] < i:
                break
            x = stage_maps[i][x]
            o = i
        M[d] = x
        order[d] = o
    return MixedMap(sub, M, order, level, stage_maps)


@dataclass
class MixedResult:
    holds: bool
    witness: tuple | None = None
    clause: str = ""
    mm: MixedMap | None = None

    def __bool__(self):
        return self.holds

    def verdict_line(self) -> str:
        if self.holds:
            return "MIXED TAT HOLDS"
        e, off = self.witness
        return f"MIXED TAT FAILS clause={self.clause} witness=e{e}:{off}"


def check_mixed_tat(fg: FilteredGraph, delta: DeltaMap) -> MixedResult:
    """Clauses: I endpoints agree, II the walk ends on its own level after
    all its stages, III relative points end on the relative part of their level."""
    mm = mixed_dart_map(fg, delta)
    sub, M, lv = mm.sub, mm.M, mm.level
    rel = sub.rel
    orient = set(rel.orientation_darts)
    a_edges = {edge_of(d) for d in orient}
    wit = lambda d: _witness(sub, fg.metric, d)
    for d in sub.graph.darts:
        if d % 2 == 0 or edge_of(d) in a_edges:
            continue
        for x in (d, rev(d)):
            if mm.order[x] != lv[x] or lv[M[x]] != lv[x]:
                return MixedResult(False, wit(d), "II", mm)
        if M[rev(d)] != rev(M[d]):
            return MixedResult(False, wit(d), "I", mm)
    # relative circles, with their own level
    circle_level = {}
    for (name, cyc) in rel.components:
        for x in cyc:
            circle_level[edge_of(x)] = fg.rel_level.get(name, 0)
    for d in sorted(orient):
        c = lv[d]
        y = M[d]
        if mm.order[d] != c or edge_of(y) not in a_edges or circle_level[edge_of(y)] < c:
            return MixedResult(False, wit(d), "III", mm)
    return MixedResult(True, None, "", mm)


@dataclass
class MixedWalkTrace:
    stages: list          # WalkTrace per stage
    levels: list
    order: int
    total: Fraction
    end: PointOnGraph
    start_level: int


def mixed_safe_walk(fg: FilteredGraph, delta: DeltaMap, start: PointOnGraph) -> MixedWalkTrace:
    """Staged walk leaving along ``start.dart``; the start must be inside an edge."""
    t = as_fraction(start.offset)
    L = fg.metric[edge_of(start.dart)]
    if not 0 < t < L:
        raise WalkError("mixed walks start inside an edge")
    c = fg.level_of(edge_of(start.dart))
    stages, levels = [], []
    p = PointOnGraph(start.dart, t)
    total = Fraction(0)
    for i in range(0, c + 1):
        e = edge_of(p.dart)
        if i > 0:
            if fg.metric[e] == p.offset or p.offset == 0:
                raise VertexLanding(f"stage {i} would start at a vertex", i)
            if fg.level_of(e) < i:
                break
        length = delta.resolve(fg, i)[e]
        tr = safe_walk(fg.level_graph(i), fg.metric, p, 1, length)
        stages.append(tr)
        levels.append(i)
        total += length
        p = tr.end
    return MixedWalkTrace(stages, levels, len(stages) - 1, total, p, c)


def boundary_mixed_safe_walk(fg: FilteredGraph, delta: DeltaMap, start: PointOnGraph) -> MixedWalkTrace:
    orient = fg.rel.orientation_darts
    if edge_of(start.dart) not in fg.rel.edges:
        raise WalkError(f"dart {start.dart} is not on a relative circle")
    if start.dart not in orient:
        start = start.flipped(fg.metric)
    return mixed_safe_walk(fg, delta, start)


def depth_zero(graph, metric, rel=None, ell=1):
    fg = FilteredGraph(graph, metric, rel or RelativeStructure.empty())
    d = DeltaMap()
    for comp in graph.components():
        d.set(0, comp[0], ell)
    return fg, d


# ---------------------------------------------------------------------------
# level data: permutations, screws, dual graph

def _require(fg, delta) -> MixedMap:
    res = check_mixed_tat(fg, delta)
    if not res.holds:
        raise PropertyDoesNotHold("mixed tete-a-tete property fails", res)
    return res.mm


def _level_faces(fg: FilteredGraph, i: int):
    """Non-relative faces of the level-i graph as (key, darts)."""
    g = fg.level_graph(i)
    rel = fg.rel_at(i)
    skip = a_face_keys(g, rel)
    return [(face_key(f), f) for f in g.faces() if face_key(f) not in skip]


@dataclass
class LevelPermutation:
    level: int
    cycles: list          # face keys of the level graph
    lengths: dict         # face key -> length
    perm: dict            # face key -> face key
    orbits: list          # lists of face keys

    @property
    def alphas(self) -> list[int]:
        return [len(o) for o in self.orbits]


def level_permutation(fg: FilteredGraph, delta: DeltaMap, i: int, mm: MixedMap | None = None) -> LevelPermutation:
    if not 1 <= i <= fg.depth:
        raise MixedError(f"level {i} is outside the filtration")
    mm = mm or _require(fg, delta)
    sub = mm.sub
    faces = _level_faces(fg, i)
    of_dart = {d: k for k, f in faces for d in f}
    perm = {}
    for k, f in faces:
        targets = set()
        for d in f:
            x = sub.forward[d][0]
            for s in range(i):
                if mm.level[x] < s:
                    break
                x = mm.stage_maps[s][x]
            targets.add(of_dart.get(sub.back[x][0]))
        if len(targets) != 1 or None in targets:
            raise PropertyDoesNotHold(f"level {i} cycle F{k} is not mapped onto a single cycle")
        perm[k] = targets.pop()
    seen, orbits = set(), []
    for k, _ in faces:
        if k in seen:
            continue
        orb, x = [], k
        while x not in seen:
            seen.add(x)
            orb.append(x)
            x = perm[x]
        orbits.append(orb)
    lengths = {k: face_length(f, fg.metric) for k, f in faces}
    return LevelPermutation(i, [k for k, _ in faces], lengths, perm, orbits)


@dataclass
class ScrewEntry:
    level: int
    orbit: int
    cycles: list
    value: Fraction


def screw_numbers(fg: FilteredGraph, delta: DeltaMap, mm: MixedMap | None = None) -> list[ScrewEntry]:
    mm = mm or _require(fg, delta)
    out = []
    for i in range(1, fg.depth + 1):
        lp = level_permutation(fg, delta, i, mm)
        dl = delta.resolve(fg, i)
        faces = dict(_level_faces(fg, i))
        for j, orb in enumerate(lp.orbits, 1):
            total = sum(dl[edge_of(faces[k][0])] for k in orb)
            lengths = {lp.lengths[k] for k in orb}
            if len(lengths) != 1:
                raise PropertyDoesNotHold(f"level {i} orbit {j} mixes cycles of different lengths")
            out.append(ScrewEntry(i, j, orb, -total / lengths.pop()))
    return out


@dataclass
class DualGraph:
    vertices: list        # (level, component index)
    edges: list           # ((level+1, comp), (level, comp), face key)

    @property
    def is_tree(self) -> bool:
        n = len(self.vertices)
        if len(self.edges) != n - 1:
            return False
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x
        for a, b, _ in self.edges:
            parent[find(a)] = find(b)
        return len({find(v) for v in self.vertices}) == 1


def dual_graph(fg: FilteredGraph, delta: DeltaMap, mm: MixedMap | None = None) -> DualGraph:
    _ = mm or _require(fg, delta)
    comps = [fg.components(i) for i in range(fg.depth + 1)]
    where = [{e: j for j, c in enumerate(cs) for e in c} for cs in comps]
    verts = [(i, j) for i, cs in enumerate(comps) for j in range(len(cs))]
    edges = []
    for i in range(1, fg.depth + 1):
        for k, f in _level_faces(fg, i):
            e = edge_of(f[0])
            edges.append(((i, where[i][e]), (i - 1, where[i - 1][e]), k))
    return DualGraph(verts, edges)


def level0_fdtc(fg: FilteredGraph, delta: DeltaMap) -> dict:
    d0 = delta.resolve(fg, 0)
    out = {}
    for k, f in _level_faces(fg, 0):
        out[k] = d0[edge_of(f[0])] / face_length(f, fg.metric)
    return out


@dataclass
class TwistSummary:
    levels: list
    screws: list
    dual: DualGraph
    fdtc0: dict


def twist_summary(fg: FilteredGraph, delta: DeltaMap) -> TwistSummary:
    mm = _require(fg, delta)
    levels = [level_permutation(fg, delta, i, mm) for i in range(1, fg.depth + 1)]
    return TwistSummary(levels, screw_numbers(fg, delta, mm), dual_graph(fg, delta, mm),
                        level0_fdtc(fg, delta))


def stage_order(fg: FilteredGraph, delta: DeltaMap, i: int) -> int:
    """Order of (truncated walk map) o (level-i rotation) on level-i darts."""
    mm = mixed_dart_map(fg, delta)
    darts = [d for d in mm.sub.graph.darts if mm.level[d] >= i]
    comp = {}
    for d in darts:
        x = d
        for s in range(i + 1):
            x = mm.stage_maps[s][x]
        comp[d] = x
    if set(comp.values()) != set(darts):
        raise PropertyDoesNotHold(f"staged map does not preserve level {i}")
    return perm_order(comp)


# ---------------------------------------------------------------------------
# annulus twists

@dataclass(frozen=True)
class AnnulusTwist:
    """The annulus map (x, t) -> (x + m t + c, t)."""

    m: Fraction
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "m", as_fraction(self.m))
        object.__setattr__(self, "c", as_fraction(self.c))

    def compose(self, other: "AnnulusTwist") -> "AnnulusTwist":
        return AnnulusTwist(self.m + other.m, self.c + other.c)

    def invert(self) -> "AnnulusTwist":
        return AnnulusTwist(-self.m, -self.c)

    def __matmul__(self, other):
        return self.compose(other)


def screw_from_linearization(e, n, theta) -> Fraction:
    if n == 0:
        raise ZeroDivisionError("n must be nonzero")
    return -Fraction(e, n) * as_fraction(theta)
