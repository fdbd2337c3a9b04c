"""Building filtered graphs by gluing level pieces onto relative circles."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .constructors import blow_up_vertices, make_kpq, min_incident_length
from .mixed import (
    DeltaMap, FilteredGraph, LengthMismatch, MixedError, MixedPostCheckFailed, SpecOrbitMismatch,
    check_mixed_tat, mixed_dart_map,
)
from .periodic import OrbitSpec, realize_periodic, relative_from_capped
from .ribbon import RelativeStructure, RibbonGraph, edge_of, rev
from .surgery import split_edge_at
from .tat import a_face_keys, check_tat, face_key
from .walks import as_fraction, face_length, scale_metric


def _dart_pieces(d, pieces):
    """Darts covering the old dart d after its edge was cut into ``pieces``."""
    if d % 2:
        return [2 * p - 1 for p in pieces]
    return [2 * p for p in reversed(pieces)]


def _circle_positions(rel_cycle, metric):
    pos, acc = [], Fraction(0)
    for a in rel_cycle:
        pos.append(acc)
        acc += metric[edge_of(a)]
    return pos, acc


def _locate(face, metric, q):
    """(index in face, offset along that dart) of arc position q."""
    acc = Fraction(0)
    for i, d in enumerate(face):
        ln = metric[edge_of(d)]
        if q < acc + ln:
            return i, q - acc
        acc += ln
    raise LengthMismatch(f"position {q} is beyond the face")


def _find_face(graph, key):
    for f in graph.faces():
        if face_key(f) == key:
            return f
    raise MixedError(f"no face F{key} in the piece being attached")


def glue(base: FilteredGraph, bdelta: DeltaMap, child: FilteredGraph, cdelta: DeltaMap,
         pairs, at_level: int):
    """Identify relative circles of ``base`` with faces of ``child``.

    ``pairs`` holds (circle name, child face key, theta): the start of the
    circle goes to arc position theta of the face, and the circle orientation
    follows the face.  Base darts at each circle vertex are inserted into
    the matching face corner, then the circle edges are dropped.  The child
    becomes level ``at_level`` (its own levels sit below it).
    """
    cg, cm = child.graph, dict(child.metric)
    # cut child edges at the images of circle vertices
    cuts: dict[int, set] = {}
    plan = []
    for name, key, theta in pairs:
        cyc = base.rel.component(name)
        pos, total = _circle_positions(cyc, base.metric)
        face = _find_face(cg, key)
        flen = face_length(face, cm)
        if flen != total:
            raise LengthMismatch(f"circle {name} has length {total}, face F{key} has length {flen}")
        theta = as_fraction(theta) % flen
        targets = [(theta + p) % flen for p in pos]
        for q in targets:
            i, s = _locate(face, cm, q)
            if s:
                d = face[i]
                e = edge_of(d)
                cuts.setdefault(e, set()).add(s if d % 2 else cm[e] - s)
        plan.append((name, cyc, face, targets))
    pieces = {}
    for e in sorted(cuts):
        cg, cm, ps, _ = split_edge_at(cg, cm, e, sorted(cuts[e]))
        pieces[e] = ps
    carry = lambda d: _dart_pieces(d, pieces.get(edge_of(d), [edge_of(d)]))
    # relabel child edges after the base ones
    off = max(base.graph.edges)
    shift = lambda x: x + 2 * off
    corner_insert: dict[int, list] = {}     # child dart (arriving) -> base darts to insert after rev
    dropped_vertices, dropped_edges = set(), set()
    for name, cyc, face, targets in plan:
        start = carry(face[0])[0]
        newface = cg.faces()[cg.face_index()[start]]
        k = newface.index(start)
        newface = newface[k:] + newface[:k]
        arrive_at = {}
        acc = Fraction(0)
        for i, d in enumerate(newface):
            arrive_at[acc] = newface[i - 1]
            acc += cm[edge_of(d)]
        for j, a in enumerate(cyc):
            v = base.graph.tail(a)
            rot = list(base.graph.vertices[v])
            r = rot.index(a)
            rot = rot[r:] + rot[:r]
            prev = cyc[j - 1]
            if rot[1] != rev(prev):
                raise MixedError(f"circle {name} is not compatible at {base.graph.names[v]}")
            corner_insert[arrive_at[targets[j]]] = rot[2:]
            dropped_vertices.add(v)
            dropped_edges.add(edge_of(a))
    cycles, names = [], []
    for vi, cyc in enumerate(base.graph.vertices):
        if vi not in dropped_vertices:
            cycles.append(list(cyc))
            names.append(base.graph.names[vi])
    for vi, cyc in enumerate(cg.vertices):
        out = []
        for x in cyc:
            out.append(shift(x))
            if rev(x) in corner_insert:
                out.extend(corner_insert[rev(x)])
        cycles.append(out)
        names.append(f"c{off}.{cg.names[vi]}")
    metric = {e: v for e, v in base.metric.items() if e not in dropped_edges}
    for e, v in cm.items():
        metric[e + off] = v
    # child filtration data follows the cut pieces
    def child_edges_at(i):
        if i == 0:
            return set(cg.edges)
        out = set()
        for e in child.edges_at(i):
            out.update(pieces.get(e, [e]))
        return out
    depth = max(base.depth, at_level + child.depth)
    levels = []
    for i in range(1, depth + 1):
        s = set(base.edges_at(i)) - dropped_edges if i <= base.depth else set()
        ci = 0 if i <= at_level else i - at_level
        if ci <= child.depth:
            s |= {e + off for e in child_edges_at(ci)}
        levels.append(s)
    glued = {name for name, _, _ in pairs}
    comps = [c for c in base.rel.components if c[0] not in glued]
    rel_level = {c[0]: base.rel_level.get(c[0], 0) for c in comps}
    taken = {c[0] for c in comps}
    k = 1
    for name, cyc in child.rel.components:
        while f"A{k}" in taken:
            k += 1
        new = f"A{k}"
        taken.add(new)
        comps.append((new, tuple(shift(y) for x in cyc for y in carry(x))))
        rel_level[new] = at_level + child.rel_level.get(name, 0)
    # walk lengths
    delta = DeltaMap()
    for i, given in bdelta.values.items():
        comp_list = base.components(i) if i <= base.depth else []
        for e, v in given.items():
            if e in dropped_edges:
                comp = next(c for c in comp_list if e in c)
                alive = [x for x in comp if x not in dropped_edges]
                if not alive:
                    raise MixedError(f"level {i} component of e{e} disappears in the gluing")
                e = alive[0]
            delta.set(i, e, v)
    for i, given in cdelta.values.items():
        for e, v in given.items():
            delta.set(at_level + i, e + off, v)
    fg = FilteredGraph(RibbonGraph(cycles, names), metric, RelativeStructure(tuple(comps)),
                       [frozenset(s) for s in levels], rel_level)
    return compact(fg, delta)


def compact(fg: FilteredGraph, delta: DeltaMap):
    """Renumber edges to 1..m keeping their order."""
    old = sorted(fg.graph.edges)
    emap = {e: i + 1 for i, e in enumerate(old)}
    dmap = lambda d: 2 * emap[edge_of(d)] - (d % 2)
    g = RibbonGraph([[dmap(d) for d in cyc] for cyc in fg.graph.vertices], fg.graph.names)
    rel = RelativeStructure(tuple((n, tuple(dmap(d) for d in c)) for n, c in fg.rel.components))
    out = FilteredGraph(g, {emap[e]: fg.metric[e] for e in old}, rel,
                        [frozenset(emap[e] for e in s) for s in fg.levels], dict(fg.rel_level))
    nd = DeltaMap()
    for i, given in delta.values.items():
        for e, v in given.items():
            nd.set(i, emap[e], v)
    return out, nd


@dataclass
class CircleOrbit:
    names: list           # circle names in walk order
    offsets: list         # arc shift from circle k to circle k+1
    length: Fraction


def circle_orbits(fg: FilteredGraph, delta: DeltaMap, level: int) -> list[CircleOrbit]:
    """Orbits of the relative circles at ``level`` under the staged boundary walk."""
    mm = mixed_dart_map(fg, delta)
    sub = mm.sub
    u = sub.unit
    names = [n for n, _ in fg.rel.components if fg.rel_level.get(n, 0) == level]
    refined = dict(sub.rel.components)
    index = {}
    for n in names:
        for j, d in enumerate(refined[n]):
            index[d] = (n, j)
    step, offset = {}, {}
    for n in names:
        cyc = refined[n]
        seen = set()
        for j, d in enumerate(cyc):
            y = mm.M[d]
            if y not in index:
                raise MixedError(f"boundary walk from circle {n} leaves the level-{level} circles")
            m, jj = index[y]
            seen.add((m, (jj - j) % len(cyc)))
        if len(seen) != 1:
            raise MixedError(f"boundary walk from circle {n} is not a rigid rotation")
        m, sh = seen.pop()
        if len(refined[m]) != len(cyc):
            raise MixedError(f"circles {n} and {m} have different lengths")
        step[n] = m
        offset[n] = sh * u
    done, out = set(), []
    for n in names:
        if n in done:
            continue
        orb, x = [], n
        while x not in done:
            done.add(x)
            orb.append(x)
            x = step[x]
        L = len(refined[n]) * u
        out.append(CircleOrbit(orb, [offset[x] for x in orb], L))
    return out


@dataclass
class Piece:
    """A level piece ready to be glued: a filtered graph with one free face."""

    fg: FilteredGraph
    delta: DeltaMap       # lengths for the piece's own deeper levels (level 0 ignored)
    face: int             # key of the face that gets glued


def attach_level(fg: FilteredGraph, delta: DeltaMap, attachments, check=True):
    """Attach one copy of a piece to every circle of an orbit.

    ``attachments`` holds (first circle name, piece, screw, alpha).  The
    new level gets walk length -screw/alpha times the circle length, and
    copies are rotated so that the staged walk carries copy k onto copy k+1.
    """
    d = max([fg.rel_level.get(n, 0) for n, _ in fg.rel.components], default=0)
    orbits = {o.names[0]: o for o in circle_orbits(fg, delta, d)}
    by_member = {n: o for o in orbits.values() for n in o.names}
    at = d + 1
    for first, piece, screw, alpha in attachments:
        screw = as_fraction(screw)
        if screw >= 0:
            raise MixedError("attached annuli need a negative screw number")
        if first not in by_member:
            raise MixedError(f"{first} is not a relative circle of level {d}")
        orb = by_member[first]
        k0 = orb.names.index(first)
        names = orb.names[k0:] + orb.names[:k0]
        offs = orb.offsets[k0:] + orb.offsets[:k0]
        if len(names) != alpha:
            raise SpecOrbitMismatch(f"orbit of {first} has {len(names)} circles, expected {alpha}")
        L = orb.length
        flen = face_length(_find_face(piece.fg.graph, piece.face), piece.fg.metric)
        if flen != L:
            raise LengthMismatch(f"piece face has length {flen}, circle has length {L}")
        dl = -screw / alpha * L
        thetas = [Fraction(0)]
        for k in range(alpha - 1):
            thetas.append((thetas[-1] - dl - offs[k]) % L)
        closing = (thetas[0] - thetas[-1] + offs[-1] + dl) % L
        if closing:
            res = check_tat(piece.fg.graph, piece.fg.metric, piece.fg.rel, closing)
            if not res.holds:
                raise SpecOrbitMismatch(
                    f"orbit of {first}: the piece would need to rotate its face by {closing}")
        for name, theta in zip(names, thetas):
            pdelta = DeltaMap({i: dict(v) for i, v in piece.delta.values.items() if i > 0})
            pdelta.set(0, min(piece.fg.graph.edges), dl)
            fg, delta = glue(fg, delta, piece.fg, pdelta, [(name, piece.face, theta)], at)
    if check:
        res = check_mixed_tat(fg, delta)
        if not res.holds:
            raise MixedPostCheckFailed(f"glued graph fails clause {res.clause}", res)
    return fg, delta


# ---------------------------------------------------------------------------
# from orbit-spec trees

@dataclass
class ChildSpec:
    """An orbit of pieces glued at the next level."""

    spec: OrbitSpec            # single boundary; marked points carry deeper children
    screw: Fraction
    alpha: int
    children: list = field(default_factory=list)    # ChildSpec per marked point of this piece
    eps: Fraction | None = None


@dataclass
class MixedSpec:
    root: OrbitSpec
    children: list = field(default_factory=list)    # ChildSpec per marked point of the root
    eps: Fraction | None = None


def _capped(spec: OrbitSpec, eps):
    real = realize_periodic(spec)
    if spec.marked == 0:
        return real.graph, real.metric, RelativeStructure.empty(), real.signs, []
    g, m, rel, signs = relative_from_capped(real, None, eps)
    # circle names per marked point, in the order the points were blown up
    groups, names = [], list(rel.names())
    it = iter(names)
    for verts in real.marked_vertices:
        groups.append([next(it) for _ in verts])
    return g, m, rel, signs, groups


def _build_piece(cs: ChildSpec, circle_len: Fraction) -> tuple[Piece, list]:
    spec = cs.spec
    if len(spec.boundaries) != 1:
        raise MixedError("pieces glued at a deeper level have exactly one free boundary")
    g, m, rel, signs, groups = _capped(spec, cs.eps)
    free = sorted({face_key(f) for f in g.faces()} - a_face_keys(g, rel))
    if len(free) != 1:
        raise MixedError("piece has more than one free face")
    scale = circle_len / face_length(_find_face(g, free[0]), m)
    m = scale_metric(m, scale)
    pfg = FilteredGraph(g, m, rel, [], {n: 0 for n in rel.names()})
    return Piece(pfg, DeltaMap(), free[0]), groups


def realize_mixed(ms: MixedSpec, ell=1):
    """Root piece, then one level per depth of the spec tree."""
    spec = ms.root
    if not any(b.sign > 0 and b.rot > 0 for b in spec.boundaries):
        raise MixedError("the root needs a boundary with positive coefficient")
    g, m, rel, signs, groups = _capped(spec, ms.eps)
    if any(s < 0 for s in signs.values()):
        raise MixedError("staged walks are positive; the root cannot have negative boundaries")
    fg = FilteredGraph(g, m, rel, [], {n: 0 for n in rel.names()})
    delta = DeltaMap()
    for comp in g.components():
        delta.set(0, comp[0], ell)
    frontier = [(ms.children, groups)]
    level = 0
    while any(ch for ch, _ in frontier):
        nxt = []
        attachments = []
        for children, grp in frontier:
            if len(children) > len(grp):
                raise SpecOrbitMismatch("more child specs than marked points")
            for cs, circles in zip(children, grp):
                if len(circles) != cs.alpha:
                    raise SpecOrbitMismatch(
                        f"marked point lifts to {len(circles)} circles, the child spec asks for {cs.alpha}")
                L = sum(fg.metric[edge_of(a)] for a in fg.rel.component(circles[0]))
                piece, sub_groups = _build_piece(cs, L)
                attachments.append((circles, piece, cs.screw, cs.alpha, cs, sub_groups))
        for circles, piece, screw, alpha, cs, sub_groups in attachments:
            # glued circle names may be reused for the new ones
            keep = set(fg.rel.names()) - set(circles)
            fg, delta = _attach_one(fg, delta, circles[0], piece, screw, alpha)
            added = [n for n in fg.rel.names() if n not in keep]
            per_copy = len(piece.fg.rel.components)
            copies = [added[i * per_copy:(i + 1) * per_copy] for i in range(alpha)]
            grp = []
            for gi, block in enumerate(sub_groups):
                # a marked point of the piece lifts to one circle per copy per lift
                circles = []
                for c in copies:
                    idx = [piece.fg.rel.names().index(x) for x in block]
                    circles.extend(c[i] for i in idx)
                grp.append(circles)
            nxt.append((cs.children, grp))
        frontier = nxt
        level += 1
    res = check_mixed_tat(fg, delta)
    if not res.holds:
        raise MixedPostCheckFailed(f"realization fails clause {res.clause}", res)
    return fg, delta


def _attach_one(fg, delta, first, piece, screw, alpha):
    return attach_level(fg, delta, [(first, piece, screw, alpha)], check=False)


# ---------------------------------------------------------------------------
# worked examples

def tripod_with_circles():
    """Star with three legs of length 1/2, blown up at the leaves with eps 1/4."""
    g = RibbonGraph([[1, 3, 5], [2], [4], [6]], ["c", "y1", "y2", "y3"])
    m = {1: Fraction(1, 2), 2: Fraction(1, 2), 3: Fraction(1, 2)}
    return blow_up_vertices(g, m, None, [1, 2, 3], Fraction(1, 4))


def non_regular_example():
    """Three-holed disk glued to the faces of K_{3,3} (edge length 1/12).

    Returns (filtered graph, walk lengths) with walk lengths 1 and 1/6.
    """
    bg, bm, brel = tripod_with_circles()
    base = FilteredGraph(bg, bm, brel, [], {n: 0 for n in brel.names()})
    bdelta = DeltaMap()
    bdelta.set(0, 1, 1)
    kg, km = make_kpq(3, 3, Fraction(1, 12))
    child = FilteredGraph(kg, km)
    cdelta = DeltaMap()
    cdelta.set(0, 1, Fraction(1, 6))
    faces = [face_key(f) for f in kg.faces()]
    pairs = [(n, k, th) for n, k, th in zip(brel.names(), faces, NON_REGULAR_THETAS)]
    return glue(base, bdelta, child, cdelta, pairs, 1)


# circle offsets found by scanning the 1/12 grid (scripts/scan_non_regular.py)
NON_REGULAR_THETAS = (Fraction(0), Fraction(1, 12), Fraction(0))


def example_thm_spec(eps=Fraction(1, 36)) -> MixedSpec:
    root = OrbitSpec(0, 2, [_bo(Fraction(1, 2), 1, 1)], [1, 1, 1], marked=1)
    child = ChildSpec(OrbitSpec(1, 1, [_bo(0, 0, 0)]), Fraction(-1), 2)
    return MixedSpec(root, [child], eps)


def _bo(r, s, w):
    from .periodic import BoundaryOrbit
    return BoundaryOrbit(Fraction(r), s, w)
