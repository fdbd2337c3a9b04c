"""Signed tete-a-tete spines for periodic maps, built as cyclic covers.

A quotient spine is assembled from its face cycles, given lengths so that
each boundary face has the length required by its target coefficient, and
decorated with voltages in Z/n.  The derived graph (darts = quotient darts
x Z/n) is the spine upstairs.  Its walk map is a deck transformation, which
is why the signed property holds by construction; it is still re-checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .ribbon import RibbonGraph, edge_of, rev, ribbon_from_faces, surface_invariants
from .surgery import split_edge_at, split_loops
from .tat import check_signed_tat, face_key, fdtc


class SpecError(ValueError):
    pass


class InvalidSpec(SpecError):
    pass


class DisconnectedCover(SpecError):
    pass


class PostCheckFailed(SpecError):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


@dataclass
class BoundaryOrbit:
    rot: Fraction          # |fdtc| target, 0 allowed only with sign 0
    sign: int = 1
    voltage: int = 1       # sheet shift after one turn around the quotient boundary

    def __post_init__(self):
        self.rot = Fraction(self.rot)


@dataclass
class OrbitSpec:
    genus: int
    order: int
    boundaries: list
    branch: list = field(default_factory=list)      # local voltages of branch points
    handles: list | None = None                     # 2*genus voltages on handle generators
    marked: int = 0                                 # regular quotient points kept as vertices

    def handle_voltages(self) -> list[int]:
        h = list(self.handles or [])
        return h + [0] * (2 * self.genus - len(h))


@dataclass
class Realized:
    graph: RibbonGraph
    metric: dict
    signs: dict                 # face key -> sign
    boundary_faces: list        # per quotient boundary: lifted face keys
    marked_vertices: list       # per marked point: lifted vertex indices
    branch_vertices: list       # per branch point: lifted vertex indices
    deck_shift: int
    quotient: RibbonGraph
    quotient_metric: dict
    voltages: dict
    spec: OrbitSpec


def _face_lengths(spec: OrbitSpec) -> list[Fraction]:
    n = spec.order
    periods = [n // gcd(b.voltage % n, n) if n > 1 else 1 for b in spec.boundaries]
    lam = []
    for b, per in zip(spec.boundaries, periods):
        lam.append(1 / (per * b.rot) if b.rot > 0 else None)
    known = [x for x in lam if x is not None]
    base = max(known) if known else Fraction(1)
    return [x if x is not None else base for x in lam], periods


def validate_spec(spec: OrbitSpec) -> int:
    """Check the arithmetic conditions and return the common deck shift."""
    n = spec.order
    if n < 1:
        raise InvalidSpec("order must be at least 1")
    if spec.genus < 0:
        raise InvalidSpec("genus must be non-negative")
    if not spec.boundaries:
        raise InvalidSpec("at least one boundary orbit is required")
    for i, b in enumerate(spec.boundaries, 1):
        if b.sign not in (-1, 0, 1):
            raise InvalidSpec(f"boundary {i}: sign must be -1, 0 or +1")
        if b.rot < 0 or (b.rot == 0) != (b.sign == 0):
            raise InvalidSpec(f"boundary {i}: coefficient is zero exactly when the sign is 0")
    for k, w in enumerate(spec.branch, 1):
        if w % n == 0:
            raise InvalidSpec(f"branch point {k}: local voltage must be nonzero mod {n}")
    if spec.handles is not None and len(spec.handles) > 2 * spec.genus:
        raise InvalidSpec("too many handle voltages")
    _, periods = _face_lengths(spec)
    shift = None
    for i, (b, per) in enumerate(zip(spec.boundaries, periods), 1):
        turns = per * b.rot
        if turns.denominator != 1:
            raise InvalidSpec(f"boundary {i}: period {per} times coefficient {b.rot} is not an integer")
        s = (b.sign * turns.numerator * b.voltage) % n
        if shift is None:
            shift = s
        elif s != shift:
            raise InvalidSpec(f"boundary {i}: walk shifts sheets by {s}, expected {shift} (mod {n})")
    r, g, k = len(spec.boundaries), spec.genus, len(spec.branch)
    if g == 0 and r == 1 and k < 2:
        raise InvalidSpec("a disk quotient needs at least two branch points")
    return shift


class _Faces:
    """Symbolic edges and face lists for a quotient spine."""

    def __init__(self):
        self.length = {}
        self.ids = {}

    def edge(self, name, length):
        e = len(self.ids) + 1
        self.ids[name] = e
        self.length[e] = Fraction(length)
        return e

    def p(self, name):
        return 2 * self.ids[name] - 1

    def m(self, name):
        return 2 * self.ids[name]


@dataclass
class _Quotient:
    graph: RibbonGraph
    metric: dict
    face_darts: list            # per boundary: a dart on its face
    chain: list                 # (boundary index, edge) solved in order
    handle_edges: list
    branch_vertices: list
    marked_vertices: list


def _place_extras(graph, metric, e, count):
    if count == 0:
        return graph, metric, []
    L = metric[e]
    pts = [L * j / (count + 1) for j in range(1, count + 1)]
    graph, metric, _, verts = split_edge_at(graph, metric, e, pts)
    return graph, metric, verts


def _higher_genus(spec, lam) -> _Quotient:
    r, g = len(spec.boundaries), spec.genus
    L = min(lam) / 4
    F = _Faces()
    for i in range(1, r + 1):
        if i < r:
            F.edge(f"c{i}", (lam[i - 1] - 2 * L) / 2)
        else:
            rho = lam[r - 1] - 2 * L
            F.edge(f"c{i}", rho / 4 if g > 1 else rho / 2)
    F.edge("b1", L)
    for i in range(1, r):
        F.edge(f"l{i}", L)
    if g > 1:
        rho = lam[r - 1] - 2 * L
        piece = rho / 2 / (4 * (g - 1))
        for j in range(2, g + 1):
            F.edge(f"a{j}", piece)
            F.edge(f"b{j}", piece)
    handles = []
    for j in range(2, g + 1):
        handles += [F.p(f"a{j}"), F.p(f"b{j}"), F.m(f"a{j}"), F.m(f"b{j}")]
    faces = []
    if r == 1:
        faces.append([F.p("b1"), F.p("c1"), F.m("b1"), *handles, F.m("c1")])
    else:
        faces.append([F.p("b1"), F.p("c1"), F.m("l1"), F.m("c1")])
        for k in range(2, r):
            faces.append([F.p(f"l{k - 1}"), F.p(f"c{k}"), F.m(f"l{k}"), F.m(f"c{k}")])
        faces.append([F.p(f"l{r - 1}"), F.p(f"c{r}"), F.m("b1"), *handles, F.m(f"c{r}")])
    graph = ribbon_from_faces(faces)
    metric = dict(F.length)
    hedges = [F.ids["c1"], F.ids["b1"]]
    for j in range(2, g + 1):
        hedges += [F.ids[f"a{j}"], F.ids[f"b{j}"]]
    chain = [(i - 1, F.ids[f"l{i}"]) for i in range(1, r)]
    extras = len(spec.branch) + spec.marked
    graph, metric, verts = _place_extras(graph, metric, F.ids["b1"], extras)
    nb = len(spec.branch)
    return _Quotient(graph, metric, [f[0] for f in faces], chain, hedges, verts[:nb], verts[nb:])


def _genus0_small(spec, lam) -> _Quotient:
    r = len(spec.boundaries)
    F = _Faces()
    nb = len(spec.branch)
    if r == 1:
        F.edge("c", lam[0] / 2)
        faces = [[F.p("c"), F.m("c")]]
        chain = []
    elif lam[0] == lam[1]:
        F.edge("c", lam[0] / 2)
        F.edge("l", lam[0] / 2)
        faces = [[F.p("c"), F.m("l")], [F.p("l"), F.m("c")]]
        chain = [(0, F.ids["l"])]
    else:
        small = 0 if lam[0] < lam[1] else 1
        big = 1 - small
        if nb < 1:
            raise InvalidSpec("an annulus quotient with unequal boundary lengths needs a branch point")
        F.edge("c", (lam[big] - lam[small]) / 2)
        F.edge("l", lam[small])
        fs = [None, None]
        fs[small] = [F.p("l")]
        fs[big] = [F.p("c"), F.m("c"), F.m("l")]
        faces = fs
        chain = [(small, F.ids["l"])]
    graph = ribbon_from_faces(faces)
    metric = dict(F.length)
    c = F.ids["c"]
    if r == 2 and lam[0] != lam[1]:
        ends = [graph.head(2 * c - 1)]
    else:
        ends = [graph.tail(2 * c - 1), graph.head(2 * c - 1)]
    at_ends = min(nb, len(ends))
    graph, metric, verts = _place_extras(graph, metric, c, nb - at_ends + spec.marked)
    branch = ends[:at_ends] + verts[:nb - at_ends]
    return _Quotient(graph, metric, [f[0] for f in faces], chain, [], branch, verts[nb - at_ends:])


def _genus0_many(spec, lam) -> _Quotient:
    """Disk cut by parallel chords, then folded onto a segment."""
    r = len(spec.boundaries)
    nb = len(spec.branch)
    order = list(range(r))
    if nb < 2:
        # smallest face in the last cap, largest in a middle slot
        smallest = min(order, key=lambda i: (lam[i], i))
        rest = [i for i in order if i != smallest]
        largest = max(rest, key=lambda i: (lam[i], -i))
        rest.remove(largest)
        order = [rest[0], largest] + rest[1:] + [smallest]
    lm = [lam[i] for i in order]           # slot k (0-based) has length lm[k]
    L = min(lm) / 4
    top = {k: lm[k - 1] / 2 - L for k in range(2, r)}
    bot = dict(top)
    cap1, capr = lm[0] - L, lm[r - 1] - L

    def segments():
        segs = [(("a", 1), cap1)]
        segs += [(("b", k), bot[k]) for k in range(2, r)]
        segs.append((("a", r), capr))
        segs += [(("a", k), top[k]) for k in range(r - 1, 1, -1)]
        return segs

    half = (cap1 + capr + sum(top.values()) + sum(bot.values())) / 2
    if nb >= 2:
        origin = cap1 / 2
    else:
        origin = Fraction(0)
        pos = cap1
        for k in range(2, r):
            if pos < half < pos + bot[k]:
                x = half - pos
                top[k] += bot[k] - x
                bot[k] = x
                break
            pos += bot[k]
        # otherwise the antipode already sits on a bottom vertex
    segs = segments()
    perimeter = 2 * half
    # positions relative to the fold point q1
    starts, cum = [], Fraction(0)
    for label, ln in segs:
        starts.append((cum - origin) % perimeter)
        cum += ln
    cuts = {Fraction(0), half}
    for s in starts:
        cuts.add(s if s <= half else perimeter - s)
    ys = sorted(cuts)
    F = _Faces()
    for j in range(len(ys) - 1):
        F.edge(f"c{j}", ys[j + 1] - ys[j])
    for k in range(1, r):
        F.edge(f"l{k}", L)
    index = {y: j for j, y in enumerate(ys)}

    def run(s, t):
        """c darts covering the P arc from position s to t (one half only)."""
        if t <= half:
            return [F.p(f"c{j}") for j in range(index[s], index[t])]
        a, b = perimeter - s, perimeter - t
        return [F.m(f"c{j}") for j in range(index[a] - 1, index[b] - 1, -1)]

    def arc(i):
        s = starts[i]
        t = s + segs[i][1]
        out = []
        for bound in (half, perimeter):
            if s < bound < t:
                out += run(s, bound)
                s = bound
        if s >= perimeter:
            s -= perimeter
            t -= perimeter
        return out + run(s, t)

    where = {label: i for i, (label, _) in enumerate(segs)}
    faces = [None] * r
    faces[0] = arc(where[("a", 1)]) + [F.p("l1")]
    for k in range(2, r):
        faces[k - 1] = arc(where[("b", k)]) + [F.p(f"l{k}")] + arc(where[("a", k)]) + [F.m(f"l{k - 1}")]
    faces[r - 1] = arc(where[("a", r)]) + [F.m(f"l{r - 1}")]
    graph = ribbon_from_faces(faces)
    metric = dict(F.length)
    first = F.ids["c0"]
    last = F.ids[f"c{len(ys) - 2}"]
    q1, q2 = graph.tail(2 * first - 1), graph.head(2 * last - 1)
    ends = [q1, q2] if nb >= 2 else [q1]
    at_ends = min(nb, len(ends))
    graph, metric, verts = _place_extras(graph, metric, first, nb - at_ends + spec.marked)
    branch = ends[:at_ends] + verts[:nb - at_ends]
    face_darts = [None] * r
    chain = []
    for slot, b in enumerate(order):
        face_darts[b] = faces[slot][0]
    for k in range(1, r):
        chain.append((order[k - 1], F.ids[f"l{k}"]))
    return _Quotient(graph, metric, face_darts, chain, [], branch, verts[nb - at_ends:])


def build_quotient(spec: OrbitSpec) -> _Quotient:
    lam, _ = _face_lengths(spec)
    if spec.genus >= 1:
        q = _higher_genus(spec, lam)
    elif len(spec.boundaries) <= 2:
        q = _genus0_small(spec, lam)
    else:
        q = _genus0_many(spec, lam)
    g, m = split_loops(q.graph, q.metric)
    q.graph, q.metric = g, m
    return q


def _face_voltage(Q: RibbonGraph, face, volt, wrap):
    total = 0
    for x in face:
        e = edge_of(x)
        total += volt.get(e, 0) if x % 2 else -volt.get(e, 0)
        y = rev(x)
        vi = Q.tail(y)
        if Q.vertices[vi][-1] == y:
            total += wrap.get(vi, 0)
    return total


def lift(Q: RibbonGraph, qmetric, volt: dict, wrap: dict, n: int):
    """Derived graph of a voltage assignment with rotation twists at branch vertices."""
    def L(x, s):
        e = edge_of(x)
        if x % 2 == 0:
            s -= volt.get(e, 0)
        return 2 * ((e - 1) * n + s % n + 1) - (x % 2)

    nu = {}
    for vi, cyc in enumerate(Q.vertices):
        w = wrap.get(vi, 0)
        p = len(cyc)
        for s in range(n):
            for i, x in enumerate(cyc):
                nxt = cyc[(i + 1) % p]
                nu[L(x, s)] = L(nxt, s + w if i == p - 1 else s)
    seen, cycles, origin = set(), [], []
    for vi, cyc in enumerate(Q.vertices):
        for s in range(n):
            d = L(cyc[0], s)
            if d in seen:
                continue
            c, x = [], d
            while x not in seen:
                seen.add(x)
                c.append(x)
                x = nu[x]
            cycles.append(c)
            origin.append(vi)
    names = [f"v{i + 1}" for i in range(len(cycles))]
    graph = RibbonGraph(cycles, names)
    metric = {}
    for e, ln in qmetric.items():
        for s in range(n):
            metric[(e - 1) * n + s + 1] = ln
    return graph, metric, origin, L


def realize_periodic(spec: OrbitSpec) -> Realized:
    shift = validate_spec(spec)
    n = spec.order
    q = build_quotient(spec)
    Q = q.graph
    inv = surface_invariants(Q)
    if inv.genus != spec.genus or inv.boundaries != len(spec.boundaries):
        raise PostCheckFailed("quotient spine has the wrong topology", inv)
    wrap = {}
    for vi, w in zip(q.branch_vertices, spec.branch):
        wrap[vi] = wrap.get(vi, 0) + w
    volt = {}
    for e, h in zip(q.handle_edges, spec.handle_voltages()):
        volt[e] = h % n
    fidx = Q.face_index()
    faces = Q.faces()
    targets = [b.voltage for b in spec.boundaries]
    for i, e in q.chain:
        f = faces[fidx[q.face_darts[i]]]
        volt[e] = 0
        cur = _face_voltage(Q, f, volt, wrap)
        sign = 1 if (2 * e - 1) in f else -1
        volt[e] = (sign * (targets[i] - cur)) % n
    for i, dart in enumerate(q.face_darts):
        got = _face_voltage(Q, faces[fidx[dart]], volt, wrap) % n
        if got != targets[i] % n:
            raise InvalidSpec(
                f"boundary voltages are inconsistent with the branch data: boundary {i + 1} "
                f"would need voltage {got} mod {n}")
    graph, metric, origin, L = lift(Q, q.metric, volt, wrap, n)
    if not graph.is_connected():
        raise DisconnectedCover("voltages do not give a connected cover")
    # Riemann-Hurwitz bookkeeping
    chi_q = Q.num_vertices - Q.num_edges
    expected = n * chi_q - sum(n - n // (n // gcd(w % n, n)) for w in wrap.values())
    if graph.num_vertices - graph.num_edges != expected:
        raise PostCheckFailed("Euler characteristic of the cover disagrees with Riemann-Hurwitz")
    lidx = graph.face_index()
    lfaces = graph.faces()
    signs, bfaces = {}, []
    for i, dart in enumerate(q.face_darts):
        keys = sorted({face_key(lfaces[lidx[L(dart, s)]]) for s in range(n)})
        bfaces.append(keys)
        for k in keys:
            signs[k] = spec.boundaries[i].sign
    res = check_signed_tat(graph, metric, None, signs)
    if not res.holds:
        raise PostCheckFailed("signed walk condition fails on the realization", res.witness)
    coeffs = fdtc(graph, metric, None, signs)
    for i, keys in enumerate(bfaces):
        want = spec.boundaries[i].sign * spec.boundaries[i].rot
        for k in keys:
            if coeffs[k] != want:
                raise PostCheckFailed(f"boundary {i + 1}: coefficient {coeffs[k]} differs from {want}")
    lifted_of = lambda vi: [j for j, o in enumerate(origin) if o == vi]
    return Realized(graph, metric, signs, bfaces,
                    [lifted_of(v) for v in q.marked_vertices],
                    [lifted_of(v) for v in q.branch_vertices],
                    shift, Q, q.metric, volt, spec)


def relative_from_capped(real: Realized, which=None, eps=None):
    """Blow up the lifts of chosen marked points into relative circles.

    ``which`` lists marked-point indices (all by default).  The default
    epsilon is a quarter of the shortest edge touching those vertices.
    Returns (graph, metric, rel, signs) with signs re-keyed to the new faces.
    """
    from .constructors import blow_up_vertices, min_incident_length

    which = range(len(real.marked_vertices)) if which is None else which
    verts = sorted(v for k in which for v in real.marked_vertices[k])
    if not verts:
        raise InvalidSpec("no marked points to blow up")
    if eps is None:
        eps = min_incident_length(real.graph, real.metric, verts) / 4
    graph, metric, rel = blow_up_vertices(real.graph, real.metric, None, verts, eps)
    # untouched darts keep their ids, so each old face key still lies in its new face
    idx = graph.face_index()
    faces = graph.faces()
    signs = {face_key(faces[idx[k]]): s for k, s in real.signs.items()}
    return graph, metric, rel, signs
