"""Reference computations that avoid the library's dart arithmetic."""
from fractions import Fraction
from itertools import product
from math import gcd, lcm

from tatgraph.ribbon import edge_of, rev
from tatgraph.walks import PointOnGraph, safe_walk


def rational_gcd(values):
    """Largest u with every value an integer multiple, by cross-multiplying."""
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    g = 0
    for v in values:
        g = gcd(g, int(Fraction(v) * den))
    return Fraction(g, den)


def euler_genus(graph):
    """Genus from a polygon gluing: count faces by following corners directly."""
    corners = set()
    for cyc in graph.vertices:
        for i, d in enumerate(cyc):
            corners.add((d, cyc[(i + 1) % len(cyc)]))
    # a face enters a vertex along the reverse of one dart and leaves along the next one
    nxt = {}
    for cyc in graph.vertices:
        for i, d in enumerate(cyc):
            nxt[rev(d)] = cyc[(i + 1) % len(cyc)]
    seen, faces = set(), 0
    for d in nxt:
        if d in seen:
            continue
        faces += 1
        while d not in seen:
            seen.add(d)
            d = nxt[d]
    v, e = len(graph.vertices), len(graph.darts) // 2
    return (2 - (v - e) - faces) // 2, faces


def _canon(p, metric):
    L = metric[edge_of(p.dart)]
    if p.offset == 0 or p.offset == L:
        return None
    if p.dart % 2:
        return (edge_of(p.dart), p.offset)
    return (edge_of(p.dart), L - p.offset)


def sampled_tat(graph, metric, ell, unit, rel=None, signs=None, fractions=(Fraction(1, 2), Fraction(1, 3))):
    """Walk from sample points in both directions and compare endpoints.

    Sample points sit at offsets (j + f) * unit on every edge.  Signed walks
    are emulated by choosing the walk direction per face: sign -1 walks
    backwards on the face of the dart, sign 0 stays put.
    """
    fkey = {}
    for f in graph.faces():
        for d in f:
            fkey[d] = min(f)
    orient = set(rel.orientation_darts) if rel else set()
    a_edges = {edge_of(d) for d in orient}
    for e in graph.edges:
        L = metric[e]
        k = int(L / unit)
        for j, fr in product(range(k), fractions):
            t = (j + fr) * unit
            ends = []
            for d, off in ((2 * e - 1, t), (2 * e, L - t)):
                s = 1 if signs is None else signs.get(fkey[d], 0)
                if s == -1:
                    # the backward walk on the face of d starts from the same point on rev(d)
                    p = PointOnGraph(d, off)
                    tr = safe_walk(graph, metric, p, -1, ell)
                else:
                    tr = safe_walk(graph, metric, PointOnGraph(d, off), s, ell)
                ends.append(_canon(tr.end, metric))
            if e in a_edges:
                d = 2 * e - 1 if 2 * e - 1 in orient else 2 * e
                off = t if d % 2 else L - t
                tr = safe_walk(graph, metric, PointOnGraph(d, off), 1, ell)
                c = _canon(tr.end, metric)
                if c is None or c[0] not in a_edges:
                    return False
                continue
            if ends[0] is None or ends[0] != ends[1]:
                return False
    return True


def grid_metric_search(graph, faces_targets, max_den=8):
    """Positive lengths with denominators <= max_den solving the face equations.

    Works in integer multiples of 1/lcm(1..max_den), depth first over the
    edges with partial-sum pruning; the last length is solved for.
    """
    scale = lcm(*range(1, max_den + 1))
    edges = list(graph.edges)
    rows = []
    for f, r in faces_targets:
        count = {}
        for d in f:
            count[edge_of(d)] = count.get(edge_of(d), 0) + 1
        t = Fraction(scale) / Fraction(r)
        if t.denominator != 1:
            return None
        rows.append((count, int(t)))
    top = max(t for _, t in rows)
    values = sorted({scale * p // q for q in range(1, max_den + 1) for p in range(1, top * q // scale + 1)})
    grid = set(values)
    low = values[0]
    chosen = {}

    def ok():
        for count, t in rows:
            s = rest = 0
            for e, c in count.items():
                if e in chosen:
                    s += c * chosen[e]
                else:
                    rest += c
            if s + rest * low > t or (rest == 0 and s != t):
                return False
        return True

    def go(i):
        if i == len(edges):
            return ok()
        e = edges[i]
        if i == len(edges) - 1:
            row = next(((c, t) for c, t in rows if e in c), None)
            if row is not None:
                count, t = row
                num = t - sum(c * chosen[x] for x, c in count.items() if x != e)
                if num % count[e] or num // count[e] not in grid:
                    return False
                chosen[e] = num // count[e]
                if ok():
                    return True
                del chosen[e]
                return False
        for v in values:
            chosen[e] = v
            if ok() and go(i + 1):
                return True
        chosen.pop(e, None)
        return False

    if not go(0):
        return None
    return {e: Fraction(v, scale) for e, v in chosen.items()}


def staged_walk(graphs, lengths, level_of, metric, start):
    """Staged walk written from scratch: stage i walks on the level-i graph
    while the current edge still belongs to level i.  Returns (end, stages)."""
    c = level_of[edge_of(start.dart)]
    p, stages = start, 0
    for i in range(c + 1):
        e = edge_of(p.dart)
        if i and level_of[e] < i:
            break
        p = safe_walk(graphs[i], metric, p, 1, lengths[i][e])
        p = p.end
        stages = i
    return p, stages


def sampled_mixed_tat(fg, delta, fractions=(Fraction(1, 2), Fraction(1, 3))):
    """Mixed property by running staged walks from sample points.

    Returns the failing clause name or None.
    """
    metric = fg.metric
    lengths = [delta.resolve(fg, i) for i in range(fg.depth + 1)]
    graphs = [fg.level_graph(i) for i in range(fg.depth + 1)]
    level_of = {e: fg.level_of(e) for e in fg.graph.edges}
    positive = [v for lv in lengths for v in lv.values() if v > 0]
    unit = rational_gcd(list(metric.values()) + positive)
    orient = set(fg.rel.orientation_darts)
    circle_level = {}
    for name, cyc in fg.rel.components:
        for d in cyc:
            circle_level[edge_of(d)] = fg.rel_level.get(name, 0)

    def walk(d, off):
        end, stages = staged_walk(graphs, lengths, level_of, metric, PointOnGraph(d, off))
        return end, stages

    for e in fg.graph.edges:
        L = metric[e]
        lv = level_of[e]
        for j, fr in product(range(int(L / unit)), fractions):
            t = (j + fr) * unit
            if e in circle_level:
                d = 2 * e - 1 if 2 * e - 1 in orient else 2 * e
                end, stages = walk(d, t if d % 2 else L - t)
                if stages != lv or circle_level.get(edge_of(end.dart), -1) < lv:
                    return "III"
                continue
            ends = []
            for d, off in ((2 * e - 1, t), (2 * e, L - t)):
                end, stages = walk(d, off)
                if stages != lv or level_of[edge_of(end.dart)] != lv:
                    return "II"
                ends.append(_canon(end, metric))
            if ends[0] != ends[1]:
                return "I"
    return None
