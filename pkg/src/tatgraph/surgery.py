"""Local edits of metric ribbon graphs that keep existing dart ids stable."""
from __future__ import annotations

from fractions import Fraction

from .ribbon import RibbonGraph, RibbonError, edge_of


def split_edge(graph: RibbonGraph, metric, e: int, t, name: str | None = None):
    """Insert a 2-valent vertex on edge ``e`` at distance ``t`` from the tail of 2e-1.

    Edge e keeps the first piece (darts 2e-1 and 2e); the second piece gets
    a fresh id m+1.  Dart 2e moves to the new vertex and its old place in the
    rotation is taken by dart 2m+2.  Returns (graph, metric, new_edge).
    """
    t = Fraction(t)
    length = metric[e]
    if not 0 < t < length:
        raise RibbonError(f"split point {t} is not inside e{e}")
    new = max(graph.edges) + 1
    a2, n1, n2 = 2 * e, 2 * new - 1, 2 * new
    cycles = [[n2 if d == a2 else d for d in cyc] for cyc in graph.vertices]
    cycles.append([a2, n1])
    names = list(graph.names) + [name or f"w{len(graph.vertices) + 1}"]
    m = dict(metric)
    m[e] = t
    m[new] = length - t
    return RibbonGraph(cycles, names), m, new


def split_edge_at(graph, metric, e: int, points):
    """Split e at several distances from the tail of 2e-1.

    Returns (graph, metric, pieces, new_vertices) with pieces listed from
    the tail.  Vertex indices of the input survive; new vertices are
    appended in order along the edge.
    """
    pts = sorted(set(Fraction(p) for p in points))
    pieces, verts = [e], []
    prev = Fraction(0)
    cur = e
    for p in pts:
        graph, metric, new = split_edge(graph, metric, cur, p - prev)
        pieces.append(new)
        verts.append(len(graph.vertices) - 1)
        prev = p
        cur = new
    return graph, metric, pieces, verts


def split_loops(graph: RibbonGraph, metric):
    """Subdivide every loop at its midpoint."""
    for e in list(graph.edges):
        if graph.tail(2 * e - 1) == graph.tail(2 * e):
            graph, metric, _ = split_edge(graph, metric, e, metric[e] / 2)
    return graph, metric
