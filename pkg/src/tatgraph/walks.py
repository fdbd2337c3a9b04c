"""Exact metrics, unit subdivision and the safe-walk engine.

Lengths are ``Fraction`` values in units of pi.  A point is a dart plus an
offset measured from the dart's tail; the dart also fixes which side of the
edge (which face) a walk starting there follows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping

from .ribbon import RibbonError, RibbonGraph, RelativeStructure, darts_of, edge_of, rev

Metric = dict  # edge id -> Fraction


class WalkError(ValueError):
    pass


class IndivisibleLength(WalkError):
    pass


class MissingDirection(WalkError):
    pass


class NotOnA(WalkError):
    pass


class SignOnAFace(WalkError):
    pass


class IncommensurableLengths(WalkError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise WalkError("floating point lengths are not accepted")
    return Fraction(x)


def common_unit(lengths: Iterable, extra: Iterable = ()) -> Fraction:
    """Largest rational u such that every input is an integer multiple of u."""
    num, den = 0, 1
    for x in list(lengths) + list(extra):
        x = as_fraction(x)
        if x <= 0:
            if x == 0:
                continue
            raise WalkError(f"length {x} is not positive")
        num = gcd(num, x.numerator)
        den = lcm(den, x.denominator)
    if num == 0:
        raise IncommensurableLengths("no positive length supplied")
    return Fraction(num, den)


def scale_metric(metric: Mapping[int, Fraction], factor) -> dict:
    factor = as_fraction(factor)
    return {e: v * factor for e, v in metric.items()}


def face_length(face, metric) -> Fraction:
    return sum((metric[edge_of(d)] for d in face), Fraction(0))


@dataclass(frozen=True)
class PointOnGraph:
    """A point on the side of an edge given by ``dart``, ``offset`` from its tail."""

    dart: int
    offset: Fraction

    def flipped(self, metric) -> "PointOnGraph":
        return PointOnGraph(rev(self.dart), metric[edge_of(self.dart)] - self.offset)

    def canonical(self, metric) -> "PointOnGraph":
        length = metric[edge_of(self.dart)]
        if 0 < self.offset < length and self.dart % 2 == 0:
            return self.flipped(metric)
        return self

    def location(self, graph: RibbonGraph, metric):
        """Hashable position, forgetting the side."""
        length = metric[edge_of(self.dart)]
        if self.offset == 0:
            return ("v", graph.tail(self.dart))
        if self.offset == length:
            return ("v", graph.head(self.dart))
        c = self.canonical(metric)
        return ("e", c.dart, c.offset)


@dataclass(frozen=True)
class WalkTrace:
    start: PointOnGraph
    sign: int
    steps: tuple
    total: Fraction
    end: PointOnGraph


def safe_walk(graph: RibbonGraph, metric, start: PointOnGraph, sign: int, length) -> WalkTrace:
    """Unit speed walk turning right (sign +1) or left (sign -1) at every vertex.

    The sign -1 walk runs backwards along the face of ``start.dart``.  A walk
    that stops exactly at a vertex reports the dart it would continue along.
    """
    length = as_fraction(length)
    if length < 0:
        raise WalkError("walk length must be non-negative")
    d, t = start.dart, as_fraction(start.offset)
    if d not in graph.nu:
        raise MissingDirection(f"unknown dart {d}")
    if sign == 0 or length == 0:
        return WalkTrace(start, sign, ((d, t),), length, start)
    steps = []
    remaining = length
    if sign > 0:
        while True:
            steps.append((d, t))
            left = metric[edge_of(d)] - t
            if remaining < left:
                end = PointOnGraph(d, t + remaining)
                break
            remaining -= left
            d, t = graph.succ(d), Fraction(0)
            if remaining == 0:
                end = PointOnGraph(d, t)
                break
    else:
        while True:
            steps.append((d, t))
            if remaining < t:
                end = PointOnGraph(d, t - remaining)
                break
            remaining -= t
            d = graph.pred(d)
            t = metric[edge_of(d)]
            if remaining == 0:
                end = PointOnGraph(d, t)
                break
    return WalkTrace(start, sign, tuple(steps), length, end)


def boundary_safe_walk(graph, metric, rel: RelativeStructure, start: PointOnGraph, sign: int, length) -> WalkTrace:
    """Walk from a point of the relative boundary, leaving along its orientation."""
    orient = rel.orientation_darts
    d = start.dart
    if edge_of(d) not in rel.edges:
        raise NotOnA(f"dart {d} is not on a relative circle")
    if d not in orient:
        start = start.flipped(metric)
    return safe_walk(graph, metric, start, sign, length)


@dataclass
class UnitSubdivision:
    unit: Fraction
    graph: RibbonGraph
    pieces: dict        # original edge -> list of refined edges from the tail of its odd dart
    back: dict          # refined dart -> (original dart, index along it)
    forward: dict       # original dart -> refined darts along it
    rel: RelativeStructure = field(default_factory=RelativeStructure.empty)

    def refined_point(self, p: PointOnGraph) -> tuple[int, Fraction]:
        """Refined dart containing p (heading the same way) and the offset inside it."""
        chain = self.forward[p.dart]
        j = int(p.offset // self.unit)
        if j == len(chain):
            j -= 1
        return chain[j], p.offset - j * self.unit

    def original_point(self, d: int, t) -> PointOnGraph:
        od, j = self.back[d]
        return PointOnGraph(od, j * self.unit + as_fraction(t))

    def original_edge(self, d: int) -> int:
        return edge_of(self.back[d][0])

    def transport_darts(self, darts: Iterable[int]) -> list[int]:
        out = []
        for d in darts:
            out.extend(self.forward[d])
        return out


def subdivide(graph: RibbonGraph, metric, unit, rel: RelativeStructure | None = None) -> UnitSubdivision:
    unit = as_fraction(unit)
    pieces, back, forward = {}, {}, {}
    next_edge = 0
    internal = []
    internal_names = []
    for e in graph.edges:
        q = metric[e] / unit
        if q.denominator != 1 or q <= 0:
            raise IndivisibleLength(f"unit {unit} does not divide length {metric[e]} of e{e}")
        k = q.numerator
        ids = list(range(next_edge + 1, next_edge + k + 1))
        next_edge += k
        pieces[e] = ids
        a, b = darts_of(e)
        forward[a] = [2 * x - 1 for x in ids]
        forward[b] = [2 * x for x in reversed(ids)]
        for j, x in enumerate(ids):
            back[2 * x - 1] = (a, j)
            back[2 * x] = (b, k - 1 - j)
        for j in range(k - 1):
            internal.append((2 * ids[j], 2 * ids[j + 1] - 1))
            internal_names.append(f"s{e}.{j + 1}")
    first = {d: chain[0] for d, chain in forward.items()}
    cycles = [[first[d] for d in cyc] for cyc in graph.vertices] + internal
    names = list(graph.names) + internal_names
    refined = RibbonGraph(cycles, names)
    new_rel = RelativeStructure.empty()
    if rel:
        new_rel = RelativeStructure(tuple(
            (name, tuple(x for d in cyc for x in forward[d])) for name, cyc in rel.components))
    return UnitSubdivision(unit, refined, pieces, back, forward, new_rel)


def permutation_power(cycles: Iterable[tuple[int, ...]], power_of) -> dict:
    """Map d -> cycle[i + k] where k = power_of(cycle) may differ per cycle."""
    out = {}
    for cyc in cycles:
        n = len(cyc)
        k = power_of(cyc) % n
        for i, d in enumerate(cyc):
            out[d] = cyc[(i + k) % n]
    return out


def endpoint_dart_map(graph: RibbonGraph, face_signs: Mapping[int, int], n_steps: int,
                      a_faces: Iterable[int] = ()) -> dict:
    """T(d) = succ^(sign * N)(d) on a unit-subdivided graph.

    ``face_signs`` is keyed by face index (position in ``graph.faces()``);
    missing faces count as sign 0.
    """
    a_faces = set(a_faces)
    for fi, s in face_signs.items():
        if s and fi in a_faces:
            raise SignOnAFace(f"face {fi} is a relative face and cannot carry a sign")
    faces = graph.faces()
    out = {}
    for fi, f in enumerate(faces):
        k = face_signs.get(fi, 0) * n_steps
        n = len(f)
        for i, d in enumerate(f):
            out[d] = f[(i + k) % n]
    return out


def cycle_type(perm: Mapping[int, int]) -> list[int]:
    seen = set()
    sizes = []
    for d in perm:
        if d in seen:
            continue
        n = 0
        x = d
        while x not in seen:
            seen.add(x)
            x = perm[x]
            n += 1
        sizes.append(n)
    return sizes


def perm_order(perm: Mapping[int, int]) -> int:
    out = 1
    for n in cycle_type(perm):
        out = lcm(out, n)
    return out
