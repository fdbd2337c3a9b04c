"""Generators, blow-up and metric fitting."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ribbon import RibbonGraph, RelativeStructure, RibbonError, darts_of, edge_of, rev
from .walks import as_fraction, common_unit, face_length
from .tat import (
    PropertyDoesNotHold, a_face_keys, check_signed_tat, check_tat, compute_sigma, face_key,
)


class ConstructionError(ValueError):
    pass


class EpsilonTooLarge(ConstructionError):
    pass


class VertexOnA(ConstructionError):
    pass


class MalformedTargets(ConstructionError):
    pass


def make_kpq(p: int, q: int, edge_len=Fraction(1, 2)):
    """Complete bipartite graph drawn with the two parts on parallel lines.

    Edge (i, j) joins a_i to b_j and has id i*q + j + 1, its odd dart leaving
    a_i.  Counterclockwise, a_i sees b_{q-1}, ..., b_0 and b_j sees
    a_0, ..., a_{p-1}.
    """
    if p < 2 or q < 2:
        raise ConstructionError("K_{p,q} needs p, q >= 2")
    eid = lambda i, j: i * q + j + 1
    cycles = [[2 * eid(i, j) - 1 for j in reversed(range(q))] for i in range(p)]
    cycles += [[2 * eid(i, j) for i in range(p)] for j in range(q)]
    names = [f"a{i + 1}" for i in range(p)] + [f"b{j + 1}" for j in range(q)]
    g = RibbonGraph(cycles, names)
    length = as_fraction(edge_len)
    return g, {e: length for e in g.edges}


def make_circle(total_length):
    """Circle made of two edges of equal length between two 2-valent vertices."""
    total = as_fraction(total_length)
    if total <= 0:
        raise ConstructionError("circle length must be positive")
    g = RibbonGraph([[1, 4], [2, 3]], ["v1", "v2"])
    return g, {1: total / 2, 2: total / 2}


def _vertex_index(graph: RibbonGraph, v) -> int:
    if isinstance(v, int):
        return v
    try:
        return graph.names.index(v)
    except ValueError:
        raise ConstructionError(f"unknown vertex {v}") from None


def _fresh_relative_names(rel: RelativeStructure | None, count: int) -> list[str]:
    taken = set(rel.names()) if rel else set()
    out, k = [], 1
    while len(out) < count:
        name = f"A{k}"
        if name not in taken:
            out.append(name)
            taken.add(name)
        k += 1
    return out


def blow_up_vertices(graph: RibbonGraph, metric, rel: RelativeStructure | None, vertices, eps):
    """Replace each listed vertex by an oriented circle of new relative edges.

    A vertex of valency p becomes p vertices joined by p relative edges of
    length 2*eps, oriented along the rotation; incident edges lose eps at
    each blown end.  A valency-1 vertex gives a circle split in two halves
    so that no loop appears.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise EpsilonTooLarge("epsilon must be positive")
    rel = rel or RelativeStructure.empty()
    idx = sorted({_vertex_index(graph, v) for v in vertices})
    a_edges = rel.edges
    for vi in idx:
        if any(edge_of(d) in a_edges for d in graph.vertices[vi]):
            raise VertexOnA(f"vertex {graph.names[vi]} lies on the relative boundary")
    new_metric = dict(metric)
    for vi in idx:
        for d in graph.vertices[vi]:
            new_metric[edge_of(d)] -= eps
    for e, v in new_metric.items():
        if v <= 0:
            raise EpsilonTooLarge(f"epsilon {eps} leaves edge e{e} with length {v}")
    next_edge = max(graph.edges)
    cycles = [list(c) for i, c in enumerate(graph.vertices) if i not in idx]
    names = [graph.names[i] for i in range(len(graph.vertices)) if i not in idx]
    comps = []
    for vi in idx:
        rot = graph.vertices[vi]
        p = len(rot)
        base = graph.names[vi]
        if p == 1:
            h1, h2 = next_edge + 1, next_edge + 2
            next_edge += 2
            cycles.append([2 * h2, rot[0], 2 * h1 - 1])
            cycles.append([2 * h1, 2 * h2 - 1])
            names += [f"{base}.1", f"{base}.2"]
            for h in (h1, h2):
                new_metric[h] = eps
            comps.append((2 * h1 - 1, 2 * h2 - 1))
            continue
        hs = list(range(next_edge + 1, next_edge + p + 1))
        next_edge += p
        for j in range(p):
            cycles.append([2 * hs[j - 1], rot[j], 2 * hs[j] - 1])
            names.append(f"{base}.{j + 1}")
            new_metric[hs[j]] = 2 * eps
        comps.append(tuple(2 * h - 1 for h in hs))
    new_names = _fresh_relative_names(rel, len(comps))
    new_rel = RelativeStructure(rel.components + tuple(zip(new_names, comps)))
    return RibbonGraph(cycles, names), new_metric, new_rel


def sigma_orbit(graph, metric, rel, v, signs=None, ell=1) -> list[int]:
    sig = compute_sigma(graph, metric, rel, signs, ell)
    if sig.vertex_perm is None:
        raise ConstructionError("the induced map does not permute the vertices")
    start = _vertex_index(graph, v)
    orb, x = [], start
    while True:
        orb.append(x)
        x = sig.vertex_perm[x]
        if x == start:
            return orb


def blow_up(graph, metric, rel, v, eps, signs=None, ell=1):
    """Blow up the whole orbit of ``v`` under the induced automorphism."""
    return blow_up_vertices(graph, metric, rel, sigma_orbit(graph, metric, rel, v, signs, ell), eps)


def min_incident_length(graph, metric, vertices) -> Fraction:
    return min(metric[edge_of(d)] for v in vertices for d in graph.vertices[_vertex_index(graph, v)])


@dataclass
class FitResult:
    kind: str                   # "fitted", "infeasible" or "not_tat"
    metric: dict | None = None
    certificate: object = None
    witness: tuple | None = None
    faces: list = field(default_factory=list)   # face keys, row order of the certificate
    edges: list = field(default_factory=list)   # edge ids, column order

    @property
    def forced_zero_edges(self) -> list[int]:
        if self.certificate is None:
            return []
        return [self.edges[j] for j in self.certificate.forced_zero]


def fit_metric(graph: RibbonGraph, rel, signs: dict, targets: dict) -> FitResult:
    """Find edge lengths giving face lengths 1/R (units of pi) on signed faces."""
    from .linear import least_change_solution, positive_solution

    afaces = a_face_keys(graph, rel)
    edges = list(graph.edges)
    col = {e: j for j, e in enumerate(edges)}
    A, b, keys = [], [], []
    for f in graph.faces():
        k = face_key(f)
        s = signs.get(k, 0)
        if s == 0 or k in afaces:
            continue
        if k not in targets:
            raise MalformedTargets(f"face F{k} has a sign but no target coefficient")
        r = as_fraction(targets[k])
        if r <= 0:
            raise MalformedTargets(f"target for F{k} must be positive")
        row = [Fraction(0)] * len(edges)
        for d in f:
            row[col[edge_of(d)]] += 1
        A.append(row)
        b.append(1 / r)
        keys.append(k)
    x = least_change_solution(A, b, [Fraction(1)] * len(edges)) if A else [Fraction(1)] * len(edges)
    if x is None or any(v <= 0 for v in x):
        feas = positive_solution(A, b)
        if not feas.feasible:
            return FitResult("infeasible", certificate=feas.certificate, faces=keys, edges=edges)
        x = feas.solution
    metric = {e: x[col[e]] for e in edges}
    res = check_signed_tat(graph, metric, rel, signs)
    if not res.holds:
        return FitResult("not_tat", metric, witness=res.witness, faces=keys, edges=edges)
    return FitResult("fitted", metric, faces=keys, edges=edges)
