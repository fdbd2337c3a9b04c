"""Deciding the tete-a-tete property and computing the induced automorphism.

Everything reduces to dart arithmetic.  Subdivide so every edge has length
u and the walk length is N*u.  A walk of length N*u starting at offset t in
a unit dart d (0 < t < u) ends at offset t in ``T(d) = succ^N(d)``.  The two
walks from an interior point leave along d and rev(d), so they meet for
every t exactly when ``T(rev d) = rev T(d)``; the other possible match
(same dart, offsets t and u - t) only happens at t = u/2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ribbon import RibbonGraph, RelativeStructure, edge_of, rev
from .walks import (
    IncommensurableLengths, PointOnGraph, UnitSubdivision, WalkError, as_fraction, common_unit,
    endpoint_dart_map, face_length, perm_order, scale_metric, subdivide, SignOnAFace,
)


class PropertyDoesNotHold(ValueError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class TatResult:
    holds: bool
    witness: tuple | None = None   # (original edge, offset from tail of its odd dart)
    clause: str = ""
    sub: UnitSubdivision | None = None
    T: dict | None = None

    def __bool__(self):
        return self.holds

    def verdict_line(self) -> str:
        if self.holds:
            return "TAT HOLDS"
        e, off = self.witness
        return f"TAT FAILS witness=e{e}:{off}"


def face_key(face) -> int:
    return min(face)


def _witness(sub: UnitSubdivision, metric, d: int):
    od, j = sub.back[d]
    e = edge_of(od)
    pos = (j + Fraction(1, 2)) * sub.unit
    if od % 2 == 0:
        pos = metric[e] - pos
    return e, pos


def _prepare(graph, metric, rel, ell, extra=()):
    ell = as_fraction(ell)
    if ell <= 0:
        raise WalkError("walk length must be positive")
    u = common_unit((metric[e] for e in graph.edges), [ell, *extra])
    sub = subdivide(graph, metric, u, rel)
    return sub, int(ell / u)


def _face_maps(graph: RibbonGraph, sub: UnitSubdivision):
    """Original face key for each refined face index."""
    rg = sub.graph
    ridx = rg.face_index()
    out = {}
    for f in graph.faces():
        out[ridx[sub.forward[f[0]][0]]] = face_key(f)
    return out


def a_face_keys(graph: RibbonGraph, rel: RelativeStructure | None) -> set:
    if not rel:
        return set()
    back = {rev(d) for d in rel.orientation_darts}
    return {face_key(f) for f in graph.faces() if set(f) <= back}


def _verify(graph, metric, rel, sub, T, T_rev_side=None) -> TatResult:
    """Shared clause check.  ``T_rev_side`` defaults to T."""
    rg = sub.graph
    Tr = T if T_rev_side is None else T_rev_side
    a_edges = set()
    orient = set()
    if rel:
        orient = set(sub.rel.orientation_darts)
        a_edges = {edge_of(d) for d in orient}
    for d in rg.darts:
        if d % 2 == 0:
            continue
        if edge_of(d) in a_edges:
            continue
        if Tr(rev(d)) != rev(T(d)):
            return TatResult(False, _witness(sub, metric, d), "walk", sub, None)
    for d in sorted(orient):
        if edge_of(T(d)) not in a_edges:
            return TatResult(False, _witness(sub, metric, d), "relative", sub, None)
    return TatResult(True, None, "", sub, None)


def check_tat(graph: RibbonGraph, metric, rel: RelativeStructure | None = None, ell=1) -> TatResult:
    """Pure or relative tete-a-tete check for walk length ``ell`` (units of pi)."""
    sub, n = _prepare(graph, metric, rel, ell)
    rg = sub.graph
    T = endpoint_dart_map(rg, {i: 1 for i in range(len(rg.faces()))}, n)
    res = _verify(graph, metric, rel, sub, T.__getitem__)
    res.T = T
    return res


def signed_dart_map(graph, metric, rel, signs: dict, ell=1):
    """Unit subdivision and dart map for signed walks of length ``ell``."""
    keys = {face_key(f) for f in graph.faces()}
    afaces = a_face_keys(graph, rel)
    for k, s in signs.items():
        if k not in keys:
            raise WalkError(f"no face keyed by dart {k}")
        if s and k in afaces:
            raise SignOnAFace(f"face F{k} is a relative face")
        if s not in (-1, 0, 1):
            raise WalkError(f"sign {s} is not one of -1, 0, +1")
    sub, n = _prepare(graph, metric, rel, ell)
    fmap = _face_maps(graph, sub)
    face_signs = {ri: signs.get(k, 0) for ri, k in fmap.items()}
    T = endpoint_dart_map(sub.graph, face_signs, n)
    return sub, T


def check_signed_tat(graph, metric, rel, signs: dict, ell=1) -> TatResult:
    sub, T = signed_dart_map(graph, metric, rel, signs, ell)
    res = _verify(graph, metric, rel, sub, T.__getitem__)
    res.T = T
    return res


@dataclass
class SigmaMap:
    unit: Fraction
    sub: UnitSubdivision
    perm: dict
    vertex_perm: dict | None
    edge_perm: dict | None
    is_circle: bool = False
    order: int = field(default=0)


def _induced(graph, metric, sub, T):
    vperm = {}
    for vi, cyc in enumerate(graph.vertices):
        od, j = sub.back[T[sub.forward[cyc[0]][0]]]
        if j != 0:
            vperm = None
            break
        vperm[vi] = graph.tail(od)
    eperm = {}
    for e in graph.edges:
        od, j = sub.back[T[sub.forward[2 * e - 1][0]]]
        if j != 0 or metric[edge_of(od)] != metric[e]:
            eperm = None
            break
        eperm[e] = od if od % 2 else -od  # signed dart of the image
    if eperm is not None:
        eperm = {e: (edge_of(abs(d)), 1 if d > 0 else -1) for e, d in eperm.items()}
    return vperm, eperm


def compute_sigma(graph, metric, rel=None, signs: dict | None = None, ell=1) -> SigmaMap:
    if signs is None:
        res = check_tat(graph, metric, rel, ell)
    else:
        res = check_signed_tat(graph, metric, rel, signs, ell)
    if not res.holds:
        raise PropertyDoesNotHold("tete-a-tete property fails", res)
    vperm, eperm = _induced(graph, metric, res.sub, res.T)
    circle = all(len(c) == 2 for c in graph.vertices)
    return SigmaMap(res.sub.unit, res.sub, res.T, vperm, eperm, circle, perm_order(res.T))


def sigma_order(sigma: SigmaMap) -> int:
    return perm_order(sigma.perm)


def vertex_orbits(sigma: SigmaMap) -> list[list[int]]:
    if sigma.vertex_perm is None:
        return []
    seen, out = set(), []
    for v in sorted(sigma.vertex_perm):
        if v in seen:
            continue
        orb = []
        x = v
        while x not in seen:
            seen.add(x)
            orb.append(x)
            x = sigma.vertex_perm[x]
        out.append(orb)
    return out


def fdtc(graph, metric, rel, signs: dict, ell=1) -> dict:
    """Fractional Dehn twist coefficient per cylinder face, keyed by smallest dart."""
    res = check_signed_tat(graph, metric, rel, signs, ell)
    if not res.holds:
        raise PropertyDoesNotHold("signed tete-a-tete property fails", res)
    ell = as_fraction(ell)
    afaces = a_face_keys(graph, rel)
    out = {}
    for f in graph.faces():
        k = face_key(f)
        if k in afaces:
            continue
        out[k] = signs.get(k, 0) * ell / face_length(f, metric)
    return out


def power_tat(graph, metric, m: int):
    if m <= 0:
        raise ValueError("power must be positive")
    return graph, scale_metric(metric, Fraction(1, m))
