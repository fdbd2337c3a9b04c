"""Ribbon graphs as rotation systems on darts.

Darts come in reversal pairs: edge k owns darts 2k-1 and 2k.  The rotation
``nu`` sends a dart to the next dart counterclockwise around its tail vertex;
the face successor is ``succ(d) = nu(rev(d))``, so a face walk always turns
right.  Graphs may use any set of darts closed under reversal, which lets
induced subgraphs keep the ids of the ambient graph.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class RibbonError(ValueError):
    """Base class for structural problems with ribbon data."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class MalformedPermutation(RibbonError):
    pass


class DisconnectedGraph(RibbonError):
    pass


class UnivalentVertex(RibbonError):
    pass


class RelativeIncompatibility(RibbonError):
    pass


class NonIntegerGenus(RibbonError):
    pass


class EmptySubset(RibbonError):
    pass


def rev(d: int) -> int:
    return d + 1 if d % 2 else d - 1


def edge_of(d: int) -> int:
    return (d + 1) // 2


def darts_of(e: int) -> tuple[int, int]:
    return 2 * e - 1, 2 * e


class RibbonGraph:
    """Immutable rotation system.

    ``vertices`` is a sequence of counterclockwise dart cycles; vertex i has
    the name ``names[i]`` (defaults to ``v1, v2, ...``).
    """

    __slots__ = ("vertices", "names", "nu", "nu_inv", "vertex_of", "darts", "_faces")

    def __init__(self, vertices: Iterable[Sequence[int]], names: Sequence[str] | None = None):
        verts = tuple(tuple(int(d) for d in cyc) for cyc in vertices)
        if names is None:
            names = tuple(f"v{i + 1}" for i in range(len(verts)))
        if len(names) != len(verts):
            raise MalformedPermutation("vertex name count does not match rotation cycles")
        nu: dict[int, int] = {}
        vertex_of: dict[int, int] = {}
        for vi, cyc in enumerate(verts):
            if not cyc:
                raise MalformedPermutation(f"vertex {names[vi]} has no darts", names[vi])
            for j, d in enumerate(cyc):
                if d < 1:
                    raise MalformedPermutation(f"dart {d} is not a positive integer", d)
                if d in nu:
                    raise MalformedPermutation(f"dart {d} appears twice in the rotation", d)
                nu[d] = cyc[(j + 1) % len(cyc)]
                vertex_of[d] = vi
        for d in nu:
            if rev(d) not in nu:
                raise MalformedPermutation(f"dart {rev(d)} (reverse of {d}) is missing", rev(d))
        self.vertices = verts
        self.names = tuple(names)
        self.nu = nu
        self.nu_inv = {b: a for a, b in nu.items()}
        self.vertex_of = vertex_of
        self.darts = tuple(sorted(nu))
        self._faces = None

    # basic structure
    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(sorted({edge_of(d) for d in self.darts}))

    @property
    def num_edges(self) -> int:
        return len(self.darts) // 2

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def succ(self, d: int) -> int:
        return self.nu[rev(d)]

    def pred(self, d: int) -> int:
        return rev(self.nu_inv[d])

    def tail(self, d: int) -> int:
        return self.vertex_of[d]

    def head(self, d: int) -> int:
        return self.vertex_of[rev(d)]

    def valency(self, v: int) -> int:
        return len(self.vertices[v])

    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Cycles of the face successor, each starting at its smallest dart,
        listed by increasing smallest dart."""
        if self._faces is None:
            seen = set()
            out = []
            for d in self.darts:
                if d in seen:
                    continue
                cyc = []
                x = d
                while x not in seen:
                    seen.add(x)
                    cyc.append(x)
                    x = self.nu[rev(x)]
                out.append(tuple(cyc))
            self._faces = tuple(out)
        return self._faces

    def face_index(self) -> dict[int, int]:
        return {d: i for i, f in enumerate(self.faces()) for d in f}

    def components(self) -> list[tuple[int, ...]]:
        """Connected components as sorted edge tuples."""
        parent = {e: e for e in self.edges}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for cyc in self.vertices:
            r = find(edge_of(cyc[0]))
            for d in cyc[1:]:
                s = find(edge_of(d))
                if s != r:
                    parent[s] = r
        groups: dict[int, list[int]] = {}
        for e in self.edges:
            groups.setdefault(find(e), []).append(e)
        return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def __eq__(self, other):
        return isinstance(other, RibbonGraph) and self.nu == other.nu

    def __hash__(self):
        return hash(tuple(sorted(self.nu.items())))

    def __repr__(self):
        return f"RibbonGraph(V={self.num_vertices}, E={self.num_edges})"


@dataclass(frozen=True)
class RelativeStructure:
    """Oriented circles of the relative boundary.

    Each component is ``(name, darts)`` with the darts listed in the
    orientation of the circle, so consecutive darts meet head to tail.
    """

    components: tuple[tuple[str, tuple[int, ...]], ...] = ()

    @classmethod
    def empty(cls) -> "RelativeStructure":
        return cls(())

    @property
    def orientation_darts(self) -> frozenset[int]:
        return frozenset(d for _, c in self.components for d in c)

    @property
    def edges(self) -> frozenset[int]:
        return frozenset(edge_of(d) for d in self.orientation_darts)

    def names(self) -> list[str]:
        return [n for n, _ in self.components]

    def component(self, name: str) -> tuple[int, ...]:
        for n, c in self.components:
            if n == name:
                return c
        raise KeyError(name)

    def __bool__(self):
        return bool(self.components)


@dataclass
class ValidationReport:
    ok: bool
    error: RibbonError | None = None

    def raise_if_failed(self):
        if self.error is not None:
            raise self.error


@dataclass(frozen=True)
class SurfaceInvariants:
    vertices: int
    edges: int
    chi: int
    boundaries: int
    genus: int
    faces: tuple[tuple[int, ...], ...]
    a_faces: tuple[bool, ...] = field(default=())

    @property
    def cylinder_faces(self) -> list[tuple[int, ...]]:
        return [f for f, a in zip(self.faces, self.a_faces) if not a]


def _check_relative(g: RibbonGraph, rel: RelativeStructure):
    used: set[int] = set()
    for name, cyc in rel.components:
        if not cyc:
            raise RelativeIncompatibility(f"relative component {name} is empty", name)
        seen_vertices = set()
        for i, d in enumerate(cyc):
            if d not in g.nu:
                raise RelativeIncompatibility(f"relative component {name} uses unknown dart {d}", name)
            if edge_of(d) in used:
                raise RelativeIncompatibility(f"edge e{edge_of(d)} appears twice in the relative structure", name)
            used.add(edge_of(d))
            nxt = cyc[(i + 1) % len(cyc)]
            v = g.head(d)
            if g.tail(nxt) != v:
                raise RelativeIncompatibility(f"relative component {name} is not a closed cycle at dart {d}", g.names[v])
            if v in seen_vertices:
                raise RelativeIncompatibility(f"relative component {name} is not simple", g.names[v])
            seen_vertices.add(v)
            # arrival edge must come right after the departure edge counterclockwise
            if g.nu[nxt] != rev(d):
                raise RelativeIncompatibility(
                    f"relative edges are not extreme in the rotation at {g.names[v]}", g.names[v])
        back = [rev(d) for d in cyc]
        face = g.faces()[g.face_index()[back[0]]]
        if set(face) != set(back):
            raise RelativeIncompatibility(f"reversed darts of {name} do not form a face", name)


def validate(g: RibbonGraph, rel: RelativeStructure | None = None, *,
             allow_univalent: bool = False, allow_disconnected: bool = False) -> ValidationReport:
    try:
        if not g.darts:
            raise MalformedPermutation("graph has no darts")
        if not allow_disconnected and not g.is_connected():
            raise DisconnectedGraph("graph is disconnected", g.components()[1][0])
        if not allow_univalent:
            for vi, cyc in enumerate(g.vertices):
                if len(cyc) == 1:
                    raise UnivalentVertex(f"vertex {g.names[vi]} has valency 1", g.names[vi])
        if rel:
            _check_relative(g, rel)
        surface_invariants(g, rel)
    except RibbonError as exc:
        return ValidationReport(False, exc)
    return ValidationReport(True)


def surface_invariants(g: RibbonGraph, rel: RelativeStructure | None = None) -> SurfaceInvariants:
    faces = g.faces()
    v, e, b = g.num_vertices, g.num_edges, len(faces)
    chi = v - e
    ncomp = len(g.components())
    twice = 2 * ncomp - chi - b
    if twice % 2 or twice < 0:
        raise NonIntegerGenus(f"rotation data gives non-integer genus ({twice}/2)")
    back = {rev(d) for d in rel.orientation_darts} if rel else set()
    a_flags = tuple(bool(back) and set(f) <= back for f in faces)
    return SurfaceInvariants(v, e, chi, b, twice // 2, faces, a_flags)


def induced_subgraph_ribbon(g: RibbonGraph, edges: Iterable[int]) -> RibbonGraph:
    """Ribbon graph on an edge subset with the inherited cyclic orders."""
    keep = set()
    for e in edges:
        a, b = darts_of(e)
        if a not in g.nu:
            raise RibbonError(f"edge e{e} is not in the graph", e)
        keep.update((a, b))
    if not keep:
        raise EmptySubset("edge subset is empty")
    cycles, names = [], []
    for vi, cyc in enumerate(g.vertices):
        sub = tuple(d for d in cyc if d in keep)
        if sub:
            cycles.append(sub)
            names.append(g.names[vi])
    return RibbonGraph(cycles, names)


def relabel(g: RibbonGraph, dart_map: dict[int, int]) -> RibbonGraph:
    return RibbonGraph([[dart_map[d] for d in cyc] for cyc in g.vertices], g.names)


def ribbon_from_faces(faces: Iterable[Sequence[int]]) -> RibbonGraph:
    """Rotation system whose face cycles are the given dart cycles.

    Uses nu(x) = succ(rev(x)), which inverts succ = nu o rev.
    """
    succ = {}
    for f in faces:
        f = list(f)
        for i, d in enumerate(f):
            if d in succ:
                raise MalformedPermutation(f"dart {d} appears in two faces", d)
            succ[d] = f[(i + 1) % len(f)]
    nu = {x: succ[rev(x)] for x in succ}
    seen, cycles = set(), []
    for d in sorted(nu):
        if d in seen:
            continue
        cyc, x = [], d
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = nu[x]
        cycles.append(cyc)
    return RibbonGraph(cycles)
