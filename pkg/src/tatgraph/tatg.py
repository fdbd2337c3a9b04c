"""TATG v1: a line-oriented text format for metric ribbon graphs.

    tatg 1
    name k23
    vertex a1: 5 3 1
    edge e1: len 1/2
    relative A1: +e7 +e9          (``relative A1 @1: ...`` puts the circle in level 1)
    sign F2 = -
    level 1: e3 e4
    delta 1 @e3 = 1/6
    [orbit-spec root]
    genus 0
    ...

Lengths are fractions in units of pi.  ``serialize`` writes the canonical
form; parsing a canonical file and serializing it gives the same bytes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .mixed import DeltaMap, FilteredGraph
from .ribbon import RelativeStructure, RibbonGraph, RibbonError, edge_of


class TatgError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class TatgSyntaxError(TatgError):
    pass


class UnknownId(TatgError):
    pass


class DuplicateId(TatgError):
    pass


class NonPositiveLength(TatgError):
    pass


_FRAC = re.compile(r"^-?\d+(/\d+)?$")
_NAME = re.compile(r"^[A-Za-z_][\w.]*$")


def parse_fraction(tok: str, line=None) -> Fraction:
    if not _FRAC.match(tok):
        raise TatgSyntaxError(f"expected a fraction, got {tok!r}", line)
    if "/" in tok and int(tok.split("/")[1]) == 0:
        raise TatgSyntaxError(f"zero denominator in {tok!r}", line)
    return Fraction(tok)


def fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _edge_id(tok: str, line) -> int:
    m = re.match(r"^e(\d+)$", tok)
    if not m:
        raise TatgSyntaxError(f"expected an edge id like e3, got {tok!r}", line)
    return int(m.group(1))


@dataclass
class SpecSection:
    name: str
    entries: list = field(default_factory=list)     # (key, value string) in file order

    def get(self, key, default=None):
        vals = [v for k, v in self.entries if k == key]
        return vals[-1] if vals else default

    def all(self, key):
        return [v for k, v in self.entries if k == key]


SPEC_KEYS = ("parent", "genus", "order", "boundary", "branch", "handles", "marked", "eps",
             "screw", "alpha")


@dataclass
class TatgDocument:
    graph: RibbonGraph | None
    metric: dict
    rel: RelativeStructure = field(default_factory=RelativeStructure.empty)
    rel_level: dict = field(default_factory=dict)
    signs: dict = field(default_factory=dict)
    levels: list = field(default_factory=list)
    delta: DeltaMap = field(default_factory=DeltaMap)
    name: str | None = None
    specs: list = field(default_factory=list)

    def filtered(self) -> FilteredGraph:
        return FilteredGraph(self.graph, self.metric, self.rel,
                             [frozenset(s) for s in self.levels], dict(self.rel_level))

    def mixed_delta(self, ell=1) -> DeltaMap:
        """The document's lengths, with level 0 defaulting to ``ell``."""
        d = DeltaMap({i: dict(v) for i, v in self.delta.values.items()})
        if not d.values.get(0):
            for comp in self.graph.components():
                d.set(0, comp[0], ell)
        return d


def parse(text: str) -> TatgDocument:
    lines = text.split("\n")
    vertices, vnames = [], []
    metric: dict[int, Fraction] = {}
    edge_line: dict[int, int] = {}
    rel_raw, rel_level = [], {}
    sign_raw, level_raw, delta_raw = [], {}, []
    specs: list[SpecSection] = []
    name = None
    seen_header = False
    current = None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if line != "tatg 1":
                raise TatgSyntaxError("first line must be 'tatg 1'", no)
            seen_header = True
            continue
        m = re.match(r"^\[orbit-spec\s+(\S+)\]$", line)
        if m:
            if any(s.name == m.group(1) for s in specs):
                raise DuplicateId(f"orbit-spec {m.group(1)} declared twice", no)
            current = SpecSection(m.group(1))
            specs.append(current)
            continue
        if current is not None:
            key, _, val = line.partition(" ")
            if key not in SPEC_KEYS:
                raise TatgSyntaxError(f"unknown orbit-spec key {key!r}", no)
            current.entries.append((key, val.strip()))
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "name":
            name = rest
        elif head == "vertex":
            m = re.match(r"^(\S+):\s*(.*)$", rest)
            if not m or not _NAME.match(m.group(1)):
                raise TatgSyntaxError("expected 'vertex NAME: darts'", no)
            if m.group(1) in vnames:
                raise DuplicateId(f"vertex {m.group(1)} declared twice", no)
            toks = m.group(2).split()
            if not toks or not all(t.isdigit() and int(t) > 0 for t in toks):
                raise TatgSyntaxError("vertex darts must be positive integers", no)
            vnames.append(m.group(1))
            vertices.append(([int(t) for t in toks], no))
        elif head == "edge":
            m = re.match(r"^(e\d+):\s*len\s+(\S+)$", rest)
            if not m:
                raise TatgSyntaxError("expected 'edge eK: len P/Q'", no)
            e = _edge_id(m.group(1), no)
            if e in metric:
                raise DuplicateId(f"edge e{e} declared twice", no)
            v = parse_fraction(m.group(2), no)
            if v <= 0:
                raise NonPositiveLength(f"edge e{e} has length {fmt(v)}", no)
            metric[e] = v
            edge_line[e] = no
        elif head == "relative":
            m = re.match(r"^(\S+?)(?:\s+@(\d+))?:\s*(.*)$", rest)
            if not m or not _NAME.match(m.group(1)):
                raise TatgSyntaxError("expected 'relative NAME: +eK -eJ ...'", no)
            if any(r[0] == m.group(1) for r in rel_raw):
                raise DuplicateId(f"relative circle {m.group(1)} declared twice", no)
            darts = []
            for t in m.group(3).split():
                if t[:1] not in "+-" or len(t) < 2:
                    raise TatgSyntaxError(f"relative edges need a sign, got {t!r}", no)
                e = _edge_id(t[1:], no)
                darts.append(2 * e - 1 if t[0] == "+" else 2 * e)
            if not darts:
                raise TatgSyntaxError("relative circle is empty", no)
            rel_raw.append((m.group(1), tuple(darts), no))
            if m.group(2):
                rel_level[m.group(1)] = int(m.group(2))
        elif head == "sign":
            m = re.match(r"^F(\d+)\s*=\s*([+\-0])$", rest)
            if not m:
                raise TatgSyntaxError("expected 'sign FK = +|-|0'", no)
            sign_raw.append((int(m.group(1)), {"+": 1, "-": -1, "0": 0}[m.group(2)], no))
        elif head == "level":
            m = re.match(r"^(\d+):\s*(.*)$", rest)
            if not m or int(m.group(1)) < 1:
                raise TatgSyntaxError("expected 'level I: eK ...' with I >= 1", no)
            i = int(m.group(1))
            if i in level_raw:
                raise DuplicateId(f"level {i} declared twice", no)
            level_raw[i] = ([_edge_id(t, no) for t in m.group(2).split()], no)
        elif head == "delta":
            m = re.match(r"^(\d+)\s+@(e\d+)\s*=\s*(\S+)$", rest)
            if not m:
                raise TatgSyntaxError("expected 'delta I @eK = P/Q'", no)
            v = parse_fraction(m.group(3), no)
            if v < 0:
                raise NonPositiveLength(f"walk length {fmt(v)} is negative", no)
            delta_raw.append((int(m.group(1)), _edge_id(m.group(2), no), v, no))
        else:
            raise TatgSyntaxError(f"unknown directive {head!r}", no)
    if not seen_header:
        raise TatgSyntaxError("empty document", 1)
    graph = None
    if vertices:
        for cyc, no in vertices:
            for d in cyc:
                if edge_of(d) not in metric:
                    raise UnknownId(f"dart {d} belongs to undeclared edge e{edge_of(d)}", no)
        try:
            graph = RibbonGraph([c for c, _ in vertices], vnames)
        except RibbonError as exc:
            raise TatgSyntaxError(str(exc), vertices[0][1]) from None
        for e, no in edge_line.items():
            if 2 * e - 1 not in graph.nu:
                raise UnknownId(f"edge e{e} does not appear at any vertex", no)
    elif metric:
        raise TatgSyntaxError("edges declared without vertices", min(edge_line.values()))
    known = set(metric)
    for nm, darts, no in rel_raw:
        for d in darts:
            if edge_of(d) not in known:
                raise UnknownId(f"relative circle {nm} uses undeclared edge e{edge_of(d)}", no)
    rel = RelativeStructure(tuple((n, d) for n, d, _ in rel_raw))
    signs = {}
    if sign_raw:
        keys = {min(f) for f in graph.faces()} if graph else set()
        for k, s, no in sign_raw:
            if k not in keys:
                raise UnknownId(f"no face F{k}", no)
            if k in signs:
                raise DuplicateId(f"sign for F{k} given twice", no)
            signs[k] = s
    levels = []
    if level_raw:
        if sorted(level_raw) != list(range(1, len(level_raw) + 1)):
            raise TatgSyntaxError("levels must be numbered 1, 2, ... without gaps",
                                  min(no for _, no in level_raw.values()))
        for i in range(1, len(level_raw) + 1):
            es, no = level_raw[i]
            for e in es:
                if e not in known:
                    raise UnknownId(f"level {i} names undeclared edge e{e}", no)
            if len(set(es)) != len(es):
                raise DuplicateId(f"level {i} lists an edge twice", no)
            levels.append(frozenset(es))
    delta = DeltaMap()
    for i, e, v, no in delta_raw:
        if e not in known:
            raise UnknownId(f"delta names undeclared edge e{e}", no)
        if i > len(levels):
            raise UnknownId(f"delta for level {i} but only {len(levels)} levels", no)
        if e in delta.values.get(i, {}):
            raise DuplicateId(f"delta {i} @e{e} given twice", no)
        delta.set(i, e, v)
    return TatgDocument(graph, metric, rel, rel_level, signs, levels, delta, name, specs)


def serialize(doc: TatgDocument) -> str:
    out = ["tatg 1"]
    if doc.name:
        out.append(f"name {doc.name}")
    g = doc.graph
    if g is not None:
        for nm, cyc in zip(g.names, g.vertices):
            out.append(f"vertex {nm}: " + " ".join(map(str, cyc)))
        for e in sorted(doc.metric):
            out.append(f"edge e{e}: len {fmt(doc.metric[e])}")
    for nm, cyc in doc.rel.components:
        lv = doc.rel_level.get(nm, 0)
        tag = f" @{lv}" if lv else ""
        out.append(f"relative {nm}{tag}: " + " ".join(
            ("+" if d % 2 else "-") + f"e{edge_of(d)}" for d in cyc))
    for k in sorted(doc.signs):
        out.append(f"sign F{k} = " + {1: "+", -1: "-", 0: "0"}[doc.signs[k]])
    for i, s in enumerate(doc.levels, 1):
        out.append(f"level {i}: " + " ".join(f"e{e}" for e in sorted(s)))
    for i in sorted(doc.delta.values):
        for e in sorted(doc.delta.values[i]):
            out.append(f"delta {i} @e{e} = {fmt(doc.delta.values[i][e])}")
    for sec in doc.specs:
        out.append(f"[orbit-spec {sec.name}]")
        for k, v in sec.entries:
            out.append(f"{k} {v}".rstrip())
    return "\n".join(out) + "\n"


def document_from(fg: FilteredGraph, delta: DeltaMap | None = None, signs=None, name=None) -> TatgDocument:
    return TatgDocument(fg.graph, dict(fg.metric), fg.rel, dict(fg.rel_level), dict(signs or {}),
                        [frozenset(s) for s in fg.levels], delta or DeltaMap(), name)


def graph_document(graph, metric, rel=None, signs=None, name=None) -> TatgDocument:
    return TatgDocument(graph, dict(metric), rel or RelativeStructure.empty(), {},
                        dict(signs or {}), [], DeltaMap(), name)


# ---------------------------------------------------------------------------
# orbit-spec sections

def _sign(tok, where):
    table = {"+": 1, "-": -1, "0": 0}
    if tok not in table:
        raise TatgSyntaxError(f"{where}: sign must be +, - or 0")
    return table[tok]


def spec_from_section(sec: SpecSection):
    from .periodic import BoundaryOrbit, OrbitSpec

    def integer(key, default=None):
        v = sec.get(key)
        if v is None:
            if default is None:
                raise TatgSyntaxError(f"orbit-spec {sec.name}: missing {key}")
            return default
        if not re.match(r"^-?\d+$", v):
            raise TatgSyntaxError(f"orbit-spec {sec.name}: {key} must be an integer")
        return int(v)

    bounds = []
    for b in sec.all("boundary"):
        m = re.match(r"^rot\s+(\S+)\s+sign\s+(\S+)(?:\s+voltage\s+(-?\d+))?$", b)
        if not m:
            raise TatgSyntaxError(f"orbit-spec {sec.name}: expected 'boundary rot R sign S [voltage W]'")
        bounds.append(BoundaryOrbit(parse_fraction(m.group(1)), _sign(m.group(2), sec.name),
                                    int(m.group(3)) if m.group(3) else 1))
    ints = lambda key: [int(t) for t in (sec.get(key) or "").split()]
    handles = ints("handles") if sec.get("handles") is not None else None
    return OrbitSpec(integer("genus"), integer("order"), bounds, ints("branch"), handles,
                     integer("marked", 0))


def spec_tree(doc: TatgDocument):
    """MixedSpec built from the orbit-spec sections (children name a parent)."""
    from .assembly import ChildSpec, MixedSpec

    if not doc.specs:
        raise TatgSyntaxError("no [orbit-spec] sections")
    roots = [s for s in doc.specs if s.get("parent") is None]
    if len(roots) != 1:
        raise TatgSyntaxError("exactly one orbit-spec must have no parent")
    names = {s.name for s in doc.specs}
    nodes = {}
    for s in doc.specs:
        p = s.get("parent")
        if p is not None and p not in names:
            raise UnknownId(f"orbit-spec {s.name}: unknown parent {p}")
        eps = parse_fraction(s.get("eps")) if s.get("eps") else None
        if p is None:
            nodes[s.name] = MixedSpec(spec_from_section(s), [], eps)
        else:
            if s.get("screw") is None or s.get("alpha") is None:
                raise TatgSyntaxError(f"orbit-spec {s.name}: children need screw and alpha")
            nodes[s.name] = ChildSpec(spec_from_section(s), parse_fraction(s.get("screw")),
                                      int(s.get("alpha")), [], eps)
    for s in doc.specs:
        p = s.get("parent")
        if p is not None:
            nodes[p].children.append(nodes[s.name])
    return nodes[roots[0].name]
