"""Command line front end: ``tatg SUBCOMMAND ...``.

Exit status 0 means success or that the property holds, 1 that it fails,
2 that the input could not be used.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import assembly, constructors, mixed, periodic, tat, tatg
from .ribbon import RibbonError, edge_of, surface_invariants, validate
from .tatg import fmt
from .walks import PointOnGraph, WalkError, face_length, safe_walk


class InputError(Exception):
    pass


def _color(line: str, ok: bool) -> str:
    mode = os.environ.get("TATG_COLOR", "auto")
    if mode == "never" or not sys.stdout.isatty():
        return line
    return f"\033[{32 if ok else 31}m{line}\033[0m"


def _read(path: str) -> tatg.TatgDocument:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return tatg.parse(text)


def _need_graph(doc):
    if doc.graph is None:
        raise InputError("document has no graph")
    return doc


def _frac(s: str) -> Fraction:
    try:
        return tatg.parse_fraction(s)
    except tatg.TatgError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text: str):
    sys.stdout.write(text)


# ---------------------------------------------------------------------------

def cmd_validate(a):
    doc = _need_graph(_read(a.file))
    rep = validate(doc.graph, doc.rel)
    if rep.ok and doc.levels:
        try:
            doc.filtered().validate()
        except (mixed.MixedError, RibbonError) as exc:
            print(_color(f"INVALID {type(exc).__name__}: {exc}", False))
            return 1
    if not rep.ok:
        err = rep.error
        print(_color(f"INVALID {type(err).__name__}: {err}", False))
        return 1
    print(_color("VALID", True))
    return 0


def cmd_invariants(a):
    doc = _need_graph(_read(a.file))
    inv = surface_invariants(doc.graph, doc.rel)
    for f, is_a in zip(inv.faces, inv.a_faces):
        tag = " relative" if is_a else ""
        print(f"F{min(f)}: {' '.join(map(str, f))} len {fmt(face_length(f, doc.metric))}{tag}")
    print(f"INVARIANTS V={inv.vertices} E={inv.edges} chi={inv.chi} b={inv.boundaries} g={inv.genus}")
    return 0


def cmd_check(a):
    doc = _need_graph(_read(a.file))
    if a.mixed:
        res = mixed.check_mixed_tat(doc.filtered(), doc.mixed_delta(a.ell))
    elif doc.signs:
        res = tat.check_signed_tat(doc.graph, doc.metric, doc.rel, doc.signs, a.ell)
    else:
        res = tat.check_tat(doc.graph, doc.metric, doc.rel, a.ell)
    print(_color(res.verdict_line(), res.holds))
    return 0 if res.holds else 1


def _fail_line(exc):
    res = getattr(exc, "result", None)
    if res is not None and getattr(res, "witness", None):
        return res.verdict_line()
    return f"FAILED {exc}"


def cmd_sigma(a):
    doc = _need_graph(_read(a.file))
    try:
        sig = tat.compute_sigma(doc.graph, doc.metric, doc.rel, doc.signs or None, a.ell)
    except tat.PropertyDoesNotHold as exc:
        print(_color(_fail_line(exc), False))
        return 1
    for orb in tat.vertex_orbits(sig):
        print("ORBIT " + " ".join(doc.graph.names[v] for v in orb))
    if sig.vertex_perm is None:
        print("vertices are not permuted (a vertex moves to an edge interior)")
    print(f"SIGMA order={sig.order}")
    return 0


def cmd_fdtc(a):
    doc = _need_graph(_read(a.file))
    signs = doc.signs or {min(f): 1 for f in doc.graph.faces()
                          if min(f) not in tat.a_face_keys(doc.graph, doc.rel)}
    try:
        out = tat.fdtc(doc.graph, doc.metric, doc.rel, signs, a.ell)
    except tat.PropertyDoesNotHold as exc:
        print(_color(_fail_line(exc), False))
        return 1
    for k in sorted(out):
        print(f"FDTC F{k} = {fmt(out[k])}")
    return 0


def _mixed_summary(a):
    doc = _need_graph(_read(a.file))
    return mixed.twist_summary(doc.filtered(), doc.mixed_delta(a.ell))


def cmd_screws(a):
    try:
        s = _mixed_summary(a)
    except tat.PropertyDoesNotHold as exc:
        print(_color(_fail_line(exc), False))
        return 1
    for lp in s.levels:
        for j, orb in enumerate(lp.orbits, 1):
            print(f"level {lp.level} orbit {j}: " + " ".join(f"F{k}" for k in orb)
                  + f" alpha={len(orb)}")
    for e in s.screws:
        print(f"SCREW level={e.level} orbit={e.orbit} value={fmt(e.value)}")
    return 0


def cmd_dual(a):
    try:
        s = _mixed_summary(a)
    except tat.PropertyDoesNotHold as exc:
        print(_color(_fail_line(exc), False))
        return 1
    d = s.dual
    for v in d.vertices:
        print(f"node L{v[0]}.{v[1] + 1}")
    for x, y, k in d.edges:
        print(f"edge L{x[0]}.{x[1] + 1} -- L{y[0]}.{y[1] + 1} via F{k}")
    print(f"DUAL vertices={len(d.vertices)} edges={len(d.edges)} tree={'yes' if d.is_tree else 'no'}")
    return 0


def cmd_walk(a):
    doc = _need_graph(_read(a.file))
    if a.dart not in doc.graph.nu:
        raise InputError(f"unknown dart {a.dart}")
    p = PointOnGraph(a.dart, a.offset)
    if a.mixed:
        tr = mixed.mixed_safe_walk(doc.filtered(), doc.mixed_delta(), p)
        for lv, st in zip(tr.levels, tr.stages):
            for d, t in st.steps:
                print(f"stage {lv} dart {d} at {fmt(t)}")
        end = tr.end
    else:
        tr = safe_walk(doc.graph, doc.metric, p, {"+": 1, "-": -1, "0": 0}[a.sign], a.length)
        for d, t in tr.steps:
            print(f"dart {d} at {fmt(t)}")
        end = tr.end
    c = end.canonical(doc.metric)
    print(f"END dart={end.dart} offset={fmt(end.offset)} point=e{edge_of(c.dart)}:{fmt(c.offset if c.dart % 2 else doc.metric[edge_of(c.dart)] - c.offset)}")
    return 0


def cmd_gen(a):
    if a.kind == "kpq":
        if len(a.args) != 2:
            raise InputError("gen kpq needs P and Q")
        g, m = constructors.make_kpq(int(a.args[0]), int(a.args[1]), a.len)
        doc = tatg.graph_document(g, m, name=f"k{a.args[0]}{a.args[1]}")
    elif a.kind == "circle":
        if len(a.args) != 1:
            raise InputError("gen circle needs a total length")
        g, m = constructors.make_circle(_frac(a.args[0]))
        doc = tatg.graph_document(g, m, name="circle")
    elif a.kind == "non-regular":
        fg, d = assembly.non_regular_example()
        doc = tatg.document_from(fg, d, name="non_regular")
    else:
        fg, d = assembly.realize_mixed(assembly.example_thm_spec())
        doc = tatg.document_from(fg, d, name="example_thm")
    _emit(tatg.serialize(doc))
    return 0


def cmd_blowup(a):
    doc = _need_graph(_read(a.file))
    v = a.vertex
    if v not in doc.graph.names:
        raise InputError(f"unknown vertex {v}")
    signs = doc.signs or None
    orbit = constructors.sigma_orbit(doc.graph, doc.metric, doc.rel, v, signs)
    eps = a.eps if a.eps is not None else constructors.min_incident_length(doc.graph, doc.metric, orbit) / 4
    g, m, rel = constructors.blow_up_vertices(doc.graph, doc.metric, doc.rel, orbit, eps)
    new_signs = {}
    if doc.signs:
        idx, faces = g.face_index(), g.faces()
        new_signs = {min(faces[idx[k]]): s for k, s in doc.signs.items()}
    _emit(tatg.serialize(tatg.graph_document(g, m, rel, new_signs, doc.name)))
    return 0


def cmd_fit(a):
    doc = _need_graph(_read(a.file))
    targets = {}
    for item in a.rot:
        key, _, val = item.partition("=")
        if not key.startswith("F") or not key[1:].isdigit() or not val:
            raise InputError(f"--rot expects FK=R, got {item!r}")
        targets[int(key[1:])] = _frac(val)
    keys = {min(f) for f in doc.graph.faces()}
    for k in targets:
        if k not in keys:
            raise InputError(f"no face F{k}")
    signs = dict(doc.signs) or {k: 1 for k in targets}
    res = constructors.fit_metric(doc.graph, doc.rel, signs, targets)
    if res.kind == "infeasible":
        cert = res.certificate
        for k, y in zip(res.faces, cert.multipliers):
            if y:
                print(f"multiplier F{k} = {fmt(y)}")
        print("weights " + " ".join(f"e{e}={fmt(w)}" for e, w in zip(res.edges, cert.weights) if w))
        print(f"value {fmt(cert.value)}")
        zero = ",".join(f"e{e}" for e in res.forced_zero_edges) or "none"
        print(_color(f"FIT INFEASIBLE zero={zero}", False))
        return 1
    if res.kind == "not_tat":
        e, off = res.witness
        print(_color(f"FIT NOT TAT witness=e{e}:{fmt(off)}", False))
        return 1
    _emit(tatg.serialize(tatg.graph_document(doc.graph, res.metric, doc.rel, signs, doc.name)))
    print("FIT OK")
    return 0


def cmd_realize(a):
    doc = _read(a.file)
    tree = tatg.spec_tree(doc)
    if not tree.children:
        real = periodic.realize_periodic(tree.root)
        out = tatg.graph_document(real.graph, real.metric, None, real.signs, doc.name)
    else:
        fg, d = assembly.realize_mixed(tree)
        out = tatg.document_from(fg, d, name=doc.name)
    _emit(tatg.serialize(out))
    return 0


def cmd_attach(a):
    doc = _need_graph(_read(a.file))
    pdoc = _need_graph(_read(a.piece))
    piece = assembly.Piece(pdoc.filtered(), pdoc.delta, a.face)
    fg, d = assembly.attach_level(doc.filtered(), doc.mixed_delta(), [(a.circle, piece, a.screw, a.alpha)])
    _emit(tatg.serialize(tatg.document_from(fg, d, name=doc.name)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tatg", description="metric ribbon graph tools")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="TATG file, or - for stdin")
        sp.set_defaults(fn=fn)
        return sp

    with_file("validate", cmd_validate, "check structural validity")
    with_file("invariants", cmd_invariants, "faces, Euler characteristic, genus")
    sp = with_file("check", cmd_check, "decide the walk property")
    sp.add_argument("--ell", type=_frac, default=Fraction(1))
    sp.add_argument("--mixed", action="store_true", help="use the filtration and its walk lengths")
    for name, fn in (("sigma", cmd_sigma), ("fdtc", cmd_fdtc)):
        sp = with_file(name, fn, f"{name} of the induced map")
        sp.add_argument("--ell", type=_frac, default=Fraction(1))
    for name, fn in (("screws", cmd_screws), ("dual", cmd_dual)):
        sp = with_file(name, fn, f"{name} of a filtered graph")
        sp.add_argument("--ell", type=_frac, default=Fraction(1), help="level-0 length if absent")
    sp = with_file("walk", cmd_walk, "trace a walk")
    sp.add_argument("--dart", type=int, required=True)
    sp.add_argument("--offset", type=_frac, required=True)
    sp.add_argument("--length", type=_frac, default=Fraction(1))
    sp.add_argument("--sign", choices=["+", "-", "0"], default="+")
    sp.add_argument("--mixed", action="store_true")
    sp = sub.add_parser("gen", help="generate a graph")
    sp.add_argument("kind", choices=["kpq", "circle", "non-regular", "example-thm"])
    sp.add_argument("args", nargs="*")
    sp.add_argument("--len", type=_frac, default=Fraction(1, 2))
    sp.set_defaults(fn=cmd_gen)
    sp = with_file("blowup", cmd_blowup, "blow up a vertex orbit")
    sp.add_argument("--vertex", required=True)
    sp.add_argument("--eps", type=_frac)
    sp = with_file("fit", cmd_fit, "fit a metric to target coefficients")
    sp.add_argument("--rot", action="append", default=[], metavar="FK=R")
    with_file("realize", cmd_realize, "realize orbit-spec sections")
    sp = with_file("attach", cmd_attach, "glue a piece onto a circle orbit")
    sp.add_argument("--piece", required=True)
    sp.add_argument("--circle", required=True)
    sp.add_argument("--face", type=int, required=True)
    sp.add_argument("--screw", type=_frac, required=True)
    sp.add_argument("--alpha", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except (InputError, tatg.TatgError, RibbonError, WalkError, constructors.ConstructionError,
            periodic.SpecError, mixed.MixedError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
