"""Regenerate the graph files in corpus/ from the library constructors.

With --check, compare against the files on disk instead of writing.
"""
import argparse
import sys
from fractions import Fraction
from pathlib import Path

from tatgraph import tatg
from tatgraph.assembly import example_thm_spec, non_regular_example, realize_mixed
from tatgraph.constructors import make_circle, make_kpq
from tatgraph.ribbon import RibbonGraph

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def documents():
    yield "k22", tatg.graph_document(*make_kpq(2, 2), name="k22")
    yield "k23", tatg.graph_document(*make_kpq(2, 3), name="k23")
    yield "k33_twelfth", tatg.graph_document(*make_kpq(3, 3, Fraction(1, 12)), name="k33")
    yield "circle2", tatg.graph_document(*make_circle(2), name="circle")
    # both faces run once along e1 e2 e4 e5; the second also runs twice along e3
    g = RibbonGraph([[1, 3, 7, 5, 9], [2, 4, 6], [8, 10]], ["v1", "v2", "v3"])
    yield "counterexample", tatg.graph_document(g, {e: Fraction(1) for e in g.edges}, name="counterexample")
    fg, d = non_regular_example()
    yield "non_regular2", tatg.document_from(fg, d, name="non_regular")
    fg, d = realize_mixed(example_thm_spec())
    yield "example_thm", tatg.document_from(fg, d, name="example_thm")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    stale = 0
    for stem, doc in documents():
        path = CORPUS / f"{stem}.tatg"
        text = tatg.serialize(doc)
        if args.check:
            same = path.exists() and path.read_text() == text
            stale += not same
            print(f"{'ok   ' if same else 'STALE'} {path.name}")
        else:
            path.write_text(text)
            print(f"wrote {path.name}")
    sys.exit(1 if stale else 0)


if __name__ == "__main__":
    main()
