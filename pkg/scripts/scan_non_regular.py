"""Scan gluing offsets for the three-circle tripod glued onto K_{3,3}.

Every circle of the tripod is glued to one face of K_{3,3} (edge length
1/12) at an offset on the 1/12 grid.  Prints each offset triple for which
the staged walks (lengths 1 and 1/6) have the mixed property, with the
resulting orbit sizes and screw numbers.
"""
import argparse
import itertools
from fractions import Fraction

from tatgraph.assembly import glue, tripod_with_circles
from tatgraph.constructors import make_kpq
from tatgraph.mixed import DeltaMap, FilteredGraph, check_mixed_tat, twist_summary


def scan(all_orders=False):
    bg, bm, brel = tripod_with_circles()
    base = FilteredGraph(bg, bm, brel, [], {n: 0 for n in brel.names()})
    bdelta = DeltaMap({0: {1: Fraction(1)}})
    kg, km = make_kpq(3, 3, Fraction(1, 12))
    child = FilteredGraph(kg, km)
    cdelta = DeltaMap({0: {1: Fraction(1, 6)}})
    faces = [min(f) for f in kg.faces()]
    grid = [Fraction(k, 12) for k in range(6)]
    orders = itertools.permutations(faces) if all_orders else [tuple(faces)]
    for order in orders:
        for thetas in itertools.product(grid, repeat=3):
            pairs = list(zip(brel.names(), order, thetas))
            fg, delta = glue(base, bdelta, child, cdelta, pairs, 1)
            if check_mixed_tat(fg, delta).holds:
                yield order, thetas, twist_summary(fg, delta)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--all-orders", action="store_true", help="also permute the faces")
    args = ap.parse_args()
    hits = 0
    for order, thetas, s in scan(args.all_orders):
        hits += 1
        alphas = [lp.alphas for lp in s.levels]
        screws = " ".join(str(e.value) for e in s.screws)
        print(f"faces={order} thetas={' '.join(map(str, thetas))} alphas={alphas} screws={screws}")
    print(f"hits={hits}")


if __name__ == "__main__":
    main()
