"""Realize a suite of orbit specs and tabulate the covers.

For each spec prints genus, boundary count, edge count, deck shift and the
coefficient read back from every lifted boundary face.
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from test_periodic import SUITE  # noqa: E402
from tatgraph.periodic import realize_periodic  # noqa: E402
from tatgraph.ribbon import surface_invariants  # noqa: E402
from tatgraph.tat import fdtc  # noqa: E402


def main():
    print(f"{'spec':24} {'g':>2} {'b':>3} {'E':>4} {'shift':>5}  coefficients")
    for name, spec in SUITE.items():
        real = realize_periodic(spec)
        inv = surface_invariants(real.graph)
        coeffs = fdtc(real.graph, real.metric, None, real.signs)
        per_boundary = ["/".join(sorted({str(coeffs[k]) for k in keys})) for keys in real.boundary_faces]
        print(f"{name:24} {inv.genus:>2} {inv.boundaries:>3} {len(real.graph.edges):>4} "
              f"{real.deck_shift:>5}  {' '.join(per_boundary)}")


if __name__ == "__main__":
    main()
