"""Print the twist data of the two worked mixed examples and a few variants."""
from fractions import Fraction

from tatgraph.assembly import ChildSpec, MixedSpec, example_thm_spec, non_regular_example, realize_mixed
from tatgraph.mixed import check_mixed_tat, twist_summary
from tatgraph.periodic import BoundaryOrbit as B, OrbitSpec
from tatgraph.ribbon import surface_invariants

TORUS = OrbitSpec(1, 1, [B(0, 0, 0)])


def cases():
    yield "non-regular", non_regular_example()
    yield "example-thm", realize_mixed(example_thm_spec())
    root3 = OrbitSpec(0, 3, [B(Fraction(1, 3), 1, 2)], [1, 1], marked=1)
    for screw in (Fraction(-1), Fraction(-2)):
        yield f"order-3 root, screw {screw}", realize_mixed(MixedSpec(root3, [ChildSpec(TORUS, screw, 3)]))
    root2 = OrbitSpec(0, 2, [B(Fraction(1, 2), 1, 1)], [1, 1, 1], marked=1)
    mid = OrbitSpec(1, 1, [B(0, 0, 0)], marked=1)
    chain = MixedSpec(root2, [ChildSpec(mid, Fraction(-1), 2, [ChildSpec(TORUS, Fraction(-1), 2)])])
    yield "depth-2 chain", realize_mixed(chain)


def main():
    for name, (fg, delta) in cases():
        res = check_mixed_tat(fg, delta)
        s = twist_summary(fg, delta)
        inv = surface_invariants(fg.graph, fg.rel)
        lengths = [sorted(set(delta.resolve(fg, i).values())) for i in range(fg.depth + 1)]
        print(f"== {name}")
        print(f"   {res.verdict_line()}; genus {inv.genus}, boundaries {inv.boundaries}, edges {len(fg.graph.edges)}")
        print("   walk lengths per level: " + "; ".join(" ".join(map(str, v)) for v in lengths))
        print("   orbit sizes: " + " ".join(str(lp.alphas) for lp in s.levels))
        print("   screws: " + " ".join(f"L{e.level}:{e.value}" for e in s.screws))
        print(f"   dual graph: {len(s.dual.vertices)} vertices, {len(s.dual.edges)} edges, "
              f"tree={'yes' if s.dual.is_tree else 'no'}")
        print("   outer coefficients: " + " ".join(str(v) for v in s.fdtc0.values()))


if __name__ == "__main__":
    main()
