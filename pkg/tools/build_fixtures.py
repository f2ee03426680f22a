"""Write the shipped fixture diagrams to src/mgd/data/fixtures.

Run from the repository root: python3 tools/build_fixtures.py
"""

import math
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path[:0] = [str(ROOT / "src"), str(ROOT / "tools")]

from sketch import Sketch  # noqa: E402

from mgd.diagram import CROSSING, MARKED, Diagram, Vertex, orientations  # noqa: E402
from mgd.invariants import (  # noqa: E402
    YES,
    invariant_report,
    is_admissible,
    sharp_count,
    simplify_classical,
    t_invariant,
)
from mgd.mgdfile import parse, serialize  # noqa: E402
from mgd.moves import FORWARD, REVERSE, closure, find_sites, shipped_catalog  # noqa: E402

OUT = ROOT / "src" / "mgd" / "data" / "fixtures"


def from_pd(entries, marked=()):
    """PD entries list four edge labels counterclockwise from the incoming
    under strand; entries in ``marked`` become marked vertices pairing
    slots 0,1 and 2,3 in the positive resolution."""
    vertices, edges, open_ends = {}, {}, {}
    for i, labels in enumerate(entries):
        v = f"x{i + 1}"
        vertices[v] = Vertex(MARKED, 0) if i in marked else Vertex(CROSSING, 1)
        for s, lab in enumerate(labels):
            if lab in open_ends:
                edges[f"e{lab}"] = (open_ends.pop(lab), (v, s))
            else:
                open_ends[lab] = (v, s)
    assert not open_ends
    return Diagram(vertices, edges).validate()


def circle_pts(cx, cy, r, phase, n=24):
    pts = [
        (cx + r * math.cos(phase + 2 * math.pi * i / n), cy + r * math.sin(phase + 2 * math.pi * i / n))
        for i in range(n)
    ]
    return pts + [pts[0]]


def layered(strands):
    """Closed drawing with every crossing taken by the lower-index strand."""
    probe = Sketch(strands, (0, 0))
    over = [(x, min(pa[0], pb[0])) for x, pa, pb in probe._points()]
    return parse(Sketch(strands, (0, 0), over=over).build()).validate()


# Greedy reduction of the closure of the 4-strand braid
# s2^-1 s3^-1 s1 s3 s2 s3 s1 s3 s2^-1 s2^-1 s3, found by a random scan of
# one-component closures whose bracket is that of the unknot.
CULPRIT = """\
mgd v1
vertex v2 crossing over=0,2
vertex v3 crossing over=0,2
vertex x0 crossing over=0,2
vertex x10 crossing over=1,3
vertex x5 crossing over=1,3
vertex x7 crossing over=1,3
vertex x8 crossing over=0,2
vertex x9 crossing over=0,2
edge e1 x0:3 x9:2
edge e10 v3:2 x0:2
edge e11 v3:3 x0:1
edge e14 x5:2 x7:3
edge e15 x5:1 x7:0
edge e18 x7:2 x8:0
edge e19 x10:0 x7:1
edge e2 x0:0 x10:2
edge e20 x8:2 x9:3
edge e21 x8:1 x9:0
edge e23 x10:3 x9:1
edge e3 v2:2 v3:1
edge e5 x10:1 x5:0
edge e7 v2:0 x5:3
edge e8 v2:1 x8:3
edge e9 v2:3 v3:0
outer v3:2
"""


def write(name, d, comment):
    OUT.mkdir(parents=True, exist_ok=True)
    head = "".join(f"# {line}\n" for line in comment.strip().splitlines())
    (OUT / f"{name}.mgd").write_text(head + serialize(d))


def random_admissible(seed):
    """Walk from the trivial one-marker diagram with moves of the unoriented
    generating set; every diagram met stays admissible."""
    cat = shipped_catalog(False)
    rules = cat.subset("S")
    rng = random.Random(seed)
    d = parse((OUT / "figure-eight-marked.mgd").read_text())
    for _ in range(60):
        moves = []
        for r in rules:
            for direction in (FORWARD, REVERSE):
                moves.extend(find_sites(d, r, direction))
        moves = [m for m in moves if len(m.result.vertices) <= 7]
        d = rng.choice(moves).result
        if len(d.marked()) == 2 and len(d.crossings()) >= 3 and any(True for _ in orientations(d)):
            return d
    raise RuntimeError("no suitable diagram; try another seed")


def main():
    empty = Diagram({}, {}, ["c1"])
    write("circle", empty, "A single unknotted circle.")
    write("two-circles", Diagram({}, {}, ["c1", "c2"]), "Two disjoint circles; s = 0.")
    write(
        "two-circles-overlap",
        layered([circle_pts(0, 0, 4, 0.1), circle_pts(5, 0, 4, 0.2)]),
        "Two circles after one Omega-2 move between them; s = 1.",
    )
    write("kink", from_pd([(1, 2, 2, 1)]), "Unknot with one kink; parity 1 against the plain circle.")
    fig8 = Diagram({"m1": Vertex(MARKED, 0)}, {"e1": (("m1", 0), ("m1", 3)), "e2": (("m1", 1), ("m1", 2))})
    write("figure-eight-marked", fig8.validate(), "Figure-eight curve through one marked vertex.")
    fig8x = Diagram({"x1": Vertex(CROSSING, 0)}, {"e1": (("x1", 0), ("x1", 3)), "e2": (("x1", 1), ("x1", 2))})
    write("figure-eight-crossing", fig8x.validate(), "Figure-eight curve through one crossing.")
    p2 = Diagram(
        {"m1": Vertex(MARKED, 0), "x1": Vertex(CROSSING, 0)},
        {
            "e1": (("m1", 0), ("x1", 3)),
            "e2": (("m1", 1), ("x1", 2)),
            "e3": (("m1", 2), ("x1", 1)),
            "e4": (("m1", 3), ("x1", 0)),
        },
    )
    write("p2", p2.validate(), "One marked vertex and one crossing; admits no orientation.")
    write("hopf", from_pd([(4, 1, 3, 2), (2, 3, 1, 4)]), "Hopf link.")
    trefoil = [(1, 4, 2, 5), (3, 6, 4, 1), (5, 2, 6, 3)]
    write("trefoil", from_pd(trefoil), "Trefoil knot.")
    write(
        "figure-eight-knot",
        from_pd([(4, 2, 5, 1), (8, 6, 1, 5), (6, 3, 7, 4), (2, 7, 3, 8)]),
        "Figure-eight knot.",
    )
    bad = [(1, 4, 2, 5), (3, 6, 4, 8), (5, 2, 6, 3), (1, 7, 7, 8)]
    write(
        "trefoil-resolution",
        from_pd(bad, marked=(3,)),
        "A trefoil with a marked vertex and a small loop spliced into one edge;\n"
        "its positive resolution is a trefoil, so the diagram is not admissible.",
    )

    venn = layered([circle_pts(0, 0, 4.5, 0.1), circle_pts(6, 0, 4.5, 0.2), circle_pts(3, 5, 4.5, 0.3)])
    assert sorted(t_invariant(venn)) == [1, 1, 1]
    write("venn", venn, "Three stacked circles in Venn position; T = {1,1,1}.")
    u = shipped_catalog(False)
    site = find_sites(venn, u.rules["O3"], REVERSE)[0]
    assert sorted(t_invariant(site.result)) == [0, 0, 0]
    write("venn-omega3", site.result, "The Venn diagram after one Omega-3 move; T = {0,0,0}.")

    o7 = u.rules["O7"]
    pairs = [(0, 1), (2, 5), (3, 4)]
    a, b = closure(o7.lhs, pairs=pairs), closure(o7.rhs, pairs=pairs)
    assert sharp_count(a) != sharp_count(b)
    write("omega7-lhs", a, "Closure of the Omega-7 left side; sharp count 1.")
    write("omega7-rhs", b, "The same closure of the Omega-7 right side; sharp count 2.")

    for rid in u.sets["unoriented"]:
        r = u.rules[rid]
        for side, t in (("lhs", r.lhs), ("rhs", r.rhs)):
            write(f"closure-{rid}-{side}", closure(t), f"Closure of the {rid} {side}, adjacent boundary points joined.")

    adm = random_admissible(7)
    assert is_admissible(adm) == YES
    write("admissible", adm, "Admissible diagram with two marked vertices, reached from the\none-marker figure-eight by generating moves.")
    oriented = next(iter(orientations(adm)))
    write("admissible-oriented", oriented, "The admissible diagram with a coherent orientation.")
    culprit = parse(CULPRIT).validate()
    assert simplify_classical(culprit, slack=0).crossings()
    assert not simplify_classical(culprit, slack=2).crossings()
    write("culprit", culprit, "Eight-crossing unknot with no crossing-reducing move; it can only be\nundone after the crossing number first goes up.")
    for p in sorted(OUT.glob("*.mgd")):
        d = parse(p.read_text())
        print(p.name, invariant_report(d))


if __name__ == "__main__":
    main()
