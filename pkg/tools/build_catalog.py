"""Generate src/mgd/data/{unoriented,oriented}.cat from polyline sketches.

Run from the repository root:  python3 tools/build_catalog.py
Oriented rules are given by the set of boundary points where strands enter
the disk; the builder picks the unique coherent orientation of each side with
that boundary pattern.  The oriented third-move variants besides G3 are found
by enumeration.
"""

import math
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.join(HERE, "..", "src"))
sys.path.insert(0, HERE)

from sketch import Sketch  # noqa: E402

from mgd.diagram import orientations  # noqa: E402
from mgd.mgdfile import parse_tangle, serialize  # noqa: E402
from mgd.moves import boundary_pattern, rule_class_code  # noqa: E402

OUT = os.path.join(HERE, "..", "src", "mgd", "data")


class Side:
    def __init__(self, sketch):
        self.sketch = sketch
        self.tangle = parse_tangle(sketch.build())
        self.points = sketch.boundary_points

    def index(self, pt):
        for i, p in enumerate(self.points):
            if math.dist(p, pt) < 1e-6:
                return i
        raise KeyError(pt)

    def oriented(self, ins):
        want = tuple(i not in {self.index(p) for p in ins} for i in range(len(self.points)))
        hits = [o for o in orientations(self.tangle) if boundary_pattern(o) == want]
        if len(hits) != 1:
            raise ValueError(f"{len(hits)} orientations match boundary pattern {want}")
        return hits[0]

    def all_oriented(self):
        return list(orientations(self.tangle))


def pair(lhs, rhs):
    if lhs.points != rhs.points:
        raise ValueError("sides disagree on boundary points")
    return lhs, rhs


# ----------------------------------------------------------------------
# first move and sixth move (kinks)

KINK = [(7, 8), (12, 6), (16, 2), (22, 2), (22, 6), (16, 6), (12, 2), (7, 0)]
ARC = [(7, 8), (12, 4), (7, 0)]
C1 = (14, 4)


def kink(over=None, mark=None):
    lhs = Side(Sketch([KINK], C1, over=[((14, 4), over)] if over else [],
                      marks=[((14, 4), mark)] if mark else []))
    return pair(lhs, Side(Sketch([ARC], C1)))


# second move
S1 = [(0, 10), (6, 8), (6, 2), (0, 0)]
S2 = [(10, 10), (4, 8), (4, 2), (10, 0)]


def second():
    lhs = Side(Sketch([S1, S2], (5, 5), over=[((5, 8.33), 0), ((5, 1.67), 0)]))
    rhs = Side(Sketch([[(0, 10), (3, 5), (0, 0)], [(10, 10), (7, 5), (10, 0)]], (5, 5)))
    return pair(lhs, rhs)


# third and fourth moves
A_L = [(7, 6), (10, 3), (20, 3), (23, 6)]
A_R = [(7, 6), (10, 9), (20, 9), (23, 6)]
B = [(10, 0), (20, 12)]
C = [(10, 12), (20, 0)]
C3 = (15, 6)


def third(middle_over):
    lhs = Side(Sketch([A_L, B, C], C3,
                      over=[((12.5, 3), 0), ((17.5, 3), 0), ((15, 6), middle_over)]))
    rhs = Side(Sketch([A_R, B, C], C3,
                      over=[((12.5, 9), 0), ((17.5, 9), 0), ((15, 6), middle_over)]))
    return pair(lhs, rhs)


def fourth(mark, a_over):
    lo = [((12.5, 3), 0 if a_over else 1), ((17.5, 3), 0 if a_over else 2)]
    hi = [((12.5, 9), 0 if a_over else 2), ((17.5, 9), 0 if a_over else 1)]
    lhs = Side(Sketch([A_L, B, C], C3, over=lo, marks=[((15, 6), mark)]))
    rhs = Side(Sketch([A_R, B, C], C3, over=hi, marks=[((15, 6), mark)]))
    return pair(lhs, rhs)


# fifth move
F1 = [(7, 1), (9, 2), (13, 6), (15, 6.8), (17, 6), (21, 2), (23, 1)]
F2 = [(7, 7), (9, 6), (13, 2), (15, 1.2), (17, 2), (21, 6), (23, 7)]
C5 = (15, 4)


def fifth(over, mark):
    lhs = Side(Sketch([F1, F2], C5, over=[((11, 4), over)], marks=[((19, 4), mark)]))
    rhs = Side(Sketch([F1, F2], C5, over=[((19, 4), over)], marks=[((11, 4), mark)]))
    return pair(lhs, rhs)


# seventh move
C78 = (15, 10)


def seventh():
    lhs = Side(Sketch(
        [[(7, 0), (9, 4), (17, 12), (21, 16), (23, 20)],
         [(7, 20), (7, 12), (9, 8), (13, 4), (15, 0)],
         [(15, 20), (17, 16), (21, 12), (23, 8), (23, 0)]],
        C78, marks=[((11, 6), "v"), ((19, 14), "h")]))
    rhs = Side(Sketch(
        [[(23, 0), (21, 4), (13, 12), (9, 16), (7, 20)],
         [(23, 20), (23, 12), (21, 8), (17, 4), (15, 0)],
         [(15, 20), (13, 16), (9, 12), (7, 8), (7, 0)]],
        C78, marks=[((19, 6), "h"), ((11, 14), "v")]))
    return pair(lhs, rhs)


# eighth move
def eighth(left, right):
    A = [(7, 20), (23, 0)]
    Bs = [(13, 20), (7, 12), (17, 0)]
    Cs = [(17, 20), (23, 12), (13, 0)]
    E = [(7, 0), (23, 20)]
    lhs = Side(Sketch(
        [A, Bs, Cs, E], C78,
        over=[((15, 10), 3), ((18.1, 6.1), 2), ((11.9, 6.1), 3), ((15, 2.4), 2)],
        marks=[((10.1, 16.1), left), ((19.9, 16.1), right)]))
    A2 = [(23, 20), (7, 0)]
    B2 = [(17, 20), (23, 12), (13, 0)]
    C2 = [(13, 20), (7, 12), (17, 0)]
    E2 = [(23, 0), (7, 20)]
    rhs = Side(Sketch(
        [A2, B2, C2, E2], C78,
        over=[((15, 10), 3), ((11.9, 6.1), 2), ((18.1, 6.1), 3), ((15, 2.4), 2)],
        marks=[((10, 16), left), ((20, 16), right)]))
    return pair(lhs, rhs)


UNORIENTED = [
    ("O1", "1", kink(over="NE")),
    ("O1a", "1-mirror", kink(over="NW")),
    ("O2", "2", second()),
    ("O3", "3", third(2)),
    ("O3a", "3-mirror", third(1)),
    ("O4", "4", fourth("h", True)),
    ("O4p", "4-primed", fourth("h", False)),
    ("O4a", "4-mirror", fourth("v", True)),
    ("O4pa", "4-primed-mirror", fourth("v", False)),
    ("O5", "5", fifth("NE", "h")),
    ("O5a", "5-mirror", fifth("NE", "v")),
    ("O5b", "5-mirror", fifth("NW", "h")),
    ("O5c", "5-mirror", fifth("NW", "v")),
    ("O6", "6", kink(mark="v")),
    ("O6p", "6-primed", kink(mark="h")),
    ("O7", "7", seventh()),
    ("O8", "8", eighth("v", "h")),
    ("O8a", "8-mirror", eighth("h", "v")),
]
BY_ID = {rid: sides for rid, _, sides in UNORIENTED}

# boundary entry points of the named oriented rules: (id, family, shadow, ins)
NAMED = [
    ("G1", "oriented-1", "O1", [(7, 0)]),
    ("G1p", "oriented-1", "O1", [(7, 8)]),
    ("G1a", "oriented-1", "O1a", [(7, 0)]),
    ("G1b", "oriented-1", "O1a", [(7, 8)]),
    ("G2", "oriented-2", "O2", [(0, 0), (10, 0)]),
    ("G2a", "oriented-2", "O2", [(0, 10), (10, 10)]),
    ("G2b", "oriented-2", "O2", [(0, 10), (10, 0)]),
    ("G2c", "oriented-2", "O2", [(0, 0), (10, 10)]),
    ("G3", "oriented-3", "O3", [(23, 6), (10, 0), (10, 12)]),
    ("G4", "oriented-4", "O4", [(7, 6), (10, 0), (20, 12)]),
    ("G4p", "oriented-4", "O4p", [(7, 6), (10, 0), (20, 12)]),
    ("G4a", "oriented-4", "O4", [(7, 6), (10, 12), (20, 0)]),
    ("G4pa", "oriented-4", "O4p", [(7, 6), (10, 12), (20, 0)]),
    ("G5", "oriented-5", "O5", [(7, 7), (23, 7)]),
    ("G5a", "oriented-5", "O5a", [(7, 7), (23, 7)]),
    ("G6", "oriented-6", "O6", [(7, 0)]),
    ("G6p", "oriented-6", "O6p", [(7, 0)]),
    ("G6a", "oriented-6", "O6", [(7, 8)]),
    ("G6pa", "oriented-6", "O6p", [(7, 8)]),
    ("G7", "oriented-7", "O7", [(23, 0), (7, 0), (15, 20)]),
    ("G7a", "oriented-7", "O7", [(7, 20), (23, 20), (15, 0)]),
    ("G8", "oriented-8", "O8", [(13, 20), (23, 20), (7, 0), (17, 0)]),
    ("G8a", "oriented-8", "O8", [(7, 20), (23, 20), (23, 0), (7, 0)]),
    ("G8b", "oriented-8", "O8", [(17, 20), (13, 20), (13, 0), (17, 0)]),
    ("G8c", "oriented-8", "O8", [(7, 20), (17, 20), (23, 0), (13, 0)]),
]


def oriented_pair(shadow, ins):
    lhs, rhs = BY_ID[shadow]
    return lhs.oriented(ins), rhs.oriented(ins)


def all_oriented_pairs(shadow):
    """Every coherent orientation of a rule, matched across sides."""
    lhs, rhs = BY_ID[shadow]
    out = []
    for lo in lhs.all_oriented():
        pat = boundary_pattern(lo)
        ro = [r for r in rhs.all_oriented() if boundary_pattern(r) == pat]
        if len(ro) != 1:
            raise ValueError(f"{shadow}: {len(ro)} right sides match")
        out.append((lo, ro[0]))
    return out


def crossing_signs(t):
    signs = []
    for v in t.crossings():
        o = t.vertices[v].bit
        o_out = o if t.is_out((v, o)) else o + 2
        u_out = (o_out + 1) % 4
        signs.append(1 if t.is_out((v, u_out)) else -1)
    return signs


def has_cyclic_face(t):
    for f, cyc in t.faces.items():
        if len(cyc) == 3 and all(h[0] != "@" for h in cyc):
            outs = {t.is_out(h) for h in cyc}
            if len(outs) == 1:
                return True
    return False


def classes(pairs):
    seen = {}
    for lo, ro in pairs:
        seen.setdefault(rule_class_code(lo, ro), (lo, ro))
    return seen


def build_oriented():
    rules = []
    codes = {}
    for rid, fam, shadow, ins in NAMED:
        lo, ro = oriented_pair(shadow, ins)
        code = rule_class_code(lo, ro)
        if code in codes:
            raise ValueError(f"{rid} duplicates {codes[code]}")
        codes[code] = rid
        rules.append((rid, fam, shadow, lo, ro))

    c5 = classes(all_oriented_pairs("O5"))

    # third move: G3 is given; G3a is a non-cyclic O3a class, preferring
    # all-positive crossings; the rest follow in code order
    c3 = classes(all_oriented_pairs("O3"))
    c3a = classes(all_oriented_pairs("O3a"))
    g3 = [c for c in c3 if c in codes]
    assert len(g3) == 1
    cands = []
    for c, (lo, ro) in c3a.items():
        if has_cyclic_face(lo) or has_cyclic_face(ro):
            continue
        cands.append((-sum(crossing_signs(lo)), c))
    cands.sort()
    first = cands[0][1]
    order = [first] + sorted(c for c in c3 if c not in codes) + sorted(
        c for c in c3a if c != first
    )
    for n, c in enumerate(order):
        rid = "G3" + "abcdefgh"[n]
        src = c3a if c in c3a else c3
        shadow = "O3a" if c in c3a else "O3"
        lo, ro = src[c]
        rules.append((rid, "oriented-3", shadow, lo, ro))
    counts = {"O2": len(classes(all_oriented_pairs("O2"))), "O3": len(c3), "O3a": len(c3a),
              "O1": len(classes(all_oriented_pairs("O1"))), "O5": len(c5),
              "O5a": len(classes(all_oriented_pairs("O5a")))}
    return rules, counts


def block(rid, fam, lhs, rhs, shadow=None):
    head = f"rule {rid} family={fam}" + (f" shadow={shadow}" if shadow else "")
    lines = [head, "lhs"]
    lines += serialize(lhs).strip().splitlines()
    lines += ["end", "rhs"]
    lines += serialize(rhs).strip().splitlines()
    lines += ["end", "identify " + " ".join(f"b{i}=b{i}" for i in range(lhs.k)), "endrule", ""]
    return lines


def main():
    os.makedirs(OUT, exist_ok=True)
    lines = ["catalog v1", ""]
    for rid, fam, (lhs, rhs) in UNORIENTED:
        lines += block(rid, fam, lhs.tangle, rhs.tangle)
    lines.append("set S = O1, O2, O3, O4, O4p, O5, O6, O6p, O7, O8")
    lines.append("set unoriented = " + ", ".join(r for r, _, _ in UNORIENTED))
    with open(os.path.join(OUT, "unoriented.cat"), "w") as fh:
        fh.write("\n".join(lines) + "\n")

    rules, counts = build_oriented()
    order = {r: i for i, (r, *_rest) in enumerate(NAMED)}
    rules.sort(key=lambda r: (r[1], order.get(r[0], 99), r[0]))
    lines = ["catalog v1", ""]
    for rid, fam, shadow, lo, ro in rules:
        lines += block(rid, fam, lo, ro, shadow)
    lines.append("set S1 = G1, G1p, G2, G3, G4, G4p, G5, G6, G6p, G7, G8")
    lines.append("set S2 = G1, G1a, G2b, G2c, G3a, G4, G4p, G5, G6, G6p, G7, G8")
    lines.append("set oriented = " + ", ".join(r[0] for r in rules))
    with open(os.path.join(OUT, "oriented.cat"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("orientation classes per rule:", counts)
    print("oriented rules:", " ".join(r[0] for r in rules))


if __name__ == "__main__":
    main()
