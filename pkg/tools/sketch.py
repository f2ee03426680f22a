"""Turn polyline sketches of local moves into tangle text.

A sketch lists strands as polylines.  Every proper intersection of two
segments must be declared either as a crossing (naming the over line by its
axis, e.g. ``"NE"`` for a line running SW-NE, or by strand index) or as a
marked vertex with a horizontal (``"h"``) or vertical (``"v"``) marker.
Slots are numbered counterclockwise by angle, boundary points
counterclockwise around ``center``.  Orientation comes from per-strand signs
or from arrows ``((x, y), "NE")`` placed on edges; arrows are propagated
through crossings and marked vertices and checked for consistency.
"""

import math

AXES = {
    "E": (1, 0), "W": (-1, 0), "N": (0, 1), "S": (0, -1),
    "NE": (1, 1), "NW": (-1, 1), "SW": (-1, -1), "SE": (1, -1),
    "H": (1, 0), "V": (0, 1),
}


def _unit(v):
    n = math.hypot(*v)
    return (v[0] / n, v[1] / n)


def _intersect(p, q, r, s):
    d = (q[0] - p[0]) * (s[1] - r[1]) - (q[1] - p[1]) * (s[0] - r[0])
    if abs(d) < 1e-12:
        return None
    t = ((r[0] - p[0]) * (s[1] - r[1]) - (r[1] - p[1]) * (s[0] - r[0])) / d
    u = ((r[0] - p[0]) * (q[1] - p[1]) - (r[1] - p[1]) * (q[0] - p[0])) / d
    eps = 1e-9
    if eps < t < 1 - eps and eps < u < 1 - eps:
        return t, u
    return None


class Sketch:
    def __init__(self, strands, center, over=(), marks=(), signs=None, arrows=()):
        self.strands = [list(map(tuple, s)) for s in strands]
        self.center = center
        self.over = list(over)
        self.marks = list(marks)
        self.signs = signs
        self.arrows = list(arrows)

    def _points(self):
        hits = []
        segs = []
        for si, pts in enumerate(self.strands):
            for j in range(len(pts) - 1):
                segs.append((si, j, pts[j], pts[j + 1]))
        for a in range(len(segs)):
            for b in range(a + 1, len(segs)):
                sa, ja, p, q = segs[a]
                sb, jb, r, s = segs[b]
                if sa == sb and abs(ja - jb) <= 1:
                    continue
                tu = _intersect(p, q, r, s)
                if tu is None:
                    continue
                t, u = tu
                x = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
                hits.append((x, (sa, ja + t, _unit((q[0] - p[0], q[1] - p[1]))),
                             (sb, jb + u, _unit((s[0] - r[0], s[1] - r[1])))))
        return hits

    def build(self, name_prefix=""):
        hits = self._points()
        specs = [(pt, "X", sel) for pt, sel in self.over]
        specs += [(pt, "M", m) for pt, m in self.marks]
        used = set()
        nodes = []
        for x, pa, pb in hits:
            best = min(range(len(specs)), key=lambda i: math.dist(specs[i][0], x))
            if math.dist(specs[best][0], x) > 0.8 or best in used:
                raise ValueError(f"intersection at {x} is not declared uniquely")
            used.add(best)
            nodes.append((x, pa, pb, specs[best][1], specs[best][2]))
        if len(used) != len(specs):
            raise ValueError("declared intersections without a match")
        nodes.sort(key=lambda n: (n[3], -n[0][1], n[0][0]))

        # half-edges at each node: (angle, strand, param, +1 forward / -1 back)
        vertices = {}
        slot_of = {}
        counters = {"X": 0, "M": 0}
        for x, pa, pb, kind, sel in nodes:
            counters[kind] += 1
            vid = f"{'x' if kind == 'X' else 'm'}{name_prefix}{counters[kind]}"
            hs = []
            for si, prm, d in (pa, pb):
                for sgn in (1, -1):
                    v = (sgn * d[0], sgn * d[1])
                    hs.append((math.atan2(v[1], v[0]) % (2 * math.pi), si, prm, sgn, v))
            hs.sort()
            for slot, (_, si, prm, sgn, _) in enumerate(hs):
                slot_of[(si, round(prm, 9), sgn)] = (vid, slot)
            if kind == "X":
                if isinstance(sel, int):
                    slots = [i for i, h in enumerate(hs) if h[1] == sel]
                else:
                    ax = _unit(AXES[sel])
                    slots = [i for i, h in enumerate(hs) if abs(h[4][0] * ax[0] + h[4][1] * ax[1]) > 0.9]
                if len(slots) != 2 or (slots[1] - slots[0]) != 2:
                    raise ValueError(f"cannot identify over line at {x}")
                vertices[vid] = f"crossing over={slots[0]},{slots[1]}"
            else:
                if sel == "h":
                    good = [h[4][1] > 0 for h in hs]
                else:
                    good = [h[4][0] > 0 for h in hs]
                s0 = [i for i in range(4) if good[i] and good[(i + 1) % 4]]
                if len(s0) != 1:
                    raise ValueError(f"cannot place marker at {x}")
                p = s0[0]
                vertices[vid] = f"marked plus={p},{(p + 1) % 4}/{(p + 2) % 4},{(p + 3) % 4}"

        # boundary points
        ends = []
        for si, pts in enumerate(self.strands):
            if pts[0] == pts[-1]:
                continue
            ends.append((pts[0], si, 0))
            ends.append((pts[-1], si, 1))
        cx, cy = self.center
        ends.sort(key=lambda e: math.atan2(e[0][1] - cy, e[0][0] - cx) % (2 * math.pi))
        bidx = {(si, side): i for i, (_, si, side) in enumerate(ends)}
        self.boundary_points = [e[0] for e in ends]

        # edges along strands
        edges = []
        for si, pts in enumerate(self.strands):
            stops = sorted(
                {prm for (s2, prm, sgn) in slot_of if s2 == si}
            )
            closed = pts[0] == pts[-1]
            if closed:
                if not stops:
                    raise ValueError("closed strands need at least one node")
                seq = [(slot_of[(si, p, 1)], slot_of[(si, p, -1)], p) for p in stops]
                for i in range(len(seq)):
                    a, b = seq[i], seq[(i + 1) % len(seq)]
                    edges.append((si, a[2], b[2], a[0], b[1]))
                continue
            prev = ("@", bidx[(si, 0)])
            prev_p = 0.0
            for p in stops:
                edges.append((si, prev_p, p, prev, slot_of[(si, p, -1)]))
                prev = slot_of[(si, p, 1)]
                prev_p = p
            edges.append((si, prev_p, len(pts) - 1.0, prev, ("@", bidx[(si, 1)])))

        directions = self._orient(edges, vertices)
        lines = ["mgd v1"]
        if ends:
            lines.append("boundary " + " ".join(f"b{i}" for i in range(len(ends))))
        for vid in sorted(vertices):
            lines.append(f"vertex {vid} {vertices[vid]}")
        for n, (si, p0, p1, a, b) in enumerate(edges, 1):
            ta = f"@{a[1]}" if a[0] == "@" else f"{a[0]}:{a[1]}"
            tb = f"@{b[1]}" if b[0] == "@" else f"{b[0]}:{b[1]}"
            line = f"edge e{n} {ta} {tb}"
            if directions is not None:
                line += f" dir={ta if directions[n - 1] > 0 else tb}"
            lines.append(line)
        if not ends:
            lines.append(f"outer {self._outer(edges)}")
        return "\n".join(lines) + "\n"

    def _outer(self, edges):
        """Face below the lowest drawn point of a closed, connected drawing."""
        si, j = min(
            ((si, j) for si, pts in enumerate(self.strands) for j in range(len(pts) - 1)),
            key=lambda t: (self.strands[t[0]][t[1]][1], self.strands[t[0]][t[1]][0]),
        )
        pts = self.strands[si]
        dx = pts[j + 1][0] - pts[j - 1 if j else -2][0]
        for n, (s2, p0, p1, a, b) in enumerate(edges):
            if s2 != si:
                continue
            inside = p0 < j < p1 if p0 < p1 else (j > p0 or j < p1)
            if inside:
                end = b if dx > 0 else a
                return f"{end[0]}:{end[1]}"
        raise ValueError("lowest point sits on a node; move it")

    def _point_at(self, si, prm):
        pts = self.strands[si]
        j = min(int(prm), len(pts) - 2)
        t = prm - j
        p, q = pts[j], pts[j + 1]
        return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

    def _orient(self, edges, vertices):
        if self.signs is None and not self.arrows:
            return None
        n = len(edges)
        dirs = [0] * n
        if self.signs is not None:
            for i, (si, *_rest) in enumerate(edges):
                dirs[i] = self.signs[si]
        for pt, name in self.arrows:
            best = None
            for i, (si, p0, p1, _, _) in enumerate(edges):
                steps = max(2, int((p1 - p0) * 40))
                for k in range(steps + 1):
                    prm = p0 + (p1 - p0) * k / steps
                    dist = math.dist(self._point_at(si, prm), pt)
                    if best is None or dist < best[0]:
                        best = (dist, i, si, prm)
            _, i, si, prm = best
            j = min(int(prm), len(self.strands[si]) - 2)
            p, q = self.strands[si][j], self.strands[si][j + 1]
            ax = AXES[name]
            sgn = 1 if (q[0] - p[0]) * ax[0] + (q[1] - p[1]) * ax[1] > 0 else -1
            if dirs[i] not in (0, sgn):
                raise ValueError(f"arrow at {pt} contradicts another arrow")
            dirs[i] = sgn
        # propagate: end (node, slot) -> (edge index, is_tail)
        at = {}
        for i, (_, _, _, a, b) in enumerate(edges):
            at[a] = (i, True)
            at[b] = (i, False)

        def out(end):
            i, tail_end = at[end]
            if dirs[i] == 0:
                return None
            return (dirs[i] > 0) == tail_end

        changed = True
        while changed:
            changed = False
            for vid, data in vertices.items():
                known = {s: out((vid, s)) for s in range(4)}
                want = {}
                for s, o in known.items():
                    if o is None:
                        continue
                    if data.startswith("crossing"):
                        want[(s + 2) % 4] = not o
                    else:
                        want[(s + 2) % 4] = o
                        want[(s + 1) % 4] = not o
                        want[(s + 3) % 4] = not o
                for s, o in want.items():
                    cur = known[s]
                    if cur is None:
                        i, tail_end = at[(vid, s)]
                        dirs[i] = 1 if o == tail_end else -1
                        changed = True
                    elif cur != o:
                        raise ValueError(f"inconsistent orientation at {vid}")
        if 0 in dirs:
            raise ValueError("orientation not determined on every edge")
        return dirs
