"""Cutting a disk out of a diagram and gluing a tangle into the hole.

A *context* is a diagram with an extra port ``#`` of degree k: the outside of
a disk whose inside was removed.  Seen from the context, the slots of ``#``
run counterclockwise around the hole, so inner boundary point b_i is glued to
context slot ``(-i) mod k``.
"""

from itertools import product
from typing import Dict, List, Optional, Tuple

from .diagram import PORT, Diagram, DiagramError, circle_face

HOLE = "#"
_J = "\x00J"


class _UF:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _fresh(prefix, used):
    n = 1
    while True:
        name = f"{prefix}{n}"
        if name not in used:
            used.add(name)
            yield name
        n += 1


def glue(
    inner: Diagram,
    outer: Diagram,
    port: str = HOLE,
    rename: Optional[Dict[str, Tuple[str, int]]] = None,
) -> Diagram:
    """Glue tangle ``inner`` into the hole ``port`` of ``outer``.

    ``rename`` optionally gives, per inner vertex, its new name and the slot
    rotation to apply; otherwise inner vertices get fresh names.
    """
    k = inner.k
    if outer.ports.get(port) != k:
        raise DiagramError("arity mismatch between tangle and hole")
    if inner.oriented != outer.oriented:
        raise DiagramError("cannot glue oriented and unoriented pieces")
    oriented = outer.oriented

    vertices = dict(outer.vertices)
    used_v = set(vertices) | set(outer.ports)
    if rename is None:
        names = _fresh("v", used_v)
        rename = {v: (next(names), 0) for v in sorted(inner.vertices)}
    back = {}
    for v, (nv, rot) in rename.items():
        vertices[nv] = inner.vertices[v].rotated(rot)
        back[nv] = (v, rot)

    def inner_end(h):
        v, s = h
        if v == PORT:
            return (_J, s)
        nv, rot = rename[v]
        return (nv, (s + rot) % 4)

    def outer_end(h):
        v, s = h
        if v == port:
            return (_J, (-s) % k)
        return h

    # segments: (end0, end1, source, original ends)
    segs = []
    for eid in sorted(inner.edges):
        a, b = inner.edges[eid]
        segs.append((inner_end(a), inner_end(b), ("I", eid), (a, b)))
    for eid in sorted(outer.edges):
        a, b = outer.edges[eid]
        segs.append((outer_end(a), outer_end(b), ("O", eid), (a, b)))
    at_junction: Dict[int, List[Tuple[int, int]]] = {}
    real: Dict[tuple, Tuple[int, int]] = {}
    for n, (a, b, _, _) in enumerate(segs):
        for side, x in ((0, a), (1, b)):
            if x[0] == _J:
                at_junction.setdefault(x[1], []).append((n, side))
            else:
                real[x] = (n, side)

    def partner(n, side):
        j = segs[n][side][1]
        p, q = at_junction[j]
        return q if p == (n, side) else p

    visited = [False] * len(segs)

    def walk(n, side):
        """Follow a chain entering segment n at end ``side``."""
        chain = []
        start = (n, side)
        while True:
            visited[n] = True
            chain.append((n, side))
            far = segs[n][1 - side]
            if far[0] != _J:
                return chain, far
            n, side = partner(n, 1 - side)
            if (n, side) == start:
                return chain, None

    used_e = set()
    kept = {}
    chains = []
    for x in sorted(real):
        n, side = real[x]
        if visited[n]:
            continue
        chain, far = walk(n, side)
        chains.append((chain, x, far))
    loops = []
    for n in range(len(segs)):
        if not visited[n]:
            chain, _ = walk(n, 0)
            loops.append(chain)

    def forward(chain):
        dirs = {side == 0 for _, side in chain}
        if oriented and len(dirs) != 1:
            raise DiagramError("orientations disagree across the gluing")
        return chain[0][1] == 0

    edges = {}
    for chain, x, far in chains:
        if len(chain) == 1 and segs[chain[0][0]][2][0] == "O":
            kept[chain[0][0]] = segs[chain[0][0]][2][1]
            used_e.add(segs[chain[0][0]][2][1])
    names_e = _fresh("e", used_e)
    for chain, x, far in chains:
        fwd = forward(chain)
        eid = kept.get(chain[0][0]) if len(chain) == 1 else None
        if eid is None:
            eid = next(names_e)
        if oriented and not fwd:
            edges[eid] = (far, x)
        else:
            edges[eid] = (x, far)
    circles = list(outer.circles)
    names_c = _fresh("c", set(circles))
    new_circles = []
    for chain in loops:
        fwd = forward(chain)
        if oriented and not fwd:
            chain = [(n, 1 - side) for n, side in reversed(chain)]
        cid = next(names_c)
        circles.append(cid)
        new_circles.append((cid, chain))

    ports = {p: d for p, d in outer.ports.items() if p != port}
    raw = Diagram(vertices, edges, circles, ports, (), oriented)

    # regions: union inner and outer faces through shared corners
    uf = _UF()
    for f in inner.faces:
        uf.add(("I", f))
    for f in outer.faces:
        uf.add(("O", f))
    for src, d in (("I", inner), ("O", outer)):
        for r in d.regions:
            first = None
            for f in r:
                if first is None:
                    first = (src, f)
                else:
                    uf.union(first, (src, f))
    for i in range(k):
        uf.union(
            ("I", inner.face_of[(PORT, (i + 1) % k)]),
            ("O", outer.face_of[(port, (-i) % k)]),
        )

    def piece_of_half(h):
        v, s = h
        if v in back:
            ov, rot = back[v]
            return ("I", inner.face_of[(ov, (s - rot) % 4)])
        return ("O", outer.face_of[h])

    def piece_of_orig(src, h):
        d = inner if src == "I" else outer
        return (src, d.face_of[h])

    groups: Dict[tuple, set] = {}
    for key, cycle in raw.faces.items():
        if key[0] == "h":
            cls = piece_of_half(cycle[0])
        elif key[0] == "p":
            cls = ("O", key)
        else:
            continue
        groups.setdefault(uf.find(cls), set()).add(key)
    for cid in outer.circles:
        for side in "ab":
            key = circle_face(cid, side)
            groups.setdefault(uf.find(("O", key)), set()).add(key)
    for cid, chain in new_circles:
        n, side = chain[0]
        src = segs[n][2][0]
        orig = segs[n][3]
        left = piece_of_orig(src, orig[side])
        right = piece_of_orig(src, orig[1 - side])
        groups.setdefault(uf.find(left), set()).add(circle_face(cid, "a"))
        groups.setdefault(uf.find(right), set()).add(circle_face(cid, "b"))
    return raw.with_regions(list(groups.values()))


def excise(
    s: Diagram,
    r: Diagram,
    vmap: Dict[str, Tuple[str, int]],
    arcs: Dict[str, Tuple[str, int, int]],
    hmap: Dict[tuple, tuple],
) -> List[Diagram]:
    """Contexts C with glue(r, C) equal to ``s`` for the given embedding.

    ``vmap`` sends each vertex of ``r`` to (vertex of ``s``, rotation);
    ``arcs`` places each bare arc of ``r`` on an edge or circle of ``s`` as
    (id, direction, position); ``hmap`` sends each half-edge of ``r`` to the
    face of ``s`` that lies on its left.  One context is returned per way of
    distributing floating pieces among the faces that a region splits into.
    """
    k = r.k
    image = {}
    for v, (w, rot) in vmap.items():
        for t in range(4):
            image[(w, (t + rot) % 4)] = (v, t)
    cut_at = {}
    for (w, ws), (v, t) in image.items():
        x = r.opp((v, t))
        if x[0] == PORT:
            cut_at[(w, ws)] = (-x[1]) % k

    on_edge: Dict[str, list] = {}
    for eid, (host, direction, pos) in arcs.items():
        a, b = r.edges[eid]
        i, j = a[1], b[1]
        if direction < 0:
            i, j = j, i
        on_edge.setdefault(host, []).append((pos, (-i) % k, (-j) % k))

    hit = {w for w, _ in vmap.values()}
    vertices = {w: data for w, data in s.vertices.items() if w not in hit}
    edges = {}
    circles = []
    for eid, (p, q) in s.edges.items():
        p_img, q_img = p in image, q in image
        if (p_img and p not in cut_at) or (q_img and q not in cut_at):
            continue
        stops = sorted(on_edge.get(eid, ()))
        cur = (HOLE, cut_at[p]) if p_img else p
        n = 0
        for _, enter, leave in stops:
            edges[f"{eid}~{n}"] = (cur, (HOLE, enter))
            n += 1
            cur = (HOLE, leave)
        end = (HOLE, cut_at[q]) if q_img else q
        edges[eid if n == 0 else f"{eid}~{n}"] = (cur, end)
    for cid in s.circles:
        stops = sorted(on_edge.get(cid, ()))
        if not stops:
            circles.append(cid)
            continue
        for n, (_, enter, leave) in enumerate(stops):
            nxt = stops[(n + 1) % len(stops)][1]
            edges[f"{cid}~{n}"] = ((HOLE, leave), (HOLE, nxt))
    ports = dict(s.ports)
    ports[HOLE] = k
    raw = Diagram(vertices, edges, circles, ports, (), s.oriented)
    try:
        raw._check_slots()
        raw._check_planarity()
    except DiagramError:
        return []

    main_piece = raw.pieces[raw.face_of[(HOLE, 0)]] if k else None
    touched = set()
    for h in image:
        touched.add(s.pieces[s.face_of[h]])
    for host in on_edge:
        if host in s.edges:
            touched.add(s.pieces[s.face_of[s.edges[host][0]]])
        else:
            touched.add(("c", host))

    r_face_region = {}
    for f, cycle in r.faces.items():
        if cycle:
            r_face_region[f] = s.region_of[hmap[cycle[0]]]

    mains: Dict[int, list] = {}
    for f, cycle in raw.faces.items():
        if raw.pieces[f] != main_piece:
            continue
        reg = None
        for h in cycle:
            if h[0] != HOLE:
                reg = s.region_of[s.face_of[h]]
                break
        if reg is None:
            j = cycle[0][1]
            reg = r_face_region[r.face_of[(PORT, (1 - j) % k)]]
        mains.setdefault(reg, []).append(f)

    fixed = []
    choices = []
    for idx, region in enumerate(s.regions):
        holes = [f for f in region if s.pieces[f] not in touched]
        ms = mains.get(idx, [])
        if not ms:
            if len(holes) == len(region):
                fixed.append(region)
            elif holes:
                # the disk would swallow a floating piece or the point at infinity
                return []
            continue
        if len(ms) == 1:
            fixed.append(frozenset(ms + holes))
        elif not holes:
            fixed.extend(frozenset([m]) for m in ms)
        else:
            choices.append((ms, holes))

    out = []
    options = []
    for ms, holes in choices:
        options.append([(ms, assign) for assign in product(range(len(ms)), repeat=len(holes))])
    for combo in product(*options):
        regions = list(fixed)
        for (ms, assign), (_, holes) in zip(combo, choices):
            parts = [set([m]) for m in ms]
            for hole, a in zip(holes, assign):
                parts[a].add(hole)
            regions.extend(frozenset(p) for p in parts)
        out.append(raw.with_regions(regions))
    return out


def same_labeled(a: Diagram, b: Diagram) -> bool:
    """Exact equality of two diagrams up to edge ids, circle ids and the
    naming of circle sides; when circles are involved regions are compared
    canonically."""
    if a.vertices != b.vertices or a.ports != b.ports or a.oriented != b.oriented:
        return False
    if a.oriented:
        ea = sorted(a.edges.values())
        eb = sorted(b.edges.values())
    else:
        ea = sorted(tuple(sorted(e)) for e in a.edges.values())
        eb = sorted(tuple(sorted(e)) for e in b.edges.values())
    if ea != eb or len(a.circles) != len(b.circles):
        return False
    if set(a.regions) == set(b.regions):
        return True
    if not a.circles:
        return False
    from .canonical import canonical_code

    return canonical_code(a) == canonical_code(b)
