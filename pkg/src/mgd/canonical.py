"""Canonical codes: isomorphism invariants of rooted planar maps.

Two diagrams get the same code exactly when there is a map isomorphism that
preserves the point at infinity (and boundary labels of a tangle), slot
rotation order, vertex kinds and data, orientations and the nesting of
disjoint pieces.
"""

import hashlib

from .diagram import PORT, Diagram


def _encode_piece(d: Diagram, start, entry, children):
    """Breadth-first encoding of the piece containing ``start``.

    The start node gets slot ``start[1]`` as its relative slot 0; every other
    node is based at the slot through which it is first reached.
    """
    labels = {start[0]: 0}
    base = {start[0]: start[1]}
    order = [start[0]]
    desc = []
    opp = d.opp_map
    verts = d.vertices
    ports = d.ports
    oriented = d.oriented
    index = d.end_index if oriented else None
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        data = verts.get(v)
        deg = 4 if data is not None else ports[v]
        b = base[v]
        nbrs = []
        for r in range(deg):
            h = (v, (b + r) % deg)
            w, t = opp[h]
            if w not in labels:
                labels[w] = len(order)
                base[w] = t if w in verts else 0
                order.append(w)
            rel = (t - base[w]) % (4 if w in verts else ports[w])
            if oriented:
                nbrs.append((labels[w], rel, int(index[h][1] == 0)))
            else:
                nbrs.append((labels[w], rel))
        if data is None:
            desc.append(("P", deg, tuple(nbrs)))
        else:
            desc.append((data.kind, (data.bit - b) % 2, tuple(nbrs)))
    faces = []
    for f in d.piece_faces[d.pieces[d.face_of[start]]]:
        if f == entry:
            continue
        pos = min(
            (labels[v], (s - base[v]) % d.degree(v)) for v, s in d.faces[f]
        )
        faces.append((pos, children(f)))
    faces.sort()
    return (tuple(desc), tuple(c for _, c in faces))


def canonical_tuple(d: Diagram):
    if set(d.ports) != {PORT}:
        raise ValueError("canonical codes need a single port")
    memo = {}

    def children(face):
        region = d.regions[d.region_of[face]]
        return tuple(sorted(piece_code(g) for g in region if g != face))

    def piece_code(entry):
        if entry in memo:
            return memo[entry]
        if entry[0] == "c":
            other = (entry[0], entry[1], "b" if entry[2] == "a" else "a")
            flag = int(entry[2] == "a") if d.oriented else 0
            code = ("O", flag, children(other))
        elif entry[0] == "p":
            code = ("P", children(entry))
        else:
            code = min(
                ("G",) + _encode_piece(d, h, entry, children) for h in d.faces[entry]
            )
        memo[entry] = code
        return code

    if d.k == 0:
        return ("D", piece_code(("p", PORT)))
    return ("T", d.k, _encode_piece(d, (PORT, 0), None, children))


def canonical_code(d: Diagram) -> bytes:
    return repr(canonical_tuple(d)).encode()


def short_code(d, code: bytes = None) -> str:
    if code is None:
        code = canonical_code(d)
    return hashlib.sha1(code).hexdigest()[:16]
