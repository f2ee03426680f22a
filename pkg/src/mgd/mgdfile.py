"""Reading and writing the line-oriented ``mgd v1`` text format.

Grammar (one directive per line, ``#`` starts a comment)::

    mgd v1
    boundary <k> | boundary b0 b1 ...        (tangles only)
    vertex <id> crossing over=<s>,<s>
    vertex <id> marked plus=<s>,<s>/<s>,<s>
    edge <id> <end> <end> [dir=<end>]
    circle <id> [in=<face>] [out=a|b]
    placement <component|face> in <face>
    outer <face>|auto
    oriented                                  (needed only without edges)

An ``<end>`` is ``<vertex>:<slot>`` or a boundary point ``@<i>`` / ``@b<i>``.
``dir=`` names the tail end; a diagram is oriented when every edge has one.
A ``<face>`` is the face to the left of a half-edge, written ``<v>:<slot>``
or ``@:<i>``, a circle side ``<c>:a`` / ``<c>:b`` (``a`` lies to the left of
the circle's reference direction, which is its orientation when oriented),
or ``@`` for the point at infinity of a closed diagram.  A component is named
by any of its vertex, edge or circle ids and stands for its outward face.
"""

import re
from typing import Dict, List, Tuple

from .diagram import (
    CROSSING,
    MARKED,
    PORT,
    Diagram,
    DiagramError,
    OrientationError,
    UnknownFace,
    Vertex,
    auto_face,
    circle_face,
    point_face,
    regions_from_unions,
)

HEADER = "mgd v1"


class MgdSyntaxError(DiagramError):
    kind = "syntax error"

    def __init__(self, msg, line, col):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-']*$")


def _pair(text):
    a, b = text.split(",")
    return int(a), int(b)


def _parse_vertex(words, err):
    if len(words) != 4 or not _ID.match(words[1]):
        err("expected 'vertex <id> crossing over=s,s' or 'vertex <id> marked plus=s,s/s,s'")
    vid, kind, spec = words[1], words[2], words[3]
    try:
        if kind == "crossing" and spec.startswith("over="):
            a, b = _pair(spec[5:])
            if {a, b} not in ({0, 2}, {1, 3}):
                err("over pair must be {0,2} or {1,3}", 3)
            return vid, Vertex(CROSSING, a % 2)
        if kind == "marked" and spec.startswith("plus="):
            p1, p2 = spec[5:].split("/")
            pair1, pair2 = sorted(_pair(p1)), sorted(_pair(p2))
            pairing = {tuple(pair1), tuple(pair2)}
            if pairing == {(0, 1), (2, 3)}:
                return vid, Vertex(MARKED, 0)
            if pairing == {(1, 2), (0, 3)}:
                return vid, Vertex(MARKED, 1)
            err("plus pairing must be 0,1/2,3 or 1,2/3,0", 3)
    except (ValueError, TypeError):
        err("malformed vertex data", 3)
    err(f"unknown vertex kind '{kind}'", 2)


def _parse_end(tok, err, col):
    if tok.startswith("@"):
        body = tok[1:]
        if body.startswith(":"):
            body = body[1:]
        if body.startswith("b"):
            body = body[1:]
        if not body.isdigit():
            err(f"bad boundary endpoint '{tok}'", col)
        return (PORT, int(body))
    if ":" not in tok:
        err(f"bad endpoint '{tok}'", col)
    v, s = tok.rsplit(":", 1)
    if not s.isdigit():
        err(f"bad slot in '{tok}'", col)
    return (v, int(s))


def parse(text: str, tangle=None) -> Diagram:
    """Parse and validate a diagram or tangle."""
    vertices: Dict[str, Vertex] = {}
    edges: Dict[str, tuple] = {}
    dirs: Dict[str, tuple] = {}
    circles: List[str] = []
    circle_out: Dict[str, str] = {}
    unions: List[Tuple[tuple, int, int, str]] = []
    boundary = None
    outer = None
    force_oriented = False
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()

        def err(msg, col_word=0, _w=words, _raw=raw, _n=lineno):
            col = _raw.find(_w[min(col_word, len(_w) - 1)]) + 1
            raise MgdSyntaxError(msg, _n, max(col, 1))

        head = words[0]
        if not seen_header:
            if line.split() != HEADER.split():
                err(f"expected header '{HEADER}'")
            seen_header = True
            continue
        if head == "vertex":
            vid, data = _parse_vertex(words, err)
            if vid in vertices:
                err(f"duplicate vertex id '{vid}'", 1)
            vertices[vid] = data
        elif head == "edge":
            if len(words) not in (4, 5) or not _ID.match(words[1]):
                err("expected 'edge <id> <end> <end> [dir=<end>]'")
            eid = words[1]
            if eid in edges:
                err(f"duplicate edge id '{eid}'", 1)
            a = _parse_end(words[2], err, 2)
            b = _parse_end(words[3], err, 3)
            edges[eid] = (a, b)
            if len(words) == 5:
                if not words[4].startswith("dir="):
                    err("expected dir=<end>", 4)
                t = _parse_end(words[4][4:], err, 4)
                if t not in (a, b):
                    err("dir= must name one of the edge's ends", 4)
                dirs[eid] = (t, b if t == a else a)
        elif head == "circle":
            if len(words) < 2 or not _ID.match(words[1]):
                err("expected 'circle <id>'")
            cid = words[1]
            if cid in circles:
                err(f"duplicate circle id '{cid}'", 1)
            circles.append(cid)
            for i, w in enumerate(words[2:], 2):
                if w.startswith("in="):
                    unions.append((("comp", cid), w[3:], lineno, raw))
                elif w in ("out=a", "out=b"):
                    circle_out[cid] = w[4]
                else:
                    err(f"unknown circle option '{w}'", i)
        elif head == "placement":
            if len(words) != 4 or words[2] != "in":
                err("expected 'placement <component> in <face>'")
            unions.append((words[1], words[3], lineno, raw))
        elif head == "outer":
            if len(words) != 2:
                err("expected 'outer <face>|auto'")
            outer = (words[1], lineno, raw)
        elif head == "oriented":
            force_oriented = True
        elif head == "boundary":
            if len(words) == 2 and words[1].isdigit():
                boundary = int(words[1])
            else:
                labels = words[1:]
                if labels != [f"b{i}" for i in range(len(labels))]:
                    err("boundary labels must be b0 b1 ... in order", 1)
                boundary = len(labels)
        else:
            err(f"unknown directive '{head}'")
    if not seen_header:
        raise MgdSyntaxError(f"missing header '{HEADER}'", 1, 1)
    if tangle is True and boundary is None:
        raise MgdSyntaxError("tangle file needs a boundary line", 1, 1)
    k = boundary or 0
    oriented = bool(dirs) or force_oriented
    if oriented:
        missing = sorted(set(edges) - set(dirs))
        if missing:
            raise OrientationError(f"missing orientation on edge {missing[0]}")
        edges = {e: dirs[e] for e in edges}
    raw_d = Diagram(vertices, edges, circles, {PORT: k}, (), oriented)
    raw_d._check_slots()
    raw_d._check_planarity()

    comp_of: Dict[str, tuple] = {}
    for v in vertices:
        comp_of[v] = raw_d.pieces[raw_d.face_of[(v, 0)]]
    for eid, (a, _) in edges.items():
        comp_of[eid] = raw_d.pieces[raw_d.face_of[a]]
    for c in circles:
        comp_of[c] = ("c", c)

    def face_ref(tok, lineno, line):
        def bad(msg):
            col = line.find(tok) + 1
            raise UnknownFace(f"line {lineno}, column {col}: {msg}")

        if tok == "@":
            if k:
                bad("'@' names a face only in a closed diagram")
            return point_face(PORT)
        if ":" not in tok:
            bad(f"unknown face '{tok}'")
        node, s = tok.rsplit(":", 1)
        if node in circles and s in ("a", "b"):
            return circle_face(node, s)
        if not s.isdigit():
            bad(f"unknown face '{tok}'")
        h = (node, int(s))
        if h not in raw_d.face_of:
            bad(f"unknown face '{tok}'")
        return raw_d.face_of[h]

    def comp_face(tok, lineno, line):
        if isinstance(tok, tuple):
            cid = tok[1]
            return circle_face(cid, circle_out.get(cid, "b"))
        if tok in comp_of:
            pc = comp_of[tok]
            if pc[0] == "c":
                return circle_face(pc[1], circle_out.get(pc[1], "b"))
            return auto_face(raw_d, pc)
        return face_ref(tok, lineno, line)

    pairs = []
    for a, b, lineno, line in unions:
        pairs.append((comp_face(a, lineno, line), face_ref(b, lineno, line)))
    if outer is not None and outer[0] != "auto":
        if k:
            raise UnknownFace(f"line {outer[1]}: 'outer' applies to closed diagrams only")
        pairs.append((face_ref(outer[0], outer[1], outer[2]), point_face(PORT)))
    # circles given an explicit outward side but no placement go to the root
    placed = set()
    for tok, _, _, _ in unions:
        if isinstance(tok, tuple):
            placed.add(tok[1])
        else:
            placed.add(tok.rsplit(":", 1)[0])
            placed.add(comp_of.get(tok, (None, None))[1])
    for cid, side in circle_out.items():
        if cid not in placed:
            pairs.append((circle_face(cid, side), raw_d.root_face))
    regions = regions_from_unions(raw_d, pairs)
    d = Diagram(vertices, edges, circles, {PORT: k}, regions, oriented)
    return d.validate()


def parse_tangle(text: str) -> Diagram:
    return parse(text, tangle=True)


def _end(h):
    v, s = h
    if v == PORT:
        return f"@{s}"
    return f"{v}:{s}"


def face_name(f) -> str:
    if f[0] == "h":
        return f"{f[1]}:{f[2]}"
    if f[0] == "c":
        return f"{f[1]}:{f[2]}"
    return "@"


def serialize(d: Diagram) -> str:
    """Stable text form; ``parse(serialize(d))`` is isomorphic to ``d``."""
    if set(d.ports) != {PORT}:
        raise ValueError("only diagrams and tangles can be serialized")
    lines = [HEADER]
    if d.oriented:
        lines.append("oriented")
    if d.k:
        lines.append("boundary " + " ".join(f"b{i}" for i in range(d.k)))
    for v in sorted(d.vertices):
        data = d.vertices[v]
        if data.kind == CROSSING:
            o = data.bit
            lines.append(f"vertex {v} crossing over={o},{o + 2}")
        else:
            p = data.bit
            lines.append(
                f"vertex {v} marked plus={p},{p + 1}/{(p + 2) % 4},{(p + 3) % 4}"
            )
    for eid in sorted(d.edges):
        a, b = d.edges[eid]
        line = f"edge {eid} {_end(a)} {_end(b)}"
        if d.oriented:
            line += f" dir={_end(a)}"
        lines.append(line)
    for c in d.circles:
        lines.append(f"circle {c}")
    root = d.root_face
    for region in sorted(d.regions, key=lambda r: sorted(map(repr, r))):
        if len(region) < 2:
            continue
        members = sorted(region, key=repr)
        if root in region:
            anchor = root
        else:
            anchor = members[0]
        rest = [f for f in members if f != anchor]
        if anchor == point_face(PORT):
            lines.append(f"outer {face_name(rest[0])}")
            anchor = rest[0]
            rest = rest[1:]
        for f in rest:
            lines.append(f"placement {face_name(f)} in {face_name(anchor)}")
    if d.k == 0 and (d.vertices or d.circles) and not any(
        point_face(PORT) in r and len(r) > 1 for r in d.regions
    ):
        lines.append("outer auto")
    return "\n".join(lines) + "\n"
