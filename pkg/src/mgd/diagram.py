"""Marked graph diagrams and tangles as planar combinatorial maps.

A diagram is a rotation system whose nodes are 4-valent vertices (crossings
and marked vertices) plus *ports*.  The port ``@`` stands for the point at
infinity: in a closed diagram it has degree 0, in a tangle of arity k it has
degree k and its slots are the boundary points b0..b(k-1) in counterclockwise
order as seen from inside the disk.

Slots of a vertex are numbered 0..3 counterclockwise.  A crossing stores
``bit`` so that its over pair is {bit, bit+2}; a marked vertex stores ``bit``
so that its positive pairing is {{bit, bit+1}, {bit+2, bit+3}}.

Faces are traced per connected piece of the map.  Pieces that are disjoint in
the plane are related by *regions*: a region is a set of faces (at most one
per piece) that together form one connected region of the plane.  The
piece/region incidence graph is a tree, which records nesting exactly.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

PORT = "@"
CROSSING = "X"
MARKED = "M"

End = Tuple[str, int]
FaceKey = tuple


class DiagramError(ValueError):
    """Base class for structural problems with a diagram."""

    kind = "invalid diagram"


class SlotOccupied(DiagramError):
    kind = "slot occupied"


class DanglingEndpoint(DiagramError):
    kind = "dangling endpoint"


class PlanarityViolation(DiagramError):
    kind = "planarity violation"


class UnknownFace(DiagramError):
    kind = "unknown outer face"


class RegionError(DiagramError):
    kind = "invalid placement"


class OrientationError(DiagramError):
    kind = "orientation"


@dataclass(frozen=True)
class Vertex:
    kind: str
    bit: int

    def rotated(self, rot: int) -> "Vertex":
        """Data of the same vertex after renumbering slot s as s + rot."""
        return Vertex(self.kind, (self.bit + rot) % 2)


def circle_face(cid: str, side: str) -> FaceKey:
    return ("c", cid, side)


def point_face(port: str) -> FaceKey:
    return ("p", port)


class Diagram:
    """Immutable planar map with optional edge orientation.

    ``edges`` maps an edge id to its two ends; when ``oriented`` is set the
    first end is the tail.  ``circles`` are vertex-free closed components;
    each has sides ``a`` (left of its reference direction) and ``b``.  For an
    oriented diagram the reference direction is the orientation.
    ``regions`` is a tuple of frozensets of face keys.
    """

    def __init__(
        self,
        vertices: Dict[str, Vertex],
        edges: Dict[str, Tuple[End, End]],
        circles: Iterable[str] = (),
        ports: Optional[Dict[str, int]] = None,
        regions: Optional[Iterable[FrozenSet[FaceKey]]] = None,
        oriented: bool = False,
    ):
        self.vertices = dict(vertices)
        self.edges = dict(edges)
        self.circles = tuple(sorted(circles))
        self.ports = dict(ports) if ports is not None else {PORT: 0}
        self.oriented = oriented
        if regions is None:
            regions = default_regions(self)
        self.regions = tuple(frozenset(r) for r in regions)

    # ------------------------------------------------------------------
    # basic structure

    @property
    def k(self) -> int:
        """Arity of the main port (0 for a closed diagram)."""
        return self.ports.get(PORT, 0)

    def degree(self, node: str) -> int:
        if node in self.vertices:
            return 4
        return self.ports[node]

    def is_port(self, node: str) -> bool:
        return node in self.ports

    @cached_property
    def end_index(self) -> Dict[End, Tuple[str, int]]:
        index = {}
        for eid, (a, b) in self.edges.items():
            index[a] = (eid, 0)
            index[b] = (eid, 1)
        return index

    @cached_property
    def opp_map(self) -> Dict[End, End]:
        out = {}
        for a, b in self.edges.values():
            out[a] = b
            out[b] = a
        return out

    def opp(self, h: End) -> End:
        return self.opp_map[h]

    def is_out(self, h: End) -> bool:
        """For oriented diagrams: does the edge at ``h`` leave its node?"""
        eid, i = self.end_index[h]
        return i == 0

    def fnext(self, h: End) -> End:
        """Next half-edge along the face to the left of ``h``."""
        w, t = self.opp(h)
        if w in self.vertices:
            return (w, (t - 1) % 4)
        return (w, (t + 1) % self.ports[w])

    def all_ends(self) -> List[End]:
        out = []
        for v in sorted(self.vertices):
            out.extend((v, s) for s in range(4))
        for p in sorted(self.ports):
            out.extend((p, s) for s in range(self.ports[p]))
        return out

    # ------------------------------------------------------------------
    # faces, pieces, regions

    @cached_property
    def _trace(self):
        faces: Dict[FaceKey, List[End]] = {}
        face_of: Dict[End, FaceKey] = {}
        opp = self.opp_map
        verts = self.vertices
        ports = self.ports
        for h in self.all_ends():
            if h in face_of:
                continue
            cycle = [h]
            while True:
                w, t = opp[cycle[-1]]
                x = (w, (t - 1) % 4) if w in verts else (w, (t + 1) % ports[w])
                if x == h:
                    break
                cycle.append(x)
            key = ("h",) + min(cycle)
            faces[key] = cycle
            for x in cycle:
                face_of[x] = key
        for c in self.circles:
            for side in "ab":
                faces[circle_face(c, side)] = []
        for p, deg in self.ports.items():
            if deg == 0:
                faces[point_face(p)] = []
        return faces, face_of

    @property
    def faces(self) -> Dict[FaceKey, List[End]]:
        return self._trace[0]

    @property
    def face_of(self) -> Dict[End, FaceKey]:
        return self._trace[1]

    @cached_property
    def pieces(self) -> Dict[FaceKey, tuple]:
        """Map each face to the id of the connected piece of the map it bounds.

        Piece ids are ``('n', node)`` with the smallest node of the piece,
        ``('c', cid)`` for a circle.
        """
        parent: Dict[str, str] = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        nodes = list(self.vertices) + list(self.ports)
        for n in nodes:
            parent[n] = n
        for (a, _), (b, _) in self.edges.values():
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        rep: Dict[str, str] = {}
        for n in nodes:
            r = find(n)
            rep[r] = min(rep.get(r, n), n)
        out = {}
        for key, cycle in self.faces.items():
            if key[0] == "h":
                out[key] = ("n", rep[find(cycle[0][0])])
            elif key[0] == "c":
                out[key] = ("c", key[1])
            else:
                out[key] = ("n", key[1])
        return out

    @cached_property
    def piece_faces(self) -> Dict[tuple, List[FaceKey]]:
        out: Dict[tuple, List[FaceKey]] = {}
        for f, pc in self.pieces.items():
            out.setdefault(pc, []).append(f)
        return out

    @cached_property
    def region_of(self) -> Dict[FaceKey, int]:
        out = {}
        for i, r in enumerate(self.regions):
            for f in r:
                out[f] = i
        return out

    @cached_property
    def root_face(self) -> FaceKey:
        """The face that holds the point at infinity / the corner before b0."""
        if self.k == 0:
            return point_face(PORT)
        return self.face_of[(PORT, 0)]

    # ------------------------------------------------------------------
    # validation

    def validate(self) -> "Diagram":
        self._check_slots()
        self._check_planarity()
        self._check_regions()
        if self.oriented:
            bad = orientation_defects(self)
            if bad:
                raise OrientationError(
                    "incoherent orientation at " + ", ".join(sorted(bad))
                )
        return self

    def _check_slots(self):
        seen: Dict[End, str] = {}
        for eid, ends in self.edges.items():
            for node, slot in ends:
                if node not in self.vertices and node not in self.ports:
                    raise DanglingEndpoint(f"edge {eid} ends at unknown node {node}")
                if not 0 <= slot < self.degree(node):
                    raise DanglingEndpoint(f"edge {eid} uses bad slot {node}:{slot}")
                if (node, slot) in seen:
                    raise SlotOccupied(
                        f"slot {node}:{slot} used by edges {seen[(node, slot)]} and {eid}"
                    )
                seen[(node, slot)] = eid
        for h in self.all_ends():
            if h not in seen:
                raise DanglingEndpoint(f"slot {h[0]}:{h[1]} has no edge")
        for v, data in self.vertices.items():
            if data.kind not in (CROSSING, MARKED) or data.bit not in (0, 1):
                raise DiagramError(f"bad vertex data at {v}")

    def _check_planarity(self):
        counts: Dict[tuple, List[int]] = {}
        pieces = self.pieces
        for key in self.faces:
            if key[0] == "h":
                counts.setdefault(pieces[key], [0, 0, 0])[2] += 1
        for a, _ in self.edges.values():
            counts[pieces[self.face_of[a]]][1] += 1
        for node in list(self.vertices) + list(self.ports):
            if self.degree(node) == 0:
                continue
            f = self.face_of[(node, 0)]
            counts[pieces[f]][0] += 1
        for pc, (v, e, f) in counts.items():
            if v - e + f != 2:
                raise PlanarityViolation(
                    f"piece at {pc[1]} has V-E+F = {v - e + f}, expected 2"
                )

    def _check_regions(self):
        faces = self.faces
        seen = set()
        for r in self.regions:
            if not r:
                raise RegionError("empty region")
            pcs = set()
            for f in r:
                if f not in faces:
                    raise UnknownFace(f"region refers to unknown face {f}")
                if f in seen:
                    raise RegionError(f"face {f} in two regions")
                seen.add(f)
                pc = self.pieces[f]
                if pc in pcs:
                    raise RegionError(f"region holds two faces of piece {pc[1]}")
                pcs.add(pc)
        if seen != set(faces):
            missing = sorted(set(faces) - seen, key=repr)
            raise RegionError(f"face {missing[0]} not placed in any region")
        # piece/region incidence must be a tree
        npieces = len(self.piece_faces)
        nregions = len(self.regions)
        if npieces + nregions - 1 != len(faces):
            raise RegionError("placement does not form a tree of nested pieces")
        adj: Dict[tuple, set] = {}
        for i, r in enumerate(self.regions):
            for f in r:
                adj.setdefault(("r", i), set()).add(self.pieces[f])
                adj.setdefault(self.pieces[f], set()).add(("r", i))
        start = next(iter(adj))
        stack, reached = [start], {start}
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in reached:
                    reached.add(y)
                    stack.append(y)
        if len(reached) != len(adj):
            raise RegionError("placement leaves pieces disconnected")

    # ------------------------------------------------------------------
    # convenience

    def marked(self) -> List[str]:
        return sorted(v for v, d in self.vertices.items() if d.kind == MARKED)

    def crossings(self) -> List[str]:
        return sorted(v for v, d in self.vertices.items() if d.kind == CROSSING)

    def size(self) -> int:
        """Edge count used by search bounds (edges plus circles)."""
        return len(self.edges) + len(self.circles)

    def with_regions(self, regions) -> "Diagram":
        """Same map with other regions; cached structure is shared."""
        out = Diagram(self.vertices, self.edges, self.circles, self.ports, regions, self.oriented)
        for name in ("opp_map", "end_index", "_trace", "pieces", "piece_faces"):
            if name in self.__dict__:
                out.__dict__[name] = self.__dict__[name]
        return out

    def unoriented(self) -> "Diagram":
        return Diagram(self.vertices, self.edges, self.circles, self.ports, self.regions)

    def __repr__(self):
        return (
            f"Diagram(V={len(self.vertices)}, E={len(self.edges)}, "
            f"circles={len(self.circles)}, k={self.k}, oriented={self.oriented})"
        )


def auto_face(d: Diagram, piece: tuple) -> FaceKey:
    """Default outward face of a piece: the longest face, ties by key."""
    if piece[0] == "c":
        return circle_face(piece[1], "b")
    fs = d.piece_faces[piece]
    return min(fs, key=lambda f: (-len(d.faces[f]), f))


def default_regions(d: Diagram) -> List[FrozenSet[FaceKey]]:
    """Every face alone, except that each piece not holding the root face puts
    its auto face into the root face's region."""
    root = d.root_face
    root_piece = d.pieces[root]
    regions = []
    outer = {root}
    for f in d.faces:
        if d.pieces[f] == root_piece:
            if f != root:
                regions.append(frozenset([f]))
    for pc in sorted(d.piece_faces):
        if pc == root_piece:
            continue
        af = auto_face(d, pc)
        outer.add(af)
        for f in d.piece_faces[pc]:
            if f != af:
                regions.append(frozenset([f]))
    regions.append(frozenset(outer))
    return regions


def regions_from_unions(d: Diagram, unions: Iterable[Tuple[FaceKey, FaceKey]]):
    """Build a region partition from explicit face unions, attaching any
    piece that stays unconnected to the root region through its auto face."""
    parent = {f: f for f in d.faces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    # piece connectivity through unions
    pparent = {pc: pc for pc in d.piece_faces}

    def pfind(x):
        while pparent[x] != x:
            pparent[x] = pparent[pparent[x]]
            x = pparent[x]
        return x

    for a, b in unions:
        if a not in parent:
            raise UnknownFace(f"unknown face {a}")
        if b not in parent:
            raise UnknownFace(f"unknown face {b}")
        union(a, b)
        pparent[pfind(d.pieces[a])] = pfind(d.pieces[b])
    root = d.root_face
    for pc in sorted(d.piece_faces):
        if pfind(pc) != pfind(d.pieces[root]):
            union(auto_face(d, pc), root)
            pparent[pfind(pc)] = pfind(d.pieces[root])
    groups: Dict[FaceKey, set] = {}
    for f in d.faces:
        groups.setdefault(find(f), set()).add(f)
    return [frozenset(g) for g in groups.values()]


def orientation_defects(d: Diagram) -> List[str]:
    """Vertices whose edge directions break the local pattern.

    Crossings need each strand to pass through (slot i in iff slot i+2 out).
    Marked vertices need alternating directions around the vertex, which makes
    both resolutions coherent.
    """
    bad = []
    for v, data in d.vertices.items():
        outs = [d.is_out((v, s)) for s in range(4)]
        if data.kind == CROSSING:
            ok = outs[0] != outs[2] and outs[1] != outs[3]
        else:
            ok = outs[0] == outs[2] and outs[1] == outs[3] and outs[0] != outs[1]
        if not ok:
            bad.append(v)
    return bad


def _orientation_classes(d: Diagram):
    """Parity union-find over edges: returns (find, conflict).

    Variable x_e is 1 when edge e keeps its stored direction.
    """
    parent = {e: e for e in d.edges}
    par = {e: 0 for e in d.edges}

    def find(e):
        p = 0
        root = e
        while parent[root] != root:
            p ^= par[root]
            root = parent[root]
        return root, p

    def relate(h1, h2, diff):
        # out(h) = x_e xor (h is the second end)
        e1, i1 = d.end_index[h1]
        e2, i2 = d.end_index[h2]
        r1, p1 = find(e1)
        r2, p2 = find(e2)
        want = diff ^ i1 ^ i2
        if r1 == r2:
            return (p1 ^ p2) == want
        parent[r1] = r2
        par[r1] = p1 ^ p2 ^ want
        return True

    ok = True
    for v, data in sorted(d.vertices.items()):
        if data.kind == CROSSING:
            ok &= relate((v, 0), (v, 2), 1)
            ok &= relate((v, 1), (v, 3), 1)
        else:
            ok &= relate((v, 0), (v, 2), 0)
            ok &= relate((v, 1), (v, 3), 0)
            ok &= relate((v, 0), (v, 1), 1)
    return find, not ok


def is_orientable(d: Diagram) -> bool:
    return not _orientation_classes(d)[1]


def orientations(d: Diagram):
    """Yield every coherent orientation of ``d`` (none if it is not orientable)."""
    find, conflict = _orientation_classes(d)
    if conflict:
        return
    roots = sorted({find(e)[0] for e in d.edges})
    circles = list(d.circles)
    swap = {"a": "b", "b": "a"}
    for bits in range(2 ** (len(roots) + len(circles))):
        val = {r: (bits >> i) & 1 for i, r in enumerate(roots)}
        edges = {}
        for e, (a, b) in d.edges.items():
            r, p = find(e)
            edges[e] = (a, b) if (val[r] ^ p) == 0 else (b, a)
        flipped = {
            c for i, c in enumerate(circles) if (bits >> (len(roots) + i)) & 1
        }
        regions = [
            frozenset(
                (f[0], f[1], swap[f[2]]) if f[0] == "c" and f[1] in flipped else f
                for f in reg
            )
            for reg in d.regions
        ]
        yield Diagram(d.vertices, edges, circles, d.ports, regions, True)
