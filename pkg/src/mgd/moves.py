"""Move rules as pairs of tangles, site matching and move application.

A rule side R (a tangle of arity k) occurs in a diagram S when S splits as R
glued into a context C.  Sites are found by matching R's vertices (anchored
on one vertex, propagated along interior edges) or, for sides made only of
bare arcs, by laying the arcs on edges and circles of S.  Every candidate is
confirmed by cutting out the disk, checking the context is planar and gluing
R back to recover S exactly.
"""

import itertools
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Tuple

from .canonical import canonical_code, short_code
from .diagram import PORT, Diagram, DiagramError
from .mgdfile import parse_tangle
from .surgery import HOLE, excise, glue, same_labeled

FORWARD = "forward"
REVERSE = "reverse"


class CatalogError(ValueError):
    pass


@dataclass
class MoveRule:
    id: str
    family: str
    lhs: Diagram
    rhs: Diagram
    shadow: Optional[str] = None

    @property
    def oriented(self) -> bool:
        return self.lhs.oriented

    def side(self, direction: str) -> Tuple[Diagram, Diagram]:
        """(pattern, replacement) for a direction."""
        if direction == FORWARD:
            return self.lhs, self.rhs
        return self.rhs, self.lhs


@dataclass
class MoveCatalog:
    rules: Dict[str, MoveRule]
    sets: Dict[str, List[str]] = field(default_factory=dict)

    def subset(self, name_or_ids) -> List[MoveRule]:
        if isinstance(name_or_ids, str):
            if name_or_ids in self.sets:
                ids = self.sets[name_or_ids]
            else:
                ids = [x.strip() for x in name_or_ids.split(",") if x.strip()]
        else:
            ids = list(name_or_ids)
        missing = [i for i in ids if i not in self.rules]
        if missing:
            raise CatalogError(f"unknown rule or set '{missing[0]}'")
        return [self.rules[i] for i in ids]


# ----------------------------------------------------------------------
# tangle helpers


def rotate_tangle(t: Diagram, r: int) -> Diagram:
    """Relabel boundary point b_i as b_(i+r)."""
    k = t.k
    if k == 0 or r % k == 0:
        return t

    def mv(h):
        return (PORT, (h[1] + r) % k) if h[0] == PORT else h

    edges = {e: (mv(a), mv(b)) for e, (a, b) in t.edges.items()}

    def mf(f):
        return ("h", PORT, (f[2] + r) % k) if f[0] == "h" and f[1] == PORT else f

    out = Diagram(t.vertices, edges, t.circles, t.ports, (), t.oriented)
    # face keys may change with relabeling; rebuild regions through half-edges
    regions = []
    for reg in t.regions:
        new = set()
        for f in reg:
            cyc = t.faces[f]
            if cyc:
                new.add(out.face_of[mv(cyc[0])])
            else:
                new.add(mf(f))
        regions.append(frozenset(new))
    return Diagram(t.vertices, edges, t.circles, t.ports, regions, t.oriented)


def reverse_orientation(t: Diagram) -> Diagram:
    edges = {e: (b, a) for e, (a, b) in t.edges.items()}
    swap = {"a": "b", "b": "a"}
    regions = [
        frozenset((f[0], f[1], swap[f[2]]) if f[0] == "c" else f for f in reg)
        for reg in t.regions
    ]
    return Diagram(t.vertices, edges, t.circles, t.ports, regions, t.oriented)


def rule_class_code(lhs: Diagram, rhs: Diagram) -> bytes:
    """Code of a rule up to boundary rotation and exchange of its sides."""
    k = lhs.k
    best = None
    for a, b in ((lhs, rhs), (rhs, lhs)):
        for r in range(max(k, 1)):
            c = canonical_code(rotate_tangle(a, r)) + b"|" + canonical_code(rotate_tangle(b, r))
            if best is None or c < best:
                best = c
    return best


# ----------------------------------------------------------------------
# catalog text format


# sizes of the three generating sets
GENERATING_SET_SIZES = {"S": 10, "S1": 11, "S2": 12}


def load_catalog(text: str) -> MoveCatalog:
    """Parse a catalog: ``rule <id> family=<tag>`` blocks holding ``lhs`` and
    ``rhs`` tangle blocks (each closed by ``end``), an ``identify`` line and
    ``endrule``; plus ``set <name> = id, id, ...`` lines."""
    rules: Dict[str, MoveRule] = {}
    sets: Dict[str, List[str]] = {}
    lines = text.splitlines()
    i = 0
    header_seen = False

    def fail(msg, n):
        raise CatalogError(f"catalog line {n + 1}: {msg}")

    while i < len(lines):
        line = lines[i].split("#", 1)[0].strip()
        if not line:
            i += 1
            continue
        if not header_seen:
            if line != "catalog v1":
                fail("expected header 'catalog v1'", i)
            header_seen = True
            i += 1
            continue
        words = line.split()
        if words[0] == "set":
            m = line[3:].split("=", 1)
            if len(m) != 2:
                fail("expected 'set <name> = id, ...'", i)
            name = m[0].strip()
            sets[name] = [x.strip() for x in m[1].split(",") if x.strip()]
            i += 1
            continue
        if words[0] != "rule" or len(words) < 2:
            fail(f"unexpected '{line}'", i)
        rid = words[1]
        if rid in rules:
            fail(f"duplicate rule id '{rid}'", i)
        family = ""
        shadow = None
        for w in words[2:]:
            if w.startswith("family="):
                family = w[7:]
            elif w.startswith("shadow="):
                shadow = w[7:]
            else:
                fail(f"unknown rule attribute '{w}'", i)
        start = i
        i += 1
        blocks = {}
        ident = None
        while i < len(lines):
            ln = lines[i].split("#", 1)[0].strip()
            if ln in ("lhs", "rhs"):
                which = ln
                body = []
                i += 1
                while i < len(lines) and lines[i].strip() != "end":
                    body.append(lines[i])
                    i += 1
                if i >= len(lines):
                    fail(f"unterminated {which} block", start)
                try:
                    blocks[which] = parse_tangle("\n".join(body))
                except DiagramError as exc:
                    fail(f"rule {rid} {which}: {exc}", i)
                i += 1
            elif ln.startswith("identify"):
                ident = ln.split()[1:]
                i += 1
            elif ln == "endrule":
                i += 1
                break
            elif not ln:
                i += 1
            else:
                fail(f"unexpected '{ln}' in rule {rid}", i)
        if set(blocks) != {"lhs", "rhs"}:
            fail(f"rule {rid} needs lhs and rhs", start)
        lhs, rhs = blocks["lhs"], blocks["rhs"]
        if lhs.k != rhs.k:
            fail(f"rule {rid}: boundary arity {lhs.k} vs {rhs.k}", start)
        if lhs.oriented != rhs.oriented:
            fail(f"rule {rid}: one side oriented, the other not", start)
        if ident:
            perm = {}
            for tok in ident:
                a, _, b = tok.partition("=")
                perm[int(a.lstrip("b"))] = int(b.lstrip("b"))
            if sorted(perm) != list(range(lhs.k)) or sorted(perm.values()) != list(range(lhs.k)):
                fail(f"rule {rid}: identify line is not a bijection", start)
            shift = {(perm[j] - j) % lhs.k for j in perm} if lhs.k else {0}
            if len(shift) != 1:
                fail(f"rule {rid}: identification must be a rotation", start)
            rhs = rotate_tangle(rhs, -shift.pop())
        if lhs.oriented:
            if boundary_pattern(lhs) != boundary_pattern(rhs):
                fail(f"rule {rid}: boundary in/out patterns differ", start)
        rules[rid] = MoveRule(rid, family, lhs, rhs, shadow)
    if not header_seen:
        raise CatalogError("empty catalog")
    for name, ids in sets.items():
        for x in ids:
            if x not in rules:
                raise CatalogError(f"set {name} refers to unknown rule '{x}'")
        want = GENERATING_SET_SIZES.get(name)
        if want is not None and len(set(ids)) != want:
            raise CatalogError(f"set {name} must have {want} rules, found {len(set(ids))}")
    return MoveCatalog(rules, sets)


def boundary_pattern(t: Diagram) -> Tuple[bool, ...]:
    """For each boundary point, whether the strand there leaves the disk."""
    out = []
    for i in range(t.k):
        out.append(not t.is_out((PORT, i)))
    return tuple(out)


def default_catalog_path(oriented: bool = False):
    name = "oriented.cat" if oriented else "unoriented.cat"
    return resources.files("mgd").joinpath("data", name)


_CACHE: Dict[str, MoveCatalog] = {}


def shipped_catalog(oriented: bool = False) -> MoveCatalog:
    key = "o" if oriented else "u"
    if key not in _CACHE:
        _CACHE[key] = load_catalog(default_catalog_path(oriented).read_text())
    return _CACHE[key]


def full_catalog() -> MoveCatalog:
    u, o = shipped_catalog(False), shipped_catalog(True)
    rules = dict(u.rules)
    rules.update(o.rules)
    sets = dict(u.sets)
    sets.update(o.sets)
    return MoveCatalog(rules, sets)


def shadow_code(rule: MoveRule) -> bytes:
    return rule_class_code(rule.lhs.unoriented(), rule.rhs.unoriented())


def lint_catalog(oriented: MoveCatalog, unoriented: MoveCatalog) -> List[str]:
    """Problems found when checking each oriented rule against its unoriented
    counterpart (named by the rule's ``shadow``); empty when all is well."""
    problems = []
    for rid, rule in sorted(oriented.rules.items()):
        if not rule.oriented:
            continue
        if rule.shadow is None:
            problems.append(f"{rid}: no shadow rule named")
            continue
        base = unoriented.rules.get(rule.shadow)
        if base is None:
            problems.append(f"{rid}: shadow {rule.shadow} not in catalog")
        elif shadow_code(rule) != rule_class_code(base.lhs, base.rhs):
            problems.append(f"{rid}: unoriented shadow differs from {rule.shadow}")
    seen: Dict[bytes, str] = {}
    for rid, rule in sorted(oriented.rules.items()):
        code = rule_class_code(rule.lhs, rule.rhs)
        if code in seen:
            problems.append(f"{rid}: same move as {seen[code]}")
        seen.setdefault(code, rid)
    return problems


# ----------------------------------------------------------------------
# matching


class Pattern:
    """Precomputed matching plan for one side of a rule."""

    def __init__(self, r: Diagram):
        self.r = r
        self.k = r.k
        self.arcs = []
        self.interior = []
        for eid in sorted(r.edges):
            a, b = r.edges[eid]
            if a[0] == PORT and b[0] == PORT:
                self.arcs.append(eid)
            elif a[0] != PORT and b[0] != PORT:
                self.interior.append((a, b))
        if r.circles:
            raise CatalogError("rule sides may not contain circles")
        verts = sorted(r.vertices)
        self.anchor = verts[0] if verts else None
        self.steps = []
        if verts:
            seen = {self.anchor}
            queue = [self.anchor]
            while queue:
                v = queue.pop(0)
                for s in range(4):
                    w, t = r.opp((v, s))
                    if w != PORT and w not in seen:
                        seen.add(w)
                        queue.append(w)
                        self.steps.append((v, s, w, t))
            if len(seen) != len(verts):
                raise CatalogError("rule side vertices must be connected")
        self.interior_faces = [
            f for f, cyc in r.faces.items() if cyc and all(h[0] != PORT for h in cyc)
        ]
        self.boundary_faces = [
            f for f, cyc in r.faces.items() if cyc and any(h[0] == PORT for h in cyc)
        ]


_PATTERNS: Dict[int, Pattern] = {}


def pattern_for(r: Diagram) -> Pattern:
    p = _PATTERNS.get(id(r))
    if p is None or p.r is not r:
        p = Pattern(r)
        _PATTERNS[id(r)] = p
    return p


def _vertex_maps(p: Pattern, s: Diagram):
    r = p.r
    if p.anchor is None:
        yield {}
        return
    a_data = r.vertices[p.anchor]
    for w in sorted(s.vertices):
        sd = s.vertices[w]
        if sd.kind != a_data.kind:
            continue
        for rot in range(4):
            if a_data.rotated(rot) != sd:
                continue
            vmap = {p.anchor: (w, rot)}
            used = {w}
            ok = True
            for v, sl, u, t in p.steps:
                if u in vmap:
                    continue
                wv, rv = vmap[v]
                w2, t2 = s.opp((wv, (sl + rv) % 4))
                if w2 not in s.vertices or w2 in used:
                    ok = False
                    break
                rot2 = (t2 - t) % 4
                if r.vertices[u].rotated(rot2) != s.vertices[w2]:
                    ok = False
                    break
                vmap[u] = (w2, rot2)
                used.add(w2)
            if not ok:
                continue
            for a, b in p.interior:
                wa, ra = vmap[a[0]]
                wb, rb = vmap[b[0]]
                if s.opp((wa, (a[1] + ra) % 4)) != (wb, (b[1] + rb) % 4):
                    ok = False
                    break
            if not ok:
                continue
            if r.oriented:
                for v, (w, rot) in vmap.items():
                    for sl in range(4):
                        if r.is_out((v, sl)) != s.is_out((w, (sl + rot) % 4)):
                            ok = False
                            break
                    if not ok:
                        break
            if ok:
                yield vmap


def _arc_placements(p: Pattern, s: Diagram, blocked):
    """Ways of laying the bare arcs of the pattern on edges/circles of s."""
    if not p.arcs:
        yield {}
        return
    hosts = []
    for eid in sorted(s.edges):
        if eid in blocked:
            continue
        for d in ((1,) if s.oriented else (1, -1)):
            hosts.append((eid, d))
    for cid in s.circles:
        for d in ((1,) if s.oriented else (1, -1)):
            hosts.append((cid, d))
    for combo in itertools.product(hosts, repeat=len(p.arcs)):
        by_host: Dict[str, List[int]] = {}
        for n, (h, _) in enumerate(combo):
            by_host.setdefault(h, []).append(n)
        orders = []
        for h, idxs in by_host.items():
            if h in s.edges:
                orders.append([(h, perm) for perm in itertools.permutations(idxs)])
            else:
                first, rest = idxs[0], idxs[1:]
                orders.append([(h, (first,) + perm) for perm in itertools.permutations(rest)])
        for choice in itertools.product(*orders):
            arcs = {}
            for h, perm in choice:
                for pos, n in enumerate(perm):
                    eid = p.arcs[n]
                    arcs[eid] = (h, combo[n][1], pos)
            yield arcs


def _half_edge_faces(p: Pattern, s: Diagram, vmap, arcs):
    """Map each half-edge of the pattern to the face of s on its left."""
    r = p.r
    hmap = {}
    for eid, (a, b) in r.edges.items():
        if eid in arcs:
            host, d, _ = arcs[eid]
            if host in s.edges:
                x, y = s.edges[host]
                fa, fb = s.face_of[x], s.face_of[y]
            else:
                fa, fb = ("c", host, "a"), ("c", host, "b")
            if d < 0:
                fa, fb = fb, fa
            hmap[a], hmap[b] = fa, fb
            continue
        for x, y in ((a, b), (b, a)):
            if x[0] == PORT:
                continue
            w, rot = vmap[x[0]]
            sx = (w, (x[1] + rot) % 4)
            hmap[x] = s.face_of[sx]
            if y[0] == PORT:
                hmap[y] = s.face_of[s.opp(sx)]
    return hmap


def _faces_ok(p: Pattern, s: Diagram, hmap) -> bool:
    r = p.r
    for f in p.interior_faces:
        cyc = r.faces[f]
        g = hmap[cyc[0]]
        if any(hmap[h] != g for h in cyc):
            return False
        if len(s.regions[s.region_of[g]]) != 1:
            return False
    for f in p.boundary_faces:
        cyc = r.faces[f]
        reg = s.region_of[hmap[cyc[0]]]
        if any(s.region_of[hmap[h]] != reg for h in cyc):
            return False
    return True


def _arcs_oriented_ok(p: Pattern, s: Diagram, arcs) -> bool:
    return True


@dataclass
class MatchSite:
    rule: str
    direction: str
    vmap: Dict[str, Tuple[str, int]]
    arcs: Dict[str, Tuple[str, int, int]]
    context: Diagram
    result: Diagram
    key: str

    def describe(self) -> dict:
        return {
            "rule": self.rule,
            "direction": self.direction,
            "vertices": {v: [w, rot] for v, (w, rot) in sorted(self.vmap.items())},
            "arcs": {e: list(x) for e, x in sorted(self.arcs.items())},
            "site": self.key,
        }


def embeddings(s: Diagram, r: Diagram):
    """All (vmap, arcs, context) decompositions of s as r glued into a context."""
    p = pattern_for(r)
    if s.oriented != r.oriented:
        return
    for vmap in _vertex_maps(p, s):
        blocked = set()
        for w, _ in vmap.values():
            for sl in range(4):
                blocked.add(s.end_index[(w, sl)][0])
        for arcs in _arc_placements(p, s, blocked):
            hmap = _half_edge_faces(p, s, vmap, arcs)
            if not _faces_ok(p, s, hmap):
                continue
            for ctx in excise(s, r, vmap, arcs, hmap):
                yield vmap, arcs, ctx


def check_decomposition(s: Diagram, r: Diagram, vmap, ctx) -> bool:
    """Independent confirmation: gluing r back into the context gives s."""
    try:
        back = glue(r, ctx, rename=dict(vmap))
    except DiagramError:
        return False
    return same_labeled(back, s)


def vertex_change(rule: MoveRule, direction: str = FORWARD) -> Tuple[int, int]:
    """Change in (vertex count, crossing count) made by one application."""
    pattern, replacement = rule.side(direction)
    return (
        len(replacement.vertices) - len(pattern.vertices),
        len(replacement.crossings()) - len(pattern.crossings()),
    )


def min_result_size(s: Diagram, rule: MoveRule, direction: str = FORWARD) -> int:
    """Lower bound on ``size()`` of any result: edges are fixed by the
    vertex count, only circles are left open."""
    nv = len(s.vertices) + vertex_change(rule, direction)[0]
    return (4 * nv + sum(s.ports.values())) // 2


def find_sites(
    s: Diagram, rule: MoveRule, direction: str = FORWARD, verify: bool = True
) -> List[MatchSite]:
    """All sites of ``rule`` in ``s``; distinct sites have distinct results.

    With ``verify`` each decomposition is confirmed by gluing the matched
    side back and comparing with ``s``.  Search expansion turns this off and
    relies on replaying the final trace with it on.
    """
    pattern, replacement = rule.side(direction)
    if s.oriented != rule.oriented:
        return []
    found: Dict[bytes, MatchSite] = {}
    for vmap, arcs, ctx in embeddings(s, pattern):
        if verify and not check_decomposition(s, pattern, vmap, ctx):
            continue
        try:
            result = glue(replacement, ctx)
        except DiagramError:
            continue
        code = canonical_code(result)
        if code in found:
            continue
        found[code] = MatchSite(
            rule.id, direction, vmap, arcs, ctx, result, short_code(result, code)
        )
    return [found[c] for c in sorted(found)]


def apply_move(s: Diagram, site: MatchSite, validate: bool = True) -> Diagram:
    if validate:
        try:
            site.result.validate()
        except DiagramError as exc:
            raise RuntimeError(f"move produced an invalid diagram: {exc}") from exc
    return site.result


def closure(t: Diagram, offset: int = 0, pairs=None) -> Diagram:
    """Closed diagram made by joining boundary points with arcs outside the
    disk: ``pairs`` if given (they must not interleave), else offset+2i with
    offset+2i+1."""
    k = t.k
    if k == 0:
        return t
    if k % 2:
        raise ValueError("odd boundary")
    if pairs is None:
        pairs = [((offset + 2 * i) % k, (offset + 2 * i + 1) % k) for i in range(k // 2)]
    for a, b in pairs:
        for c, d in pairs:
            lo, hi = sorted((a, b))
            if (lo < c < hi) != (lo < d < hi):
                raise ValueError("closing arcs cross")
    pattern = boundary_pattern(t) if t.oriented else None
    edges = {}
    for i, (a, b) in enumerate(pairs):
        if pattern is not None:
            if pattern[a] == pattern[b]:
                raise ValueError("closing arc would join two heads or two tails")
            if not pattern[a]:
                a, b = b, a
        edges[f"z{i}"] = ((HOLE, (-a) % k), (HOLE, (-b) % k))
    ctx = Diagram({}, edges, (), {PORT: 0, HOLE: k}, None, t.oriented)
    return glue(t, ctx).validate()


def opposite(direction: str) -> str:
    return REVERSE if direction == FORWARD else FORWARD


def move_delta(s: Diagram, site: MatchSite, strict_t: str = "standard") -> dict:
    from .invariants import invariant_report

    before = invariant_report(s, strict_t=strict_t)
    after = invariant_report(site.result, strict_t=strict_t)
    delta = {}
    for key, b in before.items():
        a = after[key]
        if isinstance(b, int) and isinstance(a, int) and not isinstance(b, bool):
            delta[key] = a - b
        else:
            delta[key] = None if a == b else [b, a]
    return {"before": before, "after": after, "delta": delta}
