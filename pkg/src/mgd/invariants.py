"""Resolutions, component counts and the diagram invariants.

Components are traced in the link sense: strands pass straight through a
crossing (slot i to slot i+2) and all four slots of a marked vertex belong to
one component.  The sharp count instead lets strands pass straight through
marked vertices as well.
"""

from collections import deque
from typing import Dict, List, Optional, Tuple

from .diagram import CROSSING, PORT, Diagram, DiagramError, is_orientable
from .surgery import HOLE, excise, glue

PLUS = "+"
MINUS = "-"


class InvariantError(ValueError):
    pass


# ----------------------------------------------------------------------
# Laurent polynomials in A


class LaurentPolynomial:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def monomial(cls, exp, coeff=1):
        return cls({exp: coeff})

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(out)

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: Dict[int, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPolynomial(out)

    def __pow__(self, n):
        out = LaurentPolynomial.monomial(0)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_monomial(self):
        return len(self.terms) == 1

    def to_json(self) -> List[str]:
        return [f"{c}*A^{e}" for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, terms: List[str]) -> "LaurentPolynomial":
        out = {}
        for t in terms:
            c, e = t.split("*A^")
            out[int(e)] = out.get(int(e), 0) + int(c)
        return cls(out)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*A^{e}" for e, c in sorted(self.terms.items()))

    __repr__ = __str__


DELTA = LaurentPolynomial({2: -1, -2: -1})
ONE = LaurentPolynomial.monomial(0)


# ----------------------------------------------------------------------
# strand tracing


def _components(d: Diagram, marked_through: bool) -> Tuple[Dict[tuple, int], int]:
    """Label every end with a component number; returns (labels, count).

    Circles are counted but carry no ends."""
    parent = {h: h for h in d.all_ends()}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for a, b in d.edges.values():
        union(a, b)
    for v, data in d.vertices.items():
        if data.kind == CROSSING or marked_through:
            union((v, 0), (v, 2))
            union((v, 1), (v, 3))
        else:
            for s in (1, 2, 3):
                union((v, 0), (v, s))
    labels = {}
    ids: Dict[tuple, int] = {}
    for h in sorted(parent):
        r = find(h)
        if r not in ids:
            ids[r] = len(ids)
        labels[h] = ids[r]
    return labels, len(ids) + len(d.circles)


def component_count(d: Diagram) -> int:
    return _components(d, False)[1]


def link_component_count(d: Diagram) -> int:
    """Closed strands of a link diagram (crossings only)."""
    if d.marked():
        raise InvariantError("link diagrams have no marked vertices")
    return _components(d, True)[1]


def sharp_count(d: Diagram) -> int:
    return _components(d, True)[1]


def component_labels(d: Diagram) -> Dict[str, int]:
    """Component number of each edge and circle (circles numbered last)."""
    labels, _ = _components(d, False)
    out = {e: labels[a] for e, (a, _) in d.edges.items()}
    base = len(set(labels.values()))
    for i, c in enumerate(d.circles):
        out[c] = base + i
    return out


# ----------------------------------------------------------------------
# resolutions


def _vertex_tangle(d: Diagram, v: str) -> Diagram:
    edges = {}
    for s in range(4):
        if d.oriented and not d.is_out((v, s)):
            edges[f"t{s}"] = ((PORT, s), (v, s))
        else:
            edges[f"t{s}"] = ((v, s), (PORT, s))
    return Diagram({v: d.vertices[v]}, edges, (), {PORT: 4}, None, d.oriented)


def replace_vertex(d: Diagram, v: str, pairs) -> Diagram:
    """Replace vertex ``v`` by two arcs joining the given slot pairs."""
    from .moves import Pattern, _half_edge_faces

    t = _vertex_tangle(d, v)
    vmap = {v: (v, 0)}
    hmap = _half_edge_faces(Pattern(t), d, vmap, {})
    ctxs = excise(d, t, vmap, {}, hmap)
    if not ctxs:
        raise DiagramError(f"cannot cut around vertex {v}")
    arcs = {}
    for n, (p, q) in enumerate(pairs):
        if d.oriented and d.is_out((v, p)):
            p, q = q, p
        arcs[f"r{n}"] = ((PORT, p), (PORT, q))
    inner = Diagram({}, arcs, (), {PORT: 4}, None, d.oriented)
    return glue(inner, ctxs[0], HOLE)


def resolution_pairs(data, sign: str):
    p = data.bit
    if sign == PLUS:
        return [(p, p + 1), ((p + 2) % 4, (p + 3) % 4)]
    return [(p + 1, p + 2), ((p + 3) % 4, p)]


def resolve(d: Diagram, sign: str) -> Diagram:
    if sign not in (PLUS, MINUS):
        raise ValueError("sign must be '+' or '-'")
    out = d
    for v in d.marked():
        out = replace_vertex(out, v, resolution_pairs(d.vertices[v], sign))
    return out


def mu(d: Diagram, sign: str) -> int:
    """Components of a resolution, traced without building it."""
    parent = {h: h for h in d.all_ends()}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for a, b in d.edges.values():
        union(a, b)
    for v, data in d.vertices.items():
        if data.kind == CROSSING:
            union((v, 0), (v, 2))
            union((v, 1), (v, 3))
        else:
            for p, q in resolution_pairs(data, sign):
                union((v, p), (v, q))
    return len({find(h) for h in parent}) + len(d.circles)


def euler_characteristic(d: Diagram) -> int:
    return mu(d, PLUS) + mu(d, MINUS) - len(d.marked())


def crossing_parity(d: Diagram) -> int:
    return len(d.crossings()) % 2


# ----------------------------------------------------------------------
# s and T


def _crossing_strands(d: Diagram, labels) -> Dict[str, Tuple[int, int]]:
    return {v: (labels[(v, 0)], labels[(v, 1)]) for v in d.crossings()}


def s_invariant(d: Diagram) -> int:
    labels, n = _components(d, False)
    if n != 2:
        raise InvariantError(f"s needs exactly 2 components, found {n}")
    for a, b in _crossing_strands(d, labels).values():
        if a != b:
            return 1
    return 0


def checkerboard(d: Diagram, comp: int) -> Dict[tuple, int]:
    """Colour (0 white, 1 black) of each face of ``d`` after deleting every
    component other than ``comp``; faces that merge share a colour."""
    labels, _ = _components(d, False)
    clabels = component_labels(d)
    parent = {f: f for f in d.faces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for reg in d.regions:
        reg = list(reg)
        for f in reg[1:]:
            union(reg[0], f)
    kept = []
    for e, (a, b) in d.edges.items():
        if clabels[e] == comp:
            kept.append((d.face_of[a], d.face_of[b]))
        else:
            union(d.face_of[a], d.face_of[b])
    for c in d.circles:
        fa, fb = ("c", c, "a"), ("c", c, "b")
        if clabels[c] == comp:
            kept.append((fa, fb))
        else:
            union(fa, fb)
    adj: Dict[tuple, set] = {}
    for fa, fb in kept:
        ra, rb = find(fa), find(fb)
        if ra == rb:
            raise InvariantError("component is not two-colourable")
        adj.setdefault(ra, set()).add(rb)
        adj.setdefault(rb, set()).add(ra)
    root = find(d.root_face)
    colour = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in adj.get(x, ()):
            if y not in colour:
                colour[y] = 1 - colour[x]
                queue.append(y)
            elif colour[y] == colour[x]:
                raise InvariantError("component is not two-colourable")
    return {f: colour.get(find(f), 0) for f in d.faces}


def t_invariant(d: Diagram, reading: str = "standard") -> List[int]:
    """Sorted triple p(D_1), p(D_2), p(D_3).

    ``reading="standard"`` counts only crossings between the two other
    components; ``"alt"`` also counts their self-crossings."""
    labels, n = _components(d, False)
    if n != 3:
        raise InvariantError(f"T needs exactly 3 components, found {n}")
    strands = _crossing_strands(d, labels)
    comps = sorted(set(labels.values())) + [
        len(set(labels.values())) + i for i in range(len(d.circles))
    ]
    out = []
    for i in comps:
        colours = checkerboard(d, i)
        count = 0
        for v, (a, b) in strands.items():
            if i in (a, b):
                continue
            if a == b and reading != "alt":
                continue
            if colours[d.face_of[(v, 0)]] == 1:
                count += 1
        out.append(count % 2)
    return sorted(out)


# ----------------------------------------------------------------------
# Kauffman bracket


def _state_sum(d: Diagram, cap: int = 20):
    """Dict (boundary matching, loops) -> polynomial over all smoothing states."""
    if d.marked():
        raise InvariantError("bracket needs a link diagram")
    xs = d.crossings()
    if len(xs) > cap:
        raise InvariantError(f"bracket limited to {cap} crossings, got {len(xs)}")
    # process crossings in BFS order to keep the frontier small
    order = []
    seen = set()
    for start in xs:
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            for s in range(4):
                w, _ = d.opp((v, s))
                if w in d.vertices and w not in seen:
                    seen.add(w)
                    queue.append(w)
    done = set()
    # a state matches "open" ends: ends at unprocessed vertices or ports
    states: Dict[Tuple[frozenset, int], LaurentPolynomial] = {(frozenset(), 0): ONE}
    for v in order:
        o = d.vertices[v].bit
        smoothings = (
            (1, [((o + 1) % 4, (o + 2) % 4), ((o + 3) % 4, o)]),
            (-1, [(o, (o + 1) % 4), ((o + 2) % 4, (o + 3) % 4)]),
        )
        new: Dict[Tuple[frozenset, int], LaurentPolynomial] = {}
        for (match, loops), poly in states.items():
            mate = {}
            for a, b in match:
                mate[a] = b
                mate[b] = a
            for sgn, pairs in smoothings:
                adj: Dict[tuple, list] = {}

                def link(a, b):
                    adj.setdefault(a, []).append(b)
                    adj.setdefault(b, []).append(a)

                for p, q in pairs:
                    link(("s", p), ("s", q))
                for s in range(4):
                    h = (v, s)
                    w, t = d.opp(h)
                    if w == v:
                        if s < t:
                            link(("s", s), ("s", t))
                    elif w in done:
                        m = mate[h]
                        if m[0] == v:
                            if s < m[1]:
                                link(("s", s), ("s", m[1]))
                        else:
                            link(("s", s), ("t", m))
                    else:
                        link(("s", s), ("t", (w, t)))
                rest = {(a, b) for a, b in match if a[0] != v and b[0] != v}
                extra = 0
                visited = set()
                for node in list(adj):
                    if node in visited or node[0] != "t":
                        continue
                    prev, cur = None, node
                    visited.add(cur)
                    while True:
                        nxt = [x for x in adj[cur] if x != prev] if prev is not None else adj[cur]
                        prev, cur = cur, nxt[0]
                        visited.add(cur)
                        if cur[0] == "t":
                            break
                    a, b = node[1], cur[1]
                    rest.add((min(a, b), max(a, b)))
                for node in adj:
                    if node in visited:
                        continue
                    extra += 1
                    stack = [node]
                    visited.add(node)
                    while stack:
                        x = stack.pop()
                        for y in adj[x]:
                            if y not in visited:
                                visited.add(y)
                                stack.append(y)
                key = (frozenset(rest), loops + extra)
                term = poly * LaurentPolynomial.monomial(sgn)
                new[key] = new[key] + term if key in new else term
        done.add(v)
        states = new
    return states


def kauffman_bracket(d: Diagram, cap: int = 20) -> LaurentPolynomial:
    """Bracket of a closed link diagram with the unknot normalised to 1."""
    if d.k:
        raise InvariantError("use tangle_bracket for tangles")
    total = LaurentPolynomial()
    free = len(d.circles)
    for (_, loops), poly in _state_sum(d, cap).items():
        n = loops + free
        total = total + (poly * DELTA ** (n - 1) if n else poly)
    return total


def tangle_bracket(d: Diagram, cap: int = 20) -> Dict[frozenset, LaurentPolynomial]:
    """Bracket of a tangle as coefficients over crossingless boundary matchings.

    Closed loops contribute a factor delta each (no normalisation)."""
    out: Dict[frozenset, LaurentPolynomial] = {}
    free = len(d.circles)
    for (match, loops), poly in _state_sum(d, cap).items():
        ends = set()
        for a, b in match:
            ends.update((a, b))
        # boundary points joined directly by an edge
        pairs = set(match)
        for a, b in d.edges.values():
            if a[0] == PORT and b[0] == PORT:
                pairs.add((min(a, b), max(a, b)))
        key = frozenset((a[1], b[1]) if a[1] < b[1] else (b[1], a[1]) for a, b in pairs)
        term = poly * DELTA ** (loops + free)
        out[key] = out[key] + term if key in out else term
    return {k: v for k, v in out.items() if v.terms}


def is_unlink_bracket(poly: LaurentPolynomial, components: int) -> bool:
    """Whether ``poly`` equals (-A^3)^n * delta^(c-1) for some integer n."""
    if not poly.terms:
        return False
    base = DELTA ** (components - 1)
    lo = min(poly.terms) - min(base.terms)
    if lo % 3:
        return False
    n = lo // 3
    sign = -1 if n % 2 else 1
    shifted = LaurentPolynomial({e + 3 * n: sign * c for e, c in base.terms.items()})
    return shifted == poly


# ----------------------------------------------------------------------
# orientation


def try_orient(d: Diagram) -> Optional[Diagram]:
    """Some coherent orientation of ``d``, or None."""
    from .diagram import orientations

    for o in orientations(d):
        return o
    return None


def check_orientation(d: Diagram) -> List[str]:
    from .diagram import orientation_defects

    return sorted(orientation_defects(d)) if d.oriented else []


# ----------------------------------------------------------------------
# report


def invariant_report(d: Diagram, strict_t: str = "standard") -> dict:
    _, comps = _components(d, False)
    mp, mm = mu(d, PLUS), mu(d, MINUS)
    return {
        "crossings": len(d.crossings()),
        "parity": crossing_parity(d),
        "components": comps,
        "muPlus": mp,
        "muMinus": mm,
        "euler": mp + mm - len(d.marked()),
        "s": s_invariant(d) if comps == 2 else None,
        "T": t_invariant(d, strict_t) if comps == 3 else None,
        "sharp": sharp_count(d),
        "orientable": is_orientable(d),
    }


# ----------------------------------------------------------------------
# classical simplification and admissibility

CLASSICAL_RULES = ("O1", "O1a", "O2", "O3", "O3a")
YES = "Yes"
NO = "No"
UNKNOWN = "Unknown"


def _classical_rules():
    from .moves import shipped_catalog

    return shipped_catalog(False).subset(CLASSICAL_RULES)


def _moves_out(d: Diagram, rules, max_crossings=None):
    from .moves import FORWARD, REVERSE, find_sites, vertex_change

    n = len(d.crossings())
    for rule in rules:
        for direction in (FORWARD, REVERSE):
            if max_crossings is not None and n + vertex_change(rule, direction)[1] > max_crossings:
                continue
            yield from find_sites(d, rule, direction, verify=False)


def _greedy(d: Diagram, rules) -> Diagram:
    n = len(d.crossings())
    while n:
        for site in _moves_out(d, rules, n - 1):
            m = len(site.result.crossings())
            if m < n:
                d, n = site.result, m
                break
        else:
            break
    return d


def _escape(cur: Diagram, ceiling: int, rules, budget: int):
    """Breadth-first search below ``ceiling`` for a diagram smaller than ``cur``."""
    from .canonical import canonical_code

    n0 = len(cur.crossings())
    seen = {canonical_code(cur)}
    queue = deque([cur])
    nodes = 0
    while queue and nodes < budget:
        for site in _moves_out(queue.popleft(), rules, ceiling):
            r = site.result
            n = len(r.crossings())
            if n > ceiling:
                continue
            c = canonical_code(r)
            if c in seen:
                continue
            seen.add(c)
            nodes += 1
            if n < n0:
                return r, nodes
            queue.append(r)
            if nodes >= budget:
                break
    return None, nodes


def simplify_classical(l: Diagram, slack: int = 2, max_nodes: int = 100_000, rules=None) -> Diagram:
    """Fewest-crossing diagram reachable from ``l`` within the budget.

    Crossing-decreasing moves are taken greedily.  When none is left a
    breadth-first search is run in which the crossing number may rise above
    the current value, first by one, then by two, up to ``slack``; any
    strictly smaller diagram it meets restarts the greedy phase.
    """
    if l.marked():
        raise InvariantError("classical simplification needs a link diagram")
    if rules is None:
        rules = _classical_rules()
    cur = _greedy(l.unoriented() if l.oriented else l, rules)
    nodes = 1
    while cur.crossings() and nodes < max_nodes:
        n0 = len(cur.crossings())
        better = None
        for k in range(slack + 1):
            better, used = _escape(cur, n0 + k, rules, max_nodes - nodes)
            nodes += used
            if better is not None or nodes >= max_nodes:
                break
        if better is None:
            break
        cur = _greedy(better, rules)
    return cur


def is_admissible(d: Diagram, max_nodes: int = 100_000, slack: int = 2, cap: int = 20) -> str:
    """Yes, No or Unknown for "both resolutions are trivial link diagrams".

    No is only returned with a bracket certificate, Yes only when both
    resolutions were simplified to crossing-free diagrams.
    """
    links = [resolve(d, PLUS), resolve(d, MINUS)]
    for link in links:
        if len(link.crossings()) <= cap:
            poly = kauffman_bracket(link, cap)
            if not is_unlink_bracket(poly, link_component_count(link)):
                return NO
    rules = _classical_rules()
    for link in links:
        if simplify_classical(link, slack, max_nodes, rules).crossings():
            return UNKNOWN
    return YES
