import random
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from mgd.diagram import CROSSING, MARKED, PORT, Diagram, Vertex
from mgd.mgdfile import parse
from mgd.moves import shipped_catalog

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

FIXTURES = Path(str(resources.files("mgd").joinpath("data", "fixtures")))


def load_fixture(name: str) -> Diagram:
    return parse((FIXTURES / f"{name}.mgd").read_text())


def all_fixtures():
    return {p.stem: parse(p.read_text()) for p in sorted(FIXTURES.glob("*.mgd"))}


def braid_closure(word, strands, marks=None, circles=0):
    """Closure of a braid word as a diagram.

    ``word`` holds signed generators (+i or -i for sigma_i, 1-based);
    ``marks`` maps letter positions to a plus-pairing bit, turning those
    crossings into marked vertices.  Strand positions never touched by the
    word become circles, as do ``circles`` extra ones."""
    marks = marks or {}
    label = list(range(strands))
    nxt = strands
    entries = []
    for n, g in enumerate(word):
        i = abs(g) - 1
        a, b = label[i], label[i + 1]
        c, d = nxt, nxt + 1
        nxt += 2
        # counterclockwise: bottom right, top right, top left, bottom left
        ccw = [b, d, c, a]
        entries.append((ccw, 1 if g > 0 else 0, marks.get(n)))
        label[i], label[i + 1] = c, d
    alias = {label[i]: i for i in range(strands)}
    vertices, edges, open_ends = {}, {}, {}
    for n, (ccw, over, mark) in enumerate(entries):
        v = f"x{n}"
        vertices[v] = Vertex(MARKED, mark) if mark is not None else Vertex(CROSSING, over)
        for s, lab in enumerate(ccw):
            lab = alias.get(lab, lab)
            if lab in open_ends:
                edges[f"e{lab}"] = (open_ends.pop(lab), (v, s))
            else:
                open_ends[lab] = (v, s)
    touched = {abs(g) - 1 for g in word} | {abs(g) for g in word}
    free = [f"c{i}" for i in range(strands) if i not in touched]
    free += [f"k{i}" for i in range(circles)]
    assert not open_ends, open_ends
    return Diagram(vertices, edges, free).validate()


def random_braid_diagram(rng: random.Random, max_vertices=8, marked=True, circles=True):
    strands = rng.randint(1, 4)
    length = rng.randint(0, max_vertices) if strands > 1 else 0
    word = [rng.choice([1, -1]) * rng.randint(1, strands - 1) for _ in range(length)]
    marks = {}
    if marked:
        for n in range(length):
            if rng.random() < 0.35:
                marks[n] = rng.randint(0, 1)
    extra = rng.randint(0, 1) if circles else 0
    return braid_closure(word, strands, marks, extra)


def relabel(d: Diagram, rng: random.Random) -> Diagram:
    """Same diagram with fresh ids and every vertex's slots renumbered."""
    names = list(d.vertices)
    fresh = [f"w{i}" for i in range(len(names))]
    rng.shuffle(fresh)
    vname = dict(zip(names, fresh))
    rot = {v: rng.randint(0, 3) for v in names}

    def end(h):
        v, s = h
        if v == PORT:
            return h
        # slot s becomes s - rot so that the data rotates by -rot
        return (vname[v], (s - rot[v]) % 4)

    vertices = {vname[v]: d.vertices[v].rotated(-rot[v]) for v in names}
    eids = list(d.edges)
    efresh = [f"f{i}" for i in range(len(eids))]
    rng.shuffle(efresh)
    edges = {efresh[i]: (end(d.edges[e][0]), end(d.edges[e][1])) for i, e in enumerate(eids)}
    cmap = {c: f"q{i}" for i, c in enumerate(d.circles)}

    bare = Diagram(vertices, edges, list(cmap.values()), d.ports, None, d.oriented)

    def face(f):
        if f[0] == "h":
            # face keys are representatives of their boundary cycle
            return bare.face_of[end(d.faces[f][0])]
        if f[0] == "c":
            return ("c", cmap[f[1]], f[2])
        return f

    regions = [frozenset(face(f) for f in r) for r in d.regions]
    return bare.with_regions(regions).validate()


@pytest.fixture(scope="session")
def ucat():
    return shipped_catalog(False)


@pytest.fixture(scope="session")
def ocat():
    return shipped_catalog(True)


@pytest.fixture(scope="session")
def fixtures():
    return all_fixtures()
