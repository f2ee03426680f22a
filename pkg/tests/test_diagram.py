import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import all_fixtures, braid_closure, load_fixture, random_braid_diagram, relabel
from mgd.canonical import canonical_code
from mgd.diagram import (
    CROSSING,
    MARKED,
    DanglingEndpoint,
    Diagram,
    OrientationError,
    PlanarityViolation,
    SlotOccupied,
    UnknownFace,
    Vertex,
    is_orientable,
    orientation_defects,
    orientations,
)
from mgd.invariants import check_orientation, try_orient
from mgd.mgdfile import MgdSyntaxError, parse, parse_tangle, serialize


def figure_eight(kind=MARKED, bit=0):
    return Diagram(
        {"v": Vertex(kind, bit)},
        {"e1": (("v", 0), ("v", 3)), "e2": (("v", 1), ("v", 2))},
    ).validate()


def test_minimal_circle_file():
    d = parse("mgd v1\ncircle c0\nouter auto\n")
    assert (len(d.circles), len(d.vertices), len(d.edges)) == (1, 0, 0)
    assert len(d.regions) == 2


def test_figure_eight_marked_file():
    d = load_fixture("figure-eight-marked")
    assert len(d.vertices) == 1 and len(d.edges) == 2
    assert d.marked() == ["m1"]


def test_header_only_for_empty_diagram():
    assert serialize(Diagram({}, {})) == "mgd v1\n"
    assert len(parse("mgd v1\n").regions) == 1


@pytest.mark.parametrize(
    "text, error",
    [
        ("mgd v1\nvertex x crossing over=0,2\nedge a x:0 x:1\nedge b x:0 x:2\nedge c x:3 x:3\n", SlotOccupied),
        ("mgd v1\nvertex x crossing over=0,2\nedge a x:0 x:1\n", DanglingEndpoint),
        ("mgd v1\nvertex x crossing over=0,2\nedge a x:0 x:2\nedge b x:1 x:3\n", PlanarityViolation),
        ("mgd v1\ncircle c0\nouter nowhere:a\n", UnknownFace),
        ("mgd v1\nvertex x crossing over=0,1\n", MgdSyntaxError),
        ("mgd v2\n", MgdSyntaxError),
        ("mgd v1\nvertex x crossing over=0,2\nedge a x:0 x:3 dir=x:0\nedge b x:1 x:2\n", OrientationError),
    ],
)
def test_semantic_errors_are_named(text, error):
    with pytest.raises(error):
        parse(text)


def test_syntax_error_has_position():
    with pytest.raises(MgdSyntaxError) as info:
        parse("mgd v1\ncircle c0\nbogus line here\n")
    assert info.value.line == 3
    assert "line 3" in str(info.value)


def test_tangle_file():
    t = parse_tangle("mgd v1\nboundary b0 b1 b2 b3\nedge a @b0 @b1\nedge b @b2 @b3\n")
    assert t.k == 4 and not t.vertices


@pytest.mark.parametrize(
    "name, faces",
    [("circle", 2), ("figure-eight-crossing", 3), ("trefoil", 5), ("hopf", 4), ("two-circles", 3)],
)
def test_face_counts(name, faces):
    assert len(load_fixture(name).regions) == faces


def test_faces_partition_half_edges(fixtures):
    for name, d in fixtures.items():
        ends = [h for cyc in d.faces.values() for h in cyc]
        assert sorted(ends) == sorted(d.all_ends()), name
        assert all(d.face_of[h] == f for f, cyc in d.faces.items() for h in cyc)


def test_euler_formula_per_component(fixtures):
    # a piece with V vertices and E edges bounds E - V + 2 faces (a circle
    # counts as one vertex and one edge), one shared with the piece around it
    for name, d in fixtures.items():
        if d.k:
            continue
        pieces = {pc for pc in d.pieces.values()} - {("n", "@")}
        v, e = len(d.vertices), len(d.edges)
        assert len(d.regions) == e - v + len(pieces) + 1, name


def test_components_of_examples():
    from mgd.cli import component_count

    assert component_count(load_fixture("two-circles")) == 2
    assert component_count(load_fixture("hopf")) == 1
    assert component_count(load_fixture("figure-eight-marked")) == 1


def test_canonical_code_sensitivity():
    base = figure_eight(CROSSING, 0)
    assert canonical_code(base) != canonical_code(figure_eight(MARKED, 0))
    assert canonical_code(base) != canonical_code(figure_eight(CROSSING, 1))
    assert canonical_code(braid_closure([1, 1, 1], 2)) != canonical_code(braid_closure([-1, -1, -1], 2))


def test_canonical_code_depends_on_outer_face():
    # a circle nested inside one lobe of a figure eight versus outside it
    outer = parse("mgd v1\nvertex x crossing over=0,2\nedge a x:0 x:3\nedge b x:1 x:2\ncircle c in=x:0\n")
    inner = parse("mgd v1\nvertex x crossing over=0,2\nedge a x:0 x:3\nedge b x:1 x:2\ncircle c in=x:1\n")
    codes = {canonical_code(outer), canonical_code(inner)}
    assert len(codes) == 2 or outer.regions != inner.regions


def test_relabel_keeps_code_on_fixtures(fixtures):
    rng = random.Random(11)
    for name, d in fixtures.items():
        assert canonical_code(relabel(d, rng)) == canonical_code(d), name


@given(st.integers(0, 10**9))
def test_relabel_keeps_code(seed):
    rng = random.Random(seed)
    d = random_braid_diagram(rng)
    assert canonical_code(relabel(d, rng)) == canonical_code(d)


@given(st.integers(0, 10**9))
def test_serialize_round_trip_property(seed):
    d = random_braid_diagram(random.Random(seed))
    assert canonical_code(parse(serialize(d))) == canonical_code(d)


def test_serialize_is_stable(fixtures):
    for name, d in fixtures.items():
        text = serialize(d)
        assert serialize(parse(text)) == text, name


# orientation


def test_circle_orientations():
    circle = load_fixture("circle")
    assert len(list(orientations(circle))) == 2
    assert check_orientation(try_orient(circle)) == []


def test_classical_diagrams_are_orientable():
    rng = random.Random(5)
    for _ in range(30):
        assert is_orientable(random_braid_diagram(rng, marked=False))


def test_marked_vertex_orientation_pattern():
    # opposite slots point the same way, so both resolutions are coherent
    text = "mgd v1\nvertex m marked plus=0,1/2,3\nedge a m:0 m:3 dir=m:0\nedge b m:1 m:2 dir={}\n"
    assert parse(text.format("m:2")).oriented
    with pytest.raises(OrientationError, match="incoherent orientation at m"):
        parse(text.format("m:1"))


def test_non_orientable_fixture():
    p2 = load_fixture("p2")
    assert not is_orientable(p2)
    assert try_orient(p2) is None


def test_oriented_fixture_is_valid():
    d = load_fixture("admissible-oriented")
    assert d.oriented and orientation_defects(d) == []


@given(st.integers(0, 10**9))
def test_try_orient_gives_valid_orientation(seed):
    d = random_braid_diagram(random.Random(seed))
    o = try_orient(d)
    if o is not None:
        assert check_orientation(o) == []
        assert canonical_code(o.unoriented()) == canonical_code(d)


def test_every_fixture_validates():
    assert all_fixtures()
