import time

import pytest

from conftest import braid_closure, load_fixture
from mgd.canonical import canonical_code
from mgd.diagram import Diagram
from mgd.invariants import (
    MINUS,
    NO,
    PLUS,
    UNKNOWN,
    YES,
    InvariantError,
    LaurentPolynomial,
    checkerboard,
    component_count,
    invariant_report,
    is_admissible,
    is_unlink_bracket,
    kauffman_bracket,
    link_component_count,
    resolve,
    s_invariant,
    sharp_count,
    simplify_classical,
    t_invariant,
)

DELTA = LaurentPolynomial({2: -1, -2: -1})


def test_plain_circle_report():
    assert invariant_report(load_fixture("circle")) == {
        "crossings": 0,
        "parity": 0,
        "components": 1,
        "muPlus": 1,
        "muMinus": 1,
        "euler": 2,
        "s": None,
        "T": None,
        "sharp": 1,
        "orientable": True,
    }


def test_figure_eight_marked():
    d = load_fixture("figure-eight-marked")
    r = invariant_report(d)
    assert (r["muPlus"], r["muMinus"], r["euler"], r["sharp"]) == (1, 2, 2, 1)
    assert link_component_count(resolve(d, PLUS)) == 1
    assert link_component_count(resolve(d, MINUS)) == 2


def test_resolving_a_link_diagram_is_identity():
    t = load_fixture("trefoil")
    assert canonical_code(resolve(t, PLUS)) == canonical_code(t)
    assert canonical_code(resolve(t, MINUS)) == canonical_code(t)


def test_resolutions_have_no_marked_vertices():
    d = load_fixture("admissible")
    for sign in (PLUS, MINUS):
        r = resolve(d, sign)
        assert not r.marked()
        assert len(r.crossings()) == len(d.crossings())


@pytest.mark.parametrize("name, count", [("circle", 1), ("hopf", 2), ("closure-O2-lhs", 1), ("trefoil", 1)])
def test_link_component_count(name, count):
    assert link_component_count(load_fixture(name)) == count


def test_link_component_count_rejects_marked():
    with pytest.raises(InvariantError):
        link_component_count(load_fixture("figure-eight-marked"))


@pytest.mark.parametrize("name, s", [("two-circles", 0), ("two-circles-overlap", 1), ("hopf", 1)])
def test_s_invariant(name, s):
    assert s_invariant(load_fixture(name)) == s


def test_s_needs_two_components():
    with pytest.raises(InvariantError):
        s_invariant(load_fixture("circle"))


def test_t_invariant_examples():
    three = Diagram({}, {}, ["a", "b", "c"])
    assert t_invariant(three) == [0, 0, 0]
    assert t_invariant(load_fixture("venn")) == [1, 1, 1]
    assert t_invariant(load_fixture("venn-omega3")) == [0, 0, 0]
    with pytest.raises(InvariantError):
        t_invariant(load_fixture("hopf"))


def test_t_alternative_reading_is_available():
    for name in ("venn", "venn-omega3"):
        t = t_invariant(load_fixture(name), "alt")
        assert len(t) == 3 and set(t) <= {0, 1}


def test_checkerboard_circle_and_figure_eight():
    c = checkerboard(load_fixture("circle"), 0)
    assert c[("c", "c1", "a")] == 1 and c[("c", "c1", "b")] == 0
    d = load_fixture("figure-eight-crossing")
    colours = checkerboard(d, 0)
    outer = colours[d.root_face]
    lobes = [f for f, col in colours.items() if col != outer]
    assert outer == 0 and len(lobes) == 2


def test_checkerboard_with_other_components_deleted():
    d = load_fixture("venn")
    for comp in range(3):
        colours = checkerboard(d, comp)
        # one circle alone: its inside black, everything else white
        black = {d.region_of[f] for f, col in colours.items() if col}
        assert black and d.region_of[d.root_face] not in black


def test_sharp_count():
    assert sharp_count(load_fixture("hopf")) == 2
    assert sharp_count(load_fixture("figure-eight-marked")) == 1
    assert sharp_count(load_fixture("omega7-lhs")) != sharp_count(load_fixture("omega7-rhs"))


def test_euler_identity_on_fixtures(fixtures):
    for name, d in fixtures.items():
        if d.k:
            continue
        r = invariant_report(d)
        assert r["euler"] == r["muPlus"] + r["muMinus"] - len(d.marked()), name


def test_components_count_marked_vertices_as_joins():
    assert component_count(load_fixture("p2")) == 1
    assert component_count(load_fixture("two-circles")) == 2


# ----------------------------------------------------------------------
# bracket


def test_bracket_normalisation():
    assert kauffman_bracket(load_fixture("circle")) == LaurentPolynomial.monomial(0)
    assert kauffman_bracket(load_fixture("two-circles")) == DELTA
    assert kauffman_bracket(load_fixture("kink")).is_monomial()


def test_trefoil_bracket():
    # right or left handed, it is not an unknot bracket
    poly = kauffman_bracket(load_fixture("trefoil"))
    assert poly.terms in ({-5: -1, 3: -1, 7: 1}, {5: -1, -3: -1, -7: 1})
    assert not is_unlink_bracket(poly, 1)


def test_unlink_bracket_up_to_framing():
    two = DELTA * LaurentPolynomial.monomial(6)
    assert is_unlink_bracket(two, 2)
    assert not is_unlink_bracket(two, 1)
    assert not is_unlink_bracket(DELTA * LaurentPolynomial.monomial(1), 2)


def test_polynomial_json_round_trip():
    p = kauffman_bracket(load_fixture("figure-eight-knot"))
    assert LaurentPolynomial.from_json(p.to_json()) == p
    exps = [int(t.split("^")[1]) for t in p.to_json()]
    assert exps == sorted(exps)


def test_bracket_size_cap():
    with pytest.raises(InvariantError):
        kauffman_bracket(braid_closure([1] * 9, 2), cap=8)


# ----------------------------------------------------------------------
# simplification and admissibility


def test_simplify_examples():
    assert not simplify_classical(load_fixture("kink")).crossings()
    assert not simplify_classical(load_fixture("closure-O2-lhs")).crossings()
    assert len(simplify_classical(load_fixture("trefoil"), max_nodes=300).crossings()) == 3


def test_culprit_needs_slack():
    d = load_fixture("culprit")
    assert len(d.crossings()) == 8 and link_component_count(d) == 1
    assert is_unlink_bracket(kauffman_bracket(d), 1)
    # no single move lowers the crossing number
    assert len(simplify_classical(d, slack=0).crossings()) == 8
    assert not simplify_classical(d, slack=2).crossings()


def test_simplify_rejects_marked():
    with pytest.raises(InvariantError):
        simplify_classical(load_fixture("figure-eight-marked"))


def test_admissibility_verdicts():
    t0 = time.perf_counter()
    assert is_admissible(load_fixture("admissible")) == YES
    t1 = time.perf_counter()
    assert is_admissible(load_fixture("trefoil-resolution")) == NO
    t2 = time.perf_counter()
    assert t1 - t0 < 5 and t2 - t1 < 5
    assert is_admissible(load_fixture("figure-eight-marked")) == YES


def test_admissibility_unknown_without_certificate():
    # the trefoil resolution cannot be simplified, and with the bracket cap
    # at zero there is no certificate of knottedness either
    d = load_fixture("trefoil-resolution")
    assert is_admissible(d, max_nodes=200, cap=0) == UNKNOWN
