import json
from importlib import resources

import jsonschema
import pytest
from click.testing import CliRunner

from conftest import FIXTURES
from mgd.canonical import canonical_code
from mgd.cli import main
from mgd.invariants import MINUS, component_count, resolve
from mgd.mgdfile import parse


def schema(name):
    text = resources.files("mgd").joinpath("data", "schemas", f"{name}.json").read_text()
    return json.loads(text)


def run(*args, env=None):
    result = CliRunner().invoke(main, [str(a) for a in args], env=env)
    return result.exit_code, result.output


def fx(name):
    return FIXTURES / f"{name}.mgd"


def test_validate_circle():
    code, out = run("validate", fx("circle"))
    assert code == 0
    assert out.strip() == "V=0 E=0 F=2 components=1"


def test_validate_json():
    code, out = run("validate", fx("admissible"), "--format", "json")
    assert code == 0
    jsonschema.validate(json.loads(out), schema("validate"))


def test_validate_reports_occupied_slot(tmp_path):
    bad = tmp_path / "bad.mgd"
    bad.write_text("mgd v1\nvertex x crossing over=0,2\nedge a x:0 x:1\nedge b x:0 x:2\nedge c x:3 x:3\n")
    code, out = run("validate", bad)
    assert code == 2
    assert "slot occupied" in out


def test_input_errors_exit_two(tmp_path):
    assert run("validate", tmp_path / "missing.mgd")[0] == 2
    syntax = tmp_path / "syntax.mgd"
    syntax.write_text("mgd v1\nnonsense\n")
    code, out = run("--format", "json", "validate", syntax)
    assert code == 2
    body = json.loads(out)
    jsonschema.validate(body, schema("error"))
    assert body["error"] == "syntax error"


def test_invariants_json():
    code, out = run("invariants", fx("two-circles"))
    body = json.loads(out)
    jsonschema.validate(body, schema("invariants"))
    assert code == 0 and body["s"] == 0 and body["T"] is None
    body = json.loads(run("invariants", fx("venn"))[1])
    assert body["T"] == [1, 1, 1]
    body = json.loads(run("invariants", fx("circle"))[1])
    assert (body["euler"], body["muPlus"], body["muMinus"]) == (2, 1, 1)


def test_strict_t_reading_flag():
    code, out = run("invariants", fx("venn"), "--strict-t-reading", "alt")
    assert code == 0 and len(json.loads(out)["T"]) == 3


def test_resolve_then_invariants(tmp_path):
    out_file = tmp_path / "neg.mgd"
    code, _ = run("resolve", fx("admissible"), "--sign", "-", "-o", out_file)
    assert code == 0
    body = json.loads(run("invariants", out_file)[1])
    d = parse(fx("admissible").read_text())
    assert body["components"] == component_count(resolve(d, MINUS)) == body["sharp"]
    assert body["components"] == json.loads(run("invariants", fx("admissible"))[1])["muMinus"]


def test_apply_adds_a_kink():
    code, out = run("apply", fx("circle"), "--move", "O1", "--site", "0", "--reverse")
    assert code == 0
    d = parse(out)
    assert len(d.crossings()) == 1 and not d.circles


def test_apply_bad_site_index():
    code, out = run("apply", fx("circle"), "--move", "O1", "--site", "5", "--reverse")
    assert code == 2 and "no such site" in out


def test_sites_json():
    code, out = run("sites", fx("venn"), "--move", "O3", "--reverse")
    body = json.loads(out)
    jsonschema.validate(body, schema("sites"))
    assert code == 0 and [s["index"] for s in body] == list(range(len(body)))


def test_unknown_move():
    assert run("sites", fx("venn"), "--move", "O99")[0] == 2


def test_search_found_and_not_found():
    code, out = run("search", fx("closure-O1-lhs"), fx("circle"), "--moves", "O1")
    body = json.loads(out)
    jsonschema.validate(body, schema("search"))
    assert code == 0 and body["depth"] == 1
    code, out = run("search", fx("trefoil"), fx("circle"), "--set", "S", "--max-nodes", "50")
    assert code == 1 and json.loads(out)["status"] == "BudgetExceeded"


def test_verify_lemma_4_1():
    code, out = run("verify-lemma", "lemma-4.1")
    body = json.loads(out)
    jsonschema.validate(body, schema("lemma"))
    assert code == 0 and body["met"] and body["trace"]["steps"]


def test_verify_lemma_negative_with_tight_budget():
    code, out = run("verify-lemma", "reidemeister-G2b", "--max-nodes", "10")
    assert code == 1 and json.loads(out)["status"] == "BudgetExceeded"


def test_verify_lemma_independence_entry():
    code, out = run("verify-lemma", "independence-O2")
    body = json.loads(out)
    jsonschema.validate(body, schema("lemma"))
    assert code == 0 and body["report"]["witness_values"] == [0, 1]


def test_verify_lemma_unknown_name():
    assert run("verify-lemma", "lemma-9.9")[0] == 2


def test_verify_lemma_list():
    code, out = run("verify-lemma", "--list")
    assert code == 0 and "lemma-4.3" in json.loads(out)


def test_bracket_and_admissible():
    code, out = run("bracket", fx("trefoil"))
    jsonschema.validate(json.loads(out), schema("bracket"))
    assert code == 0
    assert run("bracket", fx("figure-eight-marked"))[0] == 2
    code, out = run("admissible", fx("admissible"))
    jsonschema.validate(json.loads(out), schema("admissible"))
    assert code == 0 and json.loads(out)["admissible"] == "Yes"
    code, out = run("admissible", fx("trefoil-resolution"))
    assert code == 1 and json.loads(out)["admissible"] == "No"


def test_lint():
    code, out = run("lint")
    body = json.loads(out)
    jsonschema.validate(body, schema("lint"))
    assert code == 0 and body["sets"] == {"S": 10, "S1": 11, "S2": 12}


def test_catalog_option_and_environment(tmp_path):
    from mgd.moves import default_catalog_path

    small = tmp_path / "small.cat"
    text = default_catalog_path(False).read_text()
    small.write_text(text)
    assert run("sites", fx("venn"), "--move", "O3", "--reverse", "--catalog", small)[0] == 0
    empty = tmp_path / "empty.cat"
    empty.write_text("catalog v1\n")
    assert run("sites", fx("venn"), "--move", "O3", env={"MGD_CATALOG": str(empty)})[0] == 2
    assert run("sites", fx("venn"), "--move", "O3", "--catalog", tmp_path / "none.cat")[0] == 2


def test_text_and_json_agree_on_resolve():
    code, text = run("resolve", fx("figure-eight-marked"), "--sign", "+")
    code2, js = run("resolve", fx("figure-eight-marked"), "--sign", "+", "--format", "json")
    body = json.loads(js)
    jsonschema.validate(body, schema("diagram"))
    assert code == code2 == 0
    assert canonical_code(parse(text)) == canonical_code(parse(body["diagram"]))


def test_commands_are_deterministic():
    a = run("sites", fx("admissible"), "--move", "O2", "--reverse")
    b = run("sites", fx("admissible"), "--move", "O2", "--reverse")
    assert a == b


@pytest.mark.parametrize("cmd", ["invariants", "admissible"])
def test_tangles_are_rejected(cmd, tmp_path):
    t = tmp_path / "t.mgd"
    t.write_text("mgd v1\nboundary b0 b1\nedge a @b0 @b1\n")
    assert run(cmd, t)[0] == 2
