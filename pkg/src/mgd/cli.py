"""Command-line front end.

Every command reads ``.mgd`` files and writes either JSON or plain text.
Exit codes: 0 success, 1 negative result, 2 bad input, 3 internal error.
"""

import functools
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Optional

import click

from .diagram import PORT, Diagram, DiagramError
from .invariants import (
    MINUS,
    PLUS,
    YES,
    InvariantError,
    invariant_report,
    is_admissible,
    kauffman_bracket,
)
from .invariants import resolve as resolve_diagram
from .mgdfile import parse, serialize
from .moves import (
    FORWARD,
    REVERSE,
    CatalogError,
    MoveCatalog,
    find_sites,
    full_catalog,
    lint_catalog,
    load_catalog,
    shipped_catalog,
)
from .search import Bounds, independence_report, load_lemmas, run_lemma, search_sequence

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class InputError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class Outcome(Exception):
    """Raised by a command to finish with a payload and an exit status."""

    def __init__(self, payload, status: int = EXIT_OK, text: Optional[str] = None):
        super().__init__()
        self.payload = payload
        self.status = status
        self.text = text


# ----------------------------------------------------------------------
# configuration


class Config:
    def __init__(self):
        self.catalog_path: Optional[str] = None
        self.fmt: Optional[str] = None
        self.strict_t = "standard"

    def catalog(self) -> MoveCatalog:
        path = self.catalog_path or os.environ.get("MGD_CATALOG")
        if not path:
            return full_catalog()
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InputError("I/O error", f"{path}: {exc.strerror or exc}") from exc
        try:
            return load_catalog(text)
        except (CatalogError, DiagramError) as exc:
            raise InputError("catalog error", f"{path}: {exc}") from exc


def common_options(f):
    """Options accepted both before and after the command name."""

    @click.option("--catalog", "catalog_path", default=None, help="Move catalog file.")
    @click.option("--format", "fmt", type=click.Choice(["json", "text"]), default=None)
    @click.option("--strict-t-reading", "strict_t", type=click.Choice(["standard", "alt"]), default=None)
    @functools.wraps(f)
    def wrapper(*args, catalog_path, fmt, strict_t, **kwargs):
        cfg = click.get_current_context().ensure_object(Config)
        if catalog_path is not None:
            cfg.catalog_path = catalog_path
        if fmt is not None:
            cfg.fmt = fmt
        if strict_t is not None:
            cfg.strict_t = strict_t
        return f(cfg, *args, **kwargs)

    return wrapper


def bounds_options(f):
    f = click.option("--max-nodes", type=int, default=None)(f)
    f = click.option("--max-edges", type=int, default=None)(f)
    f = click.option("--max-depth", type=int, default=None)(f)
    return f


def read_diagram(path: str) -> Diagram:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError("I/O error", f"{path}: {exc.strerror or exc}") from exc
    try:
        return parse(text)
    except DiagramError as exc:
        raise InputError(exc.kind, f"{path}: {exc}") from exc


def finish(cfg: Config, default_fmt: str, payload, status=EXIT_OK, text=None):
    fmt = cfg.fmt or default_fmt
    if fmt == "json" or text is None:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(text.rstrip("\n"))
    raise Outcome(payload, status)


def component_count(d: Diagram) -> int:
    pieces = set(d.pieces.values())
    if d.k == 0:
        pieces.discard(("n", PORT))
    return len(pieces)


# ----------------------------------------------------------------------
# commands


class MgdGroup(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except Outcome as out:
            ctx.exit(out.status)
        except InputError as exc:
            _report_error(ctx, exc.kind, str(exc))
            ctx.exit(EXIT_INPUT)
        except DiagramError as exc:
            _report_error(ctx, exc.kind, str(exc))
            ctx.exit(EXIT_INPUT)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except Exception as exc:  # noqa: BLE001
            _report_error(ctx, "internal error", f"{type(exc).__name__}: {exc}")
            ctx.exit(EXIT_INTERNAL)


def _report_error(ctx, kind, message):
    cfg = ctx.ensure_object(Config)
    if cfg.fmt == "json":
        click.echo(json.dumps({"error": kind, "message": message}, sort_keys=True))
    else:
        click.echo(f"error: {kind}: {message}", err=True)


@click.group(cls=MgdGroup)
@common_options
def main(cfg):
    """Marked graph diagrams, Yoshikawa moves and move search."""


@main.command()
@click.argument("path")
@common_options
def validate(cfg, path):
    """Check a diagram file and print its size."""
    d = read_diagram(path)
    payload = {
        "valid": True,
        "V": len(d.vertices),
        "E": len(d.edges),
        "F": len(d.regions),
        "components": component_count(d),
        "boundary": d.k,
        "oriented": d.oriented,
    }
    text = "V={V} E={E} F={F} components={components}".format(**payload)
    finish(cfg, "text", payload, text=text)


@main.command()
@click.argument("path")
@common_options
def invariants(cfg, path):
    """Print the invariant report of a closed diagram."""
    d = read_diagram(path)
    if d.k:
        raise InputError("not closed", f"{path}: invariants need a closed diagram")
    report = invariant_report(d, cfg.strict_t)
    text = "\n".join(f"{k}: {json.dumps(v)}" for k, v in report.items())
    finish(cfg, "json", report, text=text)


@main.command()
@click.argument("path")
@click.option("--sign", type=click.Choice(["+", "-"]), required=True)
@click.option("--output", "-o", default=None, help="Write the diagram here instead of stdout.")
@common_options
def resolve(cfg, path, sign, output):
    """Replace every marked vertex by its positive or negative smoothing."""
    d = read_diagram(path)
    r = resolve_diagram(d, PLUS if sign == "+" else MINUS)
    emit_diagram(cfg, r, output, {"sign": sign})


def emit_diagram(cfg, d, output, extra):
    text = serialize(d)
    if output:
        Path(output).write_text(text)
    payload = dict(extra, diagram=text)
    finish(cfg, "text", payload, text="" if output else text)


def _rule(cfg, move):
    cat = cfg.catalog()
    rule = cat.rules.get(move)
    if rule is None:
        raise InputError("unknown move", f"no rule {move} in the catalog")
    return rule


@main.command()
@click.argument("path")
@click.option("--move", required=True, help="Rule id, e.g. O2 or G3.")
@click.option("--reverse", is_flag=True, help="Match the right side instead of the left.")
@common_options
def sites(cfg, path, move, reverse):
    """List the places where a move applies."""
    d = read_diagram(path)
    rule = _rule(cfg, move)
    found = find_sites(d, rule, REVERSE if reverse else FORWARD)
    payload = [dict(s.describe(), index=i) for i, s in enumerate(found)]
    text = "\n".join(f"{i}\t{s.rule} {s.direction}\t{s.key}" for i, s in enumerate(found))
    finish(cfg, "json", payload, text=text or "no sites")


@main.command()
@click.argument("path")
@click.option("--move", required=True)
@click.option("--site", "site_index", type=int, required=True, help="Index as listed by 'sites'.")
@click.option("--reverse", is_flag=True)
@click.option("--output", "-o", default=None)
@common_options
def apply(cfg, path, move, site_index, reverse, output):
    """Apply one move at one site and print the new diagram."""
    d = read_diagram(path)
    rule = _rule(cfg, move)
    found = find_sites(d, rule, REVERSE if reverse else FORWARD)
    if not 0 <= site_index < len(found):
        raise InputError("no such site", f"{move} has {len(found)} site(s) here")
    site = found[site_index]
    emit_diagram(cfg, site.result.validate(), output, {"move": move, "site": site.key})


def _bounds(max_depth, max_edges, max_nodes):
    b = Bounds()
    if max_depth is not None:
        b.max_depth = max_depth
    if max_edges is not None:
        b.max_edges = max_edges
    if max_nodes is not None:
        b.max_nodes = max_nodes
    return b


@main.command()
@click.argument("start")
@click.argument("goal")
@click.option("--set", "subset", default=None, help="Named rule subset, e.g. S or S1.")
@click.option("--moves", default=None, help="Comma separated rule ids.")
@bounds_options
@common_options
def search(cfg, start, goal, subset, moves, max_depth, max_edges, max_nodes):
    """Look for a move sequence from START to GOAL."""
    a, b = read_diagram(start), read_diagram(goal)
    cat = cfg.catalog()
    if subset and moves:
        raise click.UsageError("give --set or --moves, not both")
    if moves:
        chosen = [m.strip() for m in moves.split(",") if m.strip()]
    else:
        name = subset or ("oriented" if a.oriented else "unoriented")
        if name not in cat.sets:
            raise InputError("unknown set", f"no rule set {name} in the catalog")
        chosen = name
    try:
        rules = cat.subset(chosen)
    except (KeyError, CatalogError) as exc:
        raise InputError("unknown move", str(exc)) from exc
    res = search_sequence(a, b, rules, _bounds(max_depth, max_edges, max_nodes))
    payload = res.to_json()
    text = _result_text(payload)
    finish(cfg, "json", payload, EXIT_OK if res.found else EXIT_NEGATIVE, text)


def _result_text(payload):
    lines = [f"{payload['status']} {json.dumps(payload['stats'], sort_keys=True)}"]
    for st in payload.get("trace", {}).get("steps", []):
        arrow = "->" if st["direction"] == FORWARD else "<-"
        lines.append(f"  {st['rule']} {arrow} {st['site']}")
    return "\n".join(lines)


def fixture_path(name: str) -> Path:
    p = resources.files("mgd").joinpath("data", "fixtures", f"{name}.mgd")
    return Path(str(p))


def shipped_fixtures(oriented: bool = False):
    folder = Path(str(resources.files("mgd").joinpath("data", "fixtures")))
    out = []
    for p in sorted(folder.glob("*.mgd")):
        d = parse(p.read_text())
        if d.oriented == oriented:
            out.append(d)
    return out


def run_entry(name: str, spec: dict, cat: MoveCatalog, overrides: dict, strict_t: str) -> dict:
    """Run one manifest entry and say whether its expectation held."""
    kind = spec.get("kind", "derivation")
    if kind == "independence":
        witnesses = []
        for w in spec["witnesses"]:
            p = fixture_path(w)
            if not p.exists():
                raise InputError("fixture missing", f"{name}: no fixture {w}")
            witnesses.append(parse(p.read_text()))
        rules = [r.id for r in cat.subset(spec["set"])]
        report = independence_report(
            cat, rules, spec["excluded"], spec["invariant"], tuple(witnesses),
            shipped_fixtures(witnesses[0].oriented), strict_t,
        )
        status = "certified" if report["certified"] else "not certified"
        return {"lemma": name, "status": status, "expect": spec["expect"],
                "met": status == spec["expect"], "report": report}
    res = run_lemma(spec, cat, overrides)
    out = {"lemma": name, "expect": spec["expect"], "met": res.status == spec["expect"]}
    out.update(res.to_json())
    return out


@main.command("verify-lemma")
@click.argument("name", required=False)
@click.option("--manifest", default=None, help="Lemma manifest (JSON); default: shipped.")
@click.option("--list", "list_only", is_flag=True, help="List the manifest entries.")
@bounds_options
@common_options
def verify_lemma(cfg, name, manifest, list_only, max_depth, max_edges, max_nodes):
    """Run a manifest entry and check its expected outcome."""
    try:
        text = Path(manifest).read_text() if manifest else None
        lemmas = load_lemmas(text)
    except OSError as exc:
        raise InputError("I/O error", f"{manifest}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise InputError("manifest error", str(exc)) from exc
    if list_only or not name:
        payload = {k: {"target": v.get("target"), "kind": v.get("kind", "derivation")} for k, v in lemmas.items()}
        finish(cfg, "json", payload, text="\n".join(lemmas))
    if name not in lemmas:
        raise InputError("unknown lemma", f"no entry {name} in the manifest")
    overrides = {"max_depth": max_depth, "max_edges": max_edges, "max_nodes": max_nodes}
    out = run_entry(name, lemmas[name], cfg.catalog(), overrides, cfg.strict_t)
    text = f"{name}: {'ok' if out['met'] else 'FAILED'} ({out['status']}, expected {out['expect']})"
    if "trace" in out:
        text += "\n" + _result_text(out)
    finish(cfg, "json", out, EXIT_OK if out["met"] else EXIT_NEGATIVE, text)


@main.command()
@click.argument("path")
@common_options
def bracket(cfg, path):
    """Kauffman bracket of a classical link diagram."""
    d = read_diagram(path)
    if d.marked() or d.k:
        raise InputError("not classical", f"{path}: the bracket needs a closed diagram without marked vertices")
    try:
        poly = kauffman_bracket(d)
    except InvariantError as exc:
        raise InputError("too large", str(exc)) from exc
    payload = {"bracket": poly.to_json(), "text": str(poly)}
    finish(cfg, "json", payload, text=str(poly))


@main.command()
@click.argument("path")
@click.option("--max-nodes", type=int, default=100_000)
@common_options
def admissible(cfg, path, max_nodes):
    """Decide whether both resolutions are trivial classical links."""
    d = read_diagram(path)
    if d.k:
        raise InputError("not closed", f"{path}: admissibility needs a closed diagram")
    answer = is_admissible(d, max_nodes=max_nodes)
    payload = {"admissible": answer}
    finish(cfg, "json", payload, EXIT_OK if answer == YES else EXIT_NEGATIVE, answer)


@main.command()
@common_options
def lint(cfg):
    """Check the shipped catalogs: set sizes and oriented shadows."""
    u, o = shipped_catalog(False), shipped_catalog(True)
    sizes = {name: len(cat.sets[name]) for cat, name in ((u, "S"), (o, "S1"), (o, "S2"))}
    problems = lint_catalog(o, u)
    payload = {"sets": sizes, "problems": problems, "ok": not problems}
    text = "\n".join([f"|{k}| = {v}" for k, v in sizes.items()] + problems + (["lint ok"] if not problems else []))
    finish(cfg, "json", payload, EXIT_OK if not problems else EXIT_NEGATIVE, text)


if __name__ == "__main__":
    sys.exit(main())
