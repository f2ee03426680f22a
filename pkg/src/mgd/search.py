"""Bounded breadth-first search for move sequences between diagrams.

States are deduplicated by canonical code.  Both directions of every allowed
rule are expanded, and the search grows layers alternately from the start and
from the goal, always completing a layer before it looks for a meeting, so the
reported sequence is as short as any within the bounds.
"""

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from .canonical import canonical_code, short_code
from .diagram import Diagram
from .moves import (
    FORWARD,
    REVERSE,
    MoveCatalog,
    MoveRule,
    find_sites,
    min_result_size,
    opposite,
)
from .surgery import glue

FOUND = "Found"
EXHAUSTED = "ExhaustedNotReachable"
BUDGET = "BudgetExceeded"


@dataclass
class Step:
    rule: str
    direction: str
    site: str

    def to_json(self):
        return {"rule": self.rule, "direction": self.direction, "site": self.site}


@dataclass
class ProofTrace:
    start: str
    goal: str
    steps: List[Step] = field(default_factory=list)

    def to_json(self):
        return {
            "start": self.start,
            "goal": self.goal,
            "steps": [s.to_json() for s in self.steps],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(obj["start"], obj["goal"], [Step(**s) for s in obj["steps"]])


@dataclass
class Bounds:
    max_depth: int = 8
    max_edges: Optional[int] = None
    max_nodes: int = 100_000


@dataclass
class SearchResult:
    status: str
    trace: Optional[ProofTrace] = None
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_json(self):
        out = {"status": self.status, "stats": dict(self.stats)}
        if self.trace is not None:
            out["trace"] = self.trace.to_json()
            out["depth"] = len(self.trace.steps)
        return out


class ReplayError(RuntimeError):
    pass


def neighbours(d: Diagram, rules: Sequence[MoveRule], max_edges: Optional[int] = None):
    """(rule id, direction, site key, result) for every move out of ``d``.

    Rule sides that must overshoot ``max_edges`` are skipped unmatched."""
    for rule in rules:
        for direction in (FORWARD, REVERSE):
            if max_edges is not None and min_result_size(d, rule, direction) > max_edges:
                continue
            for site in find_sites(d, rule, direction, verify=False):
                yield rule.id, direction, site.key, site.result


def replay(start: Diagram, steps: Sequence[Step], rules: Dict[str, MoveRule]) -> Diagram:
    """Apply a trace step by step, locating each site by its key."""
    cur = start
    for n, st in enumerate(steps):
        rule = rules.get(st.rule)
        if rule is None:
            raise ReplayError(f"step {n}: unknown rule {st.rule}")
        hit = [s for s in find_sites(cur, rule, st.direction) if s.key == st.site]
        if not hit:
            raise ReplayError(f"step {n}: no {st.rule} site with key {st.site}")
        cur = hit[0].result
    return cur


def search_sequence(
    start: Diagram,
    goal: Diagram,
    rules: Sequence[MoveRule],
    bounds: Optional[Bounds] = None,
) -> SearchResult:
    bounds = bounds or Bounds()
    if start.k != goal.k or start.oriented != goal.oriented:
        raise ValueError("start and goal must be the same kind of object")
    if start.k and start.oriented:
        from .moves import boundary_pattern

        if boundary_pattern(start) != boundary_pattern(goal):
            raise ValueError("start and goal boundaries differ")
    max_edges = bounds.max_edges
    if max_edges is None:
        max_edges = max(start.size(), goal.size()) + 10
    c_start, c_goal = canonical_code(start), canonical_code(goal)
    trace_codes = (short_code(start, c_start), short_code(goal, c_goal))
    rule_map = {r.id: r for r in rules}
    if c_start == c_goal:
        return SearchResult(FOUND, ProofTrace(*trace_codes), {"nodes": 1, "depth": 0})

    # per side: code -> (parent code, rule, direction, site key of the move
    # applied to the parent), plus depth and diagram
    parents = [{c_start: None}, {c_goal: None}]
    depth = [{c_start: 0}, {c_goal: 0}]
    frontier: List[List[Tuple[bytes, Diagram]]] = [[(c_start, start)], [(c_goal, goal)]]
    diagrams = [{c_start: start}, {c_goal: goal}]
    level = [0, 0]
    nodes = 2
    pruned = 0
    budget_hit = False

    while frontier[0] and frontier[1]:
        if level[0] + level[1] >= bounds.max_depth:
            budget_hit = True
            break
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        other = 1 - side
        nxt = []
        meets = []
        for code, d in frontier[side]:
            for rid, direction, key, result in neighbours(d, rules, max_edges):
                if result.size() > max_edges:
                    pruned += 1
                    continue
                rc = canonical_code(result)
                if rc in parents[side]:
                    continue
                parents[side][rc] = (code, rid, direction, key)
                depth[side][rc] = level[side] + 1
                diagrams[side][rc] = result
                nodes += 1
                nxt.append((rc, result))
                if rc in parents[other]:
                    meets.append(rc)
                if nodes >= bounds.max_nodes:
                    budget_hit = True
                    break
            if budget_hit:
                break
        level[side] += 1
        if meets:
            best = min(meets, key=lambda c: (depth[0][c] + depth[1][c], c))
            trace = _assemble(best, parents, diagrams, trace_codes)
            end = replay(start, trace.steps, rule_map)
            if canonical_code(end) != c_goal:
                raise ReplayError("trace does not reproduce the goal")
            stats = {"nodes": nodes, "depth": len(trace.steps), "pruned": pruned}
            return SearchResult(FOUND, trace, stats)
        if budget_hit:
            break
        frontier[side] = nxt
    stats = {"nodes": nodes, "levels": level[0] + level[1], "pruned": pruned}
    if budget_hit:
        return SearchResult(BUDGET, None, stats)
    return SearchResult(EXHAUSTED, None, stats)


def _assemble(meet, parents, diagrams, codes) -> ProofTrace:
    steps: List[Step] = []
    # start side: walk back to the start, then reverse
    back = []
    c = meet
    while parents[0][c] is not None:
        pc, rid, direction, key = parents[0][c]
        back.append(Step(rid, direction, key))
        c = pc
    steps.extend(reversed(back))
    # goal side: each stored move went from parent (nearer the goal) to child;
    # walking towards the goal undoes it, landing on the parent
    c = meet
    while parents[1][c] is not None:
        pc, rid, direction, _ = parents[1][c]
        target = short_code(diagrams[1][pc], pc)
        steps.append(Step(rid, opposite(direction), target))
        c = pc
    return ProofTrace(codes[0], codes[1], steps)


# ----------------------------------------------------------------------
# harnesses


def verify_derived_move(
    target: MoveRule, generators: Sequence[MoveRule], bounds: Optional[Bounds] = None
) -> SearchResult:
    if any(g.id == target.id for g in generators):
        return search_sequence(target.lhs, target.lhs, generators, bounds)
    return search_sequence(target.lhs, target.rhs, generators, bounds)


def reidemeister_generator_check(
    target: MoveRule, generators: Sequence[MoveRule], bounds: Optional[Bounds] = None
) -> SearchResult:
    for r in [target, *generators]:
        if not r.oriented or r.lhs.marked() or r.rhs.marked():
            raise ValueError(f"{r.id} is not an oriented Reidemeister move")
    return verify_derived_move(target, generators, bounds)


def load_lemmas(text: Optional[str] = None) -> Dict[str, dict]:
    if text is None:
        text = resources.files("mgd").joinpath("data", "lemmas.json").read_text()
    data = json.loads(text)
    lemmas = data.get("lemmas", data)
    required = {
        "derivation": ("target", "generators", "expect"),
        "independence": ("set", "excluded", "invariant", "witnesses", "expect"),
    }
    for name, spec in lemmas.items():
        kind = spec.get("kind", "derivation")
        if kind not in required:
            raise ValueError(f"lemma {name} has unknown kind '{kind}'")
        for key in required[kind]:
            if key not in spec:
                raise ValueError(f"lemma {name} lacks '{key}'")
    return lemmas


# ----------------------------------------------------------------------
# chained derivations


@dataclass
class Derivation:
    """A derived rule with a certificate in base generators: ``states`` runs
    from the rule's lhs to its rhs and ``moves[i]`` turns state i into i+1."""

    rule: MoveRule
    states: List[Diagram]
    moves: List[Tuple[str, str]]


def replay_states(start: Diagram, steps: Sequence[Step], rules: Dict[str, MoveRule]) -> List[Diagram]:
    states = [start]
    for st in steps:
        states.append(replay(states[-1], [st], rules))
    return states


def expand_trace(
    start: Diagram,
    steps: Sequence[Step],
    rules: Dict[str, MoveRule],
    derivations: Dict[str, Derivation],
) -> Tuple[List[Step], Diagram]:
    """Rewrite steps that use derived rules as runs of base-rule steps.

    A derived step at some site is replaced by its certificate, each state
    of which is glued into the context of that site.  Every produced step is
    checked to be a site of its rule in the current diagram.
    """
    out: List[Step] = []
    cur = start
    for n, st in enumerate(steps):
        der = derivations.get(st.rule)
        if der is None:
            cur = replay(cur, [st], rules)
            out.append(st)
            continue
        hit = [s for s in find_sites(cur, der.rule, st.direction) if s.key == st.site]
        if not hit:
            raise ReplayError(f"step {n}: no {st.rule} site with key {st.site}")
        site = hit[0]
        states, moves = der.states, der.moves
        if st.direction == REVERSE:
            states = states[::-1]
            moves = [(rid, opposite(d)) for rid, d in reversed(moves)]
        for (rid, direction), inner in zip(moves, states[1:]):
            nxt = glue(inner, site.context)
            key = short_code(nxt)
            if not any(s.key == key for s in find_sites(cur, rules[rid], direction)):
                raise ReplayError(f"step {n}: lifted {rid} move is not a site")
            out.append(Step(rid, direction, key))
            cur = nxt
        if canonical_code(cur) != canonical_code(site.result):
            raise ReplayError(f"step {n}: expansion of {st.rule} ends elsewhere")
    return out, cur


def erase_loops(states: Sequence[Diagram], steps: Sequence[Step]) -> List[Step]:
    """Drop every stretch of a trace that returns to an earlier state.

    Site keys name results up to isomorphism, so the surviving steps still
    replay from the isomorphic earlier state."""
    codes = [canonical_code(x) for x in states]
    pos = {codes[0]: 0}
    kept: List[int] = [0]
    out: List[Step] = []
    for i, st in enumerate(steps, 1):
        j = pos.get(codes[i])
        if j is None:
            pos[codes[i]] = len(kept)
            kept.append(i)
            out.append(st)
            continue
        for x in kept[j + 1 :]:
            del pos[codes[x]]
        del kept[j + 1 :]
        del out[j:]
    return out


def derive(
    target: MoveRule,
    rules: Dict[str, MoveRule],
    derivations: Dict[str, Derivation],
    bounds: Optional[Bounds] = None,
) -> Tuple[SearchResult, Optional[Derivation]]:
    """Search for ``target`` using base rules and earlier derivations, then
    expand the trace into base rules only and replay it."""
    allowed = list(rules.values()) + [d.rule for d in derivations.values()]
    res = verify_derived_move(target, allowed, bounds)
    if not res.found:
        return res, None
    steps, end = expand_trace(target.lhs, res.trace.steps, rules, derivations)
    steps = erase_loops(replay_states(target.lhs, steps, rules), steps)
    states = replay_states(target.lhs, steps, rules)
    if canonical_code(states[-1]) != canonical_code(target.rhs):
        raise ReplayError("expanded trace does not reproduce the goal")
    trace = ProofTrace(res.trace.start, res.trace.goal, steps)
    stats = dict(res.stats, depth=len(steps), macro_depth=len(res.trace.steps))
    der = Derivation(target, states, [(st.rule, st.direction) for st in steps])
    return SearchResult(FOUND, trace, stats), der


def run_lemma(spec: dict, catalog: MoveCatalog, overrides: Optional[dict] = None) -> SearchResult:
    """Run one manifest entry.

    Rules listed under ``via`` are derived first, each from the generators
    and the rules derived before it, and then serve as extra moves for the
    target; the returned trace uses the generators only.  ``max_nodes``
    bounds the total over all searches.
    """
    b = dict(spec.get("bounds", {}))
    b.update({k: v for k, v in (overrides or {}).items() if v is not None})
    max_nodes = b.get("max_nodes", 100_000)
    rules = {r.id: r for r in catalog.subset(spec["generators"])}
    target = catalog.rules[spec["target"]]
    if target.id in rules:
        return verify_derived_move(target, list(rules.values()))
    derivations: Dict[str, Derivation] = {}
    nodes = 0
    per_rule = []
    for rid in [*spec.get("via", []), target.id]:
        bounds = Bounds(
            max_depth=b.get("max_depth", 8),
            max_edges=b.get("max_edges"),
            max_nodes=max_nodes - nodes,
        )
        res, der = derive(catalog.rules[rid], rules, derivations, bounds)
        nodes += res.stats.get("nodes", 0)
        per_rule.append({"rule": rid, "status": res.status, **res.stats})
        if der is None:
            return SearchResult(res.status, None, {"nodes": nodes, "stages": per_rule})
        derivations[rid] = der
    stats = dict(res.stats, nodes=nodes)
    if len(per_rule) > 1:
        stats["stages"] = per_rule
    return SearchResult(FOUND, res.trace, stats)


# ----------------------------------------------------------------------
# independence certificates


def independence_report(
    catalog: MoveCatalog,
    rule_set: Sequence[str],
    excluded: str,
    invariant: str,
    witnesses: Tuple[Diagram, Diagram],
    fixtures: Sequence[Diagram],
    strict_t: str = "standard",
) -> dict:
    """Certificate that ``invariant`` separates the witness pair and is kept
    by every move of ``rule_set`` other than ``excluded`` on the fixtures."""
    from .invariants import invariant_report

    if excluded not in rule_set:
        raise ValueError(f"{excluded} is not in the rule set")

    def value(d):
        return invariant_report(d, strict_t)[invariant]

    w0, w1 = (value(w) for w in witnesses)
    checks = []
    preserved = True
    for rid in rule_set:
        if rid == excluded:
            continue
        rule = catalog.rules[rid]
        sites = 0
        broken = 0
        for fx in fixtures:
            before = value(fx)
            for direction in (FORWARD, REVERSE):
                for site in find_sites(fx, rule, direction):
                    sites += 1
                    if value(site.result) != before:
                        broken += 1
        checks.append({"rule": rid, "sites": sites, "changed": broken})
        preserved &= broken == 0
    return {
        "excluded": excluded,
        "invariant": invariant,
        "witness_values": [w0, w1],
        "separated": w0 != w1,
        "others_preserve": preserved,
        "per_rule": checks,
        "certified": w0 != w1 and preserved,
    }
