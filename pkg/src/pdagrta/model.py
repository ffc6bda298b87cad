"""p-DAG data model, validation and the canonical JSON instance format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable

PROB_TOL = 1e-9


class PDagFormatError(ValueError):
    """Instance text could not be parsed; ``location`` points at the culprit."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class UnknownFieldError(PDagFormatError):
    pass


class PDagReferenceError(PDagFormatError):
    pass


class InvalidPDagError(ValueError):
    def __init__(self, report):
        self.report = report
        lines = [f"{v.rule}: {v.message}" for v in report.violations]
        super().__init__("invalid p-DAG:\n  " + "\n  ".join(lines))


@dataclass(frozen=True)
class Node:
    id: int
    wcet: float


@dataclass(frozen=True)
class Branch:
    structure: int
    index: int
    nodes: frozenset
    prob: float


@dataclass(frozen=True)
class ProbStructure:
    id: int
    entry: int
    exit: int
    branches: tuple

    def branch(self, index):
        for b in self.branches:
            if b.index == index:
                return b
        raise KeyError(f"structure {self.id} has no branch {index}")


@dataclass(frozen=True)
class PDag:
    nodes: tuple
    edges: tuple
    structures: tuple = ()
    period: float = 1.0
    deadline: float = 1.0

    @cached_property
    def index(self):
        # local import: _index depends on this module
        from ._index import GraphIndex

        return GraphIndex(self)

    @cached_property
    def wcet(self):
        return {n.id: n.wcet for n in self.nodes}

    @cached_property
    def structure_map(self):
        return {s.id: s for s in self.structures}

    def branch(self, structure_id, index):
        return self.structure_map[structure_id].branch(index)


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    ids: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(f"{v.rule}: {v.message} {list(v.ids)}" for v in self.violations)


def make_pdag(nodes, edges, structures=(), period=1.0, deadline=None):
    """Convenience constructor from plain python values.

    ``nodes`` maps id -> wcet (or is an iterable of (id, wcet) pairs);
    ``structures`` is an iterable of ``(id, entry, exit, [(index, node_ids, prob), ...])``.
    """
    if isinstance(nodes, dict):
        nodes = nodes.items()
    node_tuple = tuple(sorted((Node(int(i), float(c)) for i, c in nodes), key=lambda n: n.id))
    edge_tuple = tuple(sorted((int(a), int(b)) for a, b in edges))
    structs = []
    for sid, entry, exit_, branches in structures:
        bs = tuple(
            sorted(
                (Branch(int(sid), int(k), frozenset(int(v) for v in ns), float(p)) for k, ns, p in branches),
                key=lambda b: b.index,
            )
        )
        structs.append(ProbStructure(int(sid), int(entry), int(exit_), bs))
    structs.sort(key=lambda s: s.id)
    if deadline is None:
        deadline = period
    return PDag(node_tuple, edge_tuple, tuple(structs), float(period), float(deadline))


def scenario_count(pdag):
    return math.prod(len(s.branches) for s in pdag.structures)


# ---------------------------------------------------------------------------
# validation


def _find_cycle(ids, succ):
    """Return the node ids of one cycle, or None if the graph is acyclic."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(ids, WHITE)
    for root in ids:
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(succ.get(root, ())))]
        trail = [root]
        colour[root] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = BLACK
                stack.pop()
                trail.pop()
            elif colour.get(nxt) == GREY:
                return tuple(trail[trail.index(nxt):])
            elif colour.get(nxt) == WHITE:
                colour[nxt] = GREY
                trail.append(nxt)
                stack.append((nxt, iter(succ.get(nxt, ()))))
    return None


def validate(pdag) -> ValidationReport:
    out = []

    def bad(rule, message, *ids):
        out.append(Violation(rule, message, tuple(ids)))

    ids = [n.id for n in pdag.nodes]
    id_set = set(ids)
    if len(id_set) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        bad("DuplicateNodeId", "node ids must be unique", *dup)
    for n in pdag.nodes:
        if not (n.wcet >= 0) or math.isinf(n.wcet):
            bad("NegativeWcet", f"wcet of node {n.id} must be a finite non-negative number", n.id)

    if not (pdag.period > 0) or math.isinf(pdag.period):
        bad("NonPositivePeriod", "period must be positive")
    if not (pdag.deadline > 0):
        bad("NonPositiveDeadline", "deadline must be positive")
    elif pdag.deadline > pdag.period:
        bad("DeadlineExceedsPeriod", "constrained deadlines only (D <= T)")

    succ, pred = {}, {}
    seen_edges = set()
    for a, b in pdag.edges:
        if a not in id_set or b not in id_set:
            bad("DanglingEdge", f"edge {a}->{b} references an unknown node", a, b)
            continue
        if a == b:
            bad("SelfLoop", f"self-loop on node {a}", a)
            continue
        if (a, b) in seen_edges:
            bad("DuplicateEdge", f"edge {a}->{b} appears more than once", a, b)
            continue
        seen_edges.add((a, b))
        succ.setdefault(a, []).append(b)
        pred.setdefault(b, []).append(a)

    cycle = _find_cycle(sorted(id_set), succ)
    if cycle is not None:
        bad("CycleDetected", "edge relation contains a cycle", *cycle)

    sources = sorted(i for i in id_set if not pred.get(i))
    sinks = sorted(i for i in id_set if not succ.get(i))
    if len(sources) != 1:
        bad("SourceCount", f"expected exactly one source, found {len(sources)}", *sources)
    if len(sinks) != 1:
        bad("SinkCount", f"expected exactly one sink, found {len(sinks)}", *sinks)

    _validate_structures(pdag, id_set, succ, pred, bad)
    return ValidationReport(tuple(out))


def _validate_structures(pdag, id_set, succ, pred, bad):
    sids = [s.id for s in pdag.structures]
    if len(set(sids)) != len(sids):
        bad("DuplicateStructureId", "structure ids must be unique", *sorted({i for i in sids if sids.count(i) > 1}))

    endpoints = set()
    for s in pdag.structures:
        endpoints.add(s.entry)
        endpoints.add(s.exit)
    owner = {}  # branch node -> (structure, branch index)
    for s in pdag.structures:
        for end in (s.entry, s.exit):
            if end not in id_set:
                bad("EndpointMissing", f"structure {s.id} endpoint {end} is not a node", s.id, end)
        if s.entry == s.exit:
            bad("EndpointMissing", f"structure {s.id} entry and exit coincide", s.id)
        if len(s.branches) < 2:
            bad("TooFewBranches", f"structure {s.id} needs at least two branches", s.id)
        idx = [b.index for b in s.branches]
        if len(set(idx)) != len(idx):
            bad("DuplicateBranchIndex", f"structure {s.id} repeats a branch index", s.id)
        total = math.fsum(b.prob for b in s.branches)
        if abs(total - 1.0) > PROB_TOL:
            bad("ProbabilitySum", f"branch probabilities of structure {s.id} sum to {total!r}", s.id)
        for b in s.branches:
            if not (0.0 <= b.prob <= 1.0):
                bad("BranchProbabilityRange", f"branch {s.id}/{b.index} probability {b.prob!r} outside [0, 1]", s.id, b.index)
            if not b.nodes:
                bad("EmptyBranch", f"branch {s.id}/{b.index} has no nodes", s.id, b.index)
            for v in sorted(b.nodes):
                if v not in id_set:
                    bad("BranchNodeMissing", f"branch {s.id}/{b.index} references unknown node {v}", s.id, v)
                elif v in endpoints:
                    bad("NestedStructure", f"node {v} is both a branch node and a structure endpoint", s.id, v)
                elif v in owner:
                    bad("BranchOverlap", f"node {v} belongs to more than one branch", s.id, v)
                else:
                    owner[v] = (s.id, b.index)

    smap = {s.id: s for s in pdag.structures}
    for v, (sid, k) in sorted(owner.items()):
        s = smap[sid]
        for w in succ.get(v, ()):
            if owner.get(w) != (sid, k) and w != s.exit:
                bad("BranchEdgeViolation", f"edge {v}->{w} leaves branch {sid}/{k} other than via its exit", v, w)
        for u in pred.get(v, ()):
            if owner.get(u) != (sid, k) and u != s.entry:
                bad("BranchEdgeViolation", f"edge {u}->{v} enters branch {sid}/{k} other than via its entry", u, v)

    for s in pdag.structures:
        for b in s.branches:
            nodes = b.nodes & id_set
            if not nodes:
                continue
            # every branch node must sit on some entry -> ... -> exit route inside the branch
            fwd = _reach([w for w in succ.get(s.entry, ()) if w in nodes], succ, nodes)
            bwd = _reach([u for u in pred.get(s.exit, ()) if u in nodes], pred, nodes)
            stray = sorted(nodes - (fwd & bwd))
            if stray:
                bad("BranchDisconnected", f"branch {s.id}/{b.index} nodes not on an entry-to-exit route", s.id, *stray)


def _reach(start, adj, allowed):
    seen = set(start)
    stack = list(start)
    while stack:
        v = stack.pop()
        for w in adj.get(v, ()):
            if w in allowed and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def normalized(pdag):
    """Copy of ``pdag`` with each structure's probabilities divided by their sum."""
    structs = []
    for s in pdag.structures:
        total = math.fsum(b.prob for b in s.branches)
        structs.append(replace(s, branches=tuple(replace(b, prob=b.prob / total) for b in s.branches)))
    return replace(pdag, structures=tuple(structs))


def prepare(pdag):
    """Validate and renormalise; raises InvalidPDagError on any violation."""
    report = validate(pdag)
    if not report.ok:
        raise InvalidPDagError(report)
    return normalized(pdag)


# ---------------------------------------------------------------------------
# canonical format

_TOP_FIELDS = {"nodes", "edges", "structures", "period", "deadline"}
_NODE_FIELDS = {"id", "wcet"}
_STRUCT_FIELDS = {"id", "entry", "exit", "branches"}
_BRANCH_FIELDS = {"index", "nodes", "prob"}


def _check_fields(obj, allowed, where, required=None):
    if not isinstance(obj, dict):
        raise PDagFormatError("expected an object", where)
    for key in obj:
        if key not in allowed:
            raise UnknownFieldError(f"unknown field {key!r}", where)
    for key in sorted(required if required is not None else allowed):
        if key not in obj:
            raise PDagFormatError(f"missing field {key!r}", where)


def _as_int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise PDagFormatError(f"expected a non-negative integer, got {value!r}", where)
    if value < 0:
        raise PDagFormatError(f"ids must be non-negative, got {value}", where)
    return value


def _as_real(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise PDagFormatError(f"expected a number, got {value!r}", where)
    return float(value)


def _as_list(value, where):
    if not isinstance(value, list):
        raise PDagFormatError("expected a list", where)
    return value


def parse_pdag(text) -> PDag:
    """Parse the canonical JSON document.

    Only syntax, field names, types and id references are checked here;
    call :func:`validate` for the semantic rules.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PDagFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    _check_fields(doc, _TOP_FIELDS, "document")

    nodes = []
    for i, raw in enumerate(_as_list(doc["nodes"], "nodes")):
        where = f"nodes[{i}]"
        _check_fields(raw, _NODE_FIELDS, where)
        nodes.append(Node(_as_int(raw["id"], where + ".id"), _as_real(raw["wcet"], where + ".wcet")))
    known = {n.id for n in nodes}

    def ref(value, where):
        v = _as_int(value, where)
        if v not in known:
            raise PDagReferenceError(f"unknown node id {v}", where)
        return v

    edges = []
    for i, raw in enumerate(_as_list(doc["edges"], "edges")):
        where = f"edges[{i}]"
        if not isinstance(raw, list) or len(raw) != 2:
            raise PDagFormatError("expected a [from, to] pair", where)
        edges.append((ref(raw[0], where + "[0]"), ref(raw[1], where + "[1]")))

    structures = []
    for i, raw in enumerate(_as_list(doc["structures"], "structures")):
        where = f"structures[{i}]"
        _check_fields(raw, _STRUCT_FIELDS, where)
        sid = _as_int(raw["id"], where + ".id")
        branches = []
        for j, rb in enumerate(_as_list(raw["branches"], where + ".branches")):
            bw = f"{where}.branches[{j}]"
            _check_fields(rb, _BRANCH_FIELDS, bw)
            members = frozenset(
                ref(v, f"{bw}.nodes[{k}]") for k, v in enumerate(_as_list(rb["nodes"], bw + ".nodes"))
            )
            branches.append(Branch(sid, _as_int(rb["index"], bw + ".index"), members, _as_real(rb["prob"], bw + ".prob")))
        structures.append(
            ProbStructure(sid, ref(raw["entry"], where + ".entry"), ref(raw["exit"], where + ".exit"), tuple(branches))
        )

    return PDag(
        tuple(sorted(nodes, key=lambda n: n.id)),
        tuple(sorted(edges)),
        tuple(sorted(structures, key=lambda s: s.id)),
        _as_real(doc["period"], "period"),
        _as_real(doc["deadline"], "deadline"),
    )


def _num(x):
    # integral reals are written as ints for readability; repr keeps full precision otherwise
    return int(x) if float(x).is_integer() and abs(x) < 2**53 else float(x)


def to_document(pdag):
    return {
        "nodes": [{"id": n.id, "wcet": _num(n.wcet)} for n in sorted(pdag.nodes, key=lambda n: n.id)],
        "edges": [[a, b] for a, b in sorted(pdag.edges)],
        "structures": [
            {
                "id": s.id,
                "entry": s.entry,
                "exit": s.exit,
                "branches": [
                    {"index": b.index, "nodes": sorted(b.nodes), "prob": _num(b.prob)}
                    for b in sorted(s.branches, key=lambda b: b.index)
                ],
            }
            for s in sorted(pdag.structures, key=lambda s: s.id)
        ],
        "period": _num(pdag.period),
        "deadline": _num(pdag.deadline),
    }


def serialize_pdag(pdag) -> str:
    """Canonical text: one JSON record per line, ids sorted."""
    doc = to_document(pdag)
    lines = ["{"]
    for key in ("nodes", "edges", "structures"):
        items = doc[key]
        if not items:
            lines.append(f' "{key}": [],')
            continue
        lines.append(f' "{key}": [')
        body = [json.dumps(item, separators=(", ", ": ")) for item in items]
        lines.extend(f"  {row}," for row in body[:-1])
        lines.append(f"  {body[-1]}")
        lines.append(" ],")
    lines.append(f' "period": {json.dumps(doc["period"])},')
    lines.append(f' "deadline": {json.dumps(doc["deadline"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def branches_of(pdag) -> Iterable[Branch]:
    for s in pdag.structures:
        yield from s.branches
