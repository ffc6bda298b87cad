"""Scenario graphs, longest paths, volumes and pruned path enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


class BrokenPathError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    """One branch index per structure, stored as sorted (structure, branch) pairs."""

    choice: tuple

    @classmethod
    def of(cls, mapping):
        return cls(tuple(sorted((int(s), int(k)) for s, k in dict(mapping).items())))

    def as_dict(self):
        return dict(self.choice)

    def __getitem__(self, structure_id):
        return self.as_dict()[structure_id]


@dataclass(frozen=True, eq=False)
class ScenarioGraph:
    pdag: object
    scenario: Scenario
    mask: np.ndarray

    @property
    def nodes(self):
        idx = self.pdag.index
        return frozenset(idx.ids[p] for p in np.flatnonzero(self.mask))

    @property
    def edges(self):
        keep = self.nodes
        return tuple(e for e in self.pdag.edges if e[0] in keep and e[1] in keep)


@dataclass(frozen=True, slots=True)
class PathContext:
    nodes: tuple
    length: float
    branches: frozenset
    structures: frozenset

    def __str__(self):
        return "(" + ",".join(map(str, self.nodes)) + ")"


def instantiate(pdag, scenario) -> ScenarioGraph:
    choice = scenario.as_dict() if isinstance(scenario, Scenario) else dict(scenario)
    smap = pdag.structure_map
    if set(choice) != set(smap):
        missing = sorted(set(smap) - set(choice))
        extra = sorted(set(choice) - set(smap))
        raise ValueError(f"scenario must choose one branch per structure (missing {missing}, unknown {extra})")
    for sid, k in choice.items():
        if all(b.index != k for b in smap[sid].branches):
            raise ValueError(f"structure {sid} has no branch {k}")
    return ScenarioGraph(pdag, Scenario.of(choice), pdag.index.mask_for(choice))


def _suffix(pdag, mask):
    idx = pdag.index
    return kernels.longest_suffix(idx.topo, idx.succ_ptr, idx.succ_idx, idx.wcet, mask)


def longest_path(graph) -> PathContext:
    """Maximum-length source-to-sink path; ties go to the smallest id sequence."""
    pdag = graph.pdag
    idx = pdag.index
    _, nxt = _suffix(pdag, graph.mask)
    seq = [idx.source]
    while seq[-1] != idx.sink:
        seq.append(int(nxt[seq[-1]]))
    return path_context(idx.to_ids(seq), pdag)


def volume(graph) -> float:
    return math.fsum(graph.pdag.index.wcet[graph.mask.astype(bool)].tolist())


def branch_length(branch, pdag) -> float:
    """Longest route through the branch sub-graph from an entry-adjacent node to an exit-adjacent one."""
    return branch_lengths(pdag)[(branch.structure, branch.index)]


def branch_lengths(pdag):
    return pdag.index.cached("branch_lengths", lambda: _branch_lengths(pdag))


def _branch_lengths(pdag):
    # branches are disjoint and only leave through their exit, so one pass over
    # every conditional node yields each in-branch longest suffix
    idx = pdag.index
    best, _ = _suffix(pdag, (1 - idx.unconditional).astype(np.uint8))
    out = {}
    for s in pdag.structures:
        start = idx.succ[idx.pos[s.entry]]
        for b in s.branches:
            members = set(idx.branch_pos[(s.id, b.index)])
            out[(s.id, b.index)] = max((float(best[p]) for p in start if p in members), default=-math.inf)
    return out


def path_context(sequence, pdag) -> PathContext:
    idx = pdag.index
    seq = tuple(int(v) for v in sequence)
    if not seq:
        raise BrokenPathError("empty path")
    edges = idx.cached("edge_set", lambda: frozenset(pdag.edges))
    for a, b in zip(seq, seq[1:]):
        if (a, b) not in edges:
            raise BrokenPathError(f"no edge {a}->{b}")
    if seq[0] != idx.ids[idx.source] or seq[-1] != idx.ids[idx.sink]:
        raise BrokenPathError("path must run from the source to the sink")
    return _context(seq, pdag)


def _context(seq, pdag):
    idx = pdag.index
    owner = idx.owner
    pos = idx.pos
    c = pdag.wcet
    hs = frozenset(owner[pos[v]] for v in seq if pos[v] in owner)
    return PathContext(seq, math.fsum(c[v] for v in seq), hs, frozenset(s for s, _ in hs))


def _context_at(positions, pdag):
    # same as _context, starting from kernel positions
    idx = pdag.index
    owner = idx.owner
    c = idx.cached("wcet_list", idx.wcet.tolist)
    hs = frozenset([owner[p] for p in positions if p in owner])
    return PathContext(
        idx.to_ids(positions), math.fsum([c[p] for p in positions]), hs, frozenset([s for s, _ in hs])
    )


def suffix_potential(pdag):
    """Longest suffix from every node over the whole graph (all branches present)."""
    idx = pdag.index
    return idx.cached("potential", lambda: _suffix(pdag, np.ones(idx.n, dtype=np.uint8))[0])


def candidate_paths(pdag, threshold, limit=-1) -> list:
    """Every source-to-sink path with length >= threshold, in id-lexicographic order."""
    idx = pdag.index
    threshold = float(threshold)
    # pruning tolerates rounding in the potential; the exact cut is applied on fsum lengths
    slack = 1e-9 * max(1.0, abs(threshold)) if math.isfinite(threshold) else 0.0
    raw = kernels.enumerate_paths(
        idx.succ_ptr, idx.succ_idx, idx.wcet, np.ones(idx.n, dtype=np.uint8),
        suffix_potential(pdag), idx.source, idx.sink, threshold - slack, limit,
    )
    out = []
    for positions in raw:
        ctx = _context(idx.to_ids(positions), pdag)
        if ctx.length >= threshold:
            out.append(ctx)
    return out


def dominant_candidates(pdag, threshold) -> list:
    """Paths with length >= threshold, keeping for every branch set only the
    longest path (lexicographically smallest on ties), in id-lexicographic order."""
    idx = pdag.index
    threshold = float(threshold)
    slack = 1e-9 * max(1.0, abs(threshold)) if math.isfinite(threshold) else 0.0
    raw, _, _ = kernels.enumerate_dominant(
        idx.topo, idx.succ_ptr, idx.succ_idx, idx.wcet, suffix_potential(pdag), idx.node_branch,
        idx.source, idx.sink, threshold - slack,
    )
    out = [ctx for ctx in (_context_at(p, pdag) for p in raw) if ctx.length >= threshold]
    return sorted(out, key=lambda c: c.nodes)


def choice_matrix(paths, pdag):
    """Row per path, column per structure (ascending id): 1-based rank of the
    branch taken among the structure's branch indices, 0 if avoided."""
    col = {sid: c for c, sid in enumerate(sorted(st.id for st in pdag.structures))}
    rank = branch_ranks(pdag)
    out = np.zeros((len(paths), len(col)), dtype=np.int32)
    for r, p in enumerate(paths):
        for h in p.branches:
            out[r, col[h[0]]] = rank[h]
    return out


def branch_ranks(pdag):
    return pdag.index.cached(
        "branch_ranks",
        lambda: {
            (st.id, k): r
            for st in pdag.structures
            for r, k in enumerate(sorted(b.index for b in st.branches), start=1)
        },
    )


def all_paths(pdag, limit=-1) -> list:
    return candidate_paths(pdag, -math.inf, limit)


def tied_longest_paths(graph):
    """All maximum-length source-to-sink paths of a scenario graph, plus that length."""
    pdag = graph.pdag
    idx = pdag.index
    best, _ = _suffix(pdag, graph.mask)
    top = float(best[idx.source])
    # slack guards against summation-order rounding; exact ties are re-checked below
    slack = 1e-9 * max(1.0, abs(top))
    raw = kernels.enumerate_paths(
        idx.succ_ptr, idx.succ_idx, idx.wcet, graph.mask, best, idx.source, idx.sink, top - slack
    )
    c = pdag.wcet
    found = [(math.fsum(c[v] for v in seq), seq) for seq in (idx.to_ids(p) for p in raw)]
    length = max(x for x, _ in found)
    return length, [seq for x, seq in found if x == length]
