"""Lower bound on the longest path over every scenario, for a p-DAG or a sub-structure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import PDag
from .paths import branch_lengths


@dataclass(frozen=True)
class SubStructure:
    """Anchor path plus the full extent of the structures only the anchor crosses."""

    pdag: PDag
    nodes: frozenset
    structures: tuple

    @property
    def edges(self):
        keep = self.nodes
        return tuple(e for e in self.pdag.edges if e[0] in keep and e[1] in keep)


def shortest_branches(pdag, structures):
    """Per structure, the branch of minimum internal length (lowest index on ties)."""
    lengths = branch_lengths(pdag)
    return {
        s.id: min(s.branches, key=lambda b: (lengths[(s.id, b.index)], b.index)).index
        for s in structures
    }


def non_shortest(pdag):
    """Per structure, positions of every branch except the shortest one."""

    def build():
        idx = pdag.index
        keep = shortest_branches(pdag, pdag.structures)
        return {
            s.id: [p for b in s.branches if b.index != keep[s.id] for p in idx.branch_pos[(s.id, b.index)]]
            for s in pdag.structures
        }

    return pdag.index.cached("non_shortest", build)


def _longest(pdag, mask):
    idx = pdag.index
    best, _ = kernels.longest_suffix(idx.topo, idx.succ_ptr, idx.succ_idx, idx.wcet, mask)
    # any-start maximum == longest path after hooking a zero-cost source/sink to the local ends
    return float(best.max()) if mask.any() else 0.0


def delta(target) -> float:
    if isinstance(target, SubStructure):
        pdag = target.pdag
        idx = pdag.index
        mask = np.zeros(idx.n, dtype=np.uint8)
        mask[[idx.pos[v] for v in target.nodes]] = 1
        drop = non_shortest(pdag)
        for s in target.structures:
            mask[drop[s.id]] = 0
        return _longest(pdag, mask)

    pdag = target
    idx = pdag.index
    return idx.cached("delta", lambda: _longest(pdag, idx.mask_for(shortest_branches(pdag, pdag.structures))))


def extents(pdag):
    def build():
        idx = pdag.index
        return {
            s.id: [idx.pos[s.entry], idx.pos[s.exit]] + [p for b in s.branches for p in idx.branch_pos[(s.id, b.index)]]
            for s in pdag.structures
        }

    return pdag.index.cached("extents", build)


def build_substructure(anchor, other, pdag) -> SubStructure:
    only_anchor = anchor.structures - other.structures
    structs = tuple(s for s in pdag.structures if s.id in only_anchor)
    nodes = set(anchor.nodes)
    for s in structs:
        nodes.add(s.entry)
        nodes.add(s.exit)
        for b in s.branches:
            nodes |= b.nodes
    return SubStructure(pdag, frozenset(nodes), structs)
