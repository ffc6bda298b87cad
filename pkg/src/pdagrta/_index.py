"""Flat array view of a PDag used by the path kernels.

Nodes are addressed by position in ascending-id order, so comparing positions
is the same as comparing ids (lexicographic tie-breaks rely on this).
"""

from __future__ import annotations

from operator import itemgetter

import numpy as np


class GraphIndex:
    def __init__(self, pdag):
        self.ids = [n.id for n in pdag.nodes]  # already sorted by model
        self.pos = {v: i for i, v in enumerate(self.ids)}
        n = len(self.ids)
        self.n = n
        self.wcet = np.array([pdag.wcet[v] for v in self.ids], dtype=np.float64)

        succ = [[] for _ in range(n)]
        pred = [[] for _ in range(n)]
        for a, b in pdag.edges:
            succ[self.pos[a]].append(self.pos[b])
            pred[self.pos[b]].append(self.pos[a])
        for lst in succ:
            lst.sort()
        for lst in pred:
            lst.sort()
        self.succ = succ
        self.pred = pred
        self.succ_ptr, self.succ_idx = _csr(succ)

        indeg = [len(p) for p in pred]
        order = [i for i in range(n) if indeg[i] == 0]
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            for w in succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    order.append(w)
        if len(order) != n:
            raise ValueError("graph is cyclic")
        self.topo = np.array(order, dtype=np.int32)

        sources = [i for i in range(n) if not pred[i]]
        sinks = [i for i in range(n) if not succ[i]]
        self.source = sources[0] if len(sources) == 1 else -1
        self.sink = sinks[0] if len(sinks) == 1 else -1

        # conditional membership: position -> (structure id, branch index)
        self.owner = {}
        self.branch_pos = {}
        for s in pdag.structures:
            for b in s.branches:
                members = sorted(self.pos[v] for v in b.nodes)
                self.branch_pos[(s.id, b.index)] = members
                for p in members:
                    self.owner[p] = (s.id, b.index)
        base = np.ones(n, dtype=np.uint8)
        base[list(self.owner)] = 0
        self.unconditional = base
        # global branch number per position, -1 outside every branch
        self.node_branch = np.full(n, -1, dtype=np.int32)
        for g, members in enumerate(self.branch_pos.values()):
            self.node_branch[members] = g
        self.cache = {}

    def cached(self, key, build):
        if key not in self.cache:
            self.cache[key] = build()
        return self.cache[key]

    def mask_for(self, choice):
        """Active-node mask for a {structure id: branch index} selection."""
        mask = self.unconditional.copy()
        for key in choice.items():
            mask[self.branch_pos[key]] = 1
        return mask

    def to_ids(self, positions):
        if len(positions) == 1:
            return (self.ids[positions[0]],)
        return itemgetter(*positions)(self.ids) if positions else ()


def _csr(adj):
    ptr = np.zeros(len(adj) + 1, dtype=np.int32)
    ptr[1:] = np.cumsum([len(lst) for lst in adj])
    idx = np.array([w for lst in adj for w in lst], dtype=np.int32)
    return ptr, idx
