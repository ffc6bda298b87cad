"""Extraction of the set of paths that are the longest in at least one scenario."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .lowerbound import build_substructure, delta, extents, non_shortest
from .paths import candidate_paths, choice_matrix, dominant_candidates
from .response import interference


class PairClass(enum.Enum):
    S1 = "never co-executed"
    S2 = "always co-executed"
    S3 = "sometimes co-executed"


@dataclass(frozen=True)
class LambdaStarSet:
    paths: tuple
    interference: tuple
    delta: float

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    @property
    def sequences(self):
        return [p.nodes for p in self.paths]


def classify_pair(a, b) -> PairClass:
    if a.branches == b.branches:
        return PairClass.S2
    for h in b.branches - a.branches:
        if h[0] in a.structures:
            return PairClass.S1
    return PairClass.S3


def ordering_key(path, interf):
    # longest first; among equal lengths the smaller (tighter) response bound first
    return (-path.length, interf, path.nodes)


def compute_lambda_star(pdag, limit=-1, exhaustive=False) -> LambdaStarSet:
    """Longest-path candidates that survive pairwise elimination, in ordering-key order.

    By default equal-branch-set duplicates are dropped during enumeration,
    which is exactly what the always-co-executed rule would remove. With
    ``exhaustive=True`` every candidate is enumerated and the full pairwise
    loop runs; both give the same set.
    """
    floor = delta(pdag)
    cands = candidate_paths(pdag, floor, limit) if exhaustive else dominant_candidates(pdag, floor)
    interf = {c.nodes: interference(c, pdag) for c in cands}
    cands.sort(key=lambda c: ordering_key(c, interf[c.nodes]))
    alive = _eliminate_exhaustive(cands, pdag) if exhaustive else _eliminate(cands, pdag)
    kept = tuple(c for c, ok in zip(cands, alive) if ok)
    return LambdaStarSet(kept, tuple(interf[c.nodes] for c in kept), floor)


def _eliminate_exhaustive(cands, pdag):
    alive = [True] * len(cands)
    for i, a in enumerate(cands):
        if not alive[i]:
            continue
        for j in range(i + 1, len(cands)):
            if not alive[j]:
                continue
            b = cands[j]
            kind = classify_pair(a, b)
            if kind is PairClass.S2:
                # ordering guarantees len(a) >= len(b); equal-H duplicates share interference
                alive[j] = False
            elif kind is PairClass.S3 and delta(build_substructure(a, b, pdag)) > b.length:
                alive[j] = False
    return alive


def _flat(groups):
    ptr = np.zeros(len(groups) + 1, dtype=np.int32)
    ptr[1:] = np.cumsum([len(g) for g in groups])
    return ptr, np.array([x for g in groups for x in g], dtype=np.int32)


def _eliminate(cands, pdag):
    # a path survives iff no earlier survivor removes it, so testing each path
    # against the survivors so far matches the outer-loop formulation
    idx = pdag.index
    choice = choice_matrix(cands, pdag)
    order = sorted(pdag.structures, key=lambda st: st.id)
    lengths = np.array([c.length for c in cands], dtype=np.float64)
    path_ptr, path_idx = _flat([[idx.pos[v] for v in c.nodes] for c in cands])
    ext_ptr, ext_idx = _flat([extents(pdag)[st.id] for st in order])
    drop_ptr, drop_idx = _flat([non_shortest(pdag)[st.id] for st in order])
    alive = kernels.eliminate(
        choice, lengths, path_ptr, path_idx, ext_ptr, ext_idx, drop_ptr, drop_idx,
        idx.topo, idx.succ_ptr, idx.succ_idx, idx.wcet,
    )
    return [bool(x) for x in alive]
