import itertools

import pytest

from pdagrta import build_substructure, delta, make_pdag, prepare
from pdagrta.paths import candidate_paths, path_context

from conftest import (
    EXA_A, EXA_C, EXB_T1X1, EXB_T1Y1, brute_outcomes, brute_paths, chain, plen, small_instances,
)


def test_delta_ex_a(ex_a):
    assert delta(ex_a) == 8


def test_delta_ex_b(ex_b):
    assert delta(ex_b) == 14


def test_delta_no_structures():
    assert delta(chain(3, 1, 4)) == 8


@pytest.mark.skip(reason="figure WCETs are not given in text form; see the decisions ledger")
def test_delta_figure_instance():
    pass


def test_substructure_ex_b(ex_b):
    a, b = path_context(EXB_T1X1, ex_b), path_context(EXB_T1Y1, ex_b)
    sub = build_substructure(a, b, ex_b)
    assert [s.id for s in sub.structures] == [1]
    assert sub.nodes == set(EXB_T1X1) | {8}
    assert (6, 8) in sub.edges and (10, 11) not in sub.edges
    assert delta(sub) == 18


def test_substructure_subset_is_anchor(ex_b):
    a = path_context(EXB_T1X1, ex_b)
    b = path_context((1, 2, 3, 5, 6, 8, 9, 99), ex_b)
    sub = build_substructure(a, b, ex_b)
    assert sub.structures == ()
    assert sub.nodes == set(EXB_T1X1)
    assert delta(sub) == 19


def test_substructure_ex_a(ex_a):
    sub = build_substructure(path_context(EXA_A, ex_a), path_context(EXA_C, ex_a), ex_a)
    assert [s.id for s in sub.structures] == [1]
    assert sub.nodes == {1, 2, 3, 4, 5, 6}
    assert delta(sub) == 8


def test_substructure_multiple_local_ends():
    # anchor does not dominate the structure: the other branch's node has an outside predecessor
    nodes = {1: 1, 2: 1, 3: 1, 4: 9, 5: 1, 6: 1}
    edges = [(1, 2), (2, 3), (2, 4), (3, 5), (4, 5), (5, 6), (1, 6)]
    p = prepare(make_pdag(nodes, edges, [(1, 2, 5, [(1, [3], 0.5), (2, [4], 0.5)])], period=100))
    sub = build_substructure(path_context((1, 2, 3, 5, 6), p), path_context((1, 6), p), p)
    assert delta(sub) == 5


def test_delta_below_every_scenario_and_attained():
    for p in small_instances(30, structures=(1, 2, 3, 4)):
        tops = [top for _, top, _, _ in brute_outcomes(p)]
        d = delta(p)
        assert all(d <= t for t in tops)
        assert d in tops


def test_any_minimising_choice_gives_same_delta():
    # brute force: longest path under each combination of shortest-length branches
    from pdagrta.paths import branch_lengths

    for p in small_instances(20, structures=(2, 3)):
        lens = branch_lengths(p)
        options = []
        for s in p.structures:
            low = min(lens[(s.id, b.index)] for b in s.branches)
            options.append([b for b in s.branches if lens[(s.id, b.index)] == low])
        cond = {v for s in p.structures for b in s.branches for v in b.nodes}
        base = {n.id for n in p.nodes} - cond
        values = set()
        for combo in itertools.product(*options):
            keep = base.union(*(b.nodes for b in combo))
            values.add(max(plen(p, s) for s in brute_paths(p, keep)))
        assert values == {delta(p)}


def test_substructure_bound_vs_alternatives():
    # delta(τ_a) >= min over Θ_a choices of the sub-structure's longest path
    checked = 0
    for p in small_instances(20, structures=(2, 3)):
        cands = candidate_paths(p, delta(p))
        for a, b in itertools.permutations(cands, 2):
            sub = build_substructure(a, b, p)
            if not sub.structures:
                continue
            fixed = set(a.nodes)
            best = None
            for combo in itertools.product(*(s.branches for s in sub.structures)):
                keep = fixed | {s.entry for s in sub.structures} | {s.exit for s in sub.structures}
                keep = keep.union(*(bb.nodes for bb in combo))
                keep -= {v for s in sub.structures for bb in s.branches if bb not in combo for v in bb.nodes}
                local = _longest_any(p, keep)
                best = local if best is None else min(best, local)
            assert delta(sub) >= best - 1e-12
            checked += 1
    assert checked > 0


def _longest_any(p, keep):
    succ = {v: [w for u, w in p.edges if u == v and w in keep] for v in keep}
    memo = {}

    def go(v):
        if v not in memo:
            memo[v] = p.wcet[v] + max((go(w) for w in succ[v]), default=0.0)
        return memo[v]

    return max(go(v) for v in keep)
