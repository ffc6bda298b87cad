"""Shared fixtures and brute-force reference implementations.

The reference helpers here work straight from the edge list and branch
probabilities with plain recursion; they share no code with the package's
kernels or its oracle module.
"""

import itertools
import math
from collections import defaultdict

import pytest

from pdagrta import load_fixture, make_pdag, prepare
from pdagrta.generator import GeneratorConfig, generate_pdag

# EX-B node ids: t1/t2 = 3/4, x1/x2 = 7/8, y1/y2 = 11/12
EXA_A = (1, 2, 3, 5, 6)
EXA_B = (1, 2, 4, 5, 6)
EXA_C = (1, 7, 6)
EXB_T1X1 = (1, 2, 3, 5, 6, 7, 9, 99)
EXB_T1X2 = (1, 2, 3, 5, 6, 8, 9, 99)
EXB_T2X1 = (1, 2, 4, 5, 6, 7, 9, 99)
EXB_T2X2 = (1, 2, 4, 5, 6, 8, 9, 99)
EXB_T1Y1 = (1, 2, 3, 5, 10, 11, 13, 99)
EXB_T1Y2 = (1, 2, 3, 5, 10, 12, 13, 99)


@pytest.fixture
def ex_a():
    return prepare(load_fixture("ex_a"))


@pytest.fixture
def ex_b():
    return prepare(load_fixture("ex_b"))


def chain(*wcets):
    ids = list(range(1, len(wcets) + 1))
    return prepare(make_pdag(dict(zip(ids, wcets)), list(zip(ids, ids[1:])), period=100))


def small_instances(count, seed0=500, structures=(1, 2, 3), branches=(2, 3)):
    out = []
    for i in range(count):
        cfg = GeneratorConfig(
            structures=structures[i % len(structures)],
            branches=branches[i % len(branches)],
            max_width=3,
            layers=(3, 5),
            branch_layers=(1, 3),
            branch_width=(1, 3),
            seed=seed0 + i,
        )
        out.append(prepare(generate_pdag(cfg)))
    return out


# ---- brute force -------------------------------------------------------------


def _succ(pdag, keep):
    succ = defaultdict(list)
    for a, b in pdag.edges:
        if a in keep and b in keep:
            succ[a].append(b)
    return succ


def endpoints(pdag):
    heads = {b for _, b in pdag.edges}
    tails = {a for a, _ in pdag.edges}
    ids = {n.id for n in pdag.nodes}
    (src,) = ids - heads
    (snk,) = ids - tails
    return src, snk


def brute_paths(pdag, keep=None):
    """Every source-to-sink node sequence inside ``keep`` (all nodes by default)."""
    keep = {n.id for n in pdag.nodes} if keep is None else set(keep)
    succ = _succ(pdag, keep)
    src, snk = endpoints(pdag)
    out = []

    def walk(seq):
        v = seq[-1]
        if v == snk:
            out.append(tuple(seq))
            return
        for w in succ[v]:
            walk(seq + [w])

    if src in keep:
        walk([src])
    return out


def brute_scenarios(pdag):
    """(probability, {structure: branch index}, executed node set) for every branch selection."""
    conditional = {v for s in pdag.structures for b in s.branches for v in b.nodes}
    base = {n.id for n in pdag.nodes} - conditional
    for combo in itertools.product(*(s.branches for s in pdag.structures)):
        nodes = set(base)
        for b in combo:
            nodes |= b.nodes
        yield math.prod(b.prob for b in combo), {b.structure: b.index for b in combo}, nodes


def plen(pdag, seq):
    return math.fsum(pdag.wcet[v] for v in seq)


def brute_outcomes(pdag):
    """(probability, longest length, tied longest sequences, volume) per scenario."""
    out = []
    for prob, _, nodes in brute_scenarios(pdag):
        paths = brute_paths(pdag, nodes)
        lengths = [plen(pdag, p) for p in paths]
        top = max(lengths)
        tied = frozenset(p for p, x in zip(paths, lengths) if x == top)
        out.append((prob, top, tied, math.fsum(pdag.wcet[v] for v in nodes)))
    return out


def brute_membership(pdag):
    return frozenset().union(*(t for _, _, t, _ in brute_outcomes(pdag)))


def brute_length_exceedance(pdag, length):
    return math.fsum(p for p, top, _, _ in brute_outcomes(pdag) if top >= length)


def brute_graham(pdag, m):
    """Response time -> mass, each scenario at len + (vol - len) / m."""
    dist = defaultdict(float)
    for p, top, _, vol in brute_outcomes(pdag):
        dist[top + (vol - top) / m] += p
    return dict(dist)


def exceed(dist_map, t):
    return math.fsum(p for r, p in dist_map.items() if r >= t)


def branch_set(pdag, seq):
    on = set(seq)
    return frozenset((s.id, b.index) for s in pdag.structures for b in s.branches if b.nodes & on)


# ---- acceptance summary --------------------------------------------------------

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        summary = dict(report.user_properties).get("summary", "")
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = (report.outcome, summary)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: (int(n.split("_")[2]), n)):
        outcome, summary = _ACCEPTANCE[name]
        verdict = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{verdict}  {name}: {summary}")
