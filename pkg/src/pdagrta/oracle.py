"""Scenario-enumeration ground truth: per-scenario Graham bounds and exact longest-path statistics."""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass

from . import kernels
from .model import scenario_count
from .paths import Scenario, instantiate, tied_longest_paths, volume
from .response import RtDistribution

DEFAULT_SCENARIO_CAP = 10**6


class ScenarioCapExceeded(RuntimeError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} scenarios exceed the enumeration cap of {cap}")


@dataclass(frozen=True)
class ScenarioOutcome:
    scenario: Scenario
    probability: float
    longest: float
    tied_paths: frozenset
    volume: float

    def graham(self, m):
        return graham(self.longest, self.volume, m)


def graham(length, vol, m):
    if m < 1:
        raise ValueError("core count must be >= 1")
    return length + (vol - length) / m


def graham_bound(graph, m) -> float:
    length, _ = tied_longest_paths(graph)
    return graham(length, volume(graph), m)


def _check_cap(pdag, cap):
    count = scenario_count(pdag)
    if count > cap:
        raise ScenarioCapExceeded(count, cap)
    return count


def scenarios(pdag):
    """Every complete branch selection, in lexicographic (structure id, branch index) order."""
    structs = pdag.structures
    for combo in itertools.product(*(s.branches for s in structs)):
        yield Scenario(tuple((s.id, b.index) for s, b in zip(structs, combo))), math.prod(b.prob for b in combo)


def enumerate_outcomes(pdag, cap=DEFAULT_SCENARIO_CAP, with_paths=True):
    _check_cap(pdag, cap)
    out = []
    for scen, prob in scenarios(pdag):
        graph = instantiate(pdag, scen)
        length, tied = tied_longest_paths(graph) if with_paths else (_length_only(graph), ())
        out.append(ScenarioOutcome(scen, prob, length, frozenset(tied), volume(graph)))
    return out


def _length_only(graph):
    idx = graph.pdag.index
    best, _ = kernels.longest_suffix(idx.topo, idx.succ_ptr, idx.succ_idx, idx.wcet, graph.mask)
    return float(best[idx.source])


def enum_distribution(pdag, m, cap=DEFAULT_SCENARIO_CAP) -> RtDistribution:
    outcomes = enumerate_outcomes(pdag, cap, with_paths=False)
    return RtDistribution.from_masses((o.graham(m), o.probability) for o in outcomes)


@dataclass(frozen=True)
class LongestStats:
    membership: frozenset
    lengths: tuple  # (longest length, probability) merged, ascending

    def exceedance(self, length):
        keys = [x for x, _ in self.lengths]
        i = bisect.bisect_left(keys, length)
        return math.fsum(p for _, p in self.lengths[i:])


def exact_longest_stats(pdag, cap=DEFAULT_SCENARIO_CAP, outcomes=None) -> LongestStats:
    if outcomes is None:
        outcomes = enumerate_outcomes(pdag, cap)
    members = set()
    merged = {}
    for o in outcomes:
        members |= o.tied_paths
        merged[o.longest] = merged.get(o.longest, 0.0) + o.probability
    return LongestStats(frozenset(members), tuple(sorted(merged.items())))
