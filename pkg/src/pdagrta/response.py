"""Worst-case interference, per-path response bounds and the response-time distribution."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .paths import PathContext


@dataclass(frozen=True)
class ResponseEntry:
    path: PathContext
    probability: float
    interference: float
    response: float
    cores: int


@dataclass(frozen=True)
class RtDistribution:
    """Discrete response-time distribution; ``points`` are (R, mass) with R strictly increasing."""

    points: tuple

    @classmethod
    def from_masses(cls, pairs):
        merged = {}
        for r, p in pairs:
            merged.setdefault(r, []).append(p)
        return cls(tuple(sorted((r, math.fsum(ps)) for r, ps in merged.items())))

    @property
    def total_mass(self):
        return math.fsum(p for _, p in self.points)

    @property
    def support(self):
        return [r for r, _ in self.points]

    def exceedance(self, t):
        """Probability mass at response times >= t."""
        i = bisect.bisect_left(self.support, t)
        return math.fsum(p for _, p in self.points[i:])

    def cdf(self, t):
        """Probability mass at response times <= t."""
        i = bisect.bisect_right(self.support, t)
        return math.fsum(p for _, p in self.points[:i])

    def exceedance_curve(self):
        out = []
        tail = 0.0
        for r, p in reversed(self.points):
            tail += p
            out.append((r, tail))
        return out[::-1]


def _structure_volumes(pdag):
    def build():
        c = pdag.wcet
        vols = {(s.id, b.index): math.fsum(c[v] for v in b.nodes) for s in pdag.structures for b in s.branches}
        conditional = set().union(*(b.nodes for s in pdag.structures for b in s.branches))
        fixed = math.fsum(c[n.id] for n in pdag.nodes if n.id not in conditional)
        biggest = {s.id: max(vols[(s.id, b.index)] for b in s.branches) for s in pdag.structures}
        return fixed, vols, biggest

    return pdag.index.cached("volumes", build)


def interference(path, pdag) -> float:
    """Workload that may run beside ``path`` when it is the longest path.

    Off-path unconditional nodes, off-path nodes of the branches the path
    takes, and the largest branch of every structure the path avoids.
    """
    fixed, vols, biggest = _structure_volumes(pdag)
    # off-path = everything that can run in a worst compatible scenario minus the path itself
    total = math.fsum(
        [fixed]
        + [vols[h] for h in path.branches]
        + [v for sid, v in biggest.items() if sid not in path.structures]
    )
    return max(0.0, total - path.length)


def response_bound(path, pdag, m) -> float:
    if m < 1:
        raise ValueError("core count must be >= 1")
    return path.length + interference(path, pdag) / m


def response_entries(lambda_star, probs, pdag, m):
    return [
        ResponseEntry(path, p, i, path.length + i / m, m)
        for path, p, i in zip(lambda_star.paths, probs.probabilities, lambda_star.interference)
    ]


def build_distribution(lambda_star, probs, pdag, m, envelope=False) -> RtDistribution:
    """One mass point per longest path with positive probability, equal R merged.

    ``envelope=True`` places each path's mass at the largest bound among it and
    every shorter path instead, so the curve stays above the exact exceedance
    even when response bounds are not ordered like path lengths.
    """
    if m < 1:
        raise ValueError("core count must be >= 1")
    entries = response_entries(lambda_star, probs, pdag, m)
    rs = [e.response for e in entries]
    if envelope:
        for h in range(len(rs) - 2, -1, -1):
            rs[h] = max(rs[h], rs[h + 1])
    dist = RtDistribution.from_masses((r, e.probability) for r, e in zip(rs, entries) if e.probability > 0)
    if dist.total_mass > 1.0:
        # per-group rounding of merged masses; shave it off the smallest response time
        (r0, p0), rest = dist.points[0], dist.points[1:]
        p0 = max(0.0, p0 - (dist.total_mass - 1.0))
        while p0 > 0.0 and math.fsum([p0, *(p for _, p in rest)]) > 1.0:
            p0 = math.nextafter(p0, 0.0)
        dist = RtDistribution(((r0, p0), *rest))
    curve = [e for _, e in dist.exceedance_curve()]
    if any(b > a for a, b in zip(curve, curve[1:])) or not 0.0 <= dist.total_mass <= 1.0:
        raise AssertionError("response-time distribution bookkeeping broken")
    return dist


def meet_probability(dist, deadline) -> float:
    """Mass at or below the deadline; unassigned residual mass counts as a miss."""
    return dist.cdf(deadline)
