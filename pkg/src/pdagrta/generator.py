"""Random layered p-DAG generator."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from .model import make_pdag, validate

# WCETs are snapped to this dyadic grid so that every path sum is exact in
# double precision and equal-length comparisons are well defined.
QUANTUM = 2.0**-20


class InfeasibleConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    layers: tuple = (5, 8)
    max_width: int = 6  # nodes per layer drawn from [2, max_width]
    edge_prob: float = 0.2
    period: tuple = (1.0, 1400.0)
    utilization: float = 0.5
    structures: int = 3
    branches: int = 3
    branch_layers: tuple = (2, 4)
    branch_width: tuple = (2, 4)
    psr: float = 0.4
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.psr < 1.0:
            raise InfeasibleConfigError("psr must lie in (0, 1)")
        if self.max_width < 2:
            raise InfeasibleConfigError("max_width must be >= 2")
        if self.structures < 0:
            raise InfeasibleConfigError("structure count must be >= 0")
        if self.branches < 2:
            raise InfeasibleConfigError("structures need at least two branches")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise InfeasibleConfigError("edge_prob must lie in [0, 1]")
        if self.layers[0] < 1 or self.layers[0] > self.layers[1]:
            raise InfeasibleConfigError("bad layer range")

    def with_seed(self, seed):
        return replace(self, seed=seed)


def _snap(x):
    return max(QUANTUM, round(x / QUANTUM) * QUANTUM)


def _layered(rng, n_layers, width_lo, width_hi, edge_prob, next_id):
    """Layers of fresh ids plus edges; every node gets a neighbour in each adjacent layer."""
    layers = []
    for _ in range(n_layers):
        width = rng.randint(width_lo, width_hi)
        layers.append(list(range(next_id, next_id + width)))
        next_id += width
    edges = set()
    for upper, lower in zip(layers, layers[1:]):
        for v in lower:
            for u in upper:
                if rng.random() < edge_prob:
                    edges.add((u, v))
        for v in lower:
            if not any((u, v) in edges for u in upper):
                edges.add((rng.choice(upper), v))
        for u in upper:
            if not any((u, v) in edges for v in lower):
                edges.add((u, rng.choice(lower)))
    return layers, edges, next_id


def _split(rng, total, count):
    """Split ``total`` into ``count`` positive uniform-random shares."""
    draws = [rng.uniform(0.05, 1.0) for _ in range(count)]
    s = math.fsum(draws)
    return [total * d / s for d in draws]


def generate_pdag(config=GeneratorConfig()):
    rng = random.Random(config.seed)
    period = _snap(rng.uniform(*config.period))
    workload = period * config.utilization
    n_struct = config.structures
    psr = config.psr if n_struct else 0.0

    layers, edges, next_id = _layered(rng, rng.randint(*config.layers), 2, config.max_width, config.edge_prob, 1)
    source, sink = 0, next_id
    next_id += 1
    edges |= {(source, v) for v in layers[0]}
    edges |= {(v, sink) for v in layers[-1]}
    interior = [v for layer in layers for v in layer]
    if n_struct > len(interior):
        raise InfeasibleConfigError(f"{n_struct} structures requested but only {len(interior)} replaceable nodes")

    fixed_nodes = [source] + interior + [sink]
    wcet = dict(zip(fixed_nodes, _split(rng, (1.0 - psr) * workload, len(fixed_nodes))))

    replaced = sorted(rng.sample(interior, n_struct))
    budgets = _split(rng, psr * workload, n_struct) if n_struct else []
    structures = []
    for sid, (node, budget) in enumerate(zip(replaced, budgets), start=1):
        entry, exit_ = node, next_id
        next_id += 1
        half = wcet[node] / 2.0
        wcet[entry] = half
        wcet[exit_] = half
        # the exit inherits the replaced node's outgoing edges
        moved = {(a, b) for a, b in edges if a == node}
        edges -= moved
        edges |= {(exit_, b) for _, b in moved}

        vols = [rng.uniform(0.5, 1.5) for _ in range(config.branches)]
        scale = budget / (math.fsum(vols) / len(vols))
        probs = [rng.uniform(0.05, 1.0) for _ in range(config.branches)]
        psum = math.fsum(probs)
        branches = []
        for k in range(config.branches):
            b_layers, b_edges, next_id = _layered(
                rng, rng.randint(*config.branch_layers), config.branch_width[0], config.branch_width[1],
                config.edge_prob, next_id,
            )
            members = [v for layer in b_layers for v in layer]
            wcet.update(zip(members, _split(rng, vols[k] * scale, len(members))))
            edges |= b_edges
            edges |= {(entry, v) for v in b_layers[0]}
            edges |= {(v, exit_) for v in b_layers[-1]}
            branches.append((k + 1, members, probs[k] / psum))
        structures.append((sid, entry, exit_, branches))

    pdag = make_pdag({v: _snap(c) for v, c in wcet.items()}, edges, structures, period=period, deadline=period)
    report = validate(pdag)
    if not report.ok:  # pragma: no cover - generator invariant
        raise AssertionError(f"generator produced an invalid instance:\n{report}")
    return pdag


def structure_fraction(pdag):
    """Share of the expected workload held by structures (mean branch volume per structure)."""
    c = pdag.wcet
    conditional = set()
    mean_vol = 0.0
    for s in pdag.structures:
        vols = [math.fsum(c[v] for v in b.nodes) for b in s.branches]
        mean_vol += math.fsum(vols) / len(vols)
        for b in s.branches:
            conditional |= b.nodes
    fixed = math.fsum(n.wcet for n in pdag.nodes if n.id not in conditional)
    return mean_vol / (fixed + mean_vol)
