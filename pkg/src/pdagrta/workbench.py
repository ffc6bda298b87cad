"""Experiment workbench: NOAR, core sizing, analysis-vs-oracle comparison and sweeps."""

from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import oracle
from .generator import GeneratorConfig, generate_pdag
from .lambdastar import compute_lambda_star
from .model import prepare, scenario_count
from .paths import suffix_potential
from .probability import assign_probabilities
from .response import RtDistribution, build_distribution, meet_probability

MAX_CORES = 1024
ACCEPTANCE_LEVELS = (0.7, 0.8, 0.9, 1.0)
# meet probabilities are sums of products of doubles
_MEET_TOL = 1e-12


class InfeasibleError(RuntimeError):
    pass


class ZeroAreaError(ValueError):
    pass


def noar(test, baseline) -> float:
    """Non-overlapping area between the two CDFs over the baseline's CDF area.

    Both integrals run over the union of the supports.
    """
    grid = sorted(set(test.support) | set(baseline.support))
    if not grid:
        raise ZeroAreaError("both distributions are empty")
    if test.points == baseline.points:
        return 0.0
    diff = area = 0.0
    for lo, hi in zip(grid, grid[1:]):
        width = hi - lo
        fb = baseline.cdf(lo)
        diff += abs(test.cdf(lo) - fb) * width
        area += fb * width
    if area <= 0.0:
        raise ZeroAreaError("baseline distribution encloses no area")
    return diff / area


def dominance_violations(analysis, exact, tol=1e-9):
    """Points t where the analysis exceedance falls below the exact one by more than ``tol``."""
    # both exceedance curves are left-continuous steps; checking the exact support suffices
    return [
        (t, analysis.exceedance(t), exact.exceedance(t))
        for t in exact.support
        if analysis.exceedance(t) < exact.exceedance(t) - tol
    ]


def graham_worst_case(pdag, m) -> float:
    """Single bound: longest path with every branch present, volume with every largest branch."""
    c = pdag.wcet
    length = float(suffix_potential(pdag)[pdag.index.source])
    conditional = set()
    vol = 0.0
    for s in pdag.structures:
        vol += max(math.fsum(c[v] for v in b.nodes) for b in s.branches)
        for b in s.branches:
            conditional |= b.nodes
    vol += math.fsum(n.wcet for n in pdag.nodes if n.id not in conditional)
    return oracle.graham(length, vol, m)


def _meet_function(pdag, method, deadline, cap):
    if method == "analysis":
        lam = compute_lambda_star(pdag)
        probs = assign_probabilities(lam, pdag)
        return lambda m: meet_probability(build_distribution(lam, probs, pdag, m), deadline)
    if method == "enumeration":
        outcomes = oracle.enumerate_outcomes(pdag, cap, with_paths=False)
        return lambda m: meet_probability(
            RtDistribution.from_masses((o.graham(m), o.probability) for o in outcomes), deadline
        )
    if method == "graham":
        return lambda m: 1.0 if graham_worst_case(pdag, m) <= deadline else 0.0
    raise ValueError(f"unknown method {method!r}")


def min_cores(pdag, acceptance, method="analysis", deadline=None, cap=oracle.DEFAULT_SCENARIO_CAP) -> int:
    if not 0.0 < acceptance <= 1.0:
        raise ValueError("acceptance must lie in (0, 1]")
    pdag = prepare(pdag)
    deadline = pdag.deadline if deadline is None else deadline
    meet = _meet_function(pdag, method, deadline, cap)
    for m in range(1, MAX_CORES + 1):
        if meet(m) >= acceptance - _MEET_TOL:
            return m
    raise InfeasibleError(f"no core count up to {MAX_CORES} meets deadline {deadline} with probability {acceptance}")


@dataclass(frozen=True)
class ComparisonReport:
    noar: float | None  # None when the oracle is a single point the analysis misses
    deviations: tuple  # analysis cumulative minus exact length exceedance, one per longest path
    dominated: bool  # every deviation >= 0
    violations: tuple  # response-time exceedance points where the analysis is below the oracle
    t_analysis: float
    t_oracle: float
    analysis: RtDistribution
    exact: RtDistribution


def run_analysis(pdag, m):
    lam = compute_lambda_star(pdag)
    probs = assign_probabilities(lam, pdag)
    return lam, probs, build_distribution(lam, probs, pdag, m)


def compare(pdag, m, cap=oracle.DEFAULT_SCENARIO_CAP) -> ComparisonReport:
    pdag = prepare(pdag)
    pdag.index  # shared flat representation, built outside both timers
    t0 = time.perf_counter()
    lam, probs, dist = run_analysis(pdag, m)
    t1 = time.perf_counter()
    outcomes = oracle.enumerate_outcomes(pdag, cap, with_paths=False)
    exact = RtDistribution.from_masses((o.graham(m), o.probability) for o in outcomes)
    t2 = time.perf_counter()

    stats = oracle.exact_longest_stats(pdag, outcomes=outcomes)
    deviations = tuple(c - stats.exceedance(p.length) for p, c in zip(lam.paths, probs.cumulative))
    try:
        area_ratio = noar(dist, exact)
    except ZeroAreaError:
        area_ratio = None  # single-point oracle that the analysis does not reproduce
    return ComparisonReport(
        noar=area_ratio,
        deviations=deviations,
        dominated=all(d >= -1e-12 for d in deviations),
        violations=tuple(dominance_violations(dist, exact)),
        t_analysis=t1 - t0,
        t_oracle=t2 - t1,
        analysis=dist,
        exact=exact,
    )


def instance_record(config, m, cap=oracle.DEFAULT_SCENARIO_CAP, cores=False):
    """One experiment row for the instance generated from ``config``."""
    pdag = generate_pdag(config)
    row = {
        "seed": config.seed,
        "structures": config.structures,
        "p": config.max_width,
        "psr": config.psr,
        "m": m,
        "scenarios": scenario_count(pdag),
    }
    if scenario_count(pdag) <= cap:
        report = compare(pdag, m, cap)
        row.update(noar=report.noar, t_analysis=report.t_analysis, t_oracle=report.t_oracle)
    else:
        pdag = prepare(pdag)
        pdag.index
        t0 = time.perf_counter()
        run_analysis(pdag, m)
        row.update(noar=None, t_analysis=time.perf_counter() - t0, t_oracle=None)
    if cores:
        for level in ACCEPTANCE_LEVELS:
            try:
                row[f"cores@{level}"] = min_cores(pdag, level, "analysis")
            except InfeasibleError:
                row[f"cores@{level}"] = None
    return row


def _summary(values):
    vals = sorted(v for v in values if v is not None)
    if not vals:
        return {"mean": None, "median": None, "p90": None}
    p90 = vals[min(len(vals) - 1, math.ceil(0.9 * len(vals)) - 1)]
    return {"mean": statistics.fmean(vals), "median": statistics.median(vals), "p90": p90}


def bench_sweep(configs, m, instances, cap=oracle.DEFAULT_SCENARIO_CAP, jobs=1, cores=False):
    """Per-config aggregates (and the raw rows) over ``instances`` seeds each.

    Instance ``i`` of a config uses seed ``config.seed + i``; rows come back in
    that order regardless of ``jobs``.
    """
    table = []
    for cfg in configs:
        tasks = [cfg.with_seed(cfg.seed + i) for i in range(instances)]
        if jobs > 1:
            with ProcessPoolExecutor(jobs) as pool:
                rows = list(pool.map(instance_record, tasks, [m] * len(tasks), [cap] * len(tasks), [cores] * len(tasks)))
        else:
            rows = [instance_record(t, m, cap, cores) for t in tasks]
        skipped = any(r["t_oracle"] is None for r in rows)
        t_an = _summary(r["t_analysis"] for r in rows)
        t_or = _summary(r["t_oracle"] for r in rows)
        nr = _summary(r["noar"] for r in rows)
        table.append(
            {
                "structures": cfg.structures,
                "p": cfg.max_width,
                "psr": cfg.psr,
                "m": m,
                "instances": instances,
                "oracle_skipped": skipped,
                "t_analysis_mean": t_an["mean"],
                "t_analysis_median": t_an["median"],
                "t_oracle_mean": t_or["mean"],
                "t_oracle_median": t_or["median"],
                "noar_mean": nr["mean"],
                "noar_median": nr["median"],
                "noar_p90": nr["p90"],
                "rows": rows,
            }
        )
    return table


__all__ = [
    "GeneratorConfig",
    "ComparisonReport",
    "InfeasibleError",
    "ZeroAreaError",
    "bench_sweep",
    "compare",
    "dominance_violations",
    "graham_worst_case",
    "instance_record",
    "min_cores",
    "noar",
]
