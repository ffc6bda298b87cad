"""Acceptance criteria, one test per criterion.

Each test records a one-line summary; the session footer prints a PASS/FAIL
line per criterion (see ``pytest_terminal_summary`` in conftest).
"""

import math
import statistics
import time

import pytest

from pdagrta import (
    assign_probabilities,
    build_distribution,
    compute_lambda_star,
    delta,
    load_fixture,
    oracle,
    prepare,
)
from pdagrta.generator import GeneratorConfig, generate_pdag
from pdagrta.paths import path_context
from pdagrta.probability import check_bookkeeping
from pdagrta.workbench import (
    ACCEPTANCE_LEVELS,
    bench_sweep,
    compare,
    dominance_violations,
    min_cores,
)

from conftest import EXA_A, EXA_B, EXA_C, EXB_T1X1, EXB_T1X2, EXB_T2X1, EXB_T2X2

pytestmark = pytest.mark.slow

# everything analysed here is re-checked by criterion 8
_ANALYSED = []


def _analyse(pdag, m=None):
    lam = compute_lambda_star(pdag)
    probs = assign_probabilities(lam, pdag)
    _ANALYSED.append((probs, None))
    if m is not None:
        dist = build_distribution(lam, probs, pdag, m)
        _ANALYSED.append((probs, dist))
        return lam, probs, dist
    return lam, probs


@pytest.fixture(scope="module")
def sweep200():
    """200 instances, |Θ| cycling 1..4, 2 or 3 branches per structure."""
    out = []
    for i in range(200):
        cfg = GeneratorConfig(structures=1 + i % 4, branches=2 + i % 2, seed=1000 + i)
        out.append((cfg, prepare(generate_pdag(cfg))))
    return out


@pytest.fixture(scope="module")
def defaults100():
    return [prepare(generate_pdag(GeneratorConfig(seed=2000 + i))) for i in range(100)]


def _s2_twin(missing, kept, pdag):
    ctx = path_context(missing, pdag)
    for seq in kept:
        other = path_context(seq, pdag)
        if other.branches == ctx.branches and other.length == ctx.length:
            return True
    return False


def test_criterion_1_lambda_star_exact(sweep200, record_property):
    t0 = time.perf_counter()
    mismatches = []
    for cfg, pdag in sweep200:
        lam, _ = _analyse(pdag)
        got = set(lam.sequences)
        exact = oracle.exact_longest_stats(pdag).membership
        extra = got - exact
        unexplained = [s for s in exact - got if not _s2_twin(s, got, pdag)]
        if extra or unexplained:
            mismatches.append((cfg.seed, sorted(extra), unexplained))
    elapsed = time.perf_counter() - t0
    record_property("summary", f"{len(mismatches)} unexplained mismatches over 200 instances, {elapsed:.1f}s")
    assert not mismatches, mismatches[:3]
    assert elapsed < 300


def test_criterion_2_dominance(sweep200, record_property):
    violations = []
    for cfg, pdag in sweep200:
        for m in (2, 4, 8):
            _, _, dist = _analyse(pdag, m)
            bad = dominance_violations(dist, oracle.enum_distribution(pdag, m), tol=1e-9)
            violations += [(cfg.seed, m, t, a, e) for t, a, e in bad]
    cases = sorted({(s, m) for s, m, *_ in violations})
    record_property("summary", f"{len(violations)} violating points in {len(cases)} (seed, m) cases: {cases}")
    assert not violations, violations[:5]


def test_criterion_3_lower_bound(sweep200, record_property):
    below = unattained = 0
    for _, pdag in sweep200:
        d = delta(pdag)
        tops = [o.longest for o in oracle.enumerate_outcomes(pdag, with_paths=False)]
        below += sum(1 for t in tops if d > t)
        unattained += d not in tops
    record_property("summary", f"{below} scenarios below Δ, {unattained} instances where Δ is not attained")
    assert below == 0 and unattained == 0


def test_criterion_4_fixtures(record_property):
    a = prepare(load_fixture("ex_a"))
    lam, probs, dist = _analyse(a, 2)
    assert lam.sequences == [EXA_A, EXA_B, EXA_C]
    assert probs.probabilities == pytest.approx((0.3, 0.7, 0.0), abs=1e-12)
    assert dict(dist.points) == pytest.approx({10.0: 0.7, 13.0: 0.3}, abs=1e-12)
    assert compare(a, 2).noar == pytest.approx(0.0, abs=1e-12)
    assert oracle.exact_longest_stats(a).membership == set(lam.sequences)

    b = prepare(load_fixture("ex_b"))
    lam, probs = _analyse(b)
    assert lam.sequences == [EXB_T1X1, EXB_T1X2, EXB_T2X1, EXB_T2X2]
    assert probs.probabilities == pytest.approx((0.25,) * 4, abs=1e-12)
    stats = oracle.exact_longest_stats(b)
    assert stats.membership == set(lam.sequences)
    for path, c in zip(lam.paths, probs.cumulative):
        assert c == pytest.approx(stats.exceedance(path.length), abs=1e-12)
    record_property("summary", "EX-A and EX-B match the expected path sets, probabilities and distribution")


def test_criterion_5_noar_default_config(defaults100, record_property):
    values = []
    for pdag in defaults100:
        rep = compare(pdag, 4)
        _ANALYSED.append((None, rep.analysis))
        values.append(rep.noar)
    values.sort()
    mean = statistics.fmean(values)
    p90 = values[math.ceil(0.9 * len(values)) - 1]
    record_property("summary", f"mean NOAR {mean:.4f} (limit 0.03), p90 {p90:.4f} (limit 0.05)")
    assert mean <= 0.03
    assert p90 <= 0.05


def _best_of(fn, pdag, repeat=3):
    best = math.inf
    for _ in range(repeat):
        pdag.index.cache.clear()  # no warm caches carried between repeats
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_6_scalability(record_property):
    ratios = []
    for i in range(20):
        pdag = prepare(generate_pdag(GeneratorConfig(structures=6, seed=3000 + i)))
        pdag.index  # shared flat graph, built outside both timers
        t_an = _best_of(lambda: _analyse(pdag, 4), pdag)
        t_or = _best_of(lambda: oracle.enum_distribution(pdag, 4), pdag)
        ratios.append(t_an / t_or)
    median_ratio = statistics.median(ratios)

    # the oracle cap mirrors the reported enumeration limit of |Θ| = 7
    cap = 3**7
    (cell,) = bench_sweep([GeneratorConfig(structures=10, seed=4000)], 4, 20, cap=cap)
    worst = max(r["t_analysis"] for r in cell["rows"])
    record_property(
        "summary",
        f"|Θ|=6 median analysis/oracle time {median_ratio:.3f} (limit 0.1); "
        f"|Θ|=10 slowest analysis {worst:.3f}s (limit 60s), oracle skipped={cell['oracle_skipped']} at cap {cap}",
    )
    assert median_ratio <= 0.1
    assert all(r["t_oracle"] is None for r in cell["rows"])
    assert worst < 60


def _cores_table(pdags, deadline_of=lambda p: None):
    table = []
    for pdag in pdags:
        d = deadline_of(pdag)
        row = {a: min_cores(pdag, a, "analysis", d) for a in ACCEPTANCE_LEVELS}
        row["graham"] = min_cores(pdag, 1.0, "graham", d)
        table.append(row)
    return table


def _check_cores(table):
    means = [statistics.fmean(r[a] for r in table) for a in ACCEPTANCE_LEVELS]
    worse = [i for i, r in enumerate(table) if any(r[a] > r["graham"] for a in ACCEPTANCE_LEVELS[:-1])]
    equal = sum(r[1.0] == r["graham"] for r in table)
    return means, worse, equal


def test_criterion_7_core_counts(defaults100, record_property):
    means, worse, equal = _check_cores(_cores_table(defaults100))
    record_property(
        "summary",
        f"mean cores {[round(x, 2) for x in means]}, analysis worse than graham on {len(worse)}, "
        f"equal at 1.0 on {equal}/100",
    )
    assert means == sorted(means)
    assert not worse
    assert equal >= 95


def test_criterion_7_tight_deadline_variant(defaults100, record_property):
    # same checks with D set to the single worst-case bound on 8 cores, so core counts spread out
    from pdagrta.workbench import graham_worst_case

    means, worse, equal = _check_cores(_cores_table(defaults100, lambda p: graham_worst_case(p, 8)))
    record_property("summary", f"tight D: mean cores {[round(x, 2) for x in means]}, equal {equal}/100")
    assert means == sorted(means)
    assert not worse
    assert equal >= 95


def test_criterion_8_bookkeeping(sweep200, defaults100, record_property):
    # the package asserts these on every call; this re-checks every object produced in this module
    for _, pdag in sweep200:
        for m in (2, 4, 8):
            _analyse(pdag, m)
    for pdag in defaults100:
        _analyse(pdag, 4)
    checked = 0
    for probs, dist in _ANALYSED:
        if probs is not None:
            check_bookkeeping(probs)
            assert all(0.0 <= p <= 1.0 for p in probs.probabilities)
            assert 0.0 <= math.fsum(probs.probabilities) <= 1.0
        if dist is not None:
            curve = [e for _, e in dist.exceedance_curve()]
            assert all(b <= a for a, b in zip(curve, curve[1:]))
            assert 0.0 <= dist.total_mass <= 1.0
        checked += 1
    record_property("summary", f"{checked} assignments/distributions re-checked, zero tolerance")
    assert checked > 1000
