import math
import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdagrta import scenario_count, serialize_pdag, validate
from pdagrta.generator import GeneratorConfig, InfeasibleConfigError, generate_pdag, structure_fraction


def test_same_seed_identical():
    a = serialize_pdag(generate_pdag(GeneratorConfig(seed=42)))
    b = serialize_pdag(generate_pdag(GeneratorConfig(seed=42)))
    assert a == b
    assert a != serialize_pdag(generate_pdag(GeneratorConfig(seed=43)))


def test_defaults_shape():
    for seed in range(20):
        p = generate_pdag(GeneratorConfig(seed=seed))
        assert len(p.structures) == 3
        for s in p.structures:
            assert len(s.branches) == 3
            assert math.fsum(b.prob for b in s.branches) == pytest.approx(1.0, abs=1e-12)


def test_psr_fraction():
    fracs = [structure_fraction(generate_pdag(GeneratorConfig(seed=s))) for s in range(100)]
    assert 0.35 <= statistics.fmean(fracs) <= 0.45


def test_total_workload_matches_utilization():
    for seed in range(20):
        p = generate_pdag(GeneratorConfig(seed=seed))
        cond = {v for s in p.structures for b in s.branches for v in b.nodes}
        fixed = math.fsum(n.wcet for n in p.nodes if n.id not in cond)
        mean_branch = math.fsum(
            math.fsum(math.fsum(p.wcet[v] for v in b.nodes) for b in s.branches) / len(s.branches)
            for s in p.structures
        )
        assert fixed + mean_branch == pytest.approx(0.5 * p.period, rel=1e-3)
        assert p.deadline == p.period
        assert 1 <= p.period <= 1400


def test_layer_and_width_ranges():
    for seed in range(20):
        p = generate_pdag(GeneratorConfig(structures=0, seed=seed))
        # source + sink + 5..8 layers of 2..6 nodes
        assert 2 + 5 * 2 <= len(p.nodes) <= 2 + 8 * 6
        assert all(n.wcet > 0 for n in p.nodes)


def test_entry_exit_split_evenly():
    for seed in range(10):
        p = generate_pdag(GeneratorConfig(seed=seed))
        for s in p.structures:
            assert p.wcet[s.entry] == p.wcet[s.exit]


def test_infeasible_configs():
    with pytest.raises(InfeasibleConfigError):
        generate_pdag(GeneratorConfig(structures=500, seed=1))
    with pytest.raises(InfeasibleConfigError):
        GeneratorConfig(psr=1.0)
    with pytest.raises(InfeasibleConfigError):
        GeneratorConfig(max_width=1)
    with pytest.raises(InfeasibleConfigError):
        GeneratorConfig(structures=-1)


def test_no_structures():
    p = generate_pdag(GeneratorConfig(structures=0, seed=9))
    assert p.structures == ()
    assert validate(p).ok


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**64 - 1),
    k=st.integers(0, 6),
    b=st.integers(2, 4),
    width=st.integers(2, 6),
    psr=st.floats(0.05, 0.95),
)
def test_generated_instances_valid(seed, k, b, width, psr):
    p = generate_pdag(GeneratorConfig(structures=k, branches=b, max_width=width, psr=psr, seed=seed))
    assert validate(p).ok
    assert scenario_count(p) == b**k
