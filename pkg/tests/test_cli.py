import io
import json

import pytest

from pdagrta import load_fixture, serialize_pdag
from pdagrta.cli import main
from pdagrta.export import parse_distribution, parse_records
from pdagrta.generator import GeneratorConfig, generate_pdag


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name in ("ex_a", "ex_b"):
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(serialize_pdag(load_fixture(name)))
    doc = json.loads(serialize_pdag(load_fixture("ex_a")))
    doc["edges"].append([6, 1])
    paths["cyclic"] = tmp_path / "cyclic.json"
    paths["cyclic"].write_text(json.dumps(doc))
    paths["plain"] = tmp_path / "plain.json"
    paths["plain"].write_text(serialize_pdag(generate_pdag(GeneratorConfig(structures=0, seed=4))))
    paths["big"] = tmp_path / "big.json"
    paths["big"].write_text(serialize_pdag(generate_pdag(GeneratorConfig(structures=13, seed=5))))
    paths["garbled"] = tmp_path / "garbled.json"
    paths["garbled"].write_text('{"nodes": [')
    return paths


def test_validate(files):
    assert run("validate", files["ex_a"])[0] == 0
    code, out, _ = run("validate", files["cyclic"])
    assert code == 2 and "CycleDetected" in out
    assert run("validate", files["ex_a"].parent / "missing.json")[0] == 2
    assert run("validate", files["garbled"])[0] == 2


def test_validate_records(files):
    code, out, _ = run("validate", files["cyclic"], "--format", "records")
    header, rows = parse_records(out)
    assert code == 2 and header["ok"] is False
    assert any(r["rule"] == "CycleDetected" for r in rows)


def test_analyze_dist(files):
    code, out, _ = run("analyze", files["ex_a"], "--cores", 2)
    assert code == 0
    lines = out.splitlines()
    assert lines[1:3] == ["10\t0.7", "13\t0.3"]
    assert "meet_probability(D=12)=0.7" in lines[3]


def test_analyze_dist_records(files):
    code, out, _ = run("analyze", files["ex_a"], "-m", 2, "--format", "records")
    header, dist = parse_distribution(out)
    assert dict(dist.points) == pytest.approx({10.0: 0.7, 13.0: 0.3})


def test_analyze_paths(files):
    code, out, _ = run("analyze", files["ex_a"], "--cores", 2, "--emit", "paths")
    rows = [ln.split("\t") for ln in out.splitlines()[2:]]
    assert code == 0 and len(rows) == 3
    assert rows[2][2] == "0" and rows[2][5] == "yes"
    assert rows[0][1:5] == ["11", "0.3", "4", "13"]


def test_analyze_exceedance(files):
    code, out, _ = run("analyze", files["ex_a"], "--cores", 2, "--emit", "exceedance", "--format", "records")
    header, rows = parse_records(out)
    assert header["kind"] == "exceedance" and len(rows) == 2


def test_analyze_structure_free(files):
    code, out, _ = run("analyze", files["plain"], "--emit", "paths")
    rows = out.splitlines()[2:]
    assert code == 0 and len(rows) == 1 and rows[0].split("\t")[2] == "1"


def test_analyze_invalid(files):
    code, _, err = run("analyze", files["cyclic"])
    assert code == 2 and "CycleDetected" in err


def test_enumerate(files):
    code, out, _ = run("enumerate", files["ex_a"], "--cores", 2)
    assert code == 0 and out.splitlines()[1:] == ["10\t0.7", "13\t0.3"]
    code, out, _ = run("enumerate", files["plain"])
    assert code == 0 and len(out.splitlines()) == 2


def test_enumerate_cap(files):
    code, _, err = run("enumerate", files["big"])
    assert code == 3 and "1594323" in err
    assert run("enumerate", files["ex_b"], "--scenario-cap", 4)[0] == 3


def test_compare(files):
    code, out, err = run("compare", files["ex_a"], "--cores", 2)
    assert code == 0 and out.splitlines()[0] == "noar 0"
    assert "t_analysis=" in err and "t_analysis" not in out
    code, out, _ = run("compare", files["ex_b"], "--cores", 4, "--format", "records")
    header, rows = parse_records(out)
    assert header["violations"] == [] and all(d == 0 for _, d in rows)


def test_cores(files):
    assert run("cores", files["ex_a"], "--acceptance", "1.0")[1] == "4\n"
    code, out, _ = run("cores", files["ex_a"])
    assert out.splitlines() == ["0.7\t1", "0.8\t4", "0.9\t4", "1\t4"]
    assert run("cores", files["ex_a"], "--acceptance", "1.0", "--deadline", 5)[0] == 1
    assert run("cores", files["ex_a"], "--acceptance", "1.5")[0] == 2


def test_generate(files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("generate", "--seed", 7, "-o", a)[0] == 0
    assert run("generate", "--seed", 7, "-o", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert run("validate", a)[0] == 0
    code, out, _ = run("generate", "--seed", 7)
    assert out == a.read_text()
    assert run("generate", "--seed", 7, "--psr", 1.5)[0] == 2
    with pytest.raises(SystemExit):
        run("generate")


def test_bench(files):
    code, out, _ = run("bench", "--seed", 3, "--structures", "1,2", "--instances", 2, "--format", "records")
    header, rows = parse_records(out)
    assert code == 0 and header["kind"] == "bench"
    assert sum(r["kind"] == "cell" for r in rows) == 2
    assert sum(r["kind"] == "instance" for r in rows) == 4
    code, out, _ = run("bench", "--seed", 3, "--structures", "2", "--instances", 2)
    assert out.splitlines()[0].startswith("structures\t")


def test_byte_identical_outputs(files):
    for argv in (("analyze", files["ex_b"], "--emit", "paths"), ("enumerate", files["ex_b"]),
                 ("compare", files["ex_b"], "--format", "records")):
        assert run(*argv)[1] == run(*argv)[1]


def test_module_entry_point(files):
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "pdagrta", "cores", str(files["ex_a"]), "--acceptance", "1.0"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "4\n"
