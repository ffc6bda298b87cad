"""Command-line front end.

Exit codes: 0 success, 1 analysis infeasible, 2 bad input, 3 scenario cap exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import export, oracle
from .generator import GeneratorConfig, InfeasibleConfigError, generate_pdag
from .lambdastar import compute_lambda_star
from .model import InvalidPDagError, PDagFormatError, parse_pdag, prepare, serialize_pdag, validate
from .probability import assign_probabilities
from .response import build_distribution, meet_probability, response_entries
from .workbench import ACCEPTANCE_LEVELS, InfeasibleError, bench_sweep, compare, min_cores

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def _fmt(x):
    if x is None:
        return "-"
    if isinstance(x, float) and x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x) if isinstance(x, float) else str(x)


def _read_instance(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_pdag(text)


def _load(path):
    return prepare(_read_instance(path))


def _dist_text(dist, m, pdag, deadline=None):
    lines = [f"# m={m} total_mass={_fmt(dist.total_mass)} instance={export.instance_hash(pdag)}"]
    lines += [f"{_fmt(r)}\t{_fmt(p)}" for r, p in dist.points]
    if deadline is not None:
        lines.append(f"# meet_probability(D={_fmt(deadline)})={_fmt(meet_probability(dist, deadline))}")
    return "\n".join(lines) + "\n"


def cmd_validate(args, out):
    pdag = _read_instance(args.instance)
    report = validate(pdag)
    if args.format == "records":
        rows = [{"rule": v.rule, "message": v.message, "ids": list(v.ids)} for v in report.violations]
        out.write(export.dump_records({"kind": "validation", "ok": report.ok}, rows))
    else:
        out.write(str(report) + "\n")
    return EXIT_OK if report.ok else EXIT_INPUT


def cmd_analyze(args, out):
    pdag = _load(args.instance)
    m = args.cores
    lam = compute_lambda_star(pdag)
    probs = assign_probabilities(lam, pdag)
    dist = build_distribution(lam, probs, pdag, m)
    deadline = pdag.deadline if args.deadline is None else args.deadline
    if args.emit == "paths":
        entries = response_entries(lam, probs, pdag, m)
        if args.format == "records":
            out.write(export.paths_records(entries, probs, pdag))
            return EXIT_OK
        out.write(f"# m={m} delta={_fmt(lam.delta)} paths={len(entries)}\n")
        out.write("rank\tlength\tP\tI\tR\tclamped\tbranches\tnodes\n")
        for h, e in enumerate(entries):
            hs = ",".join(f"{s}/{k}" for s, k in sorted(e.path.branches)) or "-"
            out.write(
                f"{h + 1}\t{_fmt(e.path.length)}\t{_fmt(e.probability)}\t{_fmt(e.interference)}\t"
                f"{_fmt(e.response)}\t{'yes' if probs.clamped(h) else 'no'}\t{hs}\t{str(e.path)}\n"
            )
        return EXIT_OK
    if args.emit == "exceedance":
        if args.format == "records":
            out.write(export.exceedance_records(dist, m, pdag))
        else:
            out.write(f"# m={m} exceedance instance={export.instance_hash(pdag)}\n")
            out.write("".join(f"{_fmt(r)}\t{_fmt(e)}\n" for r, e in dist.exceedance_curve()))
        return EXIT_OK
    if args.format == "records":
        out.write(export.distribution_records(dist, m, pdag))
    else:
        out.write(_dist_text(dist, m, pdag, deadline))
    return EXIT_OK


def cmd_enumerate(args, out):
    pdag = _load(args.instance)
    dist = oracle.enum_distribution(pdag, args.cores, args.scenario_cap)
    if args.format == "records":
        out.write(export.distribution_records(dist, args.cores, pdag, kind="oracle"))
    else:
        out.write(_dist_text(dist, args.cores, pdag))
    return EXIT_OK


def cmd_compare(args, out, err):
    pdag = _load(args.instance)
    rep = compare(pdag, args.cores, args.scenario_cap)
    # wall-clock times go to diagnostics so stdout stays reproducible
    err.write(f"t_analysis={rep.t_analysis:.6f}s t_oracle={rep.t_oracle:.6f}s\n")
    if args.format == "records":
        header = {
            "kind": "compare", "m": args.cores, "instance": export.instance_hash(pdag), "noar": rep.noar,
            "dominated": rep.dominated, "violations": [list(v) for v in rep.violations],
        }
        out.write(export.dump_records(header, ([h + 1, d] for h, d in enumerate(rep.deviations))))
    else:
        out.write(f"noar {_fmt(rep.noar)}\n")
        out.write(f"cumulative probabilities dominate exact: {'yes' if rep.dominated else 'no'}\n")
        out.write(f"exceedance violations: {len(rep.violations)}\n")
        for h, d in enumerate(rep.deviations):
            out.write(f"deviation[{h + 1}]\t{_fmt(d)}\n")
    return EXIT_OK


def cmd_cores(args, out):
    pdag = _load(args.instance)
    levels = [args.acceptance] if args.acceptance is not None else list(ACCEPTANCE_LEVELS)
    rows = []
    for level in levels:
        rows.append((level, min_cores(pdag, level, args.method, args.deadline, args.scenario_cap)))
    if args.format == "records":
        header = {"kind": "cores", "method": args.method, "instance": export.instance_hash(pdag)}
        out.write(export.dump_records(header, ([a, m] for a, m in rows)))
    elif len(rows) == 1:
        out.write(f"{rows[0][1]}\n")
    else:
        out.write("".join(f"{_fmt(a)}\t{m}\n" for a, m in rows))
    return EXIT_OK


def _config(args, seed):
    return GeneratorConfig(
        structures=args.structures, max_width=args.p, psr=args.psr, branches=args.branches, seed=seed
    )


def cmd_generate(args, out):
    text = serialize_pdag(generate_pdag(_config(args, args.seed)))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_bench(args, out):
    configs = [
        GeneratorConfig(structures=k, max_width=args.p, psr=args.psr, branches=args.branches, seed=args.seed)
        for k in args.structures
    ]
    table = bench_sweep(configs, args.cores, args.instances, args.scenario_cap, args.jobs, args.with_cores)
    if args.format == "records":
        rows = []
        for cell in table:
            rows += [dict(r, kind="instance") for r in cell["rows"]]
            rows.append({k: v for k, v in cell.items() if k != "rows"} | {"kind": "cell"})
        out.write(export.dump_records({"kind": "bench", "seed": args.seed, "m": args.cores}, rows))
        return EXIT_OK
    cols = ["structures", "p", "psr", "m", "instances", "t_analysis_median", "t_oracle_median",
            "noar_mean", "noar_p90", "oracle_skipped"]
    out.write("\t".join(cols) + "\n")
    for cell in table:
        out.write("\t".join(_fmt(cell[c]) for c in cols) + "\n")
    return EXIT_OK


def _csv_ints(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "records"), default="text")
    common.add_argument("--scenario-cap", type=int, default=oracle.DEFAULT_SCENARIO_CAP,
                        help="refuse enumeration above this many scenarios (default 10^6)")

    parser = argparse.ArgumentParser(prog="pdagrta", description="Probabilistic response-time analysis of p-DAG tasks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check an instance file")
    p.add_argument("instance")

    p = sub.add_parser("analyze", parents=[common], help="longest-path analysis")
    p.add_argument("instance")
    p.add_argument("--cores", "-m", type=_positive_int, default=4)
    p.add_argument("--deadline", type=float, default=None)
    p.add_argument("--emit", choices=("dist", "exceedance", "paths"), default="dist")

    p = sub.add_parser("enumerate", parents=[common], help="exact distribution by scenario enumeration")
    p.add_argument("instance")
    p.add_argument("--cores", "-m", type=_positive_int, default=4)

    p = sub.add_parser("compare", parents=[common], help="analysis versus enumeration")
    p.add_argument("instance")
    p.add_argument("--cores", "-m", type=_positive_int, default=4)

    p = sub.add_parser("cores", parents=[common], help="minimum core count for an acceptance ratio")
    p.add_argument("instance")
    p.add_argument("--acceptance", type=float, default=None, help="default: 0.7, 0.8, 0.9 and 1.0")
    p.add_argument("--method", choices=("analysis", "enumeration", "graham"), default="analysis")
    p.add_argument("--deadline", type=float, default=None)

    gen_opts = argparse.ArgumentParser(add_help=False)
    gen_opts.add_argument("--seed", type=int, required=True)
    gen_opts.add_argument("--p", type=int, default=6, help="max nodes per layer")
    gen_opts.add_argument("--psr", type=float, default=0.4)
    gen_opts.add_argument("--branches", type=int, default=3)

    p = sub.add_parser("generate", parents=[common, gen_opts], help="write a random instance")
    p.add_argument("--structures", type=int, default=3)
    p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("bench", parents=[common, gen_opts], help="sweep generated instances")
    p.add_argument("--structures", type=_csv_ints, default=[3], help="comma-separated structure counts")
    p.add_argument("--cores", "-m", type=_positive_int, default=4)
    p.add_argument("--instances", type=_positive_int, default=10)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--with-cores", action="store_true", help="also record min cores per acceptance level")
    return parser


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    handlers = {
        "validate": cmd_validate, "analyze": cmd_analyze, "enumerate": cmd_enumerate,
        "cores": cmd_cores, "generate": cmd_generate, "bench": cmd_bench,
    }
    try:
        if args.command == "compare":
            return cmd_compare(args, out, err)
        return handlers[args.command](args, out)
    except InvalidPDagError as exc:
        err.write(f"{exc.report}\n")
        return EXIT_INPUT
    except (PDagFormatError, InputError, InfeasibleConfigError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except oracle.ScenarioCapExceeded as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CAP
    except InfeasibleError as exc:
        err.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
