"""Command line: ``robustmpc run|sweep|analyze``."""
from __future__ import annotations

import argparse
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .adversary import BEHAVIORS, Strategy, library
from .orchestrator import RunReport, Scenario, oracle_result, run
from .scenario import ScenarioError, load_scenario
from .structures import (AdversaryStructure, ConflictGraph, ConflictStructure,
                         InstanceTooLarge, identify_cheaters, is_consistent, updated_structure)

EXIT_USAGE = 1
EXIT_TOO_LARGE = 4


def _set(s) -> str:
    return "{" + ",".join(map(str, sorted(s))) + "}"


def run_dirname(strategy: Strategy, seed: int) -> str:
    name = re.sub(r"[^A-Za-z0-9=]+", "_", strategy.name.replace("*", "any")).strip("_")
    return f"{name}_{seed}"


def write_artifacts(out: Path, report: RunReport, strategy: Strategy, seed: int) -> Path:
    d = out / run_dirname(strategy, seed)
    d.mkdir(parents=True, exist_ok=True)
    net = report.session.net if report.session is not None else None
    (d / "transcript.txt").write_text(net.dump_transcript() if net else "")
    (d / "ledger.txt").write_text(net.ledger.dumps() if net else "")
    (d / "report.txt").write_text(report.dumps())
    return d


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    seed = sc.seeds[0] if args.seed is None else args.seed
    report = run(sc, seed)
    sys.stdout.write(report.dumps())
    net = report.session.net if report.session is not None else None
    if args.transcript and net:
        Path(args.transcript).write_text(net.dump_transcript())
    if args.ledger and net:
        Path(args.ledger).write_text(net.ledger.dumps())
    if args.out:
        write_artifacts(Path(args.out), report, sc.strategy, seed)
    if args.oracle_check and report.status == "completed":
        want = oracle_result(sc, report)
        if want != report.result:
            print(f"oracle mismatch: expected {want}", file=sys.stderr)
            return EXIT_USAGE
    return report.exit_code


def check_row(sc: Scenario, strategy: Strategy, report: RunReport) -> tuple:
    """(oracle agrees, robustness invariants hold) for one sweep run."""
    oracle = report.status == "completed" and report.result == oracle_result(sc, report)
    in_model = strategy.collusion in sc.structure
    ok = report.cheaters <= strategy.collusion
    if in_model:
        ok = ok and oracle and len(report.restarts) <= len(strategy.collusion)
    return oracle, ok


def _sweep_one(job):
    sc, strategy, seed = job
    report = run(sc.with_strategy(strategy), seed)
    oracle, ok = check_row(sc, strategy, report)
    return strategy, seed, report, oracle, ok


def sweep_strategies(sc: Scenario, which: str) -> list:
    collusion = sc.strategy.collusion or sc.structure.maximal_sets[-1]
    if which == "all":
        return library(collusion)
    out = []
    for name in which.split(","):
        name = name.strip()
        if name not in BEHAVIORS:
            raise ScenarioError(f"unknown behavior {name!r}")
        out += [s for s in library(collusion) if s.behavior == name]
    return out


def cmd_sweep(args) -> int:
    sc = load_scenario(args.scenario)
    strategies = sweep_strategies(sc, args.strategies)
    seeds = list(range(args.seeds)) if args.seeds is not None else list(sc.seeds)
    jobs = [(sc, st, seed) for st in strategies for seed in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    header = ["strategy", "seed", "status", "restarts", "cheaters", "secure", "robust"]
    if args.oracle_check:
        header.append("result==oracle")
    header.append("pass")
    print("\t".join(header))
    failures = 0
    for strategy, seed, report, oracle, ok in rows:
        secure = " ".join(_set(t) for t in report.secure.maximal_sets) if report.secure else "-"
        robust = " ".join(_set(t) for t in report.robust.maximal_sets) if report.robust else "-"
        row = [strategy.name, str(seed), report.status, str(len(report.restarts)),
               _set(report.cheaters), secure, robust]
        if args.oracle_check:
            row.append(str(oracle).lower())
        row.append("pass" if ok else "FAIL")
        failures += not ok
        print("\t".join(row))
        if args.out:
            write_artifacts(Path(args.out), report, strategy, seed)
    print(f"# {len(rows) - failures}/{len(rows)} runs pass")
    return 0 if failures == 0 else EXIT_USAGE


def cmd_analyze(args) -> int:
    graph = ConflictGraph.parse(Path(args.conflicts).read_text())
    structure = AdversaryStructure.parse(Path(args.structure).read_text())
    if graph.n != structure.n:
        raise ScenarioError("conflict graph and structure have different player counts")
    cs = ConflictStructure(graph, structure)
    consistent = is_consistent(cs)
    print(f"consistent {str(consistent).lower()}")
    if not consistent:
        print("cheaters -")
        print("updated -")
        return 0
    print(f"cheaters {_set(identify_cheaters(cs))}")
    print("updated " + " ".join(_set(t) for t in updated_structure(cs)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robustmpc", description="Run multiparty computation scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario and print its report")
    r.add_argument("scenario")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="directory for transcript, ledger and report")
    r.add_argument("--oracle-check", action="store_true", help="compare with plaintext evaluation")
    r.add_argument("--transcript", help="write the message transcript here")
    r.add_argument("--ledger", help="write the information-flow ledger here")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run the strategy library over several seeds")
    s.add_argument("scenario")
    s.add_argument("--strategies", default="all", help="'all' or comma-separated behavior names")
    s.add_argument("--seeds", type=int, help="use seeds 0..k-1 instead of the scenario's")
    s.add_argument("--oracle-check", action="store_true")
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("analyze", help="identify cheaters from a conflict graph")
    a.add_argument("conflicts")
    a.add_argument("structure")
    a.set_defaults(func=cmd_analyze)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
