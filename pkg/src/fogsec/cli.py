"""``fogsec`` command line: bench, scenario and report."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import costmodel
from .bench import SUITES, BenchConfig, BenchConfigError, parse_range, run_bench
from .costmodel.measure import measure_all
from .fogsim import SimulationError, UnknownScenarioError, builtin_names, load_scenario, run_scenario
from .pairing import setup_pairing

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FOGSEC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"FOGSEC_SEED must be an integer, got {env!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _rows_csv(rows: list) -> str:
    cols = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_bench(args) -> int:
    try:
        cfg = BenchConfig(
            suite=args.suite,
            n_values=parse_range(args.n) if args.n else list(range(1, 11)),
            msg_size=100 if args.msg_size is None else args.msg_size,
            attrs=parse_range(args.attrs) if args.attrs else [2],
            repeat=args.repeat,
            backend=args.backend,
            seed=_seed(args),
        )
        cfg.validate()
    except BenchConfigError as exc:
        raise UsageError(str(exc)) from None
    rows = [r.as_dict() for r in run_bench(cfg)]
    if args.format == "json":
        _emit(json.dumps({"config": vars(cfg), "rows": rows}, indent=2), args.out)
    else:
        _emit(_rows_csv(rows), args.out)
    return EXIT_OK


def cmd_scenario(args) -> int:
    if args.list:
        _emit("\n".join(builtin_names()), None)
        return EXIT_OK
    if not args.name:
        raise UsageError("a scenario name is required")
    try:
        sc = load_scenario(args.name)
    except UnknownScenarioError as exc:
        raise UsageError(str(exc)) from None
    overrides = {}
    if sc.protocol == "aggregation":
        if args.n is not None:
            n = parse_range(args.n)
            if len(n) != 1 or n[0] < 1:
                raise UsageError("scenario --n takes a single positive packet count")
            overrides["n"] = n[0]
        if args.msg_size is not None:
            overrides["msg_size"] = args.msg_size
    seed = _seed(args) if (args.seed is not None or "FOGSEC_SEED" in os.environ) else None
    sc = sc.with_overrides(seed=seed, backend=args.backend, **overrides)
    try:
        result = run_scenario(sc)
    except SimulationError as exc:
        print(f"scenario {sc.name} failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sim = result.sim
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "transcript.jsonl").write_text(sim.transcript_jsonl())
        (out / "ledger.csv").write_text(sim.ledger.to_csv())
        (out / "counters.json").write_text(json.dumps(result.counters, indent=2, sort_keys=True) + "\n")
    print(f"scenario {sc.name} ({sc.backend}, seed {sc.seed}): ok")
    for (src, dst), entries in sim.ledger.links.items():
        print(f"  {src:>4} -> {dst:<4} {sum(sz for _, sz in entries):>6} bytes in {len(entries)} message(s)")
    return EXIT_OK


def cmd_report(args) -> int:
    tables = tuple(t.strip().upper() for t in args.tables.split(","))
    bad = [t for t in tables if t not in ("II", "III", "IV", "V")]
    if bad:
        raise UsageError(f"unknown table(s) {bad}")
    n = parse_range(args.n)[0] if args.n else 7
    x = parse_range(args.attrs)[0] if args.attrs else 2
    P = setup_pairing(args.backend)
    report = costmodel.compare(measure_all(P, n=n, msg_size=100 if args.msg_size is None else args.msg_size, x=x, tables=tables, seed=_seed(args)))
    _emit(report.to_json() if args.format == "json" else report.to_text(), args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=("curve", "mock"), default=None)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (falls back to $FOGSEC_SEED)")
    common.add_argument("--out", default=None)
    common.add_argument("--n", default=None, help="packet count or range such as 1..10")
    common.add_argument("--msg-size", type=int, default=None, help="packet size in bytes (default 100)")
    common.add_argument("--attrs", default=None, help="attribute count or range")

    p = argparse.ArgumentParser(prog="fogsec", description="Fog-layer IIoT security primitives and simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", parents=[common], help="time a primitive suite")
    b.add_argument("--suite", choices=SUITES, required=True)
    b.add_argument("--repeat", type=int, default=10)
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("scenario", parents=[common], help="run a named simulation scenario")
    s.add_argument("name", nargs="?")
    s.add_argument("--list", action="store_true", help="list packaged scenarios")
    s.set_defaults(func=cmd_scenario)

    r = sub.add_parser("report", parents=[common], help="compare measured costs with the formula tables")
    r.add_argument("--tables", default="II,III,IV,V")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("bench", "report") and args.backend is None:
        args.backend = "curve" if args.command == "bench" else "mock"
    try:
        return args.func(args)
    except (UsageError, BenchConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"fogsec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"fogsec: assertion failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
