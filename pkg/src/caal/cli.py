"""Command-line interface: run a single cell, bench a grid from a config
file, verify two models for equivalence, or generate a random target."""

from __future__ import annotations

import argparse
import sys

from .harness import (
    ConfigurationError,
    ExperimentConfig,
    load_config,
    load_target,
    records_to_csv,
    run_experiment,
    run_grid,
    write_csv,
)
from .mealy import DotParseError, decode_word, equivalent, random_mealy, write_dot


def _add_cell_flags(p: argparse.ArgumentParser):
    p.add_argument("--target", required=True, help="target machine (DOT file)")
    p.add_argument("--framework", default="ceal", choices=("mat", "ceal"))
    p.add_argument("--learner", default="lstar_rs", choices=("lstar_rs", "kv"))
    p.add_argument("--update", default="most_recent", choices=("most_recent", "most_frequent"))
    p.add_argument("--selection", default="most_frequent", choices=("most_recent", "most_frequent"))
    p.add_argument("--min-repeats", type=int, default=1)
    p.add_argument("--max-repeats", type=int, default=1)
    p.add_argument("--agreement", type=float, default=0.8)
    p.add_argument("--noise-kind", default="none", choices=("none", "input", "output"))
    p.add_argument("--noise-level", type=float, default=0.0)
    p.add_argument("--expected-infix-len", type=float, default=3.0)
    p.add_argument("--extra-states", type=int, default=2)
    p.add_argument("--survive-budget", type=int, default=2000)
    p.add_argument("--symbol-budget", type=int, default=10_000_000)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutate-at", type=int, default=None)
    p.add_argument("--mutate-seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="caal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a single experiment cell")
    _add_cell_flags(run_p)
    run_p.add_argument("--out", help="CSV output path (default: stdout)")
    run_p.add_argument("--workers", type=int, default=None)
    run_p.add_argument("--events", help="NDJSON event log path (requires --runs 1)")

    bench_p = sub.add_parser("bench", help="execute a grid from a config file")
    bench_p.add_argument("config", help="experiment grid (key=value sections)")
    bench_p.add_argument("--out", default="results.csv", help="CSV output path")
    bench_p.add_argument("--workers", type=int, default=None)

    verify_p = sub.add_parser("verify", help="check two DOT machines for equivalence")
    verify_p.add_argument("model")
    verify_p.add_argument("target")

    gen_p = sub.add_parser("gen", help="emit a random minimal target as DOT")
    gen_p.add_argument("--states", type=int, required=True)
    gen_p.add_argument("--inputs", type=int, required=True)
    gen_p.add_argument("--outputs", type=int, required=True)
    gen_p.add_argument("--seed", type=int, required=True)
    return parser


def _symbols(count, prefix):
    if count < 1:
        raise ConfigurationError(f"need at least one {prefix!r} symbol")
    return tuple(f"{prefix}{i}" for i in range(count))


def _cmd_run(args) -> int:
    cfg = ExperimentConfig(
        experiment_id="cli",
        target=args.target,
        framework=args.framework,
        learner=args.learner,
        update=args.update,
        selection=args.selection,
        min_repeats=args.min_repeats,
        max_repeats=args.max_repeats,
        agreement=args.agreement,
        noise_kind=args.noise_kind,
        noise_level=args.noise_level,
        expected_infix_len=args.expected_infix_len,
        extra_states=args.extra_states,
        survive_budget=args.survive_budget,
        symbol_budget=args.symbol_budget,
        runs=args.runs,
        base_seed=args.seed,
        mutate_at=args.mutate_at,
        mutate_seed=args.mutate_seed,
    )
    if args.events:
        if cfg.runs != 1:
            raise ConfigurationError("--events needs --runs 1 (one log per run)")
        from .harness import load_target, run_single
        from .reviser import EventLog

        events = EventLog()
        records = [run_single(cfg.validate(), 0, load_target(cfg.target), events=events)]
        events.write(args.events)
    else:
        records = run_experiment(cfg, workers=args.workers)
    if args.out:
        write_csv(records, args.out)
    else:
        sys.stdout.write(records_to_csv(records))
    wins = sum(r.success for r in records)
    print(f"# {wins}/{len(records)} successful runs", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    cells = load_config(args.config)
    records = run_grid(cells, workers=args.workers)
    write_csv(records, args.out)
    wins = sum(r.success for r in records)
    print(f"{len(cells)} cells, {len(records)} runs, {wins} successful -> {args.out}",
          file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    model = load_target(args.model)
    target = load_target(args.target)
    witness = equivalent(model, target)
    if witness is None:
        print("equivalent")
        return 0
    word = " ".join(decode_word(model.inputs, witness.inputs))
    print(f"differ on input: {word}")
    return 1


def _cmd_gen(args) -> int:
    machine = random_mealy(args.states, _symbols(args.inputs, "i"),
                           _symbols(args.outputs, "o"), args.seed)
    sys.stdout.write(write_dot(machine))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "gen":
            return _cmd_gen(args)
    except (ConfigurationError, DotParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
