"""fuzz: run a coverage-guided campaign."""

import argparse
from pathlib import Path

from relfuzz.commands import add_analysis_flags, analysis_config_from_args, emit_json
from relfuzz.config import resolve_campaign_config
from relfuzz.schemas import StatsSchema
from relfuzz.seeds import export_default_seeds
from relfuzz.services.fuzzer import SEEDS_DIR, run_campaign
from relfuzz.targets import get_target


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "fuzz",
        help="Run a fuzzing campaign",
        allow_abbrev=False,
    )
    parser.add_argument("--target", required=True, help="Target name or package.module:factory")
    parser.add_argument("--out", required=True, type=Path, help="Campaign output directory")
    parser.add_argument("--seeds", type=Path, help="Seed directory (default: the target's shipped seed)")
    parser.add_argument("--execs", type=int, help="Execution budget")
    parser.add_argument("--seconds", type=float, help="Wall-clock budget")
    parser.add_argument("--rng-seed", type=int, help="Random seed")
    parser.add_argument("--no-frameshift", action="store_true", help="Disable relation analysis and fixups")
    parser.add_argument("--trials-per-entry", type=int, help="Havoc trials per scheduled entry")
    parser.add_argument("--havoc-min-depth", type=int, help="Fewest stacked operators per mutant")
    parser.add_argument("--havoc-max-depth", type=int, help="Most stacked operators per mutant")
    parser.add_argument("--max-input-len", type=int, help="Mutants never grow past this length")
    parser.add_argument("--stats-interval", type=float, help="Seconds between stats.json snapshots")
    parser.add_argument("--json", action="store_true", help="Print final stats to stdout")
    add_analysis_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    analysis = analysis_config_from_args(args)
    seed_dir = args.seeds if args.seeds is not None else args.out / SEEDS_DIR
    cfg = resolve_campaign_config(
        analysis,
        target=args.target,
        out_dir=args.out,
        seed_dir=seed_dir,
        rng_seed=args.rng_seed,
        max_execs=args.execs,
        max_seconds=args.seconds,
        frameshift_enabled=not args.no_frameshift,
        trials_per_entry=args.trials_per_entry,
        havoc_min_depth=args.havoc_min_depth,
        havoc_max_depth=args.havoc_max_depth,
        max_input_len=args.max_input_len,
        stats_interval=args.stats_interval,
    )
    executor = get_target(args.target)
    if args.seeds is None:
        export_default_seeds(executor, seed_dir)

    stats = run_campaign(executor, cfg)
    if args.json:
        emit_json(StatsSchema.from_stats(stats, cfg.model_dump(mode="json")), None, True)
    return 0
