"""report: newly-sized summary of a campaign corpus."""

import argparse
from pathlib import Path
from typing import Any, Dict

from pydantic import ValidationError

from relfuzz.commands import emit_json
from relfuzz.errors import CorpusIOError, UnknownTargetError
from relfuzz.schemas import StatsSchema
from relfuzz.services.fuzzer import CORPUS_DIR, STATS_FILE, load_corpus
from relfuzz.services.reporting import build_corpus_report, render_report_table
from relfuzz.targets import ToyTarget, get_target


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "report",
        help="Summarize a campaign corpus per validation checkpoint",
        allow_abbrev=False,
    )
    parser.add_argument("corpus_dir", type=Path, help="Campaign output directory or its corpus/ subdirectory")
    parser.add_argument("--target", help="Target name (default: read from stats.json)")
    parser.add_argument("--out", type=Path, help="Write the JSON report to this file")
    parser.add_argument("--json", action="store_true", help="Print JSON instead of the table")
    parser.set_defaults(handler=run)


def _campaign_config(stats_path: Path) -> Dict[str, Any]:
    if not stats_path.is_file():
        return {}
    try:
        return StatsSchema.model_validate_json(stats_path.read_text()).config
    except OSError as e:
        raise CorpusIOError(f"cannot read {stats_path}: {e}")
    except ValidationError as e:
        raise CorpusIOError(f"malformed {stats_path}: {e}")


def run(args: argparse.Namespace) -> int:
    root = args.corpus_dir
    if not root.is_dir():
        raise CorpusIOError(f"corpus directory {root} does not exist")
    if (root / CORPUS_DIR).is_dir():
        corpus_dir, stats_path = root / CORPUS_DIR, root / STATS_FILE
    else:
        corpus_dir, stats_path = root, root.parent / STATS_FILE

    campaign = _campaign_config(stats_path)
    target_name = args.target or campaign.get("target")
    if not target_name:
        raise UnknownTargetError("no --target given and no stats.json to read it from")
    target = get_target(target_name)
    if not isinstance(target, ToyTarget):
        raise UnknownTargetError(f"{target_name} declares no validation checkpoints")

    entries = load_corpus(corpus_dir)
    config = {"corpus_dir": str(corpus_dir), "target": target_name, "campaign": campaign}
    report = build_corpus_report(target, entries, config)
    emit_json(report, args.out, args.json)
    if not args.json:
        print(render_report_table(report), end="")
    return 0
