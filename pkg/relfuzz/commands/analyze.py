"""analyze: infer the relation fields of one input."""

import argparse
from pathlib import Path

import structlog

from relfuzz.commands import add_analysis_flags, analysis_config_from_args, emit_json
from relfuzz.errors import CorpusIOError
from relfuzz.schemas import AnalysisReportSchema
from relfuzz.services.inference import analyze
from relfuzz.services.reporting import render_hexdump
from relfuzz.targets import get_target

logger = structlog.get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "analyze",
        help="Infer relation fields of a single input",
        allow_abbrev=False,
    )
    parser.add_argument("--target", required=True, help="Target name or package.module:factory")
    parser.add_argument("--seed", required=True, type=Path, help="Input file to analyze")
    parser.add_argument("--out", type=Path, help="Write the JSON report to this file")
    parser.add_argument("--json", action="store_true", help="Print the JSON report to stdout")
    parser.add_argument("--hexdump", action="store_true", help="Print an annotated hexdump")
    add_analysis_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """
    Analyze one input and emit the report.

    The JSON report goes to --out when given and to stdout with --json, or
    when neither --out nor --hexdump asks for something else.
    """
    cfg = analysis_config_from_args(args)
    executor = get_target(args.target)
    try:
        data = args.seed.read_bytes()
    except OSError as e:
        raise CorpusIOError(f"cannot read seed {args.seed}: {e}")

    logger.info("analysis started", target=args.target, seed=str(args.seed), length=len(data))
    report = analyze(data, executor, cfg)

    config = {"target": args.target, "seed": str(args.seed), **cfg.model_dump(mode="json")}
    document = AnalysisReportSchema.from_report(report, len(data), config)
    to_stdout = args.json or (args.out is None and not args.hexdump)
    emit_json(document, args.out, to_stdout)
    if args.hexdump:
        print(render_hexdump(data, report.relations), end="")
    return 0
