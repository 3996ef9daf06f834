"""
relfuzz - command-line entry point.

Subcommands:
    analyze   infer relation fields of one input
    fuzz      run a coverage-guided campaign
    report    summarize a campaign corpus
"""

import argparse
import logging
import sys
from typing import List, Optional

import structlog
from pydantic import ValidationError

from relfuzz import __version__
from relfuzz.commands import analyze, fuzz, report
from relfuzz.config import settings
from relfuzz.errors import RelFuzzError

EXIT_OK = 0
EXIT_USAGE = 2

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

logger = structlog.get_logger()


def configure_logging(level: str = "INFO", json: bool = False) -> None:
    """Route structlog to stderr; stdout is reserved for reports."""
    numeric = getattr(logging, level.upper(), None)
    if not isinstance(numeric, int):
        numeric = logging.INFO
    renderer = structlog.processors.JSONRenderer() if json else structlog.dev.ConsoleRenderer(colors=False)
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relfuzz",
        description="Coverage-guided fuzzing with relation field inference",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", choices=LOG_LEVELS, help="Log threshold (default: LOG_LEVEL setting)")
    parser.add_argument("--log-json", action="store_true", help="Emit JSON log lines")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (analyze, fuzz, report):
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.log_level or settings.LOG_LEVEL, args.log_json or settings.LOG_JSON)
    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error("invalid configuration", command=args.command, error=str(e))
    except RelFuzzError as e:
        logger.error("command failed", command=args.command, code=e.code, error=e.message)
    except OSError as e:
        logger.error("i/o failure", command=args.command, error=str(e))
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
