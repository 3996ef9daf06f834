"""CLI subcommands and the flags they share."""

import argparse
import sys
from pathlib import Path
from typing import Optional

from pydantic import BaseModel

from relfuzz.config import AnalysisConfig, resolve_analysis_config
from relfuzz.errors import CorpusIOError


def add_analysis_flags(parser: argparse.ArgumentParser) -> None:
    """Flags overriding every AnalysisConfig field."""
    group = parser.add_argument_group("relation analysis")
    group.add_argument("--t-loss", type=float, help="Coverage fraction a probe must destroy")
    group.add_argument("--t-restore", type=float, help="Lost-coverage fraction an insertion must recover")
    group.add_argument("--max-invocations", type=int, help="Target executions per analysis")
    group.add_argument("--analysis-max-input-len", type=int, help="Longer inputs are not analyzed")
    group.add_argument("--max-rounds", type=int, help="Analysis round cap")
    group.add_argument("--filler", type=int, help="Byte value inserted by restoring mutants")


def analysis_config_from_args(args: argparse.Namespace) -> AnalysisConfig:
    return resolve_analysis_config(
        t_loss=args.t_loss,
        t_restore=args.t_restore,
        max_invocations=args.max_invocations,
        max_input_len=args.analysis_max_input_len,
        max_rounds=args.max_rounds,
        filler=args.filler,
    )


def emit_json(document: BaseModel, out: Optional[Path], to_stdout: bool) -> None:
    """
    Write a JSON document to a file and/or stdout.

    Raises:
        CorpusIOError: If the output file cannot be written
    """
    text = document.model_dump_json(indent=2) + "\n"
    if out is not None:
        try:
            Path(out).write_text(text)
        except OSError as e:
            raise CorpusIOError(f"cannot write {out}: {e}")
    if to_stdout:
        sys.stdout.write(text)
