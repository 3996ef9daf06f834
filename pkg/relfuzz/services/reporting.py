"""Corpus reports and annotated hexdumps."""

from typing import Any, Dict, Iterable, List, Mapping, Sequence

from relfuzz.models import CorpusEntry, RelationField
from relfuzz.schemas import CheckpointRow, CorpusReportSchema
from relfuzz.services.relations import classify_form
from relfuzz.targets.base import ToyTarget

ROW_BYTES = 16
OFFSET_WIDTH = 8
FIELD_MARK = "^^"
SPAN_MARK = "~~"


# =====================================================================
# NEWLY SIZED REPORT
# =====================================================================

def is_newly_sized(values: Mapping[str, int], seed_values: Mapping[str, int], governing: Iterable[str]) -> bool:
    """True if any governing field the parser read differs from the seed's value."""
    return any(name in values and values[name] != seed_values.get(name) for name in governing)


def build_corpus_report(
    target: ToyTarget,
    entries: Sequence[CorpusEntry],
    config: Dict[str, Any],
) -> CorpusReportSchema:
    """
    Count corpus entries per pass checkpoint, and how many of them are newly sized.

    Args:
        target: Toy target the corpus was produced for
        entries: Corpus entries with recorded coverage
        config: Campaign configuration to embed

    Returns:
        CorpusReportSchema with one row per pass checkpoint
    """
    seed_values = target.field_values(target.seed())
    rows: List[CheckpointRow] = []
    for checkpoint in target.PASS_CHECKPOINTS:
        feature = target.block_map[checkpoint]
        governing = target.GOVERNING.get(checkpoint, ())
        covering = [e for e in entries if feature in e.coverage]
        newly = sum(1 for e in covering if is_newly_sized(target.field_values(e.data), seed_values, governing))
        rows.append(CheckpointRow(checkpoint=checkpoint, covered=len(covering), newly_sized=newly))
    return CorpusReportSchema(target=target.name, entries=len(entries), checkpoints=rows, config=config)


def render_report_table(report: CorpusReportSchema) -> str:
    width = max([len("checkpoint")] + [len(r.checkpoint) for r in report.checkpoints])
    lines = [
        f"target: {report.target}   entries: {report.entries}",
        f"{'checkpoint':<{width}}  {'covered':>8}  {'newly_sized':>11}",
    ]
    for row in report.checkpoints:
        lines.append(f"{row.checkpoint:<{width}}  {row.covered:>8}  {row.newly_sized:>11}")
    return "\n".join(lines) + "\n"


# =====================================================================
# HEXDUMP
# =====================================================================

def _lane(row_start: int, row_len: int, r: RelationField) -> List[str]:
    cells = []
    for i in range(row_start, row_start + row_len):
        if r.p <= i < r.p + r.s:
            cells.append(FIELD_MARK)
        elif r.a <= i < r.b:
            cells.append(SPAN_MARK)
        else:
            cells.append("  ")
    return cells


def render_hexdump(data: bytes, relations: Sequence[RelationField]) -> str:
    """
    Render data 16 bytes per row with one annotation lane per relation.

    Field bytes are marked ``^^`` and span bytes ``~~`` under the row they
    fall in; lanes are only drawn for relations touching the row.
    """
    hex_width = ROW_BYTES * 3 - 1
    labels = [
        f"R{k} {r.label()} {classify_form(r, len(data)).value}"
        for k, r in enumerate(relations)
    ]
    lines = []
    for row_start in range(0, max(len(data), 1), ROW_BYTES):
        chunk = data[row_start:row_start + ROW_BYTES]
        hex_part = " ".join(f"{b:02x}" for b in chunk)
        text = "".join(chr(b) if 0x20 <= b < 0x7F else "." for b in chunk)
        lines.append(f"{row_start:0{OFFSET_WIDTH}x}  {hex_part:<{hex_width}}  |{text}|".rstrip())
        row_end = row_start + len(chunk)
        for k, r in enumerate(relations):
            touches = (r.p < row_end and row_start < r.p + r.s) or (r.a < row_end and row_start < r.b)
            if not touches:
                continue
            lane = " ".join(_lane(row_start, len(chunk), r))
            lines.append(f"{'':{OFFSET_WIDTH}}  {lane:<{hex_width}}  {labels[k]}")
    return "\n".join(lines) + "\n"
