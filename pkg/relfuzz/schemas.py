"""JSON documents written and read by relfuzz.

Mirrors the request/response models of an API layer: every file or stdout
document has a pydantic model here, and ``model_dump_json`` is the only
serializer.
"""

from typing import Any, Dict, List, Literal

from pydantic import BaseModel, Field

from relfuzz.models import (
    AnalysisReport, CampaignStats, CorpusEntry, Endianness, RelationField,
)
from relfuzz.services.relations import classify_form


class RelationFieldSchema(BaseModel):
    """Relation field as {"a","b","p","s","e"}."""
    a: int = Field(..., ge=0, description="Span start (inclusive)")
    b: int = Field(..., ge=1, description="Span end (exclusive)")
    p: int = Field(..., ge=0, description="Field start")
    s: Literal[8, 4, 2, 1] = Field(..., description="Field width in bytes")
    e: Endianness = Field(..., description="Byte order")

    @classmethod
    def from_relation(cls, r: RelationField) -> "RelationFieldSchema":
        return cls(a=r.a, b=r.b, p=r.p, s=r.s, e=r.e)

    def to_relation(self) -> RelationField:
        return RelationField(a=self.a, b=self.b, p=self.p, s=self.s, e=self.e)


class AnalysisReportSchema(BaseModel):
    """Output of one analysis run."""
    relations: List[RelationFieldSchema]
    forms: List[str] = Field(default_factory=list, description="Form of each relation")
    rounds: List[int] = Field(default_factory=list, description="Round each relation was found in")
    restored: List[int] = Field(default_factory=list, description="Lost features each relation restored")
    invocations: int
    elapsed_ms: int
    rejected: int
    rounds_run: int = 0
    skipped: bool = False
    config: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_report(cls, report: AnalysisReport, input_len: int, config: Dict[str, Any]) -> "AnalysisReportSchema":
        return cls(
            relations=[RelationFieldSchema.from_relation(f.relation) for f in report.findings],
            forms=[classify_form(f.relation, input_len).value for f in report.findings],
            rounds=[f.round for f in report.findings],
            restored=[f.restored for f in report.findings],
            invocations=report.invocations,
            elapsed_ms=report.elapsed_ms,
            rejected=report.rejected,
            rounds_run=report.rounds,
            skipped=report.skipped,
            config=config,
        )


class SidecarSchema(BaseModel):
    """<id>.relations.json next to each corpus entry."""
    id: int
    analyzed: bool
    relations: List[RelationFieldSchema]
    discovery_time: int
    coverage: List[int]

    @classmethod
    def from_entry(cls, entry: CorpusEntry) -> "SidecarSchema":
        return cls(
            id=entry.id,
            analyzed=entry.analyzed,
            relations=[RelationFieldSchema.from_relation(r) for r in entry.relations],
            discovery_time=entry.discovery_time,
            coverage=sorted(entry.coverage),
        )


class EntryAnalysisSchema(BaseModel):
    id: int
    invocations: int
    relations: int
    rejected: int


class StatsSchema(BaseModel):
    """stats.json snapshot of a campaign."""
    config: Dict[str, Any]
    executions: int
    corpus_size: int
    features: int
    analysis_invocations: int
    fixup_mutants: int
    target_errors: int
    frameshift_enabled: bool
    analyses: List[EntryAnalysisSchema]

    @classmethod
    def from_stats(cls, stats: CampaignStats, config: Dict[str, Any]) -> "StatsSchema":
        return cls(
            config=config,
            executions=stats.executions,
            corpus_size=stats.corpus_size,
            features=stats.features,
            analysis_invocations=stats.analysis_invocations,
            fixup_mutants=stats.fixup_mutants,
            target_errors=stats.target_errors,
            frameshift_enabled=stats.frameshift_enabled,
            analyses=[EntryAnalysisSchema(**vars(a)) for a in stats.analyses],
        )


class CheckpointRow(BaseModel):
    checkpoint: str
    covered: int = Field(..., description="Corpus entries covering the checkpoint")
    newly_sized: int = Field(..., description="Of those, entries whose governing fields differ from the seed")


class CorpusReportSchema(BaseModel):
    """Summary produced by the report command."""
    target: str
    entries: int
    checkpoints: List[CheckpointRow]
    config: Dict[str, Any] = Field(default_factory=dict)
