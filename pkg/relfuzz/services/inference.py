"""Relation field discovery through double-mutant experiments.

For every integer that could be a length, a probe mutant bumps its value
and checks that coverage is lost. A second mutant then inserts as many
filler bytes as the probe added at a small set of anchor positions; if one
of them brings the lost coverage back, the field is accepted as a relation
over the span the insertion grew. Analysis repeats in rounds so that
relations nested inside already-known ones can be found with the outer
fields kept consistent.
"""

import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence

import structlog

from relfuzz.config import AnalysisConfig
from relfuzz.errors import BudgetExceededError, NoBaselineCoverageError, TargetError
from relfuzz.models import (
    FIELD_WIDTHS, AnalysisReport, CandidateField, CoverageSet, Endianness,
    MutationOp, RelationField, RelationFinding, StructuredInput,
)
from relfuzz.services.coverage import is_destructive, is_restorative, restored_amount
from relfuzz.services.mutation import apply, commit
from relfuzz.services.relations import classify_form, read_field, write_field
from relfuzz.targets.base import Executor, GuardedExecutor

logger = structlog.get_logger(__name__)

WIDE_DELTA = 0xFF
BYTE_DELTA_CAP = 0x20


class BudgetedExecutor:
    """Counts target invocations and refuses to run past the limit."""

    def __init__(self, inner: Executor, limit: int):
        self.inner = GuardedExecutor(inner)
        self.limit = limit
        self.calls = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.calls

    def execute(self, data: bytes) -> CoverageSet:
        if self.calls >= self.limit:
            raise BudgetExceededError(f"analysis budget of {self.limit} invocations spent")
        self.calls += 1
        return self.inner.execute(data)


@dataclass(frozen=True)
class InsertionResult:
    relation: RelationField
    restored: int


# =====================================================================
# CANDIDATES AND PROBES
# =====================================================================

def probe_delta(s: int, v: int) -> int:
    """Increment used by the destructive probe."""
    if s > 1:
        return WIDE_DELTA
    return min(BYTE_DELTA_CAP, 0xFF - v)


def scan_candidates(data: bytes, cfg: AnalysisConfig) -> List[CandidateField]:
    """
    List every field position whose value could be a span length.

    Widths are scanned from wide to narrow, positions ascending, big endian
    before little. Single bytes are scanned big endian only.

    Args:
        data: Input bytes
        cfg: Analysis configuration

    Returns:
        Candidates with 1 <= v <= len(data) whose probe value still fits
    """
    n = len(data)
    candidates: List[CandidateField] = []
    for s in FIELD_WIDTHS:
        orders = (Endianness.BIG, Endianness.LITTLE) if s > 1 else (Endianness.BIG,)
        for p in range(0, n - s + 1):
            for e in orders:
                v = read_field(data, p, s, e)
                if v == 0 or v > n:
                    continue
                delta = probe_delta(s, v)
                if delta < 1 or v + delta >= 1 << (8 * s):
                    continue
                candidates.append(CandidateField(p=p, s=s, e=e, v=v, delta=delta))
    return candidates


def probe_input(data: bytes, c: CandidateField) -> bytes:
    return write_field(data, c.p, c.s, c.e, c.v + c.delta)


def destructive_probe(
    data: bytes,
    c: CandidateField,
    executor: Executor,
    cfg: AnalysisConfig,
    baseline: Optional[CoverageSet] = None,
) -> Optional[FrozenSet[int]]:
    """
    Bump the candidate's value and check whether coverage collapses.

    The probe writes raw bytes; no known relation is re-serialized.

    Args:
        data: Original input
        c: Candidate field
        executor: Target executor
        cfg: Analysis configuration
        baseline: Coverage of data, executed here if omitted

    Returns:
        The lost feature set if the probe is destructive, else None

    Raises:
        NoBaselineCoverageError: If the original input covers nothing
        TargetError: If the target fails on the probe
    """
    if baseline is None:
        baseline = executor.execute(data)
    mutated = executor.execute(probe_input(data, c))
    if not is_destructive(baseline, mutated, cfg.thresholds):
        return None
    return frozenset(baseline) - mutated


# =====================================================================
# RESTORATION
# =====================================================================

def anchor_starts(c: CandidateField, known: Sequence[RelationField]) -> List[int]:
    """Span starts to try, in priority order, without duplicates."""
    starts = [c.p + c.s, c.p, 0]
    for r in known:
        starts.extend((r.p, r.a, r.b))
    return list(dict.fromkeys(starts))


def measure_restoration(
    probe_data: bytes,
    c: CandidateField,
    start: int,
    known: Sequence[RelationField],
    executor: Executor,
    filler: int = 0,
) -> Optional[CoverageSet]:
    """
    Execute the restoring mutant for one span start.

    Inserts c.delta filler bytes at start + c.v through structured insert so
    known relations are fixed up. Known relations whose field bytes overlap
    the candidate's are not fixed up.

    Returns:
        Coverage of the restoring mutant, or None if start + v is past the end
    """
    at = start + c.v
    if at > len(probe_data):
        return None
    fixups = tuple(
        r for r in known
        if not r.overlaps_field(c.p, c.p + c.s) and r.fits(len(probe_data))
    )
    s = StructuredInput.of(probe_data, fixups)
    s = apply(s, MutationOp.insert(at, bytes([filler]) * c.delta))
    return executor.execute(commit(s))


def find_insertion_point(
    data: bytes,
    c: CandidateField,
    lost: FrozenSet[int],
    known: Sequence[RelationField],
    executor: Executor,
    cfg: AnalysisConfig,
) -> Optional[InsertionResult]:
    """
    Search the anchor starts for the insertion that restores the most coverage.

    Args:
        data: Original input
        c: Candidate whose probe was destructive
        lost: Features the probe lost
        known: Relations accepted in earlier rounds, in discovery order
        executor: Target executor
        cfg: Analysis configuration

    Returns:
        Relation over [start, start+v) for the best restoring start, ties
        going to the earlier start, or None if no start restores enough

    Raises:
        BudgetExceededError: If the executor budget runs out mid-search
    """
    probe_data = probe_input(data, c)
    best: Optional[InsertionResult] = None
    for start in anchor_starts(c, known):
        restored = measure_restoration(probe_data, c, start, known, executor, cfg.filler)
        if restored is None:
            continue
        # lost stands in for baseline - mutated
        if not is_restorative(lost, frozenset(), restored, cfg.thresholds):
            continue
        amount = restored_amount(lost, frozenset(), restored)
        if best is None or amount > best.restored:
            relation = RelationField(a=start, b=start + c.v, p=c.p, s=c.s, e=c.e)
            best = InsertionResult(relation, amount)
    return best


# =====================================================================
# ANALYSIS
# =====================================================================

class RelationAnalyzer:
    """One analysis run over a single input."""

    def __init__(self, data: bytes, executor: Executor, cfg: AnalysisConfig):
        self.data = bytes(data)
        self.cfg = cfg
        self.executor = BudgetedExecutor(executor, cfg.max_invocations)
        self.findings: List[RelationFinding] = []
        self.lost_cache: Dict[CandidateField, Optional[FrozenSet[int]]] = {}
        self.rounds = 0

    def _deduplicated(self, c: CandidateField) -> bool:
        return any(
            f.relation.s > c.s and f.relation.p <= c.p and c.p + c.s <= f.relation.p + f.relation.s
            for f in self.findings
        )

    def _accept(self, result: InsertionResult) -> bool:
        relation = result.relation
        for i, f in enumerate(self.findings):
            other = f.relation
            if (other.p, other.s, other.a, other.b) == (relation.p, relation.s, relation.a, relation.b):
                if result.restored > f.restored:
                    self.findings[i] = RelationFinding(relation, self.rounds, result.restored)
                    logger.debug("relation endianness replaced", p=relation.p, e=relation.e.value)
                return False
        self.findings.append(RelationFinding(relation, self.rounds, result.restored))
        logger.info(
            "relation accepted",
            p=relation.p, s=relation.s, e=relation.e.value, a=relation.a, b=relation.b,
            form=classify_form(relation, len(self.data)).value, round=self.rounds,
            restored=result.restored,
        )
        return True

    def _examine(self, c: CandidateField, baseline: CoverageSet, known) -> Optional[bool]:
        """Run one candidate: None = never retry, False = retry if known grows, True = new relation."""
        if c not in self.lost_cache:
            self.lost_cache[c] = destructive_probe(self.data, c, self.executor, self.cfg, baseline)
        lost = self.lost_cache[c]
        if lost is None:
            return None
        result = find_insertion_point(self.data, c, lost, known, self.executor, self.cfg)
        if result is None:
            return False
        # a duplicate relation leaves the known set as it was
        return True if self._accept(result) else None

    def run(self) -> AnalysisReport:
        started = time.perf_counter()
        baseline = self.executor.execute(self.data)
        if not baseline:
            raise NoBaselineCoverageError("baseline execution covered no features")

        candidates = scan_candidates(self.data, self.cfg)
        pending = list(candidates)
        try:
            for rnd in range(1, self.cfg.max_rounds + 1):
                self.rounds = rnd
                known = tuple(f.relation for f in self.findings)
                retry: List[CandidateField] = []
                grew = False
                for c in pending:
                    if self._deduplicated(c):
                        continue
                    try:
                        outcome = self._examine(c, baseline, known)
                    except TargetError as e:
                        logger.warning("candidate skipped after target error", p=c.p, s=c.s, error=str(e))
                        continue
                    if outcome is False:
                        retry.append(c)
                    grew = grew or outcome is True
                if not grew or not retry:
                    break
                pending = retry
        except BudgetExceededError:
            logger.warning("analysis budget exhausted", invocations=self.executor.calls)

        report = AnalysisReport(
            findings=tuple(self.findings),
            invocations=self.executor.calls,
            elapsed_ms=int((time.perf_counter() - started) * 1000),
            rejected=len(candidates) - len(self.findings),
            rounds=self.rounds,
        )
        logger.info(
            "analysis finished",
            relations=len(report.findings), invocations=report.invocations,
            rounds=report.rounds, elapsed_ms=report.elapsed_ms,
        )
        return report


def analyze(data: bytes, executor: Executor, cfg: AnalysisConfig) -> AnalysisReport:
    """
    Discover the relation fields of one input.

    Args:
        data: Input bytes
        executor: Target executor
        cfg: Analysis configuration

    Returns:
        AnalysisReport; inputs longer than cfg.max_input_len are skipped

    Raises:
        NoBaselineCoverageError: If the input covers no features
        TargetError: If the target fails on the unmodified input
    """
    if len(data) > cfg.max_input_len:
        logger.info("analysis skipped", length=len(data), max_input_len=cfg.max_input_len)
        return AnalysisReport(skipped=True)
    return RelationAnalyzer(data, executor, cfg).run()
