"""
Tests for relation inference: candidate scan, probes, insertion search and
the round-based analysis on every toy target.
"""

import random

import pytest

from relfuzz.config import AnalysisConfig
from relfuzz.errors import NoBaselineCoverageError
from relfuzz.models import CandidateField, Endianness, RelationField, RelationForm
from relfuzz.services import inference
from relfuzz.services.inference import (
    BudgetedExecutor, InsertionResult, analyze, anchor_starts, destructive_probe, find_insertion_point,
    measure_restoration, probe_delta, probe_input, scan_candidates,
)
from relfuzz.services.relations import classify_form
from tests.oracles import exhaustive_restoring_starts

MAX_INVOCATIONS = 20_000


class Blank:
    """Executor that never covers anything."""

    def execute(self, data):
        return frozenset()


class OnlyAccepts:
    """Executor that fails on every input except one."""

    def __init__(self, target, accepted):
        self.target = target
        self.accepted = accepted

    def execute(self, data):
        if data != self.accepted:
            raise RuntimeError("unexpected input")
        return self.target.execute(data)


def by_field(report):
    return {(f.relation.p, f.relation.s): f for f in report.findings}


# ============================================================================
# Test candidates and probes
# ============================================================================


class TestProbeDelta:
    """Test the probe increment."""

    @pytest.mark.parametrize("s,v,expected", [(4, 47, 0xFF), (2, 3, 0xFF), (1, 10, 0x20), (1, 0xF0, 0x0F), (1, 0xFF, 0)])
    def test_values(self, s, v, expected):
        assert probe_delta(s, v) == expected


class TestScanCandidates:
    """Test candidate enumeration and pruning."""

    def test_all_zero_input(self, analysis_cfg):
        assert scan_candidates(bytes(32), analysis_cfg) == []

    def test_order_is_wide_to_narrow(self, analysis_cfg):
        data = bytes([5]) + bytes(9)
        assert scan_candidates(data, analysis_cfg) == [
            CandidateField(p=0, s=8, e=Endianness.LITTLE, v=5, delta=0xFF),
            CandidateField(p=0, s=4, e=Endianness.LITTLE, v=5, delta=0xFF),
            CandidateField(p=0, s=2, e=Endianness.LITTLE, v=5, delta=0xFF),
            CandidateField(p=0, s=1, e=Endianness.BIG, v=5, delta=0x20),
        ]

    def test_values_above_length_pruned(self, analysis_cfg):
        assert scan_candidates(bytes([0, 0, 0, 200]), analysis_cfg) == []

    def test_single_bytes_scanned_big_endian_only(self, analysis_cfg):
        singles = [c for c in scan_candidates(bytes([3, 0, 0, 0]), analysis_cfg) if c.s == 1]
        assert [c.e for c in singles] == [Endianness.BIG]

    def test_nestedcmd_total_size_candidate(self, nestedcmd, analysis_cfg):
        candidates = scan_candidates(nestedcmd.seed(), analysis_cfg)
        assert CandidateField(p=2, s=4, e=Endianness.BIG, v=47, delta=0xFF) in candidates


class TestDestructiveProbe:
    """Test the first half of the double-mutant experiment."""

    def test_total_size_probe_destroys(self, nestedcmd, analysis_cfg):
        c = CandidateField(p=2, s=4, e=Endianness.BIG, v=47, delta=0xFF)
        lost = destructive_probe(nestedcmd.seed(), c, nestedcmd, analysis_cfg)
        assert lost is not None
        assert nestedcmd.features("chk1_pass", "chk3_pass", "handler_event") <= lost

    def test_payload_byte_probe_is_harmless(self, nestedcmd, analysis_cfg):
        seed = nestedcmd.seed()
        c = CandidateField(p=40, s=1, e=Endianness.BIG, v=seed[40], delta=probe_delta(1, seed[40]))
        assert destructive_probe(seed, c, nestedcmd, analysis_cfg) is None

    def test_probe_writes_raw_value(self, nestedcmd):
        c = CandidateField(p=2, s=4, e=Endianness.BIG, v=47, delta=0xFF)
        assert probe_input(nestedcmd.seed(), c)[2:6] == (47 + 0xFF).to_bytes(4, "big")

    def test_empty_baseline_raises(self, analysis_cfg):
        c = CandidateField(p=0, s=1, e=Endianness.BIG, v=1, delta=0x20)
        with pytest.raises(NoBaselineCoverageError):
            destructive_probe(b"\x01\x00", c, Blank(), analysis_cfg)


# ============================================================================
# Test insertion search
# ============================================================================


class TestAnchorStarts:
    """Test anchor priority and de-duplication."""

    def test_without_known_relations(self):
        c = CandidateField(p=14, s=4, e=Endianness.BIG, v=9, delta=0xFF)
        assert anchor_starts(c, ()) == [18, 14, 0]

    def test_known_relations_appended_in_order(self):
        c = CandidateField(p=27, s=2, e=Endianness.BIG, v=18, delta=0xFF)
        known = (RelationField(a=0, b=47, p=2, s=4),)
        assert anchor_starts(c, known) == [29, 27, 0, 2, 47]


class TestFindInsertionPoint:
    """Test the restoring half of the double-mutant experiment."""

    def test_total_size_restored_at_zero(self, nestedcmd, analysis_cfg):
        seed = nestedcmd.seed()
        c = CandidateField(p=2, s=4, e=Endianness.BIG, v=47, delta=0xFF)
        lost = destructive_probe(seed, c, nestedcmd, analysis_cfg)
        result = find_insertion_point(seed, c, lost, (), nestedcmd, analysis_cfg)
        assert result.relation == RelationField(a=0, b=47, p=2, s=4)
        # the event size still disagrees with the grown input, so chk3 stays lost
        assert result.restored == len(nestedcmd.features("chk1_pass", "code_event", "chk2_pass"))

    def test_fixed_size_chunk_never_restores(self, chunks, analysis_cfg):
        seed = chunks.seed()
        c = CandidateField(p=8, s=4, e=Endianness.BIG, v=8, delta=0xFF)
        lost = destructive_probe(seed, c, chunks, analysis_cfg)
        assert lost is not None
        assert find_insertion_point(seed, c, lost, (), chunks, analysis_cfg) is None

    def test_start_past_end_skipped(self, nestedcmd):
        c = CandidateField(p=2, s=4, e=Endianness.BIG, v=47, delta=0xFF)
        probe = probe_input(nestedcmd.seed(), c)
        assert measure_restoration(probe, c, 1, (), nestedcmd) is None
        assert measure_restoration(probe, c, 0, (), nestedcmd) is not None


# ============================================================================
# Test analyze on the toy targets
# ============================================================================


class TestAnalyzeGroundTruth:
    """Recovery of the relations each toy seed is built with."""

    def test_nestedcmd_exact(self, nestedcmd, analysis_cfg):
        report = analyze(nestedcmd.seed(), nestedcmd, analysis_cfg)
        assert len(report.relations) == 3
        assert set(report.relations) == set(nestedcmd.ground_truth())
        forms = {(r.p, classify_form(r, 47)) for r in report.relations}
        assert forms == {
            (2, RelationForm.SIZE_TOTAL_E),
            (14, RelationForm.SIZE_POST_B),
            (27, RelationForm.SIZE_POST_B),
        }
        assert by_field(report)[(2, 4)].round == 1
        assert report.invocations <= MAX_INVOCATIONS

    def test_chunks_variable_size_only(self, chunks, analysis_cfg):
        report = analyze(chunks.seed(), chunks, analysis_cfg)
        assert set(report.relations) == set(chunks.ground_truth())
        assert not [r for r in report.relations if 8 <= r.p < 12]
        assert not [r for r in report.relations if 52 <= r.p < 56]

    def test_tlv_every_length(self, tlv, analysis_cfg):
        report = analyze(tlv.seed(), tlv, analysis_cfg)
        assert set(report.relations) == set(tlv.ground_truth())
        assert by_field(report)[(2, 2)].round == 1

    def test_objfile_offsets_before_sizes(self, objfile, analysis_cfg):
        report = analyze(objfile.seed(), objfile, analysis_cfg)
        assert set(report.relations) == set(objfile.ground_truth())
        found = by_field(report)
        table, offset0, offset1 = found[(6, 4)], found[(23, 4)], found[(31, 4)]
        size0, size1 = found[(27, 4)], found[(35, 4)]
        assert classify_form(table.relation, 39) == RelationForm.OFFSET_A
        assert classify_form(size0.relation, 39) == RelationForm.SIZE_INDIRECT_D
        assert table.round < offset0.round < size0.round
        assert table.round < offset1.round < size1.round

    def test_budget_respected(self, toy_target, analysis_cfg):
        report = analyze(toy_target.seed(), toy_target, analysis_cfg)
        assert report.invocations <= MAX_INVOCATIONS
        assert report.rejected >= 0


class TestAnalyzeEdgeCases:
    """Inputs without metadata, budgets and failing targets."""

    def test_echo_finds_nothing(self, echo, analysis_cfg):
        data = random.Random(5).randbytes(64)
        report = analyze(data, echo, analysis_cfg)
        assert report.relations == ()
        assert report.invocations < MAX_INVOCATIONS // 10

    def test_deterministic(self, objfile, analysis_cfg):
        first = analyze(objfile.seed(), objfile, analysis_cfg)
        second = analyze(objfile.seed(), objfile, analysis_cfg)
        assert first.findings == second.findings
        assert (first.invocations, first.rejected, first.rounds) == (
            second.invocations, second.rejected, second.rounds,
        )

    def test_partial_result_when_budget_runs_out(self, nestedcmd):
        cfg = AnalysisConfig(max_invocations=5)
        report = analyze(nestedcmd.seed(), nestedcmd, cfg)
        assert report.invocations == 5

    def test_long_input_skipped(self, nestedcmd):
        report = analyze(nestedcmd.seed(), nestedcmd, AnalysisConfig(max_input_len=10))
        assert report.skipped is True
        assert report.relations == ()
        assert report.invocations == 0

    def test_no_baseline_raises(self, analysis_cfg):
        with pytest.raises(NoBaselineCoverageError):
            analyze(b"\x01\x02", Blank(), analysis_cfg)

    def test_target_errors_skip_candidates(self, nestedcmd, analysis_cfg):
        seed = nestedcmd.seed()
        report = analyze(seed, OnlyAccepts(nestedcmd, seed), analysis_cfg)
        assert report.relations == ()
        assert report.invocations > 1

    def test_budgeted_executor_counts(self, echo):
        executor = BudgetedExecutor(echo, 2)
        executor.execute(b"a")
        executor.execute(b"b")
        assert executor.remaining == 0


# ============================================================================
# Test round scheduling
# ============================================================================


class TestAnalysisRounds:
    """Failed candidates are retried only after a new relation joins the known set."""

    def test_duplicate_relation_does_not_start_another_round(self, nestedcmd, analysis_cfg, monkeypatch):
        relation = RelationField(a=1, b=5, p=0, s=1)
        late_duplicate, accepted, never = (
            CandidateField(p=p, s=1, e=Endianness.BIG, v=4, delta=0x20) for p in (10, 20, 30)
        )

        def scripted_search(data, c, lost, known, executor, cfg):
            if c == accepted:
                return InsertionResult(relation, 3)
            if c == late_duplicate and known:
                return InsertionResult(relation, 2)
            return None

        monkeypatch.setattr(inference, "scan_candidates", lambda data, cfg: [late_duplicate, accepted, never])
        monkeypatch.setattr(inference, "destructive_probe", lambda *args: frozenset({0}))
        monkeypatch.setattr(inference, "find_insertion_point", scripted_search)

        report = analyze(nestedcmd.seed(), nestedcmd, analysis_cfg)
        assert report.rounds == 2
        assert report.relations == (relation,)
        assert report.findings[0].restored == 3


# ============================================================================
# Test against the exhaustive insertion oracle
# ============================================================================


class TestExhaustiveOracle:
    """Every accepted relation is also accepted when all span starts are tried."""

    def test_heuristic_agrees_with_exhaustive_scan(self, toy_target, analysis_cfg):
        seed = toy_target.seed()
        report = analyze(seed, toy_target, analysis_cfg)
        assert report.findings
        for finding in report.findings:
            known = tuple(f.relation for f in report.findings if f.round < finding.round)
            starts = exhaustive_restoring_starts(seed, finding.relation, known, toy_target, analysis_cfg)
            assert starts is not None
            assert finding.relation.a in starts
            assert starts[finding.relation.a] == finding.restored
            best = max(starts.values())
            anchors = set(anchor_starts_for(finding.relation, known))
            if any(starts[a] == best for a in anchors if a in starts):
                assert finding.restored == best


def anchor_starts_for(relation, known):
    v = relation.length
    c = CandidateField(p=relation.p, s=relation.s, e=relation.e, v=v, delta=probe_delta(relation.s, v))
    return anchor_starts(c, known)
