"""Tests for the newly-sized corpus report and the annotated hexdump."""

from relfuzz.models import CorpusEntry, MutationOp, RelationField, StructuredInput
from relfuzz.services.mutation import apply, commit
from relfuzz.services.reporting import build_corpus_report, is_newly_sized, render_hexdump, render_report_table

HEX_WIDTH = 47
GUTTER = " " * 10


def entry(target, entry_id, data):
    return CorpusEntry(id=entry_id, data=data, coverage=target.execute(data))


def resized_command(nestedcmd, k=24):
    s = StructuredInput.of(nestedcmd.seed(), nestedcmd.ground_truth())
    return commit(apply(s, MutationOp.insert(40, b"x" * k)))


# ============================================================================
# Test newly sized report
# ============================================================================


class TestIsNewlySized:
    """Test the governing-field comparison."""

    def test_any_difference(self):
        assert is_newly_sized({"a": 1, "b": 3}, {"a": 1, "b": 2}, ("a", "b"))

    def test_same_values(self):
        assert not is_newly_sized({"a": 1}, {"a": 1}, ("a",))

    def test_ungoverned_difference_ignored(self):
        assert not is_newly_sized({"a": 1, "c": 9}, {"a": 1, "c": 0}, ("a",))

    def test_unread_field_ignored(self):
        assert not is_newly_sized({}, {"a": 1}, ("a",))


class TestCorpusReport:
    """Test per-checkpoint counting."""

    def test_seed_only(self, nestedcmd):
        report = build_corpus_report(nestedcmd, [entry(nestedcmd, 1, nestedcmd.seed())], {})
        rows = {r.checkpoint: (r.covered, r.newly_sized) for r in report.checkpoints}
        assert rows == {"chk1_pass": (1, 0), "chk2_pass": (1, 0), "chk3_pass": (1, 0)}

    def test_resized_entry_counts(self, nestedcmd):
        entries = [entry(nestedcmd, 1, nestedcmd.seed()), entry(nestedcmd, 2, resized_command(nestedcmd))]
        report = build_corpus_report(nestedcmd, entries, {"target": "nestedcmd"})
        rows = {r.checkpoint: (r.covered, r.newly_sized) for r in report.checkpoints}
        assert rows["chk3_pass"] == (2, 1)
        assert report.entries == 2
        assert report.config == {"target": "nestedcmd"}

    def test_failing_entry_not_counted(self, nestedcmd):
        broken = nestedcmd.seed() + b"tail"
        report = build_corpus_report(nestedcmd, [entry(nestedcmd, 1, broken)], {})
        assert all(r.covered == 0 for r in report.checkpoints)

    def test_empty_corpus(self, objfile):
        report = build_corpus_report(objfile, [], {})
        assert [r.checkpoint for r in report.checkpoints] == list(objfile.PASS_CHECKPOINTS)
        assert all(r.covered == 0 and r.newly_sized == 0 for r in report.checkpoints)

    def test_table(self, nestedcmd):
        report = build_corpus_report(nestedcmd, [entry(nestedcmd, 1, nestedcmd.seed())], {})
        table = render_report_table(report)
        assert table.splitlines()[0] == "target: nestedcmd   entries: 1"
        assert "newly_sized" in table.splitlines()[1]
        assert table.splitlines()[4].split() == ["chk3_pass", "1", "0"]


# ============================================================================
# Test hexdump
# ============================================================================


class TestHexdump:
    """Test the annotated hexdump layout."""

    def test_single_row(self):
        data = bytes([0x00, 0x03]) + b"abc"
        relation = RelationField(a=2, b=5, p=0, s=2)
        expected = (
            "00000000  " + "00 03 61 62 63".ljust(HEX_WIDTH) + "  |..abc|\n"
            + GUTTER + "^^ ^^ ~~ ~~ ~~".ljust(HEX_WIDTH) + "  R0 p=0 s=2 e=big [2,5) size_post_B\n"
        )
        assert render_hexdump(data, [relation]) == expected

    def test_lanes_only_under_touched_rows(self):
        data = bytes(16) + bytes([3]) + b"xyz"
        relation = RelationField(a=17, b=20, p=16, s=1)
        lines = render_hexdump(data, [relation]).splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("00000000  00 00")
        assert lines[1].startswith("00000010  03 78 79 7a")
        assert lines[2] == GUTTER + "^^ ~~ ~~ ~~".ljust(HEX_WIDTH) + "  R0 p=16 s=1 e=big [17,20) size_post_B"

    def test_one_lane_per_relation(self, nestedcmd):
        dump = render_hexdump(nestedcmd.seed(), nestedcmd.ground_truth())
        labels = [line.split("  ")[-1] for line in dump.splitlines() if line.startswith(GUTTER)]
        assert any(label.startswith("R0 p=2 s=4") and label.endswith("size_total_E") for label in labels)
        assert any(label.startswith("R2 p=27 s=2") for label in labels)

    def test_stable(self, tlv):
        assert render_hexdump(tlv.seed(), tlv.ground_truth()) == render_hexdump(tlv.seed(), tlv.ground_truth())

    def test_no_frameshift(self):
        assert render_hexdump(b"AB", []) == "00000000  " + "41 42".ljust(HEX_WIDTH) + "  |AB|\n"
