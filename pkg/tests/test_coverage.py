"""
Tests for the coverage feedback predicates.

Boundary cases are inclusive on both thresholds and must hold exactly,
with no floating point slack.
"""

import random

import pytest

from relfuzz.config import AnalysisThresholds
from relfuzz.errors import NoBaselineCoverageError, NothingToRestoreError
from relfuzz.services.coverage import is_destructive, is_restorative, lost_features, restored_amount
from tests.oracles import destructive_oracle, restorative_oracle

# ============================================================================
# Test lost_features
# ============================================================================


class TestLostFeatures:
    """Test the set difference of original and mutated coverage."""

    def test_difference(self):
        assert lost_features({1, 2, 3, 4}, {3, 4, 5}) == frozenset({1, 2})

    def test_empty_original(self):
        assert lost_features(set(), {1}) == frozenset()

    def test_identical(self):
        assert lost_features({7}, {7}) == frozenset()


# ============================================================================
# Test is_destructive
# ============================================================================


class TestIsDestructive:
    """Test the loss predicate."""

    def test_boundary_is_inclusive(self, thresholds):
        orig = set(range(40))
        mutated = orig - {0, 1}
        assert is_destructive(orig, mutated, thresholds) is True

    def test_below_threshold(self, thresholds):
        orig = set(range(100))
        mutated = orig - {0, 1, 2, 3}
        assert is_destructive(orig, mutated, thresholds) is False

    def test_total_loss(self, thresholds):
        assert is_destructive(set(range(100)), set(), thresholds) is True

    def test_empty_baseline_raises(self, thresholds):
        with pytest.raises(NoBaselineCoverageError) as exc:
            is_destructive(set(), {1}, thresholds)
        assert exc.value.code == "no-baseline-coverage"

    def test_gained_features_do_not_count(self, thresholds):
        orig = set(range(20))
        assert is_destructive(orig, orig | {100, 101, 102}, thresholds) is False

    def test_monotone_in_lost_set(self, thresholds):
        orig = set(range(60))
        results = [is_destructive(orig, orig - set(range(k)), thresholds) for k in range(61)]
        first_true = results.index(True)
        assert all(results[first_true:])
        assert first_true == 3


# ============================================================================
# Test is_restorative / restored_amount
# ============================================================================


class TestIsRestorative:
    """Test the restoration predicate."""

    def test_boundary_is_inclusive(self, thresholds):
        orig = set(range(1, 11))
        assert is_restorative(orig, set(), {1, 2}, thresholds) is True

    def test_below_threshold(self, thresholds):
        orig = set(range(1, 11))
        assert is_restorative(orig, set(), {1}, thresholds) is False

    def test_single_lost_feature(self, thresholds):
        assert is_restorative({5, 6}, {6}, {5, 6, 9}, thresholds) is True

    def test_nothing_lost_raises(self, thresholds):
        with pytest.raises(NothingToRestoreError) as exc:
            is_restorative({1, 2}, {1, 2}, {1, 2}, thresholds)
        assert exc.value.code == "nothing-to-restore"

    def test_restored_amount_examples(self):
        assert restored_amount({1, 2, 3}, {3}, {1, 3}) == 1
        assert restored_amount({1, 2, 3}, {1, 2, 3}, set()) == 0
        assert restored_amount({1, 2}, set(), {1, 2}) == 2


# ============================================================================
# Test against the set-arithmetic oracle
# ============================================================================


class TestPredicateOracle:
    """Randomised comparison with exact rational arithmetic."""

    THRESHOLDS = (0.05, 0.2, 0.1, 0.25, 0.5, 1.0, 0.3333)

    def test_random_cases_match_oracle(self):
        rng = random.Random(1234)
        mismatches = []
        for case in range(10_000):
            t_loss = rng.choice(self.THRESHOLDS)
            t_restore = rng.choice(self.THRESHOLDS)
            th = AnalysisThresholds(t_loss=t_loss, t_restore=t_restore)
            universe = range(rng.randint(1, 60))
            orig = {f for f in universe if rng.random() < 0.7} or {0}
            mutated = {f for f in universe if rng.random() < 0.6}
            restored = {f for f in universe if rng.random() < 0.5}

            if is_destructive(orig, mutated, th) != destructive_oracle(orig, mutated, t_loss):
                mismatches.append((case, "destructive"))
            if orig - mutated:
                got = is_restorative(orig, mutated, restored, th)
                if got != restorative_oracle(orig, mutated, restored, t_restore):
                    mismatches.append((case, "restorative"))
        assert mismatches == []

    def test_exact_boundaries_match_oracle(self):
        th = AnalysisThresholds(t_loss=0.05, t_restore=0.2)
        for size in range(1, 201):
            orig = set(range(size))
            for lost in range(size + 1):
                mutated = set(range(lost, size))
                assert is_destructive(orig, mutated, th) == destructive_oracle(orig, mutated, 0.05)
