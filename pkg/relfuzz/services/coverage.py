"""Coverage feedback predicates.

Coverage is a set of opaque feature ids; hit counts are not modelled.
Threshold comparisons are done on integers by cross-multiplying with the
exact rational value of each threshold, so boundaries are inclusive and
free of float rounding.
"""

from typing import AbstractSet, FrozenSet

from relfuzz.config import AnalysisThresholds
from relfuzz.errors import NoBaselineCoverageError, NothingToRestoreError


def lost_features(orig: AbstractSet[int], mutated: AbstractSet[int]) -> FrozenSet[int]:
    """Features covered by orig but not by mutated."""
    return frozenset(orig) - frozenset(mutated)


def is_destructive(
    orig: AbstractSet[int],
    mutated: AbstractSet[int],
    th: AnalysisThresholds,
) -> bool:
    """
    Check whether a mutant lost at least t_loss of the original coverage.

    Args:
        orig: Coverage of the unmodified input
        mutated: Coverage of the probe mutant
        th: Analysis thresholds

    Returns:
        True iff |orig - mutated| >= t_loss * |orig|

    Raises:
        NoBaselineCoverageError: If orig is empty
    """
    if not orig:
        raise NoBaselineCoverageError("original input covers no features")
    lost = len(lost_features(orig, mutated))
    frac = th.loss_fraction
    return lost * frac.denominator >= frac.numerator * len(orig)


def is_restorative(
    orig: AbstractSet[int],
    mutated: AbstractSet[int],
    restored: AbstractSet[int],
    th: AnalysisThresholds,
) -> bool:
    """
    Check whether a second mutant recovered at least t_restore of the lost features.

    Args:
        orig: Coverage of the unmodified input
        mutated: Coverage of the destructive mutant
        restored: Coverage of the restoring mutant
        th: Analysis thresholds

    Returns:
        True iff |restored & lost| >= t_restore * |lost|

    Raises:
        NothingToRestoreError: If the destructive mutant lost nothing
    """
    lost = lost_features(orig, mutated)
    if not lost:
        raise NothingToRestoreError("destructive mutant lost no features")
    recovered = len(lost & frozenset(restored))
    frac = th.restore_fraction
    return recovered * frac.denominator >= frac.numerator * len(lost)


def restored_amount(
    orig: AbstractSet[int],
    mutated: AbstractSet[int],
    restored: AbstractSet[int],
) -> int:
    """Number of lost features the restoring mutant covers again."""
    return len(lost_features(orig, mutated) & frozenset(restored))
