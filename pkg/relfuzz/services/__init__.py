"""Services package - analysis and mutation logic."""

from relfuzz.services.coverage import is_destructive, is_restorative, lost_features, restored_amount
from relfuzz.services.inference import analyze, find_insertion_point, measure_restoration, scan_candidates
from relfuzz.services.mutation import apply, apply_all, check_compatibility, commit, on_insert, on_remove
from relfuzz.services.relations import classify_form, read_field, write_field

__all__ = [
    "analyze",
    "apply",
    "apply_all",
    "check_compatibility",
    "classify_form",
    "commit",
    "find_insertion_point",
    "is_destructive",
    "is_restorative",
    "lost_features",
    "measure_restoration",
    "on_insert",
    "on_remove",
    "read_field",
    "restored_amount",
    "scan_candidates",
    "write_field",
]
